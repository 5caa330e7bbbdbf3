#include "fracrd/eigen.hpp"

#include "fracrd/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

namespace fracrd {

namespace {

void rescale_to_unit_integral(EigenPair& ep) {
    ep.raw_integral = ep.e1.integral();
    if (!(ep.raw_integral > 0.0)) {
        throw NumericError("eigenpair: iterate has nonpositive integral", ep.raw_integral);
    }
    for (auto& v : ep.e1.values) {
        v /= ep.raw_integral;
    }
}

double p_norm_power(const std::vector<double>& u, double p) {
    double acc = 0.0;
    for (double v : u) {
        acc += std::pow(std::fabs(v), p);
    }
    return acc;
}

}  // namespace

void EigenPair::write_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "lambda1," << lambda1 << '\n';
    os.precision(old);
    e1.write_csv(os);
}

OperatorParams eigen_operator_params(const Grid& grid, double s, double p) {
    OperatorParams op;
    op.s = s;
    op.p = p;
    op.tail_mode = grid.dim == 1 ? TailMode::analytic_1d : TailMode::numeric;
    op.singular_mode = SingularMode::skip_diagonal;
    op.validate(grid.dim);
    return op;
}

EigenPair first_eigenpair_linear(const Grid& grid, double s) {
    grid.validate();
    const FracPLaplacian L(grid, eigen_operator_params(grid, s, 2.0));
    const Eigen::MatrixXd A = L.matrix();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
        throw NumericError("first_eigenpair_linear: factorization failed", 0.0);
    }
    Eigen::VectorXd x = Eigen::VectorXd::Ones(A.rows());
    x.normalize();
    double lambda = x.dot(A * x);
    double residual = 0.0;
    const int max_iterations = 500;
    int it = 0;
    for (; it < max_iterations; ++it) {
        Eigen::VectorXd y = ldlt.solve(x);
        y.normalize();
        const Eigen::VectorXd Ay = A * y;
        const double next = y.dot(Ay);
        residual = (Ay - next * y).norm();
        const bool settled = std::fabs(next - lambda) <= 1e-10 * std::max(1.0, std::fabs(next));
        x = y;
        lambda = next;
        if (settled && residual <= 1e-10 * std::max(1.0, std::fabs(lambda))) {
            break;
        }
    }
    if (it == max_iterations) {
        throw NumericError("first_eigenpair_linear: inverse iteration stagnated", residual);
    }
    if (x.sum() < 0.0) {
        x = -x;
    }
    EigenPair ep;
    ep.lambda1 = lambda;
    ep.e1 = Field(grid, std::vector<double>(x.data(), x.data() + x.size()));
    ep.method = "inverse power iteration (LDLT)";
    ep.iterations = it + 1;
    ep.residual = residual;
    rescale_to_unit_integral(ep);
    return ep;
}

EigenPair first_eigenpair_plap(const Grid& grid, double s, double p, int max_iters,
                               double step_size, double initial_level) {
    grid.validate();
    if (!(p > 1.0)) {
        throw ParameterError("first_eigenpair_plap: p must exceed 1");
    }
    if (max_iters < 1 || !(initial_level > 0.0)) {
        throw ParameterError("first_eigenpair_plap: need max_iters >= 1 and a positive start");
    }
    FracPLaplacian L(grid, eigen_operator_params(grid, s, p));
    const std::size_t N = grid.size();
    std::vector<double> Lu(N), trial(N), trial_Lu(N);

    // With the zero extension, sum_i u_i (L u)_i = (1/2)[u]^p over the whole
    // space, so the quotient is computed from the operator directly.
    auto quotient = [&](const std::vector<double>& u, std::vector<double>& out) {
        L.apply(u, out);
        double num = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            num += u[i] * out[i];
        }
        return num / p_norm_power(u, p);
    };
    auto normalize = [&](std::vector<double>& u) {
        const double scale = std::pow(p_norm_power(u, p), -1.0 / p);
        for (auto& v : u) {
            v *= scale;
        }
    };

    std::vector<double> u(N, initial_level);
    normalize(u);
    double Q = quotient(u, Lu);

    double tau = step_size;
    if (!(tau > 0.0)) {
        double dmax = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            dmax = std::max(dmax, L.tail()[i]);
        }
        // Largest diagonal of the p = 2 matrix bounds its spectrum by twice itself.
        std::vector<double> e(N, 0.0);
        std::vector<double> col(N);
        e[(N - 1) / 2] = 1.0;
        FracPLaplacian L2(grid, eigen_operator_params(grid, s, 2.0));
        L2.apply(e, col);
        tau = 1.0 / (2.0 * p * std::max(col[(N - 1) / 2], dmax));
    }
    const double tau_max = 64.0 * tau;

    std::deque<double> history{Q};
    double window_drop = 0.0;
    int it = 0;
    bool converged = false;
    for (; it < max_iters; ++it) {
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t i = 0; i < N; ++i) {
                const double g = Lu[i] - Q * phi_p(u[i], p);
                trial[i] = std::max(u[i] - tau * p * g, 0.0);
            }
            if (p_norm_power(trial, p) > 0.0) {
                normalize(trial);
                const double Qt = quotient(trial, trial_Lu);
                if (Qt <= Q) {
                    u.swap(trial);
                    Lu.swap(trial_Lu);
                    Q = Qt;
                    accepted = true;
                    tau = std::min(tau * 1.25, tau_max);
                    break;
                }
                if (Qt - Q <= 1e-14 * Q) {
                    // No representable descent left.
                    converged = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if (converged) {
            break;
        }
        if (!accepted) {
            throw NumericError("first_eigenpair_plap: backtracking exhausted without descent", Q);
        }
        history.push_back(Q);
        if (history.size() > 51) {
            history.pop_front();
        }
        if (history.size() == 51) {
            window_drop = history.front() - history.back();
            if (window_drop < 1e-10) {
                converged = true;
                ++it;
                break;
            }
        }
    }
    if (!converged) {
        throw NumericError("first_eigenpair_plap: no convergence within max_iters", window_drop);
    }
    EigenPair ep;
    ep.lambda1 = Q;
    ep.e1 = Field(grid, u);
    ep.method = "projected gradient on the Rayleigh quotient";
    ep.iterations = it;
    ep.residual = window_drop;
    rescale_to_unit_integral(ep);
    return ep;
}

}  // namespace fracrd
