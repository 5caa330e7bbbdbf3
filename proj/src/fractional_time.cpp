#include "fracrd/fractional_time.hpp"

#include "fracrd/errors.hpp"
#include "fracrd/special_functions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace fracrd {

namespace {

void require_order(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError(std::string(who) + ": alpha must lie in (0, 1)");
    }
}

// Root of u = G(u). Damped fixed point first, bisection on u - G(u) after.
double solve_fixed_point(const std::function<double(double)>& G, double guess, double tol,
                         int max_iterations) {
    double u = guess;
    double omega = 1.0;
    double previous_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
        const double g = G(u);
        if (!std::isfinite(g)) {
            break;
        }
        const double step = g - u;
        if (std::fabs(step) <= tol * std::max(1.0, std::fabs(u))) {
            return g;
        }
        if (std::fabs(step) > previous_step) {
            omega = 0.5;
        }
        previous_step = std::fabs(step);
        u += omega * step;
        if (!std::isfinite(u)) {
            break;
        }
    }

    auto F = [&](double x) { return x - G(x); };
    const double f0 = F(guess);
    if (f0 == 0.0) {
        return guess;
    }
    double lo = guess;
    double hi = guess;
    bool bracketed = false;
    double delta = 1e-3 * std::max(1.0, std::fabs(guess));
    bool up_alive = true;
    bool down_alive = true;
    for (int k = 0; k < 200 && !bracketed && (up_alive || down_alive); ++k, delta *= 2.0) {
        for (int side : {1, -1}) {
            bool& alive = side > 0 ? up_alive : down_alive;
            if (!alive) {
                continue;
            }
            const double x = guess + side * delta;
            const double fx = F(x);
            if (!std::isfinite(fx) || !std::isfinite(x)) {
                alive = false;
                continue;
            }
            if ((fx > 0.0) != (f0 > 0.0)) {
                lo = std::min(guess + side * delta / 2.0, x);
                hi = std::max(guess + side * delta / 2.0, x);
                if (k == 0) {
                    lo = std::min(guess, x);
                    hi = std::max(guess, x);
                }
                bracketed = true;
                break;
            }
        }
    }
    if (!bracketed) {
        throw NonlinearSolveError("implicit step: no fixed point could be bracketed", u,
                                  max_iterations, true);
    }
    double flo = F(lo);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if (fm == 0.0 || (hi - lo) <= tol * std::max(1.0, std::fabs(mid))) {
            return mid;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// sum_{j=from}^{n-1} b_j (u_{n-j} - u_{n-j-1})
double memory_sum(std::span<const double> u, int n, std::span<const double> b, int from) {
    double acc = 0.0;
    for (int j = from; j < n; ++j) {
        acc += b[j] * (u[n - j] - u[n - j - 1]);
    }
    return acc;
}

bool is_uniform(std::span<const double> t) {
    if (t.size() < 2) {
        return true;
    }
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) {
        return false;
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::fabs((t[i] - t[i - 1]) - dt) > 1e-9 * std::max(1.0, dt)) {
            return false;
        }
    }
    return std::fabs(t[0]) <= 1e-12;
}

}  // namespace

std::vector<double> l1_weights(double alpha, int n) {
    require_order(alpha, "l1_weights");
    if (n < 1) {
        throw ParameterError("l1_weights: n must be positive");
    }
    std::vector<double> b(n);
    const double e = 1.0 - alpha;
    for (int j = 0; j < n; ++j) {
        b[j] = std::pow(j + 1.0, e) - std::pow(static_cast<double>(j), e);
    }
    return b;
}

CaputoHistory::CaputoHistory(double alpha_, double dt_, std::vector<double> samples_)
    : alpha(alpha_), dt(dt_), samples(std::move(samples_)) {
    validate();
}

void CaputoHistory::validate() const {
    require_order(alpha, "CaputoHistory");
    if (!(dt > 0.0)) {
        throw ParameterError("CaputoHistory: dt must be positive");
    }
}

double caputo_l1(double alpha, double dt, std::span<const double> u,
                 std::span<const double> weights) {
    if (u.size() < 2) {
        throw StateError("caputo_l1: needs at least two samples");
    }
    const int n = static_cast<int>(u.size()) - 1;
    if (static_cast<int>(weights.size()) < n) {
        throw DataError("caputo_l1: too few weights");
    }
    return memory_sum(u, n, weights, 0) * std::pow(dt, -alpha) / std::tgamma(2.0 - alpha);
}

double caputo_l1(const CaputoHistory& h) {
    h.validate();
    if (h.samples.size() < 2) {
        throw StateError("caputo_l1: needs at least two samples");
    }
    const auto b = l1_weights(h.alpha, static_cast<int>(h.samples.size()) - 1);
    return caputo_l1(h.alpha, h.dt, h.samples, b);
}

KernelMoments rl_kernel(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("rl_kernel: alpha must lie in (0, 1]");
    }
    const double g1 = 1.0 / std::tgamma(alpha + 1.0);
    const double g2 = 1.0 / std::tgamma(alpha + 2.0);
    return {[=](double tau) { return std::pow(tau, alpha) * g1; },
            [=](double tau) { return std::pow(tau, alpha + 1.0) * g2; }};
}

KernelMoments ml_kernel(double alpha, double lambda) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("ml_kernel: alpha must lie in (0, 1]");
    }
    return {[=](double tau) {
                if (tau <= 0.0) {
                    return 0.0;
                }
                const double ta = std::pow(tau, alpha);
                return ta * mittag_leffler2(alpha, alpha + 1.0, lambda * ta);
            },
            [=](double tau) {
                if (tau <= 0.0) {
                    return 0.0;
                }
                const double ta = std::pow(tau, alpha);
                return ta * tau * mittag_leffler2(alpha, alpha + 2.0, lambda * ta);
            }};
}

LagWeights lag_weights(const KernelMoments& kernel, double dt, int max_lag) {
    if (!(dt > 0.0) || max_lag < 0) {
        throw ParameterError("lag_weights: needs dt > 0 and max_lag >= 0");
    }
    LagWeights w;
    w.near.assign(max_lag + 1, 0.0);
    w.far.assign(max_lag + 1, 0.0);
    double g1_prev = 0.0;
    double g2_prev = 0.0;
    for (int l = 1; l <= max_lag; ++l) {
        const double A = l * dt;
        const double g1 = kernel.first(A);
        const double g2 = kernel.second(A);
        const double i0 = g1 - g1_prev;
        const double i1 = g2 - g2_prev - dt * g1_prev;
        w.near[l] = i1 / dt;
        w.far[l] = i0 - i1 / dt;
        g1_prev = g1;
        g2_prev = g2;
    }
    return w;
}

std::vector<double> LagWeights::for_step(int n) const {
    if (n < 0 || n >= static_cast<int>(near.size())) {
        throw ParameterError("LagWeights: step beyond precomputed lags");
    }
    std::vector<double> out(n + 1, 0.0);
    for (int l = 1; l <= n; ++l) {
        out[n - l + 1] += near[l];
        out[n - l] += far[l];
    }
    return out;
}

double LagWeights::apply(std::span<const double> f, int n) const {
    if (n < 0 || n >= static_cast<int>(near.size()) || static_cast<int>(f.size()) <= n) {
        throw ParameterError("LagWeights: step beyond precomputed lags or data");
    }
    double acc = 0.0;
    for (int l = 1; l <= n; ++l) {
        acc += near[l] * f[n - l + 1] + far[l] * f[n - l];
    }
    return acc;
}

double rl_integral(double alpha, std::span<const double> samples, double dt) {
    require_order(alpha, "rl_integral");
    if (samples.empty()) {
        throw StateError("rl_integral: no samples");
    }
    const int n = static_cast<int>(samples.size()) - 1;
    return lag_weights(rl_kernel(alpha), dt, n).apply(samples, n);
}

void BoundCurve::write_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "t,value,formula_id\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i] << ',' << values[i] << ',' << formula_id << '\n';
    }
    os.precision(old);
}

BoundCurve solve_relaxation(double alpha, double w, double u0, std::span<const double> t_grid) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("solve_relaxation: alpha must lie in (0, 1]");
    }
    if (!(w > 0.0)) {
        throw ParameterError("solve_relaxation: w must be positive");
    }
    BoundCurve c;
    c.formula_id = "relaxation";
    c.formula = "u0*E_alpha(-w*t^alpha)";
    for (double t : t_grid) {
        if (!(t >= 0.0)) {
            throw ParameterError("solve_relaxation: negative time");
        }
        c.times.push_back(t);
        c.values.push_back(u0 * mittag_leffler(alpha, -w * std::pow(t, alpha)));
    }
    return c;
}

double step_scalar_implicit(double alpha, double dt, const CaputoHistory& history,
                            const ScalarRhs& rhs) {
    require_order(alpha, "step_scalar_implicit");
    if (!(dt > 0.0)) {
        throw ParameterError("step_scalar_implicit: dt must be positive");
    }
    if (history.samples.empty()) {
        throw StateError("step_scalar_implicit: empty history");
    }
    const auto& u = history.samples;
    const int n = static_cast<int>(u.size()) - 1;
    const auto b = l1_weights(alpha, n + 1);
    // sum_{j>=1} b_j (u_{n+1-j} - u_{n-j}), written over the shifted index.
    double hist = 0.0;
    for (int j = 1; j <= n; ++j) {
        hist += b[j] * (u[n + 1 - j] - u[n - j]);
    }
    const double r = u[n] - hist;
    const double c = std::tgamma(2.0 - alpha) * std::pow(dt, alpha);
    return solve_fixed_point([&](double x) { return r + c * rhs(x); }, u[n], 1e-12, 200);
}

std::vector<double> correction_exponents(double alpha) {
    require_order(alpha, "correction_exponents");
    std::vector<double> sig;
    for (int j = 1; j * alpha < 2.0 - alpha - 1e-12; ++j) {
        const double s = j * alpha;
        // L1 is exact on linear data; sigma = 1 would give an empty condition.
        if (std::fabs(s - 1.0) > 1e-12) {
            sig.push_back(s);
        }
    }
    return sig;
}

std::vector<double> solve_scalar_fde(double alpha, double u0, const ScalarRhs& rhs, double dt,
                                     int steps, const ScalarSolveOptions& options) {
    require_order(alpha, "solve_scalar_fde");
    if (!(dt > 0.0) || steps < 0) {
        throw ParameterError("solve_scalar_fde: needs dt > 0 and steps >= 0");
    }
    std::vector<double> u{u0};
    u.reserve(steps + 1);
    const auto sig = options.starting_corrections ? correction_exponents(alpha)
                                                  : std::vector<double>{};
    const int m = std::min<int>(static_cast<int>(sig.size()), steps);
    const auto b = l1_weights(alpha, steps + 1);
    const double g2a = std::tgamma(2.0 - alpha);
    const double c = g2a * std::pow(dt, alpha);

    if (m == 0) {
        for (int n = 1; n <= steps; ++n) {
            double hist = 0.0;
            for (int j = 1; j < n; ++j) {
                hist += b[j] * (u[n - j] - u[n - j - 1]);
            }
            const double r = u[n - 1] - hist;
            u.push_back(solve_fixed_point([&](double x) { return r + c * rhs(x); }, u[n - 1],
                                          options.tol, options.max_iterations));
        }
        return u;
    }

    // Correction weights at unit step: for every n, w_n solves
    // sum_j w_{n,j} j^sigma = D^alpha[t^sigma](n) - L1[t^sigma](n).
    const int ms = static_cast<int>(sig.size());
    Eigen::MatrixXd V(ms, ms);
    for (int k = 0; k < ms; ++k) {
        for (int j = 0; j < ms; ++j) {
            V(k, j) = std::pow(j + 1.0, sig[k]);
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    std::vector<Eigen::VectorXd> W(steps + 1);
    for (int n = 1; n <= steps; ++n) {
        Eigen::VectorXd g(ms);
        for (int k = 0; k < ms; ++k) {
            const double s = sig[k];
            double l1 = 0.0;
            for (int j = 0; j < n; ++j) {
                l1 += b[j] * (std::pow(n - j, s) - std::pow(n - j - 1.0, s));
            }
            g(k) = std::tgamma(1.0 + s) / std::tgamma(1.0 + s - alpha) * std::pow(n, s - alpha) -
                   l1 / g2a;
        }
        W[n] = lu.solve(g);
    }
    u.resize(steps + 1, u0);

    // Step n equation, multiplied through by Gamma(2-alpha) dt^alpha:
    // u_n - u_{n-1} + hist_n + G2 sum_j W_nj (u_j - u0) - c rhs(u_n) = 0.
    auto residual = [&](int n) {
        double acc = u[n] - u[n - 1];
        for (int j = 1; j < n; ++j) {
            acc += b[j] * (u[n - j] - u[n - j - 1]);
        }
        for (int j = 1; j <= ms; ++j) {
            acc += g2a * W[n](j - 1) * (u[j] - u0);
        }
        return acc - c * rhs(u[n]);
    };

    // The first steps couple through the corrections: Newton on the block
    // with a finite-difference Jacobian.
    const int block = std::min(ms, steps);
    auto block_residual = [&]() {
        Eigen::VectorXd r(block);
        for (int n = 1; n <= block; ++n) {
            r(n - 1) = residual(n);
        }
        return r;
    };
    Eigen::VectorXd r = block_residual();
    bool converged = false;
    for (int it = 0; it < 100 && !converged; ++it) {
        Eigen::MatrixXd J(block, block);
        for (int i = 1; i <= block; ++i) {
            const double saved = u[i];
            const double h = 1e-7 * std::max(1.0, std::fabs(saved));
            u[i] = saved + h;
            const Eigen::VectorXd rp = block_residual();
            u[i] = saved - h;
            const Eigen::VectorXd rm = block_residual();
            u[i] = saved;
            J.col(i - 1) = (rp - rm) / (2.0 * h);
        }
        const Eigen::VectorXd delta = J.partialPivLu().solve(-r);
        const std::vector<double> base(u.begin() + 1, u.begin() + block + 1);
        double step = 1.0;
        Eigen::VectorXd trial;
        for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
            for (int i = 1; i <= block; ++i) {
                u[i] = base[i - 1] + step * delta(i - 1);
            }
            trial = block_residual();
            if (trial.allFinite() && trial.norm() <= (1.0 - 1e-4 * step) * r.norm()) {
                break;
            }
        }
        const double change = step * delta.cwiseAbs().maxCoeff();
        r = trial;
        double scale = 1.0;
        for (int i = 1; i <= block; ++i) {
            scale = std::max(scale, std::fabs(u[i]));
        }
        converged = r.allFinite() && (change <= 1e-14 * scale || r.norm() <= 1e-15 * scale);
    }
    if (!converged) {
        throw NonlinearSolveError("solve_scalar_fde: starting block did not converge", u[block],
                                  100, !r.allFinite());
    }
    for (int n = block + 1; n <= steps; ++n) {
        double hist = 0.0;
        for (int j = 1; j < n; ++j) {
            hist += b[j] * (u[n - j] - u[n - j - 1]);
        }
        double corr = 0.0;
        for (int j = 1; j <= ms; ++j) {
            corr += g2a * W[n](j - 1) * (u[j] - u0);
        }
        const double rr = u[n - 1] - hist - corr;
        u[n] = solve_fixed_point([&](double x) { return rr + c * rhs(x); }, u[n - 1], options.tol,
                                 options.max_iterations);
    }
    return u;
}

// ---------------------------------------------------------------------------

BoundCurve bound_gronwall(double alpha, double c1, double u0, std::span<const double> f,
                          std::span<const double> t_grid) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("bound_gronwall: alpha must lie in (0, 1]");
    }
    if (!(c1 > 0.0)) {
        throw ParameterError("bound_gronwall: c1 must be positive");
    }
    if (f.size() != t_grid.size() || t_grid.empty() || !is_uniform(t_grid)) {
        throw DataError("bound_gronwall: f must be sampled on a uniform grid starting at 0");
    }
    for (double v : f) {
        if (!(v >= 0.0)) {
            throw ParameterError("bound_gronwall: f must be nonnegative");
        }
    }
    BoundCurve c;
    c.formula_id = "gronwall";
    c.formula = "u0 + 1/Gamma(alpha) int_0^t (t-s)^(alpha-1) f(s) ds";
    const int n = static_cast<int>(t_grid.size()) - 1;
    const double dt = n > 0 ? t_grid[1] - t_grid[0] : 1.0;
    const auto w = lag_weights(rl_kernel(alpha), dt, n);
    for (int i = 0; i <= n; ++i) {
        c.times.push_back(t_grid[i]);
        c.values.push_back(u0 + w.apply(f, i));
    }
    return c;
}

BoundCurve bound_linear_absorption(double alpha, double a_tilde, double beta, double eps, double y0,
                            std::span<const double> b, std::span<const double> t_grid) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("bound_linear_absorption: alpha must lie in (0, 1]");
    }
    if (!(a_tilde > 0.0) || !(beta > 0.0 && beta < 1.0) || !(eps > 0.0) || !(y0 >= 0.0)) {
        throw ParameterError("bound_linear_absorption: needs a_tilde, eps > 0, 0 < beta < 1, y0 >= 0");
    }
    if (b.size() != t_grid.size() || t_grid.empty() || !is_uniform(t_grid)) {
        throw DataError("bound_linear_absorption: b must be sampled on a uniform grid starting at 0");
    }
    const double lambda = -a_tilde + (1.0 - beta) / (beta * std::pow(eps, 1.0 / (1.0 - beta)));
    std::vector<double> forcing(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i] >= 0.0)) {
            throw ParameterError("bound_linear_absorption: b must be nonnegative");
        }
        forcing[i] = std::pow(b[i], 1.0 / beta);
    }
    const int n = static_cast<int>(t_grid.size()) - 1;
    const double dt = n > 0 ? t_grid[1] - t_grid[0] : 1.0;
    const auto kernel = ml_kernel(alpha, lambda);
    const auto w = lag_weights(kernel, dt, n);
    const double scale = std::pow(eps, 1.0 / beta);
    BoundCurve c;
    c.formula_id = "linear_absorption";
    c.formula =
        "y0 + lambda*y0*int K + eps^(1/beta) int K b^(1/beta), K=(t-s)^(alpha-1) "
        "E_{alpha,alpha}(lambda (t-s)^alpha)";
    for (int i = 0; i <= n; ++i) {
        const double t = t_grid[i];
        c.times.push_back(t);
        c.values.push_back(y0 + lambda * y0 * kernel.first(t) + scale * w.apply(forcing, i));
    }
    return c;
}

SublinearBound bound_sublinear(const SublinearBoundParams& p,
                                const std::function<double(double)>& b, double T) {
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
        throw ParameterError("bound_sublinear: alpha must lie in (0, 1]");
    }
    if (!(0.0 < p.k_exp && p.k_exp < p.m_exp && p.m_exp < 1.0)) {
        throw ParameterError("bound_sublinear: requires 0 < k < m < 1");
    }
    if (!(p.a_coef > 0.0) || !(p.beta_coef > 0.0) || !(p.eps > 0.0) || !(p.c4 >= 0.0) ||
        !(p.y0 >= 0.0) || !(T >= 0.0)) {
        throw ParameterError(
            "bound_sublinear: needs a_coef, beta_coef, eps > 0 and c4, y0, T >= 0");
    }
    const double k = p.k_exp;
    const double m = p.m_exp;
    const double inv = 1.0 / (1.0 - k);
    const double prefactor = std::pow(T, p.alpha) / std::tgamma(p.alpha + 1.0);

    SublinearBound out;
    out.lambda = -(m - k) / std::pow(p.eps, (1.0 - k) / (m - k)) - p.beta_coef * (1.0 - k);
    out.initial_term = p.y0;
    double bracket = (out.lambda * std::pow(p.y0, 1.0 - k) + (p.c4 - p.a_coef) * (1.0 - k)) *
                     prefactor;
    if (bracket < 0.0) {
        bracket = 0.0;
        out.middle_clamped = true;
    }
    out.middle_term = std::pow(bracket, inv);
    const double bT = b(T);
    if (!(bT >= 0.0)) {
        throw ParameterError("bound_sublinear: b must be nonnegative");
    }
    out.forcing_term = std::pow(1.0 - m, inv) * std::pow(p.eps, 1.0 / (1.0 - m)) *
                       std::pow(prefactor, inv) * std::pow(bT, 1.0 / (1.0 - m));
    out.value = out.initial_term + out.middle_term + out.forcing_term;
    return out;
}

SublinearBound bound_lk_estimate(const LkEstimateParams& q, double T) {
    SublinearBoundParams p;
    p.alpha = q.alpha;
    p.k_exp = q.beta;
    p.m_exp = q.a;
    p.a_coef = q.half_c3_s_k;
    p.beta_coef = q.k;
    p.c4 = q.c2;
    p.eps = q.eps;
    p.y0 = q.y0;
    const double f0 = q.f0;
    return bound_sublinear(p, [f0](double) { return f0; }, T);
}

LkExponents lk_exponents(int N, double k, double m, double p) {
    if (N < 1 || !(k > 1.0) || !(m > 0.0) || !(p > 1.0)) {
        throw ParameterError("lk_exponents: needs N >= 1, k > 1, m > 0, p > 1");
    }
    LkExponents e;
    e.beta = (k + m * (p - 1.0) - 1.0) / k;
    e.a = 1.0 + (m - 1.0 + 2.0 / N) / (k - 1.0);
    e.ordered = 0.0 < e.beta && e.beta < e.a && e.a < 1.0;
    return e;
}

double log_bound_moser_recursion(double alpha, double a_bar, double r, double K, double y0_sup,
                                 double T, int k_index) {
    if (!(alpha > 0.0 && alpha <= 1.0) || !(a_bar > 1.0) || !(r > 0.0) || !(K >= 1.0) ||
        k_index < 0 || !(T > 0.0) || !(y0_sup >= 0.0)) {
        throw ParameterError(
            "bound_moser_recursion: needs a_bar > 1, r > 0, K >= 1, k >= 0, T > 0, y0 >= 0");
    }
    const double p3 = std::pow(3.0, k_index);
    return 0.5 * (p3 - 1.0) * std::log(2.0 * a_bar) +
           r * (3.0 * p3 / 4.0 - k_index / 2.0 - 0.75) * std::log(3.0) +
           p3 * std::log(std::max(y0_sup, K)) + alpha * std::log(T) -
           std::lgamma(alpha + 1.0);
}

double bound_moser_recursion(double alpha, double a_bar, double r, double K, double y0_sup,
                             double T, int k_index) {
    return std::exp(log_bound_moser_recursion(alpha, a_bar, r, K, y0_sup, T, k_index));
}

}  // namespace fracrd
