#include "fracrd/errors.hpp"
#include "fracrd/evolution.hpp"
#include "fracrd/fractional_time.hpp"
#include "fracrd/special_functions.hpp"

#include "recorder.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fracrd {

SpectralBasis SpectralBasis::make(const Grid& grid, const OperatorParams& op) {
    if (op.p != 2.0) {
        throw ParameterError("spectral basis: p = 2 required");
    }
    const FracPLaplacian L(grid, op);
    const Eigen::MatrixXd A = L.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) {
        throw NumericError("spectral basis: eigendecomposition failed");
    }
    SpectralBasis b;
    b.grid = grid;
    b.lambda = es.eigenvalues();
    b.V = es.eigenvectors();
    return b;
}

Trajectory spectral_duhamel_run(const Field& u0, const SimParams& params, const Kernel& kernel,
                                const RunOptions& options) {
    params.validate(u0.grid.dim);
    if (!params.diffusion) {
        SpectralBasis b;
        b.grid = u0.grid;
        b.lambda = Eigen::VectorXd::Zero(u0.size());
        b.V = Eigen::MatrixXd::Identity(u0.size(), u0.size());
        return spectral_duhamel_run(u0, params, kernel, b, options);
    }
    return spectral_duhamel_run(u0, params, kernel, SpectralBasis::make(u0.grid, params.op),
                                options);
}

Trajectory spectral_duhamel_run(const Field& u0, const SimParams& params, const Kernel& kernel,
                                const SpectralBasis& basis, const RunOptions& options) {
    params.validate(u0.grid.dim);
    if (params.op.p != 2.0 || params.m != 1.0) {
        throw ParameterError("spectral_duhamel_run: linear diffusion (p = 2, m = 1) only");
    }
    if (!(basis.grid == u0.grid) || !(kernel.grid == u0.grid)) {
        throw DataError("spectral_duhamel_run: grids differ");
    }
    u0.check_finite("spectral_duhamel_run");
    const int S = params.steps();
    const int M = static_cast<int>(u0.size());
    const double alpha = params.alpha;
    const double dt = params.dt;

    // Per-mode propagator samples and memory weights.
    Eigen::MatrixXd prop(M, S + 1);
    std::vector<LagWeights> lag(M);
    for (int i = 0; i < M; ++i) {
        const double lam = basis.lambda(i);
        prop(i, 0) = 1.0;
        for (int n = 1; n <= S; ++n) {
            prop(i, n) = mittag_leffler(alpha, -lam * std::pow(n * dt, alpha));
        }
        lag[i] = lag_weights(ml_kernel(alpha, -lam), dt, S);
    }

    const Reaction reaction{&kernel, false};
    const Eigen::VectorXd uhat0 = basis.V.transpose() *
                                  Eigen::Map<const Eigen::VectorXd>(u0.values.data(), M);
    std::vector<Eigen::VectorXd> fhat;
    fhat.reserve(S + 1);
    auto forcing = [&](const std::vector<double>& u) {
        const Field f = reaction.evaluate(Field(u0.grid, u), params);
        return Eigen::VectorXd(basis.V.transpose() *
                               Eigen::Map<const Eigen::VectorXd>(f.values.data(), M));
    };

    detail::Recorder rec(u0.grid, params, options, "spectral Duhamel");
    std::vector<double> u = u0.values;
    if (!rec.record(0, u)) {
        return rec.finish();
    }
    fhat.push_back(forcing(u));

    for (int n = 1; n <= S; ++n) {
        Eigen::VectorXd base(M);
        for (int i = 0; i < M; ++i) {
            const auto& w = lag[i];
            double acc = prop(i, n) * uhat0(i);
            for (int l = 1; l <= n; ++l) {
                acc += w.far[l] * fhat[n - l](i);
                if (l >= 2) {
                    acc += w.near[l] * fhat[n - l + 1](i);
                }
            }
            base(i) = acc;
        }
        Eigen::VectorXd near1(M);
        for (int i = 0; i < M; ++i) {
            near1(i) = lag[i].near[1];
        }

        Eigen::VectorXd fn = fhat.back();
        bool settled = false;
        bool finite = true;
        for (int it = 0; it < 200; ++it) {
            const Eigen::VectorXd next = basis.V * (base + near1.cwiseProduct(fn));
            double change = 0.0, sup = 0.0;
            for (int i = 0; i < M; ++i) {
                change = std::max(change, std::fabs(next(i) - u[i]));
                sup = std::max(sup, std::fabs(next(i)));
                u[i] = next(i);
            }
            if (!std::isfinite(change) || sup > params.blowup_threshold) {
                finite = std::isfinite(change);
                settled = true;
                break;
            }
            fn = forcing(u);
            if (change <= 1e-10 * std::max(1.0, sup)) {
                settled = true;
                break;
            }
        }
        if (!finite || !settled) {
            Trajectory t = rec.finish();
            t.status = RunStatus::solver_diverged;
            t.warnings.push_back("time-slab fixed point did not settle at step " +
                                 std::to_string(n));
            return t;
        }
        if (!rec.record(n, u)) {
            break;
        }
        fhat.push_back(fn);
    }
    return rec.finish();
}

OperatorBoundReport operator_bound_check(const Field& phi, double alpha,
                                         const SpectralBasis& basis,
                                         std::span<const double> t_grid) {
    if (!(phi.grid == basis.grid)) {
        throw DataError("operator_bound_check: grids differ");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("operator_bound_check: alpha must lie in (0, 1)");
    }
    const int M = static_cast<int>(phi.size());
    const Eigen::VectorXd ph = basis.V.transpose() *
                               Eigen::Map<const Eigen::VectorXd>(phi.values.data(), M);
    const double norm_phi = ph.norm();
    OperatorBoundReport r;
    bool finite = true;
    for (double t : t_grid) {
        if (t < 0.0) {
            throw ParameterError("operator_bound_check: negative time");
        }
        double sn = 0.0, kn = 0.0, sp2 = 0.0, kp2 = 0.0;
        for (int i = 0; i < M; ++i) {
            const double z = -basis.lambda(i) * std::pow(t, alpha);
            const double es = mittag_leffler(alpha, z);
            const double ek = mittag_leffler2(alpha, alpha, z);
            sn = std::max(sn, std::fabs(es));
            kn = std::max(kn, std::fabs(ek));
            sp2 += es * es * ph(i) * ph(i);
            kp2 += ek * ek * ph(i) * ph(i);
        }
        r.times.push_back(t);
        r.s_norm.push_back(sn);
        r.k_norm.push_back(kn);
        r.s_phi.push_back(norm_phi > 0.0 ? std::sqrt(sp2) / norm_phi : 0.0);
        r.k_phi.push_back(norm_phi > 0.0 ? std::sqrt(kp2) / norm_phi : 0.0);
        r.c4_hat = std::max({r.c4_hat, sn, kn});
        finite = finite && std::isfinite(sn) && std::isfinite(kn);
    }
    const double cap = std::max(1.0, 1.0 / std::tgamma(alpha));
    r.bounded = finite && r.c4_hat <= cap * (1.0 + 1e-12);
    return r;
}

}  // namespace fracrd
