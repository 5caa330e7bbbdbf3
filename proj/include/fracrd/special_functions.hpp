#pragma once

#include <span>

namespace fracrd {

/// Evaluation controls for the two-parameter Mittag-Leffler function.
struct MlParams {
    double alpha = 0.5;
    double beta = 1.0;
    /// Series terms below this magnitude (relative to max(1, |sum|)) end the sum.
    double series_tol = 1e-17;
    int max_terms = 20000;
    /// |z| at and beyond which the large-argument expansion may be used.
    double asymptotic_switch = 20.0;
    /// Number of algebraic terms kept in the large-argument expansion.
    int asymptotic_terms = 10;

    /// Throws ParameterError unless 0 < alpha <= 1, beta > 0, series_tol > 0
    /// and max_terms >= 50.
    void validate() const;
};

enum class MlBranch {
    automatic,
    series,
    integral,
    asymptotic,
};

/// Gamma function; ParameterError at the poles (non-positive integers).
double gamma_fn(double x);

/// 1/Gamma(x), continued by zero at the poles.
double rgamma(double x);

/// E_alpha(z) for real z. Identical to mittag_leffler2(alpha, 1, z).
double mittag_leffler(double alpha, double z);

/// E_{alpha,beta}(z) for real z with 0 < alpha <= 1 and beta > 0.
///
/// The automatic branch uses the power series where it is well conditioned,
/// an integral representation on the negative axis where the series loses
/// digits to cancellation, and the large-|z| expansion beyond
/// `asymptotic_switch` whenever its truncation estimate is negligible.
/// Absolute error is below 1e-12 for |z| <= 50 on the negative axis.
double mittag_leffler2(double alpha, double beta, double z);

/// Same as above with explicit controls. Forcing a branch skips the
/// accuracy-driven selection; it exists for cross-branch consistency checks.
double mittag_leffler2(const MlParams& params, double z, MlBranch branch = MlBranch::automatic);

struct EnvelopeValue {
    double value = 0.0;
    /// Set when exp() would overflow; value is then the largest finite double.
    bool saturated = false;
};

/// exp(w^{1/alpha} t), the exponential majorant of E_alpha(w t^alpha).
EnvelopeValue ml_exponential_envelope(double alpha, double w, double t);

/// Smallest C with E_alpha(w t^alpha) <= C exp(w^{1/alpha} t) on the sampled
/// grid, i.e. the maximum ratio over the samples. A fitted diagnostic only.
double fit_envelope_constant(double alpha, double w, std::span<const double> t_grid);

}  // namespace fracrd
