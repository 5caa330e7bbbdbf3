#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fracrd {

/// b_j = (j+1)^{1-alpha} - j^{1-alpha}, j = 0..n-1.
std::vector<double> l1_weights(double alpha, int n);

/// Past samples u(t_0), ..., u(t_n) on a uniform grid, single writer.
struct CaputoHistory {
    double alpha = 0.5;
    double dt = 0.0;
    std::vector<double> samples;

    CaputoHistory() = default;
    CaputoHistory(double alpha, double dt, std::vector<double> samples = {});

    void validate() const;
    void push(double value) { samples.push_back(value); }
    std::size_t size() const { return samples.size(); }
};

/// L1 approximation of the Caputo derivative at the last sample.
double caputo_l1(const CaputoHistory& history);
/// Same with caller-supplied weights (at least samples.size()-1 of them).
double caputo_l1(double alpha, double dt, std::span<const double> samples,
                 std::span<const double> weights);

/// Antiderivatives of a convolution kernel g on (0, inf):
///   first(tau)  = int_0^tau g,
///   second(tau) = int_0^tau g(s) (tau - s) ds.
/// Product integration against piecewise-linear data needs exactly these two.
struct KernelMoments {
    std::function<double(double)> first;
    std::function<double(double)> second;
};

/// g(tau) = tau^{alpha-1} / Gamma(alpha), the Riemann-Liouville kernel.
KernelMoments rl_kernel(double alpha);
/// g(tau) = tau^{alpha-1} E_{alpha,alpha}(lambda tau^alpha).
KernelMoments ml_kernel(double alpha, double lambda);

/// Per-lag product-integration coefficients for int_0^{t_n} g(t_n - s) f(s) ds
/// with f linear between nodes. For lag l >= 1 the interval
/// [t_{n-l}, t_{n-l+1}] contributes near[l] f_{n-l+1} + far[l] f_{n-l}.
struct LagWeights {
    std::vector<double> near;
    std::vector<double> far;

    /// Weights applied to f_0..f_n for the integral ending at t_n.
    std::vector<double> for_step(int n) const;
    /// sum_i for_step(n)[i] * f[i], without materializing the vector.
    double apply(std::span<const double> f, int n) const;
};
LagWeights lag_weights(const KernelMoments& kernel, double dt, int max_lag);

/// (I^alpha u)(t_n) for samples u_0..u_n by product integration.
double rl_integral(double alpha, std::span<const double> samples, double dt);

/// Sampled envelope produced by one of the bound calculators.
struct BoundCurve {
    std::vector<double> times;
    std::vector<double> values;
    std::string formula_id;
    /// Human-readable formula the values were computed from.
    std::string formula;

    void write_csv(std::ostream& os) const;
};

/// u0 E_alpha(-w t^alpha) on t_grid.
BoundCurve solve_relaxation(double alpha, double w, double u0, std::span<const double> t_grid);

using ScalarRhs = std::function<double(double)>;

/// Next value of the implicit L1 discretization D^alpha u = rhs(u), given the
/// history up to t_n. Damped fixed point (1e-12, 200 iterations) with a
/// bisection fallback; NonlinearSolveError if no root can be bracketed.
double step_scalar_implicit(double alpha, double dt, const CaputoHistory& history,
                            const ScalarRhs& rhs);

struct ScalarSolveOptions {
    /// Add correction weights on u_1..u_m that make the scheme exact for
    /// t^{j alpha}, j alpha < 2 - alpha. Restores the 2-alpha rate for
    /// solutions with the usual t^alpha behaviour at the origin.
    bool starting_corrections = false;
    double tol = 1e-12;
    int max_iterations = 200;
};

/// Exponents sigma = j alpha used by the starting corrections.
std::vector<double> correction_exponents(double alpha);

/// Samples u_0..u_steps of D^alpha u = rhs(u), u(0) = u0.
std::vector<double> solve_scalar_fde(double alpha, double u0, const ScalarRhs& rhs, double dt,
                                     int steps, const ScalarSolveOptions& options = {});

// ---------------------------------------------------------------------------
// Bound calculators. Each returns the right-hand side of a fractional
// differential inequality estimate, evaluated as written.

/// u(0) + (1/Gamma(alpha)) int_0^t (t-s)^{alpha-1} f(s) ds for
/// D^alpha u + c1 u <= f. f is sampled on the uniform t_grid.
BoundCurve bound_gronwall(double alpha, double c1, double u0, std::span<const double> f,
                          std::span<const double> t_grid);

/// Envelope for D^alpha y <= -a_tilde y + beta^{-1} b(t) y^{1-beta}:
///   y0 + lambda y0 int K + eps^{1/beta} int K b^{1/beta},
///   K(t-s) = (t-s)^{alpha-1} E_{alpha,alpha}(lambda (t-s)^alpha),
///   lambda = -a_tilde + (1-beta) / (beta eps^{1/(1-beta)}).
BoundCurve bound_linear_absorption(double alpha, double a_tilde, double beta, double eps, double y0,
                            std::span<const double> b, std::span<const double> t_grid);

/// Parameters of D^alpha y + a_coef y^k + beta_coef y <= b(t) y^m + c4.
struct SublinearBoundParams {
    double alpha = 0.5;
    double k_exp = 0.3;
    double m_exp = 0.6;
    double a_coef = 1.0;
    double beta_coef = 1.0;
    double c4 = 0.0;
    double eps = 1.0;
    double y0 = 0.0;
};

struct SublinearBound {
    double value = 0.0;
    double lambda = 0.0;
    double initial_term = 0.0;
    double middle_term = 0.0;
    double forcing_term = 0.0;
    /// The bracket of the middle term was negative and has been set to 0
    /// (a negative base under the 1/(1-k) power has no real meaning).
    bool middle_clamped = false;
};

/// y0 + [ (lambda y0^{1-k} + (c4 - a_coef)(1-k)) T^alpha / (alpha Gamma(alpha)) ]^{1/(1-k)}
///    + (1-m)^{1/(1-k)} eps^{1/(1-m)} T^{alpha/(1-k)} / (alpha Gamma(alpha))^{1/(1-k)} b(T)^{1/(1-m)},
/// lambda = -(m-k)/eps^{(1-k)/(m-k)} - beta_coef (1-k).
SublinearBound bound_sublinear(const SublinearBoundParams& params,
                                const std::function<double(double)>& b, double T);

/// The L^k estimate of the porous-medium stage written out in its own
/// variables: y(0), C2, c3 S k / 2, k (linear coefficient), the exponents
/// beta = (k + m(p-1) - 1)/k and a, f(0), eps and T. Evaluated term by term.
struct LkEstimateParams {
    double alpha = 0.5;
    double beta = 0.3;
    double a = 0.6;
    double half_c3_s_k = 1.0;
    double k = 2.0;
    double c2 = 0.0;
    double eps = 1.0;
    double y0 = 0.0;
    double f0 = 0.0;
};
SublinearBound bound_lk_estimate(const LkEstimateParams& params, double T);

/// Exponents of that stage from (N, k, m, p): beta = (k + m(p-1) - 1)/k and
/// a = 1 + (m - 1 + 2/N)/(k - 1).
struct LkExponents {
    double beta;
    double a;
    /// 0 < beta < a < 1, the ordering the estimate needs.
    bool ordered;
};
LkExponents lk_exponents(int N, double k, double m, double p);

/// (2 a_bar)^{(3^k-1)/2} 3^{r(3^{k+1}/4 - k/2 - 3/4)} max(y0_sup, K)^{3^k} T^alpha/(alpha Gamma(alpha)).
double bound_moser_recursion(double alpha, double a_bar, double r, double K, double y0_sup,
                             double T, int k_index);
/// Natural log of the same quantity; finite where the value overflows.
double log_bound_moser_recursion(double alpha, double a_bar, double r, double K, double y0_sup,
                                 double T, int k_index);

}  // namespace fracrd
