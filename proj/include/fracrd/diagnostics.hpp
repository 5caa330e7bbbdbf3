#pragma once

#include "fracrd/eigen.hpp"
#include "fracrd/evolution.hpp"
#include "fracrd/fractional_time.hpp"
#include "fracrd/grid.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracrd {

/// Quadrature weights of the nodes over B(center, delta): each node carries
/// the part of its cell inside the ball. DomainError if the ball leaves the box.
std::vector<double> ball_weights(const Grid& g, std::array<double, 2> center, double delta);

double local_mass(const Field& u, std::array<double, 2> center, double delta, double power);

struct SteadyRoots {
    double a = 0.0;
    double A = 0.0;
    double mu = 0.0;
    double k = 0.0;
    double gamma = 0.0;
};

/// Roots 0 < a < A of mu u (1 - k u) = gamma; RegimeError unless
/// 1 <= gamma < mu / (4k).
SteadyRoots steady_roots(double mu, double k, double gamma);

/// h(u) = A ln(1 - u/A) - a ln(1 - u/a) and its first two derivatives.
double lyapunov_h(double u, const SteadyRoots& r);
double lyapunov_h_prime(double u, const SteadyRoots& r);
double lyapunov_h_second(double u, const SteadyRoots& r);

struct LyapunovValue {
    double H = 0.0;
    double D = 0.0;
};

/// H = int_B h(u), D = (1/2)(A - a) mu k int_B u^2. DomainError if u >= a in B.
LyapunovValue lyapunov(const Field& u, const SteadyRoots& roots, std::array<double, 2> center,
                       double delta);

struct LocalEnergyTerms {
    double t = 0.0;
    double caputo = 0.0;
    double seminorm = 0.0;
    double cubic = 0.0;
    double cross = 0.0;
    double linear = 0.0;
    /// caputo + seminorm - (cubic - cross - linear); positive is a violation.
    double residual = 0.0;
};

struct LocalEnergyReport {
    std::vector<LocalEnergyTerms> rows;
    double max_positive = 0.0;
    BoundCurve curve;
};

/// D^alpha int_B u^2 + [u]^p_B <= 2 mu int_B u^3 - 2 mu eta k int_B u^3 int_B u
/// - 2 gamma int_B u^2 at every stored time from the second on.
LocalEnergyReport local_energy_residual(const Trajectory& traj, const SimParams& params,
                                        double eta, std::array<double, 2> center, double delta);

struct BlowupWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

/// (Gamma(alpha+1) / (4 (H0 + 1/2)))^{1/alpha} <= T_max <= (Gamma(alpha+1) / H0)^{1/alpha}.
BlowupWindow blowup_window(double alpha, double H0);

struct BlowupFunctional {
    double H0 = 0.0;
    double lambda1 = 0.0;
    /// H0 >= 1 + lambda1.
    bool triggered = false;
};

BlowupFunctional blowup_functional(const Field& u0, const EigenPair& pair);

struct DecayFit {
    bool rejected = false;
    std::string reason;
    /// "mittag_leffler" or "exponential", whichever has the smaller residual.
    std::string envelope;
    double sigma_hat = 0.0;
    double c_hat = 0.0;
    /// Max relative deviation of the data from the chosen envelope.
    double residual = 0.0;
    double sigma_ml = 0.0, c_ml = 0.0, residual_ml = 0.0;
    double sigma_exp = 0.0, c_exp = 0.0, residual_exp = 0.0;
};

/// Fits sup|u| on the second half of the run to C E_alpha(-sigma t^alpha) and
/// to C exp(-sigma^{1/alpha} t).
DecayFit decay_fit(std::span<const double> times, std::span<const double> values, double alpha);
DecayFit decay_fit(const Trajectory& traj, double alpha);

struct MoserConstants {
    /// bar a and d_0 of the recursion; unspecified in closed form, set here.
    double a_bar = 1.0;
    double d0 = 1.0;
};

struct MoserRow {
    int k = 0;
    double q = 0.0;
    /// max over snapshots of int u^{q_k}.
    double observed = 0.0;
    double log_bound = 0.0;
    double ratio = 0.0;
};

struct MoserReport {
    std::vector<MoserRow> rows;
    double max_ratio = 0.0;
    double K0 = 0.0;
};

/// int u^{q_k} along the trajectory against
/// (2 a)^{2^k - 1} 2^{d0 (2^{k+1} - k - 2)} max(sup_t (int u^{q_0})^{2^k}, K0^{q_k}) T^alpha/(alpha Gamma(alpha)).
MoserReport moser_tracker(const Trajectory& traj, double alpha, int k_max,
                          const MoserConstants& constants = {}, double m = 1.0);

/// Smoothed power law (1 + |x|^2)^{-(N + gamma_w)/2} on a grid.
struct WeightFunction {
    Grid grid;
    std::vector<double> samples;
    double gamma_w = 0.0;

    static WeightFunction power_law(const Grid& g, double gamma_w);
    double at(double x, double y = 0.0) const;
};

/// (2 s', 2 s' / (m (p - 1))) with s' = s p / 2.
std::array<double, 2> admissible_band(double s, double p, double m);

double weighted_mass(const Field& u, const WeightFunction& phi);

struct WeightClassReport {
    double value = 0.0;
    /// Same quantity on a box of twice the half width and equal spacing.
    double value_extended = 0.0;
    double growth = 0.0;
    bool finite = false;
    bool in_band = false;
    /// Finite and growth below 10%.
    bool member = false;
};

/// M_{s'} phi(x) = int |phi(x) - phi(y)| |x - y|^{-(N + 2 s')} dy, then
/// C(phi) = int |M phi|^{1/(1-theta)} / phi^{theta/(1-theta)}, theta = m (p - 1).
std::vector<double> weight_operator(const WeightFunction& phi, double s_prime);
WeightClassReport weight_class_constant(const WeightFunction& phi, double s, double p, double m);

struct HolderReport {
    std::vector<double> times;
    std::vector<double> X;
    double theta = 0.0;
    double K_hat = 0.0;
    double K_phi = 0.0;
    double C_phi = 0.0;
    double exponent_fit = 0.0;
    double exponent_expected = 0.0;
    bool pass_constant = false;
    bool pass_exponent = false;
};

/// X(t) = int (u - v) phi; smallest K with |X^theta(t1) - X^theta(t2)| <= K |t1 - t2|^{alpha theta},
/// theta = 1 - m(p-1), against K(phi) = eps (C(phi) / (alpha Gamma(alpha)))^theta.
HolderReport holder_mass_check(const Trajectory& u, const Trajectory& v, const WeightFunction& phi,
                               double alpha, double s, double p, double m, double eps = 1.0);

/// theorem,check,regime,value,bound,slack,pass
struct CheckRow {
    std::string theorem;
    std::string check;
    std::string regime;
    double value = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool pass = false;
};

void write_check_matrix(std::ostream& os, const std::vector<CheckRow>& rows);

}  // namespace fracrd
