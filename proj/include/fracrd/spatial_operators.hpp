#pragma once

#include "fracrd/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracrd {

enum class TailMode {
    analytic_1d,
    numeric,
};

enum class SingularMode {
    skip_diagonal,
    local_correction,
};

struct OperatorParams {
    double s = 0.5;
    double p = 2.0;
    TailMode tail_mode = TailMode::analytic_1d;
    SingularMode singular_mode = SingularMode::skip_diagonal;
    /// Validate the nonlinear-diffusion box 1 < p < 4/3, s p < 1 as well.
    bool porous_regime = false;

    void validate(int dim) const;
    bool operator==(const OperatorParams&) const = default;
};

/// phi_p(d) = |d|^{p-2} d.
inline double phi_p(double d, double p) {
    if (p == 2.0) {
        return d;
    }
    return d == 0.0 ? 0.0 : std::copysign(std::pow(std::fabs(d), p - 1.0), d);
}

/// Exterior mass int_{outside box} |x - y|^{-(N+sp)} dy for every node. The
/// box is the union of node cells, half width L + h/2.
std::vector<double> exterior_tail(const Grid& g, double sp, TailMode mode);

/// Discrete fractional p-Laplacian with zero exterior extension:
///   sum_{y != x} phi_p(u(x) - u(y)) |x - y|^{-(N+sp)} h^N + phi_p(u(x)) T(x).
class FracPLaplacian {
public:
    FracPLaplacian(const Grid& grid, const OperatorParams& params);

    const Grid& grid() const { return grid_; }
    const OperatorParams& params() const { return params_; }
    const std::vector<double>& tail() const { return tail_; }

    /// h^N |x_i - x_j|^{-(N+sp)} for i != j.
    double pair_weight(std::size_t i, std::size_t j) const;

    Field apply(const Field& u) const;
    /// Dense reference path.
    void apply_dense(std::span<const double> u, std::span<double> out) const;
    /// Toeplitz/FFT path; p = 2 only.
    void apply_fft(std::span<const double> u, std::span<double> out) const;
    /// Dispatches to the FFT path for p = 2 unless disabled.
    void apply(std::span<const double> u, std::span<double> out) const;
    void set_use_fft(bool on) { use_fft_ = on; }

    /// Dense matrix of the (linear) p = 2 operator, symmetric.
    Eigen::MatrixXd matrix() const;

private:
    void local_correction(std::span<const double> u, std::span<double> out) const;

    Grid grid_;
    OperatorParams params_;
    std::vector<double> tail_;
    // Weight by absolute index offset, (n x n) table in 2D.
    std::vector<double> offset_weight_;
    // Sum over j != i of the pair weights, plus the tail: diagonal at p = 2.
    std::vector<double> diagonal_;
    double cell_singular_ = 0.0;
    bool use_fft_ = true;
    struct FftPlan;
    std::shared_ptr<FftPlan> fft_;
};

Field frac_p_laplacian(const Field& u, const OperatorParams& params);

/// Double-sum seminorm over region x region, diagonal excluded.
double gagliardo_seminorm(const Field& u, double s, double p, const Region& region);

/// Seminorm of the zero extension over the whole space: the in-box double sum
/// plus twice the interaction of the box with the exterior.
double gagliardo_seminorm_extended(const Field& u, double s, double p);

struct PairingReport {
    double pairing = 0.0;
    double half_seminorm = 0.0;
    double residual = 0.0;
    double relative = 0.0;
};

/// |int_B u (-Delta)_p^s u - (1/2)[u]^p| with both sides on the region's nodes
/// and no tail.
PairingReport pairing_identity(const Field& u, double s, double p, const Region& region);
double pairing_identity_residual(const Field& u, double s, double p, const Region& region);

enum class KernelShape {
    box,
    gaussian,
    delta,
};

/// Competition kernel sampled at grid offsets from the origin, unit mass.
struct Kernel {
    Grid grid;
    std::vector<double> samples;
    KernelShape shape = KernelShape::box;
    double width = 0.0;
    double delta0 = 0.0;
    double eta = 0.0;

    /// Builds, normalizes to unit discrete mass and asserts min_{B(0,delta0)} J > eta.
    static Kernel make(const Grid& g, KernelShape shape, double width, double delta0, double eta);
    double mass() const;
};

KernelShape parse_kernel_shape(const std::string& name);
std::string to_string(KernelShape shape);

/// (J * u)(x) = sum_y J(x - y) u(y) h^N with zero padding.
Field convolve(const Field& u, const Kernel& J);
Field convolve_direct(const Field& u, const Kernel& J);

/// mu u^2 (1 - k conv) - gamma u.
Field reaction(const Field& u, const Field& conv, double mu, double k, double gamma);

/// An empirical constant with the data that produced it.
struct Estimate {
    double value = 0.0;
    std::string name;
    std::string method;
    int trials = 0;
    std::uint64_t seed = 0;
    std::string grid;
};

/// max over random smooth trials of int u^3 / (|grad u|_2^{N/2} |u|_2^{3-N/2} + |u|_2^3).
Estimate estimate_gn_constant(const Grid& grid, int trial_count, std::uint64_t seed);
/// min over random trials of [u]^p / (int |u|^{p*})^{p/p*}, p* = Np/(N - sp).
Estimate estimate_sobolev_constant(const Grid& grid, double s, double p, int trial_count,
                                   std::uint64_t seed);
/// inf over (a, b) in (0, 10]^2 of
/// |a-b|^{p-2}(a-b)(a^alpha - b^alpha) / |a^{(p+alpha-1)/p} - b^{(p+alpha-1)/p}|^p.
Estimate power_monotonicity_constant(double p, double alpha_exp, long sample_count,
                                 std::uint64_t seed);

}  // namespace fracrd
