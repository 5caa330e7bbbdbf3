#pragma once

#include "fracrd/grid.hpp"
#include "fracrd/spatial_operators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracrd {

struct SimParams {
    double alpha = 0.5;
    OperatorParams op;
    double mu = 1.0;
    double k = 1.0;
    double gamma = 1.0;
    /// Diffusion acts on u^m; 1 for the reaction-diffusion model.
    double m = 1.0;
    double dt = 1e-3;
    double t_end = 1.0;
    double blowup_threshold = 1e8;
    double stability_factor = 0.5;
    /// Switch the nonlocal diffusion off (pure reaction).
    bool diffusion = true;
    /// Store every stride-th field (the first and last are always kept).
    int store_stride = 1;

    void validate(int dim) const;
    /// The nonlinear-diffusion box: 1 < p < 4/3, sp < 1, 2 - 2/N < m <= 3.
    void validate_porous(int dim) const;
    int steps() const { return static_cast<int>(std::llround(t_end / dt)); }
    bool operator==(const SimParams&) const = default;
};

enum class RunStatus {
    completed,
    blowup,
    solver_diverged,
};

std::string to_string(RunStatus s);

struct Trajectory {
    Grid grid;
    std::string scheme;
    std::vector<double> times;
    std::vector<double> sup_norm;
    std::vector<double> l1;
    std::vector<double> l2;
    /// int u phi dx with the run's weight (phi = 1 unless one was supplied).
    std::vector<double> mass;
    std::vector<double> field_times;
    std::vector<Field> fields;
    RunStatus status = RunStatus::completed;
    /// Last time with a finite state below the blow-up threshold.
    double t_star = std::numeric_limits<double>::quiet_NaN();
    /// Steps whose minimum fell below -1e-8.
    int negative_steps = 0;
    double min_value = 0.0;
    std::vector<std::string> warnings;

    /// t,sup_norm,l1,l2,mass,status; status is "running" except on the last row.
    void write_scalars_csv(std::ostream& os) const;
    /// Index into fields of the snapshot at time t, or -1.
    int field_index(double t) const;
};

/// The nonlocal part of the reaction: competition kernel, or the global mass
/// of the nonlinear-diffusion model.
struct Reaction {
    const Kernel* kernel = nullptr;
    bool global_mass = false;

    Field evaluate(const Field& u, const SimParams& params) const;
};

/// Explicit L1 stepper holding the history and the precomputed operator.
class L1Stepper {
public:
    L1Stepper(const Field& u0, const SimParams& params, Reaction reaction);
    /// Resumes from a recorded history u_0..u_n.
    L1Stepper(std::span<const Field> history, const SimParams& params, Reaction reaction);

    /// Advances one step; throws StabilityError if the monitor trips. The
    /// returned state is also appended to the history.
    const std::vector<double>& advance();
    const std::vector<std::vector<double>>& history() const { return history_; }
    const SimParams& params() const { return params_; }

private:
    Grid grid_;
    SimParams params_;
    Reaction reaction_;
    std::unique_ptr<FracPLaplacian> op_;
    std::vector<double> weights_;
    double c_ = 0.0;
    std::vector<std::vector<double>> history_;
};

/// One explicit step from a full history u_0..u_n (rebuilds the operator).
Field step(std::span<const Field> history, const SimParams& params, const Kernel& kernel);

struct RunOptions {
    /// Weight for the mass column; empty means 1.
    std::vector<double> weight;
};

Trajectory run(const Field& u0, const SimParams& params, const Kernel& kernel,
               const RunOptions& options = {});

/// D^alpha u + (-Delta)_p^s u^m = u^2 (1 - int u) - u, parameters checked
/// against the nonlinear-diffusion box; mu, k and gamma are set to 1.
Trajectory run_porous(const Field& u0, const SimParams& params, const RunOptions& options = {});

/// Eigendecomposition of the p = 2 operator matrix, A = V diag(lambda) V^T.
struct SpectralBasis {
    Grid grid;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd V;

    static SpectralBasis make(const Grid& grid, const OperatorParams& op);
};

/// Mild-solution time stepping for p = 2: per-mode Mittag-Leffler propagators
/// and product integration of the memory term, with a fixed point on each
/// step until the update is below 1e-10.
Trajectory spectral_duhamel_run(const Field& u0, const SimParams& params, const Kernel& kernel,
                                const RunOptions& options = {});
Trajectory spectral_duhamel_run(const Field& u0, const SimParams& params, const Kernel& kernel,
                                const SpectralBasis& basis, const RunOptions& options = {});

struct ComparisonReport {
    double max_violation = 0.0;
    double horizon = 0.0;
    bool pass = false;
    double tolerance = 1e-8;
    RunStatus low_status = RunStatus::completed;
    RunStatus high_status = RunStatus::completed;
};

ComparisonReport comparison_experiment(const Field& u0_low, const Field& u0_high,
                                       const SimParams& params, const Kernel& kernel);
/// Same, on two finished trajectories with a common time grid.
ComparisonReport compare_trajectories(const Trajectory& low, const Trajectory& high,
                                      double tolerance = 1e-8);

struct OperatorBoundReport {
    std::vector<double> times;
    /// max_i |E_alpha(-lambda_i t^alpha)|, the 2-norm of S_alpha(t).
    std::vector<double> s_norm;
    /// max_i |E_{alpha,alpha}(-lambda_i t^alpha)|, the 2-norm of K_alpha(t).
    std::vector<double> k_norm;
    /// |S_alpha(t) phi| / |phi| and |K_alpha(t) phi| / |phi|.
    std::vector<double> s_phi;
    std::vector<double> k_phi;
    double c4_hat = 0.0;
    bool bounded = false;
};

OperatorBoundReport operator_bound_check(const Field& phi, double alpha,
                                         const SpectralBasis& basis,
                                         std::span<const double> t_grid);

}  // namespace fracrd
