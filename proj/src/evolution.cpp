#include "fracrd/evolution.hpp"

#include "fracrd/errors.hpp"
#include "fracrd/fractional_time.hpp"
#include "fracrd/special_functions.hpp"

#include "recorder.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace fracrd {

void SimParams::validate(int dim) const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("sim: alpha must lie in (0, 1)");
    }
    op.validate(dim);
    if (!(mu >= 0.0) || !(k >= 0.0)) {
        throw ParameterError("sim: mu and k must be nonnegative");
    }
    if (!(gamma >= 1.0)) {
        throw ParameterError("sim: gamma >= 1 is required by the model");
    }
    if (!(m >= 1.0) || !(m <= 3.0)) {
        throw ParameterError("sim: m must lie in [1, 3]");
    }
    if (!(dt > 0.0) || !(t_end > 0.0) || !(t_end >= dt)) {
        throw ParameterError("sim: need 0 < dt <= t_end");
    }
    if (std::fabs(steps() * dt - t_end) > 1e-9 * t_end) {
        throw ParameterError("sim: t_end must be a whole number of steps");
    }
    if (!(blowup_threshold > 0.0) || !(stability_factor > 0.0)) {
        throw ParameterError("sim: blowup_threshold and stability_factor must be positive");
    }
    if (store_stride < 1) {
        throw ParameterError("sim: store_stride must be at least 1");
    }
}

void SimParams::validate_porous(int dim) const {
    validate(dim);
    const double p = op.p;
    if (!(p > 1.0 && p < 4.0 / 3.0)) {
        throw ParameterError("porous: 1 < p < 4/3 required");
    }
    if (!(op.s * p < 1.0)) {
        throw ParameterError("porous: s p < 1 required");
    }
    if (!(m > 2.0 - 2.0 / dim && m <= 3.0)) {
        throw ParameterError("porous: 2 - 2/N < m <= 3 required");
    }
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blowup: return "blowup";
        case RunStatus::solver_diverged: return "solver_diverged";
    }
    return "?";
}

void Trajectory::write_scalars_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "t,sup_norm,l1,l2,mass,status\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i] << ',' << sup_norm[i] << ',' << l1[i] << ',' << l2[i] << ',' << mass[i]
           << ',' << (i + 1 == times.size() ? to_string(status) : std::string("running")) << '\n';
    }
    os.precision(old);
}

int Trajectory::field_index(double t) const {
    for (std::size_t i = 0; i < field_times.size(); ++i) {
        if (std::fabs(field_times[i] - t) <= 1e-9 * std::max(1.0, std::fabs(t))) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

namespace detail {

Recorder::Recorder(const Grid& g, const SimParams& p, const RunOptions& o, std::string scheme)
    : params_(p), weight_(o.weight) {
    traj_.grid = g;
    traj_.scheme = std::move(scheme);
    if (!weight_.empty() && weight_.size() != g.size()) {
        throw DataError("run: weight has the wrong length");
    }
}

bool Recorder::record(int n, const std::vector<double>& u) {
    const double t = n * params_.dt;
    double sup = 0.0, l1 = 0.0, l2 = 0.0, mass = 0.0, lo = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u[i];
        if (!std::isfinite(v)) {
            finite = false;
            break;
        }
        sup = std::max(sup, std::fabs(v));
        l1 += std::fabs(v);
        l2 += v * v;
        mass += v * (weight_.empty() ? 1.0 : weight_[i]);
        lo = std::min(lo, v);
    }
    if (!finite) {
        traj_.status = RunStatus::solver_diverged;
        return false;
    }
    const double cell = traj_.grid.cell();
    traj_.times.push_back(t);
    traj_.sup_norm.push_back(sup);
    traj_.l1.push_back(l1 * cell);
    traj_.l2.push_back(std::sqrt(l2 * cell));
    traj_.mass.push_back(mass * cell);
    if (lo < -1e-8) {
        if (traj_.negative_steps == 0) {
            std::ostringstream os;
            os << "negative undershoot " << lo << " first at t = " << t;
            traj_.warnings.push_back(os.str());
        }
        ++traj_.negative_steps;
    }
    traj_.min_value = std::min(traj_.min_value, lo);

    const bool over = sup > params_.blowup_threshold;
    const bool last = n == params_.steps();
    if (n % params_.store_stride == 0 || last || over) {
        traj_.field_times.push_back(t);
        traj_.fields.emplace_back(traj_.grid, u);
    }
    if (over) {
        traj_.status = RunStatus::blowup;
        return false;
    }
    traj_.t_star = t;
    return true;
}

Trajectory Recorder::finish() {
    if (traj_.status == RunStatus::completed) {
        traj_.t_star = traj_.times.empty() ? 0.0 : traj_.times.back();
    }
    return std::move(traj_);
}

}  // namespace detail

Field Reaction::evaluate(const Field& u, const SimParams& p) const {
    Field out(u.grid);
    if (global_mass) {
        const double total = u.integral();
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double v = u[i];
            out[i] = v * v * (1.0 - total) - v;
        }
        return out;
    }
    if (kernel == nullptr) {
        throw StateError("reaction: no kernel supplied");
    }
    if (p.k == 0.0 || p.mu == 0.0) {
        return reaction(u, Field(u.grid), p.mu, p.k, p.gamma);
    }
    return reaction(u, convolve(u, *kernel), p.mu, p.k, p.gamma);
}

L1Stepper::L1Stepper(const Field& u0, const SimParams& params, Reaction reaction)
    : L1Stepper(std::span<const Field>(&u0, 1), params, reaction) {}

L1Stepper::L1Stepper(std::span<const Field> history, const SimParams& params, Reaction reaction)
    : params_(params), reaction_(reaction) {
    if (history.empty()) {
        throw StateError("step: empty history");
    }
    grid_ = history.front().grid;
    params_.validate(grid_.dim);
    for (const Field& f : history) {
        if (!(f.grid == grid_)) {
            throw DataError("step: history fields live on different grids");
        }
        f.check_finite("step");
        history_.push_back(f.values);
    }
    if (params_.diffusion) {
        op_ = std::make_unique<FracPLaplacian>(grid_, params_.op);
    }
    c_ = std::tgamma(2.0 - params_.alpha) * std::pow(params_.dt, params_.alpha);
    weights_ = l1_weights(params_.alpha, std::max<int>(params_.steps(), history_.size()) + 1);
}

const std::vector<double>& L1Stepper::advance() {
    const std::size_t N = grid_.size();
    const int n = static_cast<int>(history_.size()) - 1;
    const auto& un = history_.back();
    if (n + 1 >= static_cast<int>(weights_.size())) {
        weights_ = l1_weights(params_.alpha, 2 * (n + 1));
    }

    std::vector<double> next(un);
    // Memory: - sum_{j>=1} b_j (u_{n+1-j} - u_{n-j}).
    for (int j = 1; j <= n; ++j) {
        const auto& a = history_[n + 1 - j];
        const auto& b = history_[n - j];
        const double w = weights_[j];
        for (std::size_t i = 0; i < N; ++i) {
            next[i] -= w * (a[i] - b[i]);
        }
    }

    Field u(grid_, un);
    const Field f = reaction_.evaluate(u, params_);
    double sup_u = 0.0;
    for (double v : un) {
        sup_u = std::max(sup_u, std::fabs(v));
    }
    if (op_) {
        std::vector<double> um(N), Lu(N);
        for (std::size_t i = 0; i < N; ++i) {
            um[i] = params_.m == 1.0 ? un[i]
                                     : std::copysign(std::pow(std::fabs(un[i]), params_.m), un[i]);
        }
        op_->apply(um, Lu);
        double sup_L = 0.0;
        for (double v : Lu) {
            sup_L = std::max(sup_L, std::fabs(v));
        }
        if (std::isfinite(sup_L) && c_ * sup_L > params_.stability_factor * sup_u) {
            const double advisory = 0.9 * std::pow(params_.stability_factor * sup_u /
                                                   (std::tgamma(2.0 - params_.alpha) * sup_L),
                                                   1.0 / params_.alpha);
            std::ostringstream os;
            os << "step " << n + 1 << ": diffusion increment " << c_ * sup_L << " exceeds "
               << params_.stability_factor << " x sup|u| = " << params_.stability_factor * sup_u;
            throw StabilityError(os.str(), advisory);
        }
        for (std::size_t i = 0; i < N; ++i) {
            next[i] -= c_ * Lu[i];
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        next[i] += c_ * f[i];
    }
    history_.push_back(std::move(next));
    return history_.back();
}

Field step(std::span<const Field> history, const SimParams& params, const Kernel& kernel) {
    L1Stepper stepper(history, params, Reaction{&kernel, false});
    return Field(history.front().grid, stepper.advance());
}

namespace {

Trajectory run_with(const Field& u0, const SimParams& params, Reaction reaction,
                    const RunOptions& options, const char* scheme) {
    L1Stepper stepper(u0, params, reaction);
    detail::Recorder rec(u0.grid, params, options, scheme);
    if (!rec.record(0, u0.values)) {
        return rec.finish();
    }
    const int steps = params.steps();
    for (int n = 1; n <= steps; ++n) {
        if (!rec.record(n, stepper.advance())) {
            break;
        }
    }
    return rec.finish();
}

}  // namespace

Trajectory run(const Field& u0, const SimParams& params, const Kernel& kernel,
               const RunOptions& options) {
    if (!(kernel.grid == u0.grid)) {
        throw DataError("run: kernel and initial data grids differ");
    }
    return run_with(u0, params, Reaction{&kernel, false}, options, "L1 explicit");
}

Trajectory run_porous(const Field& u0, const SimParams& params, const RunOptions& options) {
    SimParams p = params;
    p.mu = 1.0;
    p.k = 1.0;
    p.gamma = 1.0;
    p.op.porous_regime = true;
    p.validate_porous(u0.grid.dim);
    return run_with(u0, p, Reaction{nullptr, true}, options, "L1 explicit, nonlinear diffusion");
}

ComparisonReport compare_trajectories(const Trajectory& low, const Trajectory& high,
                                      double tolerance) {
    ComparisonReport r;
    r.tolerance = tolerance;
    r.low_status = low.status;
    r.high_status = high.status;
    const std::size_t n = std::min(low.fields.size(), high.fields.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(low.field_times[i] - high.field_times[i]) > 1e-12) {
            throw DataError("comparison: trajectories have different time grids");
        }
        const auto& a = low.fields[i].values;
        const auto& b = high.fields[i].values;
        for (std::size_t j = 0; j < a.size(); ++j) {
            r.max_violation = std::max(r.max_violation, a[j] - b[j]);
        }
        r.horizon = low.field_times[i];
    }
    r.pass = r.max_violation <= tolerance;
    return r;
}

ComparisonReport comparison_experiment(const Field& u0_low, const Field& u0_high,
                                       const SimParams& params, const Kernel& kernel) {
    if (!(u0_low.grid == u0_high.grid)) {
        throw DataError("comparison: initial data grids differ");
    }
    for (std::size_t i = 0; i < u0_low.size(); ++i) {
        if (u0_low[i] > u0_high[i]) {
            throw DataError("comparison: initial data are not ordered");
        }
    }
    SimParams p = params;
    p.store_stride = 1;
    const Trajectory lo = run(u0_low, p, kernel);
    const Trajectory hi = run(u0_high, p, kernel);
    return compare_trajectories(lo, hi);
}

}  // namespace fracrd
