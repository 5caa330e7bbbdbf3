#include "fracrd/verify.hpp"

#include "fracrd/eigen.hpp"
#include "fracrd/errors.hpp"
#include "fracrd/evolution.hpp"
#include "fracrd/fractional_time.hpp"
#include "fracrd/special_functions.hpp"
#include "fracrd/spatial_operators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace fracrd {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

CheckRow row(const std::string& theorem, const std::string& check, const std::string& regime,
             double value, double bound, bool pass) {
    return {theorem, check, regime, value, bound, bound - value, pass};
}

Field gaussian(const Grid& g, double amp, double c, double w) {
    Field u(g);
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        double r2 = (g.coord(ij[0]) - c) * (g.coord(ij[0]) - c);
        if (g.dim == 2) {
            r2 += g.coord(ij[1]) * g.coord(ij[1]);
        }
        u[f] = amp * std::exp(-r2 / (w * w));
    }
    return u;
}

// 1. Mittag-Leffler values.
void c_mittag_leffler(CriterionResult& r, std::uint64_t) {
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double z = -30.0 + 0.3 * i;
        const double e = std::exp(z);
        worst = std::max(worst, std::fabs(mittag_leffler(1.0, z) - e) / std::max(1.0, e));
    }
    r.rows.push_back(row("mittag_leffler", "E_1(z) = exp(z), z in [-30,30]", "201 points", worst,
                         1e-12, worst <= 1e-12));
    bool all = worst <= 1e-12;
    for (double alpha : {0.3, 0.5, 0.8}) {
        const double cap = 1.0 / std::tgamma(alpha);
        double prev = cap;
        bool range = true, decreasing = true;
        double min_drop = INFINITY;
        for (int i = 1; i <= 1000; ++i) {
            const double eta = 0.05 * i;
            const double v = mittag_leffler2(alpha, alpha, -eta);
            range = range && v >= 0.0 && v <= cap;
            decreasing = decreasing && v < prev;
            min_drop = std::min(min_drop, prev - v);
            prev = v;
        }
        r.rows.push_back(row("mittag_leffler", "E_{a,a}(-eta) in [0, 1/Gamma(a)], decreasing",
                             "alpha=" + fmt(alpha), -min_drop, 0.0, range && decreasing));
        all = all && range && decreasing;
    }
    r.pass = all;
    r.detail = "max rel |E_1 - exp| = " + fmt(worst);
}

// 2. L1 order on the relaxation problem.
void c_l1_order(CriterionResult& r, std::uint64_t) {
    bool all = true;
    std::ostringstream d;
    for (double alpha : {0.4, 0.7}) {
        std::vector<double> err;
        for (int n : {64, 128, 256}) {
            const double dt = 1.0 / n;
            ScalarSolveOptions opt;
            opt.starting_corrections = true;
            const auto u = solve_scalar_fde(alpha, 1.0, [](double x) { return -x; }, dt, n, opt);
            double e = 0.0;
            for (int i = 0; i <= n; ++i) {
                e = std::max(e, std::fabs(u[i] - mittag_leffler(alpha, -std::pow(i * dt, alpha))));
            }
            err.push_back(e);
        }
        const double order = std::log2(err[0] / err[2]) / 2.0;
        const bool ok = std::fabs(order - (2.0 - alpha)) <= 0.25;
        r.rows.push_back(row("l1_scheme", "global order vs 2-alpha", "alpha=" + fmt(alpha),
                             std::fabs(order - (2.0 - alpha)), 0.25, ok));
        d << "alpha=" << alpha << " order " << fmt(order) << " (target " << 2.0 - alpha << ") ";
        all = all && ok;
    }
    r.pass = all;
    r.detail = d.str();
}

// 3. Pairing identity.
void c_pairing(CriterionResult& r, std::uint64_t seed) {
    const Grid g = Grid::make(1, 1.0, 65);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (double p : {1.2, 2.0, 3.0}) {
        double w = 0.0;
        for (int t = 0; t < 100; ++t) {
            Field u(g);
            for (double& v : u.values) {
                v = U(rng);
            }
            w = std::max(w, pairing_identity(u, 0.5, p, Region::full(g)).relative);
        }
        r.rows.push_back(row("pairing", "relative residual", "p=" + fmt(p), w, 1e-10, w <= 1e-10));
        worst = std::max(worst, w);
    }
    r.pass = worst <= 1e-10;
    r.detail = "max relative residual " + fmt(worst);
}

// 4. Discrete chain inequalities.
void c_chain(CriterionResult& r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = -INFINITY;
    for (int t = 0; t < 50; ++t) {
        const double alpha = 0.1 + 0.8 * U(rng);
        const bool up = t % 2 == 0;
        std::vector<double> v{up ? 0.2 * U(rng) : 1.0 + U(rng)};
        for (int i = 0; i < 40; ++i) {
            const double d = 0.1 * U(rng);
            v.push_back(up ? v.back() + d : std::max(0.0, v.back() - 0.3 * d));
        }
        const auto b = l1_weights(alpha, static_cast<int>(v.size()));
        for (int power : {2, 3, 4}) {
            for (std::size_t n = 2; n <= v.size(); ++n) {
                std::span<const double> pre(v.data(), n);
                std::vector<double> pw(n);
                for (std::size_t i = 0; i < n; ++i) {
                    pw[i] = std::pow(pre[i], power);
                }
                const double lhs = std::pow(pre.back(), power - 1) * caputo_l1(alpha, 0.05, pre, b);
                const double rhs = caputo_l1(alpha, 0.05, pw, b) / power;
                // Positive means the inequality fails.
                worst = std::max(worst, (rhs - lhs) / std::max(1.0, std::fabs(lhs)));
            }
        }
    }
    r.pass = worst <= 1e-12;
    r.rows.push_back(row("chain", "u^{n-1} D u - D u^n / n >= 0", "50 series, n=2,3,4", worst, 1e-12,
                         r.pass));
    r.detail = "max relative (rhs - lhs) " + fmt(worst);
}

// 5. Comparison principle.
void c_comparison(CriterionResult& r, std::uint64_t seed) {
    const Grid g = Grid::make(1, 1.0, 65);
    const Kernel J = Kernel::make(g, KernelShape::box, 0.125, 0.0625, 0.1);
    SimParams p;
    p.alpha = 0.8;
    p.mu = 0.1;
    p.dt = 1e-3;
    p.t_end = 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double c1 = U(rng) - 0.5, c2 = U(rng) - 0.5;
        const double w = 0.1 + 0.2 * U(rng);
        Field lo = gaussian(g, 0.05 * U(rng), c1, w);
        Field bump = gaussian(g, 0.05 * U(rng), c2, w);
        Field hi = lo;
        for (std::size_t i = 0; i < hi.size(); ++i) {
            hi[i] += bump[i];
        }
        const ComparisonReport c = comparison_experiment(lo, hi, p, J);
        worst = std::max(worst, c.max_violation);
    }
    r.pass = worst <= 1e-8;
    r.rows.push_back(row("comparison", "max (u_low - u_high)+", "20 pairs, mu=0.1, alpha=0.8", worst,
                         1e-8, r.pass));
    r.detail = "max violation " + fmt(worst);
}

// 6. Blow-up window.
void c_blowup(CriterionResult& r, std::uint64_t) {
    const Grid g = Grid::make(1, 1.0, 65);
    const EigenPair ep = first_eigenpair_linear(g, 0.5);
    double e2 = 0.0;
    for (double v : ep.e1.values) {
        e2 += v * v;
    }
    e2 *= g.cell();
    const double H0_target = 2.0 * (1.0 + ep.lambda1);
    Field u0 = ep.e1;
    for (double& v : u0.values) {
        v *= H0_target / e2;
    }
    const BlowupFunctional bf = blowup_functional(u0, ep);
    const Kernel J = Kernel::make(g, KernelShape::box, 0.25, 0.1, 0.1);
    bool all = bf.triggered;
    std::ostringstream d;
    d << "lambda1 " << fmt(ep.lambda1) << " H0 " << fmt(bf.H0);
    for (double alpha : {0.5, 0.8}) {
        const BlowupWindow w = blowup_window(alpha, bf.H0);
        SimParams p;
        p.alpha = alpha;
        p.mu = 1.0;
        p.k = 1e-6;
        p.gamma = 1.0;
        p.dt = 1e-5;
        p.t_end = std::ceil(2.5 * w.t_hi / p.dt) * p.dt;
        p.store_stride = 1 << 30;
        const Trajectory t = run(u0, p, J);
        const bool blew = t.status == RunStatus::blowup;
        const bool inside = blew && t.t_star >= 0.5 * w.t_lo && t.t_star <= 2.0 * w.t_hi;
        r.rows.push_back(row("blowup_window", "t* >= t_lo/2", "alpha=" + fmt(alpha), 0.5 * w.t_lo,
                             t.t_star, blew && t.t_star >= 0.5 * w.t_lo));
        r.rows.push_back(row("blowup_window", "t* <= 2 t_hi", "alpha=" + fmt(alpha), t.t_star,
                             2.0 * w.t_hi, blew && t.t_star <= 2.0 * w.t_hi));
        d << " | alpha=" << alpha << " t_lo " << fmt(w.t_lo) << " t_hi " << fmt(w.t_hi) << " t* "
          << fmt(t.t_star) << " (" << to_string(t.status) << ")";
        all = all && inside;
    }
    r.pass = all;
    r.detail = d.str();
}

// 7. Decay envelope.
void c_decay(CriterionResult& r, std::uint64_t) {
    const Grid g = Grid::make(1, 20.0, 129);
    SimParams p;
    p.alpha = 0.8;
    p.op.s = 0.9;
    p.mu = 0.05;
    p.k = 1.0;
    p.gamma = 1.0;
    p.dt = 1e-3;
    p.t_end = 5.0;
    p.store_stride = 100;
    const Kernel J = Kernel::make(g, KernelShape::box, 0.5, 0.25, 0.1);
    const Trajectory t = run(gaussian(g, 0.01, 0.0, 4.0), p, J);
    const DecayFit f = decay_fit(t, p.alpha);
    const bool sig = !f.rejected && f.sigma_hat >= 0.8 && f.sigma_hat <= 1.2;
    const bool res = !f.rejected && f.residual <= 0.1;
    r.rows.push_back(row("decay", "sigma_hat in [0.8, 1.2]", f.envelope, std::fabs(f.sigma_hat - 1.0),
                         0.2, sig));
    r.rows.push_back(row("decay", "max relative residual", f.envelope, f.residual, 0.1, res));
    r.pass = sig && res;
    r.detail = "envelope " + f.envelope + " sigma " + fmt(f.sigma_hat) + " residual " +
               fmt(f.residual) + " (ML " + fmt(f.sigma_ml) + "/" + fmt(f.residual_ml) + ", exp " +
               fmt(f.sigma_exp) + "/" + fmt(f.residual_exp) + ")";
}

// 8. Lyapunov structure.
void c_lyapunov(CriterionResult& r, std::uint64_t) {
    const Grid g = Grid::make(1, 2.0, 65);
    const SteadyRoots roots = steady_roots(8.0, 1.0, 1.0);
    SimParams p;
    p.alpha = 0.8;
    p.mu = 8.0;
    p.k = 1.0;
    p.gamma = 1.0;
    p.dt = 1e-3;
    p.t_end = 10.0;
    p.store_stride = 100;
    const Kernel J = Kernel::make(g, KernelShape::box, 0.5, 0.25, 0.1);
    const Field u0 = gaussian(g, 0.5 * roots.a, 0.0, 0.5);
    const Trajectory t = run(u0, p, J);
    double minH = INFINITY, minD = INFINITY;
    bool below = true;
    for (const Field& f : t.fields) {
        below = below && f.sup_norm() < roots.a;
        if (!below) {
            break;
        }
        const LyapunovValue v = lyapunov(f, roots, {0.0, 0.0}, 0.5);
        minH = std::min(minH, v.H);
        minD = std::min(minD, v.D);
    }
    const double last = local_mass(t.fields.back(), {0.0, 0.0}, 0.5, 2.0);
    const bool done = t.status == RunStatus::completed && std::fabs(t.field_times.back() - p.t_end) < 1e-9;
    r.rows.push_back(row("lyapunov", "min H", "mu=8,k=1,gamma=1", -minH, 0.0, below && minH >= 0.0));
    r.rows.push_back(row("lyapunov", "min D", "mu=8,k=1,gamma=1", -minD, 0.0, below && minD >= 0.0));
    r.rows.push_back(row("lyapunov", "int_B u^2 at T=10", "B(0,0.5)", last, 1e-4, last < 1e-4));
    r.pass = below && done && minH >= 0.0 && minD >= 0.0 && last < 1e-4;
    r.detail = "a " + fmt(roots.a) + " min H " + fmt(minH) + " min D " + fmt(minD) +
               " int_B u^2(T) " + fmt(last);
}

// 9. Nonlinear-diffusion regime: bounded sup norm and the Moser bound.
void c_moser(CriterionResult& r, std::uint64_t) {
    const Grid g = Grid::make(1, 4.0, 33);
    SimParams p;
    p.alpha = 0.5;
    p.op.s = 0.7;
    p.op.p = 1.25;
    p.m = 2.5;
    p.dt = 1e-4;
    p.t_end = 2.0;
    p.store_stride = 200;
    const Field u0 = gaussian(g, 0.5, 0.0, 1.0);
    const Trajectory t = run_porous(u0, p);
    double sup = 0.0;
    for (double v : t.sup_norm) {
        sup = std::max(sup, v);
    }
    const bool bounded = t.status == RunStatus::completed && std::isfinite(sup);
    r.rows.push_back(row("porous_bound", "max sup norm on [0,2]", "m=2.5,p=1.25,s=0.7", sup,
                         p.blowup_threshold, bounded));
    const MoserReport mr = moser_tracker(t, p.alpha, 4, {}, p.m);
    for (const MoserRow& m : mr.rows) {
        r.rows.push_back(row("moser", "observed / bound", "k=" + std::to_string(m.k), m.ratio, 1.05,
                             m.ratio <= 1.05));
    }
    r.pass = bounded && mr.max_ratio <= 1.05;
    r.detail = "status " + to_string(t.status) + " max sup " + fmt(sup) + " min value " +
               fmt(t.min_value) + " max Moser ratio " + fmt(mr.max_ratio);
}

// 10. Weighted-mass Hoelder estimate.
void c_holder(CriterionResult& r, std::uint64_t) {
    const Grid g = Grid::make(1, 8.0, 33);
    SimParams p;
    p.alpha = 0.5;
    p.op.s = 0.7;
    p.op.p = 1.25;
    p.m = 2.5;
    p.dt = 1e-4;
    p.t_end = 1.0;
    p.store_stride = 100;
    const Trajectory u = run_porous(gaussian(g, 0.5, 0.0, 1.0), p);
    const Trajectory v = run_porous(gaussian(g, 0.25, 0.0, 1.0), p);
    const WeightFunction phi = WeightFunction::power_law(g, 1.1);
    const WeightClassReport wc = weight_class_constant(phi, p.op.s, p.op.p, p.m);
    const HolderReport h = holder_mass_check(u, v, phi, p.alpha, p.op.s, p.op.p, p.m);
    const bool done = u.status == RunStatus::completed && v.status == RunStatus::completed;
    const bool expo = h.exponent_fit >= h.exponent_expected - 0.1;
    const bool cst = h.K_hat <= 1.1 * h.K_phi;
    r.rows.push_back(row("weight_class", "C(phi) growth on doubled box", "gamma_w=1.1", wc.growth, 0.1,
                         wc.member));
    r.rows.push_back(row("holder", "fitted exponent", "m(p-1)=0.625", h.exponent_expected - 0.1 - h.exponent_fit,
                         0.0, expo));
    r.rows.push_back(row("holder", "K_hat <= 1.1 K(phi)", "m(p-1)=0.625", h.K_hat, 1.1 * h.K_phi, cst));
    r.pass = done && wc.member && expo && cst;
    r.detail = "C(phi) " + fmt(h.C_phi) + " K_hat " + fmt(h.K_hat) + " K(phi) " + fmt(h.K_phi) +
               " exponent " + fmt(h.exponent_fit) + " (expected " + fmt(h.exponent_expected) + ")";
}

// 11. L1 against spectral Duhamel.
void c_cross(CriterionResult& r, std::uint64_t) {
    const Grid g = Grid::make(1, 4.0, 65);
    const Kernel J = Kernel::make(g, KernelShape::box, 0.25, 0.1, 0.1);
    SimParams p;
    p.alpha = 0.5;
    p.mu = 0.5;
    p.dt = 1e-3;
    p.t_end = 0.5;
    p.store_stride = 10;
    const Field u0 = gaussian(g, 0.1, 0.0, 0.6);
    const Trajectory a = run(u0, p, J);
    const Trajectory b = spectral_duhamel_run(u0, p, J);
    double diff = INFINITY;
    if (a.fields.size() == b.fields.size()) {
        diff = 0.0;
        for (std::size_t n = 0; n < a.fields.size(); ++n) {
            for (std::size_t i = 0; i < u0.size(); ++i) {
                diff = std::max(diff, std::fabs(a.fields[n][i] - b.fields[n][i]));
            }
        }
    }
    const double tol = 5.0 * std::max(std::pow(p.dt, 2.0 - p.alpha), g.h);
    r.pass = a.status == RunStatus::completed && b.status == RunStatus::completed && diff <= tol;
    r.rows.push_back(row("cross_method", "sup |u_L1 - u_spectral|", "p=2, alpha=0.5", diff, tol, r.pass));
    r.detail = "sup difference " + fmt(diff) + " tolerance " + fmt(tol);
}

// 12. Empirical constants.
void c_constants(CriterionResult& r, std::uint64_t seed) {
    const double c2 = power_monotonicity_constant(2.0, 1.0, 100000, seed).value;
    const bool exact = std::fabs(c2 - 1.0) <= 1e-9;
    r.rows.push_back(row("monotonicity", "|c(2,1) - 1|", "1e5 samples", std::fabs(c2 - 1.0), 1e-9, exact));
    auto stable = [&](const std::string& name, const std::string& regime, double a, double b) {
        const double rel = std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
        r.rows.push_back(row(name, "relative change under doubling", regime, rel, 0.1, rel <= 0.1));
        return rel <= 0.1;
    };
    bool all = exact;
    all = stable("monotonicity", "p=1.2, 1e5 vs 2e5 samples",
                 power_monotonicity_constant(1.2, 0.5, 100000, seed).value,
                 power_monotonicity_constant(1.2, 0.5, 200000, seed).value) && all;
    all = stable("sobolev", "s=0.4, p=2, n=65 vs 129",
                 estimate_sobolev_constant(Grid::make(1, 1.0, 65), 0.4, 2.0, 100, seed).value,
                 estimate_sobolev_constant(Grid::make(1, 1.0, 129), 0.4, 2.0, 100, seed).value) && all;
    all = stable("sobolev", "s=0.4, p=2, 100 vs 200 trials",
                 estimate_sobolev_constant(Grid::make(1, 1.0, 65), 0.4, 2.0, 100, seed).value,
                 estimate_sobolev_constant(Grid::make(1, 1.0, 65), 0.4, 2.0, 200, seed).value) && all;
    all = stable("gagliardo_nirenberg", "n=65 vs 129",
                 estimate_gn_constant(Grid::make(1, 1.0, 65), 100, seed).value,
                 estimate_gn_constant(Grid::make(1, 1.0, 129), 100, seed).value) && all;
    all = stable("gagliardo_nirenberg", "100 vs 200 trials",
                 estimate_gn_constant(Grid::make(1, 1.0, 65), 100, seed).value,
                 estimate_gn_constant(Grid::make(1, 1.0, 65), 200, seed).value) && all;
    r.pass = all;
    r.detail = "c(2,1) = " + fmt(c2);
}

struct Criterion {
    const char* name;
    double budget;
    void (*fn)(CriterionResult&, std::uint64_t);
};

const Criterion kCriteria[] = {
    {"Mittag-Leffler correctness", 1.0, c_mittag_leffler},
    {"L1 scheme order", 5.0, c_l1_order},
    {"pairing identity", 10.0, c_pairing},
    {"discrete chain inequalities", 1.0, c_chain},
    {"comparison principle", 60.0, c_comparison},
    {"blow-up window", 120.0, c_blowup},
    {"decay envelope", 60.0, c_decay},
    {"Lyapunov structure", 120.0, c_lyapunov},
    {"nonlinear diffusion bounds", 180.0, c_moser},
    {"weighted-mass Hoelder estimate", 120.0, c_holder},
    {"L1 vs spectral Duhamel", 60.0, c_cross},
    {"constant estimators", 30.0, c_constants},
};

}  // namespace

const std::vector<std::string>& criterion_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const Criterion& s : kCriteria) {
            v.emplace_back(s.name);
        }
        return v;
    }();
    return names;
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
    if (id < 1 || id > 12) {
        throw ParameterError("criterion id must be in 1..12");
    }
    const Criterion& s = kCriteria[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = s.name;
    r.budget = s.budget;
    const auto t0 = Clock::now();
    try {
        s.fn(r, seed);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_time = r.seconds < r.budget;
    r.rows.push_back(row("runtime", "seconds", s.name, r.seconds, r.budget, in_time));
    r.pass = r.pass && in_time;
    return r;
}

std::vector<int> suite_ids(const std::string& suite) {
    if (suite == "all") {
        return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    }
    if (suite == "quick") {
        return {1, 2, 3, 4, 12};
    }
    std::vector<int> ids;
    std::stringstream ss(suite);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int id = std::stoi(item, &used);
            if (used != item.size() || id < 1 || id > 12) {
                throw std::invalid_argument(item);
            }
            ids.push_back(id);
        } catch (const std::logic_error&) {
            throw ParameterError("unknown suite '" + suite + "': use all, quick or ids 1..12");
        }
    }
    if (ids.empty()) {
        throw ParameterError("empty suite");
    }
    return ids;
}

}  // namespace fracrd
