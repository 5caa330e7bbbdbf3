#include "fracrd/diagnostics.hpp"

#include "fracrd/errors.hpp"
#include "fracrd/special_functions.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace fracrd {

namespace {

double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Area of [x0,x1] x [y0,y1] inside the disk of radius r at the origin.
double cell_disk_area(double x0, double x1, double y0, double y1, double r) {
    auto nearest = [](double lo, double hi) {
        return lo > 0.0 ? lo : (hi < 0.0 ? hi : 0.0);
    };
    const double nx = nearest(x0, x1), ny = nearest(y0, y1);
    if (nx * nx + ny * ny >= r * r) {
        return 0.0;
    }
    const double fx = std::max(std::fabs(x0), std::fabs(x1));
    const double fy = std::max(std::fabs(y0), std::fabs(y1));
    if (fx * fx + fy * fy <= r * r) {
        return (x1 - x0) * (y1 - y0);
    }
    const double a = std::max(x0, -r), b = std::min(x1, r);
    // Split where the circle crosses y0 or y1 so every piece is smooth.
    std::vector<double> cuts{a, b};
    for (double y : {y0, y1}) {
        const double d = r * r - y * y;
        if (d > 0.0) {
            for (double x : {-std::sqrt(d), std::sqrt(d)}) {
                if (x > a && x < b) {
                    cuts.push_back(x);
                }
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    auto chord = [&](double x) {
        const double c = std::sqrt(std::max(0.0, r * r - x * x));
        return overlap(y0, y1, -c, c);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) {
            area += ts.integrate(chord, cuts[i], cuts[i + 1]);
        }
    }
    return area;
}

double masked_power(const Field& u, const std::vector<double>& w, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (w[i] > 0.0) {
            acc += w[i] * (q == 1.0 ? u[i] : std::pow(u[i], q));
        }
    }
    return acc;
}

}  // namespace

std::vector<double> ball_weights(const Grid& g, std::array<double, 2> center, double delta) {
    if (!(delta > 0.0)) {
        throw ParameterError("ball: delta must be positive");
    }
    const double eps = 1e-12 * g.L;
    for (int d = 0; d < g.dim; ++d) {
        if (center[d] - delta < -g.L - eps || center[d] + delta > g.L + eps) {
            throw DomainError("ball B(center, delta) leaves the grid box");
        }
    }
    std::vector<double> w(g.size(), 0.0);
    const double hh = 0.5 * g.h;
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        const double x = g.coord(ij[0]) - center[0];
        if (g.dim == 1) {
            w[f] = overlap(x - hh, x + hh, -delta, delta);
        } else {
            const double y = g.coord(ij[1]) - center[1];
            w[f] = cell_disk_area(x - hh, x + hh, y - hh, y + hh, delta);
        }
    }
    return w;
}

double local_mass(const Field& u, std::array<double, 2> center, double delta, double power) {
    return masked_power(u, ball_weights(u.grid, center, delta), power);
}

SteadyRoots steady_roots(double mu, double k, double gamma) {
    if (!(mu > 0.0) || !(k > 0.0)) {
        throw ParameterError("steady_roots: mu and k must be positive");
    }
    if (!(gamma >= 1.0) || !(gamma < mu / (4.0 * k))) {
        throw RegimeError("steady_roots: need 1 <= gamma < mu / (4k)");
    }
    // mu k u^2 - mu u + gamma = 0; the small root via Vieta avoids cancellation.
    const double disc = std::sqrt(1.0 - 4.0 * k * gamma / mu);
    SteadyRoots r;
    r.mu = mu;
    r.k = k;
    r.gamma = gamma;
    r.A = (1.0 + disc) / (2.0 * k);
    r.a = gamma / (k * mu * r.A);
    const auto F = [&](double u) { return mu * u * u * (1.0 - k * u) - gamma * u; };
    const double scale = std::max({1.0, gamma * r.A, mu * r.A * r.A});
    if (std::fabs(F(r.a)) > 1e-12 * scale || std::fabs(F(r.A)) > 1e-12 * scale) {
        throw NumericError("steady_roots: root check failed", std::max(F(r.a), F(r.A)));
    }
    return r;
}

double lyapunov_h(double u, const SteadyRoots& r) {
    if (!(u < r.a)) {
        throw DomainError("lyapunov: u must stay below a");
    }
    return r.A * std::log1p(-u / r.A) - r.a * std::log1p(-u / r.a);
}

double lyapunov_h_prime(double u, const SteadyRoots& r) {
    if (!(u < r.a)) {
        throw DomainError("lyapunov: u must stay below a");
    }
    return (r.A - r.a) * u / ((r.A - u) * (r.a - u));
}

double lyapunov_h_second(double u, const SteadyRoots& r) {
    if (!(u < r.a)) {
        throw DomainError("lyapunov: u must stay below a");
    }
    const double pa = r.a - u, pA = r.A - u;
    return (r.A - r.a) * (r.a * r.A - u * u) / (pA * pA * pa * pa);
}

LyapunovValue lyapunov(const Field& u, const SteadyRoots& roots, std::array<double, 2> center,
                       double delta) {
    const auto w = ball_weights(u.grid, center, delta);
    LyapunovValue v;
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (w[i] > 0.0) {
            v.H += w[i] * lyapunov_h(u[i], roots);
            sq += w[i] * u[i] * u[i];
        }
    }
    v.D = 0.5 * (roots.A - roots.a) * roots.mu * roots.k * sq;
    return v;
}

LocalEnergyReport local_energy_residual(const Trajectory& traj, const SimParams& params,
                                        double eta, std::array<double, 2> center, double delta) {
    const std::size_t n = traj.fields.size();
    if (n < 2) {
        throw DataError("local energy residual: at least two snapshots are needed");
    }
    const double dt = traj.field_times[1] - traj.field_times[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::fabs(traj.field_times[i] - traj.field_times[i - 1] - dt) > 1e-9 * dt) {
            throw DataError("local energy residual: snapshots must be equally spaced");
        }
    }
    const Grid& g = traj.grid;
    const auto w = ball_weights(g, center, delta);
    const Region region = Region::box(g, center, delta);
    const double s = params.op.s, p = params.op.p;

    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = masked_power(traj.fields[i], w, 2.0);
    }
    const auto bj = l1_weights(params.alpha, static_cast<int>(n));

    LocalEnergyReport rep;
    rep.curve.formula_id = "local_energy";
    rep.curve.formula =
        "D^a int_B u^2 + [u]^p_B - 2 mu int_B u^3 + 2 mu eta k int_B u^3 int_B u + 2 gamma int_B u^2";
    for (std::size_t i = 1; i < n; ++i) {
        const Field& u = traj.fields[i];
        LocalEnergyTerms t;
        t.t = traj.field_times[i];
        t.caputo = caputo_l1(params.alpha, dt, std::span(sq).first(i + 1), bj);
        t.seminorm = gagliardo_seminorm(u, s, p, region);
        const double cube = masked_power(u, w, 3.0);
        const double mass = masked_power(u, w, 1.0);
        t.cubic = 2.0 * params.mu * cube;
        t.cross = 2.0 * params.mu * eta * params.k * cube * mass;
        t.linear = 2.0 * params.gamma * sq[i];
        t.residual = t.caputo + t.seminorm - (t.cubic - t.cross - t.linear);
        rep.max_positive = std::max(rep.max_positive, t.residual);
        rep.curve.times.push_back(t.t);
        rep.curve.values.push_back(t.residual);
        rep.rows.push_back(t);
    }
    return rep;
}

BlowupWindow blowup_window(double alpha, double H0) {
    if (!(H0 > 0.0)) {
        throw ParameterError("blowup_window: H0 must be positive");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("blowup_window: alpha must lie in (0, 1]");
    }
    const double g = std::tgamma(alpha + 1.0);
    return {std::pow(g / (4.0 * (H0 + 0.5)), 1.0 / alpha), std::pow(g / H0, 1.0 / alpha)};
}

BlowupFunctional blowup_functional(const Field& u0, const EigenPair& pair) {
    if (!(u0.grid == pair.e1.grid)) {
        throw DataError("blowup_functional: grids differ");
    }
    BlowupFunctional b;
    b.lambda1 = pair.lambda1;
    double acc = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        acc += u0[i] * pair.e1[i];
    }
    b.H0 = acc * u0.grid.cell();
    b.triggered = b.H0 >= 1.0 + b.lambda1;
    return b;
}

// ---------------------------------------------------------------------------

namespace {

struct EnvelopeFit {
    double sigma = 0.0;
    double c = 0.0;
    double sse = 0.0;
    double max_rel = 0.0;
};

// Log-space least squares of values ~ C env(sigma, t); C is closed form.
template <class Env>
EnvelopeFit fit_log(const std::vector<double>& t, const std::vector<double>& y, Env env,
                    double sigma) {
    const std::size_t n = t.size();
    std::vector<double> le(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        le[i] = std::log(std::max(env(sigma, t[i]), 1e-300));
        mean += std::log(y[i]) - le[i];
    }
    mean /= n;
    EnvelopeFit f;
    f.sigma = sigma;
    f.c = std::exp(mean);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(y[i]) - le[i] - mean;
        f.sse += r * r;
        f.max_rel = std::max(f.max_rel, std::fabs(f.c * std::exp(le[i]) - y[i]) / y[i]);
    }
    return f;
}

template <class Env>
EnvelopeFit minimize_sigma(const std::vector<double>& t, const std::vector<double>& y, Env env) {
    // Coarse log grid, then golden section around the best cell.
    double best = 1e-3;
    double best_sse = INFINITY;
    const int coarse = 49;
    for (int i = 0; i < coarse; ++i) {
        const double s = std::pow(10.0, -3.0 + 6.0 * i / (coarse - 1));
        const double e = fit_log(t, y, env, s).sse;
        if (e < best_sse) {
            best_sse = e;
            best = s;
        }
    }
    const double step = std::pow(10.0, 6.0 / (coarse - 1));
    double lo = std::log(best / step), hi = std::log(best * step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = fit_log(t, y, env, std::exp(x1)).sse, f2 = fit_log(t, y, env, std::exp(x2)).sse;
    for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = fit_log(t, y, env, std::exp(x1)).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = fit_log(t, y, env, std::exp(x2)).sse;
        }
    }
    return fit_log(t, y, env, std::exp(0.5 * (lo + hi)));
}

}  // namespace

DecayFit decay_fit(std::span<const double> times, std::span<const double> values, double alpha) {
    if (times.size() != values.size()) {
        throw DataError("decay_fit: times and values differ in length");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("decay_fit: alpha must lie in (0, 1)");
    }
    DecayFit out;
    const std::size_t n = times.size();
    if (n < 4) {
        out.rejected = true;
        out.reason = "fewer than four samples";
        return out;
    }
    // Tail half, thinned to at most 120 samples.
    const std::size_t first = n / 2;
    const std::size_t stride = std::max<std::size_t>(1, (n - first) / 120);
    std::vector<double> t, y;
    for (std::size_t i = first; i < n; i += stride) {
        t.push_back(times[i]);
        y.push_back(values[i]);
    }
    if (t.back() != times[n - 1]) {
        t.push_back(times[n - 1]);
        y.push_back(values[n - 1]);
    }
    for (double v : y) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            out.rejected = true;
            out.reason = "nonpositive or nonfinite samples";
            return out;
        }
    }
    if (!(y.back() < y.front() * (1.0 - 1e-6))) {
        out.rejected = true;
        out.reason = "data do not decay";
        return out;
    }
    auto ml = [alpha](double sigma, double tt) {
        return mittag_leffler(alpha, -sigma * std::pow(tt, alpha));
    };
    auto ex = [alpha](double sigma, double tt) {
        return std::exp(-std::pow(sigma, 1.0 / alpha) * tt);
    };
    const EnvelopeFit fm = minimize_sigma(t, y, ml);
    const EnvelopeFit fe = minimize_sigma(t, y, ex);
    out.sigma_ml = fm.sigma;
    out.c_ml = fm.c;
    out.residual_ml = fm.max_rel;
    out.sigma_exp = fe.sigma;
    out.c_exp = fe.c;
    out.residual_exp = fe.max_rel;
    const bool use_ml = fm.max_rel <= fe.max_rel;
    out.envelope = use_ml ? "mittag_leffler" : "exponential";
    out.sigma_hat = use_ml ? fm.sigma : fe.sigma;
    out.c_hat = use_ml ? fm.c : fe.c;
    out.residual = use_ml ? fm.max_rel : fe.max_rel;
    return out;
}

DecayFit decay_fit(const Trajectory& traj, double alpha) {
    if (traj.status != RunStatus::completed) {
        DecayFit out;
        out.rejected = true;
        out.reason = "run did not complete";
        return out;
    }
    return decay_fit(traj.times, traj.sup_norm, alpha);
}

// ---------------------------------------------------------------------------

namespace {

// |grad v|_2^2 by central differences (one-sided at the edges).
double gradient_energy(const Grid& g, const std::vector<double>& v) {
    double acc = 0.0;
    const int n = g.n;
    auto d = [&](int i, int j, int axis) {
        auto at = [&](int a, int b) { return v[g.flat(a, b)]; };
        int lo = (axis == 0 ? i : j) - 1, hi = (axis == 0 ? i : j) + 1;
        double span = 2.0 * g.h;
        if (lo < 0) {
            lo = 0;
            span = g.h;
        }
        if (hi > n - 1) {
            hi = n - 1;
            span = g.h;
        }
        return axis == 0 ? (at(hi, j) - at(lo, j)) / span : (at(i, hi) - at(i, lo)) / span;
    };
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        for (int axis = 0; axis < g.dim; ++axis) {
            const double gx = d(ij[0], ij[1], axis);
            acc += gx * gx;
        }
    }
    return acc * g.cell();
}

}  // namespace

MoserReport moser_tracker(const Trajectory& traj, double alpha, int k_max,
                          const MoserConstants& c, double m) {
    if (k_max < 0 || k_max > 6) {
        throw ParameterError("moser_tracker: 0 <= k_max <= 6");
    }
    if (traj.fields.empty()) {
        throw DataError("moser_tracker: trajectory has no stored fields");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("moser_tracker: alpha must lie in (0, 1)");
    }
    const Field& u0 = traj.fields.front();
    const double T = traj.field_times.back();
    const double log_time = T > 0.0 ? alpha * std::log(T) - std::log(alpha * std::tgamma(alpha))
                                    : -INFINITY;
    auto sup_int = [&](double q) {
        double best = 0.0;
        for (const Field& f : traj.fields) {
            best = std::max(best, f.lp_power(q));
        }
        return best;
    };
    const double y0 = sup_int(3.0);
    const double base = std::max({1.0, u0.lp_power(1.0), u0.sup_norm()});

    MoserReport rep;
    for (int k = 0; k <= k_max; ++k) {
        MoserRow row;
        row.k = k;
        row.q = std::ldexp(1.0, k) + 2.0;
        std::vector<double> w(u0.size());
        const double e = 0.5 * (m + row.q - 1.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = std::pow(std::max(u0[i], 0.0), e);
        }
        const double K0 = std::max(base, gradient_energy(u0.grid, w));
        rep.K0 = std::max(rep.K0, K0);
        const double pk = std::ldexp(1.0, k);
        const double log_max = std::max(y0 > 0.0 ? pk * std::log(y0) : -INFINITY,
                                        row.q * std::log(K0));
        row.log_bound = (pk - 1.0) * std::log(2.0 * c.a_bar) +
                        c.d0 * (2.0 * pk - k - 2.0) * std::log(2.0) + log_max + log_time;
        row.observed = sup_int(row.q);
        row.ratio = row.observed > 0.0 ? std::exp(std::log(row.observed) - row.log_bound) : 0.0;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

// Quotes a CSV field holding a comma or quote.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c;
        if (c == '"') {
            q += '"';
        }
    }
    return q + '"';
}

}  // namespace

void write_check_matrix(std::ostream& os, const std::vector<CheckRow>& rows) {
    const auto old = os.precision(12);
    os << "theorem,check,regime,value,bound,slack,pass\n";
    for (const auto& r : rows) {
        os << csv_field(r.theorem) << ',' << csv_field(r.check) << ',' << csv_field(r.regime) << ','
           << r.value << ',' << r.bound
           << ',' << r.slack << ',' << (r.pass ? "true" : "false") << '\n';
    }
    os.precision(old);
}

}  // namespace fracrd
