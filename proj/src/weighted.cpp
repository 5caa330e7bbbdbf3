#include "fracrd/diagnostics.hpp"

#include "fracrd/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fracrd {

WeightFunction WeightFunction::power_law(const Grid& g, double gamma_w) {
    if (!(gamma_w > 0.0)) {
        throw ParameterError("weight: gamma_w must be positive");
    }
    WeightFunction w;
    w.grid = g;
    w.gamma_w = gamma_w;
    w.samples.resize(g.size());
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        w.samples[f] = w.at(g.coord(ij[0]), g.dim == 2 ? g.coord(ij[1]) : 0.0);
    }
    return w;
}

double WeightFunction::at(double x, double y) const {
    return std::pow(1.0 + x * x + y * y, -0.5 * (grid.dim + gamma_w));
}

std::array<double, 2> admissible_band(double s, double p, double m) {
    const double theta = m * (p - 1.0);
    if (!(theta > 0.0 && theta < 1.0)) {
        throw ParameterError("weight band: 0 < m (p - 1) < 1 required");
    }
    return {s * p, s * p / theta};
}

double weighted_mass(const Field& u, const WeightFunction& phi) {
    if (!(u.grid == phi.grid)) {
        throw DataError("weighted_mass: grids differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i] * phi.samples[i];
    }
    return acc * u.grid.cell();
}

std::vector<double> weight_operator(const WeightFunction& phi, double s_prime) {
    if (!(s_prime > 0.0 && s_prime < 1.0)) {
        throw ParameterError("weight operator: s' must lie in (0, 1)");
    }
    const Grid& g = phi.grid;
    const int N = g.dim;
    const double expo = N + 2.0 * s_prime;
    const double Lp = g.L + 0.5 * g.h;
    const std::size_t M = g.size();
    std::vector<double> out(M, 0.0);

    // In-box double sum, diagonal excluded.
    for (std::size_t i = 0; i < M; ++i) {
        const auto a = g.index(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (j == i) {
                continue;
            }
            const auto b = g.index(j);
            const double dx = (a[0] - b[0]) * g.h;
            const double dy = (a[1] - b[1]) * g.h;
            const double r2 = dx * dx + dy * dy;
            acc += std::fabs(phi.samples[i] - phi.samples[j]) * std::pow(r2, -0.5 * expo);
        }
        out[i] = acc * g.cell();
    }

    // Exterior, with phi itself (not zero) outside the box: along each ray
    // from x, integrate from the box edge to infinity.
    boost::math::quadrature::exp_sinh<double> es;
    auto ray = [&](double x, double y, double ux, double uy, double R, double px) {
        auto f = [&](double r) {
            if (r <= 0.0) {
                return 0.0;
            }
            const double rr = R + r;
            return std::fabs(px - phi.at(x + rr * ux, y + rr * uy)) * std::pow(rr, -expo) *
                   (N == 2 ? rr : 1.0);
        };
        return es.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    };
    const int n_angles = 128;
    for (std::size_t i = 0; i < M; ++i) {
        const auto a = g.index(i);
        const double x = g.coord(a[0]);
        const double y = N == 2 ? g.coord(a[1]) : 0.0;
        const double px = phi.samples[i];
        if (N == 1) {
            out[i] += ray(x, 0.0, 1.0, 0.0, Lp - x, px) + ray(x, 0.0, -1.0, 0.0, Lp + x, px);
            continue;
        }
        double acc = 0.0;
        for (int k = 0; k < n_angles; ++k) {
            const double th = 2.0 * std::numbers::pi * (k + 0.5) / n_angles;
            const double ux = std::cos(th), uy = std::sin(th);
            const double rx = ux > 0 ? (Lp - x) / ux : (ux < 0 ? (-Lp - x) / ux : INFINITY);
            const double ry = uy > 0 ? (Lp - y) / uy : (uy < 0 ? (-Lp - y) / uy : INFINITY);
            acc += ray(x, y, ux, uy, std::min(rx, ry), px);
        }
        out[i] += acc * 2.0 * std::numbers::pi / n_angles;
    }
    return out;
}

namespace {

double class_integral(const WeightFunction& phi, double s_prime, double theta) {
    const auto Mphi = weight_operator(phi, s_prime);
    double acc = 0.0;
    for (std::size_t i = 0; i < Mphi.size(); ++i) {
        acc += std::pow(Mphi[i], 1.0 / (1.0 - theta)) *
               std::pow(phi.samples[i], -theta / (1.0 - theta));
    }
    return acc * phi.grid.cell();
}

}  // namespace

WeightClassReport weight_class_constant(const WeightFunction& phi, double s, double p, double m) {
    const double theta = m * (p - 1.0);
    if (!(theta > 0.0 && theta < 1.0)) {
        throw ParameterError("weight class: 0 < m (p - 1) < 1 required");
    }
    if (!(s > 0.0 && s * p < 1.0)) {
        throw ParameterError("weight class: s p < 1 required");
    }
    const double s_prime = 0.5 * s * p;
    const auto band = admissible_band(s, p, m);
    WeightClassReport r;
    r.in_band = phi.gamma_w > band[0] && phi.gamma_w < band[1];
    r.value = class_integral(phi, s_prime, theta);

    const Grid& g = phi.grid;
    const Grid big = Grid::make(g.dim, 2.0 * g.L, 2 * (g.n - 1) + 1);
    r.value_extended = class_integral(WeightFunction::power_law(big, phi.gamma_w), s_prime, theta);
    r.finite = std::isfinite(r.value) && std::isfinite(r.value_extended);
    r.growth = r.value > 0.0 ? r.value_extended / r.value - 1.0 : INFINITY;
    r.member = r.finite && r.growth <= 0.1;
    return r;
}

HolderReport holder_mass_check(const Trajectory& u, const Trajectory& v, const WeightFunction& phi,
                               double alpha, double s, double p, double m, double eps) {
    if (u.field_times.size() != v.field_times.size() || u.field_times.size() < 3) {
        throw DataError("holder check: need matching snapshot times, at least three");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("holder check: alpha must lie in (0, 1)");
    }
    HolderReport r;
    r.theta = 1.0 - m * (p - 1.0);
    if (!(r.theta > 0.0 && r.theta < 1.0)) {
        throw ParameterError("holder check: 0 < m (p - 1) < 1 required");
    }
    const std::size_t n = u.field_times.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(u.field_times[i] - v.field_times[i]) > 1e-12) {
            throw DataError("holder check: snapshot times differ");
        }
        const auto& a = u.fields[i].values;
        const auto& b = v.fields[i].values;
        const double tol = 1e-8 * std::max(1.0, u.fields[i].sup_norm());
        Field diff(u.grid);
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] < b[j] - tol) {
                throw DataError("holder check: trajectories are not ordered");
            }
            diff[j] = a[j] - b[j];
        }
        r.times.push_back(u.field_times[i]);
        r.X.push_back(std::max(0.0, weighted_mass(diff, phi)));
    }

    const double expo = alpha * r.theta;
    std::vector<double> Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        Y[i] = std::pow(r.X[i], r.theta);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dt = r.times[j] - r.times[i];
            r.K_hat = std::max(r.K_hat, std::fabs(Y[j] - Y[i]) / std::pow(dt, expo));
        }
    }

    // Log-log slope of |Y(t) - Y(0)| against t.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (std::size_t j = 1; j < n; ++j) {
        const double d = std::fabs(Y[j] - Y[0]);
        const double dt = r.times[j] - r.times[0];
        if (d > 0.0 && dt > 0.0) {
            const double lx = std::log(dt), ly = std::log(d);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
    }
    r.exponent_expected = expo;
    r.exponent_fit = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : INFINITY;

    r.C_phi = weight_class_constant(phi, s, p, m).value;
    r.K_phi = eps * std::pow(r.C_phi / (alpha * std::tgamma(alpha)), r.theta);
    r.pass_constant = r.K_hat <= 1.1 * r.K_phi;
    r.pass_exponent = r.exponent_fit >= expo - 0.1;
    return r;
}

}  // namespace fracrd
