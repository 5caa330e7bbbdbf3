#include "fracrd/errors.hpp"
#include "fracrd/spatial_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fracrd {

namespace {

std::string describe(const Grid& g) {
    std::ostringstream os;
    os << "dim=" << g.dim << " L=" << g.L << " n=" << g.n;
    return os.str();
}

// Sum of one to three raised-cosine bumps, compactly supported inside the box
// so the zero extension stays C^1. Drawn in continuum coordinates: the same
// seed gives the same functions on every grid.
Field random_bumps(const Grid& g, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int K = count(rng);
    struct Bump {
        double a, cx, cy, w;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < K; ++k) {
        Bump b;
        b.a = 0.2 + 0.8 * unit(rng);
        b.w = g.L * (0.15 + 0.35 * unit(rng));
        const double room = 0.95 * g.L - b.w;
        b.cx = room * (2.0 * unit(rng) - 1.0);
        b.cy = g.dim == 2 ? room * (2.0 * unit(rng) - 1.0) : 0.0;
        bumps.push_back(b);
    }
    Field u(g);
    const double pi = std::acos(-1.0);
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        const double x = g.coord(ij[0]);
        const double y = g.dim == 2 ? g.coord(ij[1]) : 0.0;
        double v = 0.0;
        for (const auto& b : bumps) {
            const double r = std::hypot(x - b.cx, y - b.cy) / b.w;
            if (r < 1.0) {
                v += b.a * 0.5 * (1.0 + std::cos(pi * r));
            }
        }
        u.values[f] = v;
    }
    return u;
}

double grad_sq(const Field& u) {
    const Grid& g = u.grid;
    auto at = [&](int i, int j) {
        if (i < 0 || i >= g.n || j < 0 || j >= g.n) {
            return 0.0;
        }
        return u.values[g.flat(i, g.dim == 1 ? 0 : j)];
    };
    double acc = 0.0;
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        const double ux = (at(ij[0] + 1, ij[1]) - at(ij[0] - 1, ij[1])) / (2.0 * g.h);
        acc += ux * ux;
        if (g.dim == 2) {
            const double uy = (at(ij[0], ij[1] + 1) - at(ij[0], ij[1] - 1)) / (2.0 * g.h);
            acc += uy * uy;
        }
    }
    return acc * g.cell();
}

}  // namespace

Estimate estimate_gn_constant(const Grid& grid, int trial_count, std::uint64_t seed) {
    grid.validate();
    if (trial_count < 100) {
        throw ParameterError("estimate_gn_constant: trial_count must be at least 100");
    }
    std::mt19937_64 rng(seed);
    const double N = grid.dim;
    double best = 0.0;
    for (int t = 0; t < trial_count; ++t) {
        const Field u = random_bumps(grid, rng);
        const double num = u.lp_power(3.0);
        const double l2 = std::sqrt(u.lp_power(2.0));
        const double g2 = std::sqrt(grad_sq(u));
        const double den = std::pow(g2, N / 2.0) * std::pow(l2, 3.0 - N / 2.0) + l2 * l2 * l2;
        if (!(den > 0.0)) {
            continue;
        }
        best = std::max(best, num / den);
    }
    return {best, "C_GN", "max ratio over random raised-cosine bumps", trial_count, seed,
            describe(grid)};
}

Estimate estimate_sobolev_constant(const Grid& grid, double s, double p, int trial_count,
                                   std::uint64_t seed) {
    grid.validate();
    if (!(s > 0.0 && s < 1.0) || !(p > 1.0)) {
        throw ParameterError("estimate_sobolev_constant: need 0 < s < 1 and p > 1");
    }
    if (!(s * p < grid.dim)) {
        throw ParameterError("estimate_sobolev_constant: s p must be below N");
    }
    if (trial_count < 1) {
        throw ParameterError("estimate_sobolev_constant: trial_count must be positive");
    }
    const double pstar = grid.dim * p / (grid.dim - s * p);
    std::mt19937_64 rng(seed);
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trial_count; ++t) {
        const Field u = random_bumps(grid, rng);
        const double den = std::pow(u.lp_power(pstar), p / pstar);
        if (!(den > 0.0)) {
            continue;
        }
        best = std::min(best, gagliardo_seminorm_extended(u, s, p) / den);
    }
    return {best, "S", "min ratio over random raised-cosine bumps, whole-space seminorm",
            trial_count, seed, describe(grid)};
}

Estimate power_monotonicity_constant(double p, double alpha_exp, long sample_count,
                                     std::uint64_t seed) {
    if (!(p > 1.0) || !(alpha_exp > 0.0 && alpha_exp <= 1.0)) {
        throw ParameterError("power_monotonicity_constant: need p > 1 and 0 < alpha <= 1");
    }
    if (sample_count < 1) {
        throw ParameterError("power_monotonicity_constant: sample_count must be positive");
    }
    const double q = (p + alpha_exp - 1.0) / p;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < sample_count; ++i) {
        const double a = 10.0 - dist(rng);  // (0, 10]
        const double b = 10.0 - dist(rng);
        if (a == b) {
            continue;
        }
        const double num = phi_p(a - b, p) * (std::pow(a, alpha_exp) - std::pow(b, alpha_exp));
        const double den = std::pow(std::fabs(std::pow(a, q) - std::pow(b, q)), p);
        if (!(den > 0.0)) {
            continue;
        }
        best = std::min(best, num / den);
    }
    return {best, "c3", "min ratio over uniform samples of (0, 10]^2", static_cast<int>(
            std::min<long>(sample_count, std::numeric_limits<int>::max())), seed, ""};
}

}  // namespace fracrd
