#include <doctest.h>

#include "fracrd/diagnostics.hpp"
#include "fracrd/errors.hpp"
#include "fracrd/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace fracrd;

namespace {

Field sample(const Grid& g, double (*f)(double)) {
    Field u(g);
    for (int i = 0; i < g.n; ++i) {
        u[i] = f(g.coord(i));
    }
    return u;
}

double wavy(double x) { return 1.0 + 0.5 * std::sin(3.0 * x) + 0.2 * x * x; }

Trajectory frozen(const std::vector<Field>& fields, double dt) {
    Trajectory t;
    t.grid = fields.front().grid;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        t.times.push_back(i * dt);
        t.sup_norm.push_back(fields[i].sup_norm());
        t.field_times.push_back(i * dt);
        t.fields.push_back(fields[i]);
    }
    return t;
}

}  // namespace

TEST_CASE("local mass") {
    const Grid g = Grid::make(1, 1.0, 33);
    CHECK(local_mass(Field(g), {0.0, 0.0}, 0.5, 2.0) == 0.0);
    CHECK(local_mass(Field(g, 1.0), {0.0, 0.0}, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    // Off-centre ball cutting through cells.
    CHECK(local_mass(Field(g, 1.0), {0.1, 0.0}, 0.33, 1.0) ==
          doctest::Approx(0.66).epsilon(1e-14));

    const Grid g2 = Grid::make(2, 1.0, 17);
    CHECK(local_mass(Field(g2, 1.0), {0.1, -0.2}, 0.6, 1.0) ==
          doctest::Approx(std::numbers::pi * 0.36).epsilon(1e-10));

    // Against a ten times finer grid.
    const Grid fine = Grid::make(1, 1.0, 321);
    const double coarse_m = local_mass(sample(g, wavy), {0.2, 0.0}, 0.5, 2.0);
    const double fine_m = local_mass(sample(fine, wavy), {0.2, 0.0}, 0.5, 2.0);
    CHECK(std::fabs(coarse_m - fine_m) <= 0.01 * fine_m);

    CHECK_THROWS_AS(local_mass(Field(g, 1.0), {0.8, 0.0}, 0.5, 1.0), DomainError);
}

TEST_CASE("steady roots") {
    const SteadyRoots r = steady_roots(8.0, 1.0, 1.0);
    CHECK(r.a == doctest::Approx((1.0 - std::sqrt(0.5)) / 2.0).epsilon(1e-15));
    CHECK(r.a == doctest::Approx(0.146447).epsilon(1e-6));
    CHECK(r.A == doctest::Approx(0.853553).epsilon(1e-6));
    CHECK(r.a + r.A == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.a * r.A == doctest::Approx(1.0 / 8.0).epsilon(1e-15));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double k = 0.1 + 2.0 * U(rng);
        const double gamma = 1.0 + 3.0 * U(rng);
        const double mu = 4.0 * k * gamma * (1.0 + 1e-6 + 10.0 * U(rng));
        const SteadyRoots s = steady_roots(mu, k, gamma);
        CHECK(0.0 < s.a);
        CHECK(s.a < s.A);
        for (double u : {s.a, s.A}) {
            CHECK(std::fabs(mu * u * u * (1.0 - k * u) - gamma * u) <= 1e-12 * std::max(1.0, mu * u * u));
        }
    }
    const SteadyRoots c = steady_roots(4.0 * (1.0 + 1e-12), 1.0, 1.0);
    CHECK(c.A - c.a < 1e-5);
    CHECK(c.a == doctest::Approx(0.5).epsilon(1e-5));

    CHECK_THROWS_AS(steady_roots(3.0, 1.0, 1.0), RegimeError);
    CHECK_THROWS_AS(steady_roots(8.0, 1.0, 0.5), RegimeError);
    CHECK_THROWS_AS(steady_roots(8.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("Lyapunov function and its derivatives") {
    const SteadyRoots r = steady_roots(8.0, 1.0, 1.0);
    CHECK(lyapunov_h(0.0, r) == 0.0);
    const double lower = (r.A - r.a) * (r.A - r.a) / (r.A * r.A * r.a);
    for (int i = 0; i < 50; ++i) {
        const double u = r.a * 0.99 * (i + 0.5) / 50.0;
        const double d = 1e-6 * r.a;
        const double fd1 = (lyapunov_h(u + d, r) - lyapunov_h(u - d, r)) / (2 * d);
        const double fd2 =
            (lyapunov_h(u + d, r) - 2 * lyapunov_h(u, r) + lyapunov_h(u - d, r)) / (d * d);
        CHECK(lyapunov_h_prime(u, r) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(lyapunov_h_second(u, r) == doctest::Approx(fd2).epsilon(1e-3));
        CHECK(lyapunov_h_second(u, r) > lower);
        CHECK(lyapunov_h(u, r) >= 0.0);
    }
    const double u = 0.1 * r.a;
    const double d = 1e-6 * r.a;
    CHECK(lyapunov_h_prime(u, r) ==
          doctest::Approx((lyapunov_h(u + d, r) - lyapunov_h(u - d, r)) / (2 * d)).epsilon(1e-6));

    const Grid g = Grid::make(1, 1.0, 33);
    const LyapunovValue z = lyapunov(Field(g), r, {0.0, 0.0}, 0.5);
    CHECK(z.H == 0.0);
    CHECK(z.D == 0.0);
    const LyapunovValue v = lyapunov(Field(g, 0.5 * r.a), r, {0.0, 0.0}, 0.5);
    CHECK(v.H == doctest::Approx(lyapunov_h(0.5 * r.a, r)).epsilon(1e-13));
    CHECK(v.D == doctest::Approx(0.5 * (r.A - r.a) * 8.0 * 0.25 * r.a * r.a).epsilon(1e-13));
    CHECK_THROWS_AS(lyapunov(Field(g, r.a), r, {0.0, 0.0}, 0.5), DomainError);
}

TEST_CASE("local energy residual") {
    const Grid g = Grid::make(1, 1.0, 33);
    SimParams p;
    p.mu = 8.0;
    const Trajectory zero = frozen({Field(g), Field(g), Field(g)}, 0.01);
    const LocalEnergyReport z = local_energy_residual(zero, p, 0.1, {0.0, 0.0}, 0.5);
    CHECK(z.max_positive == 0.0);
    CHECK(z.rows.size() == 2);

    const Trajectory some = frozen({sample(g, wavy), sample(g, wavy)}, 0.01);
    const LocalEnergyReport s = local_energy_residual(some, p, 0.1, {0.0, 0.0}, 0.5);
    const auto& t = s.rows.front();
    CHECK(std::isfinite(t.caputo));
    CHECK(t.caputo == 0.0);
    CHECK(t.seminorm > 0.0);
    CHECK(t.cubic > 0.0);
    CHECK(t.cross > 0.0);
    CHECK(t.linear > 0.0);
    CHECK(t.residual == doctest::Approx(t.seminorm - t.cubic + t.cross + t.linear));

    CHECK_THROWS_AS(local_energy_residual(frozen({Field(g)}, 0.01), p, 0.1, {0.0, 0.0}, 0.5),
                    DataError);
}

TEST_CASE("blow-up window") {
    const BlowupWindow w = blowup_window(0.5, 2.0);
    CHECK(w.t_lo == doctest::Approx(std::pow(0.8862269254527580 / 10.0, 2.0)).epsilon(1e-12));
    CHECK(w.t_lo == doctest::Approx(0.007854).epsilon(1e-4));
    CHECK(w.t_hi == doctest::Approx(0.19635).epsilon(1e-5));
    const BlowupWindow one = blowup_window(1.0, 1.0);
    CHECK(one.t_lo == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(one.t_hi == doctest::Approx(1.0).epsilon(1e-14));
    for (double alpha : {0.2, 0.5, 0.9}) {
        for (double H0 : {0.1, 1.0, 10.0}) {
            const BlowupWindow b = blowup_window(alpha, H0);
            CHECK(b.t_lo < b.t_hi);
            CHECK(b.t_lo / b.t_hi ==
                  doctest::Approx(std::pow(H0 / (4 * H0 + 2), 1 / alpha)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(blowup_window(0.5, 0.0), ParameterError);
}

TEST_CASE("blow-up functional") {
    const Grid g = Grid::make(1, 1.0, 33);
    const EigenPair ep = first_eigenpair_linear(g, 0.5);
    CHECK(blowup_functional(Field(g), ep).H0 == 0.0);
    double e2 = 0.0;
    for (double v : ep.e1.values) {
        e2 += v * v;
    }
    e2 *= g.h;
    Field u0 = ep.e1;
    for (double& v : u0.values) {
        v *= (1.0 + ep.lambda1) / e2;
    }
    const BlowupFunctional b = blowup_functional(u0, ep);
    CHECK(b.H0 == doctest::Approx(1.0 + ep.lambda1).epsilon(1e-13));
    Field u1 = u0;
    for (double& v : u1.values) {
        v *= 3.0;
    }
    CHECK(blowup_functional(u1, ep).H0 == doctest::Approx(3.0 * b.H0).epsilon(1e-14));
    CHECK(blowup_functional(u1, ep).triggered);
    for (double& v : u1.values) {
        v *= 0.25;
    }
    CHECK_FALSE(blowup_functional(u1, ep).triggered);
}

TEST_CASE("decay fit") {
    std::vector<double> t, y;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.025 * i);
        y.push_back(mittag_leffler(0.6, -std::pow(t.back(), 0.6)));
    }
    const DecayFit f = decay_fit(t, y, 0.6);
    CHECK_FALSE(f.rejected);
    CHECK(f.envelope == "mittag_leffler");
    CHECK(f.sigma_hat == doctest::Approx(1.0).epsilon(0.05));
    CHECK(f.residual < 1e-6);

    std::vector<double> flat(t.size(), 0.3);
    CHECK(decay_fit(t, flat, 0.6).rejected);

    // Relaxation run: no diffusion, mu = 0, gamma = 1.
    const Grid g = Grid::make(1, 1.0, 9);
    SimParams p;
    p.alpha = 0.7;
    p.mu = 0.0;
    p.diffusion = false;
    p.dt = 0.01;
    p.t_end = 5.0;
    p.store_stride = 100;
    const Trajectory tr = run(Field(g, 0.01), p, Kernel::make(g, KernelShape::box, 0.25, 0.1, 0.1));
    const DecayFit r = decay_fit(tr, p.alpha);
    CHECK_FALSE(r.rejected);
    CHECK(r.sigma_hat == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Moser tracker") {
    const Grid g = Grid::make(1, 1.0, 33);
    const MoserReport z = moser_tracker(frozen({Field(g), Field(g)}, 0.1), 0.5, 4);
    for (const auto& r : z.rows) {
        CHECK(r.observed == 0.0);
        CHECK(r.ratio == 0.0);
    }
    Field u(g);
    for (int i = 0; i < g.n; ++i) {
        u[i] = 0.9 * std::exp(-4.0 * g.coord(i) * g.coord(i));
    }
    const MoserReport m = moser_tracker(frozen({u, u}, 0.1), 0.5, 6);
    REQUIRE(m.rows.size() == 7);
    for (int k = 0; k < 6; ++k) {
        CHECK(m.rows[k].q == std::ldexp(1.0, k) + 2.0);
        CHECK(m.rows[k + 1].observed <= m.rows[k].observed);
        CHECK(std::isfinite(m.rows[k].log_bound));
    }
    CHECK(m.K0 >= 1.0);
    CHECK_THROWS_AS(moser_tracker(frozen({u}, 0.1), 0.5, 7), ParameterError);
}

TEST_CASE("weighted mass") {
    const Grid g = Grid::make(1, 2.0, 33);
    const WeightFunction phi = WeightFunction::power_law(g, 1.2);
    CHECK(weighted_mass(Field(g), phi) == 0.0);
    const Field u = sample(g, wavy);
    WeightFunction one = phi;
    std::fill(one.samples.begin(), one.samples.end(), 1.0);
    CHECK(weighted_mass(u, one) == doctest::Approx(u.integral()).epsilon(1e-14));
    Field v = u;
    for (double& x : v.values) {
        x *= 2.5;
    }
    CHECK(weighted_mass(v, phi) == doctest::Approx(2.5 * weighted_mass(u, phi)).epsilon(1e-14));
    CHECK(phi.samples[16] == 1.0);
    CHECK(phi.at(1.0) == doctest::Approx(std::pow(2.0, -1.1)).epsilon(1e-14));
}

TEST_CASE("weight class constant") {
    const auto band = admissible_band(0.7, 1.25, 2.0);
    CHECK(band[0] == doctest::Approx(0.875));
    CHECK(band[1] == doctest::Approx(1.75));
    const Grid g = Grid::make(1, 8.0, 129);
    const WeightClassReport in = weight_class_constant(WeightFunction::power_law(g, 1.2), 0.7, 1.25, 2.0);
    CHECK(in.in_band);
    CHECK(in.finite);
    CHECK(in.member);
    const WeightClassReport out = weight_class_constant(WeightFunction::power_law(g, 2.5), 0.7, 1.25, 2.0);
    CHECK_FALSE(out.in_band);
    CHECK(out.growth > 0.1);
    CHECK_FALSE(out.member);
    CHECK_THROWS_AS(weight_class_constant(WeightFunction::power_law(g, 1.2), 0.9, 1.25, 2.0),
                    ParameterError);
    CHECK_THROWS_AS(weight_class_constant(WeightFunction::power_law(g, 1.2), 0.5, 1.25, 4.0),
                    ParameterError);

    // The exterior part of M phi against direct quadrature at one node.
    const Grid s = Grid::make(1, 1.0, 9);
    const WeightFunction w = WeightFunction::power_law(s, 1.0);
    const auto M = weight_operator(w, 0.3);
    double inbox = 0.0;
    for (int j = 1; j < 9; ++j) {
        inbox += std::fabs(w.samples[0] - w.samples[j]) * std::pow(j * s.h, -1.6) * s.h;
    }
    // phi(-1) > phi(y) for |y| > 1.125, so the integrand is phi(-1) - phi(y).
    double ext = 0.0;
    const int K = 400000;
    for (int side : {-1, 1}) {
        const double edge = side * 1.125;
        for (int k = 0; k < K; ++k) {
            // y = edge + side * (z / (1 - z)), z in (0, 1).
            const double z = (k + 0.5) / K;
            const double r = z / (1.0 - z);
            const double y = edge + side * r;
            const double jac = 1.0 / ((1.0 - z) * (1.0 - z));
            ext += (w.samples[0] - w.at(y)) * std::pow(std::fabs(y + 1.0), -1.6) * jac / K;
        }
    }
    CHECK(M[0] == doctest::Approx(inbox + ext).epsilon(1e-4));
}

TEST_CASE("Holder mass check") {
    const Grid g = Grid::make(1, 4.0, 17);
    const WeightFunction phi = WeightFunction::power_law(g, 1.0);
    std::vector<Field> fu;
    for (int i = 0; i < 5; ++i) {
        fu.push_back(Field(g, 0.1 / (1.0 + i)));
    }
    const Trajectory u = frozen(fu, 0.1);
    const HolderReport same = holder_mass_check(u, u, phi, 0.5, 0.7, 1.25, 2.0);
    CHECK(same.K_hat == 0.0);
    for (double x : same.X) {
        CHECK(x == 0.0);
    }
    CHECK(same.theta == doctest::Approx(0.5));
    CHECK(same.K_phi > 0.0);
    CHECK(same.pass_constant);

    std::vector<Field> fv;
    for (int i = 0; i < 5; ++i) {
        fv.push_back(Field(g, 0.2));
    }
    CHECK_THROWS_AS(holder_mass_check(u, frozen(fv, 0.1), phi, 0.5, 0.7, 1.25, 2.0), DataError);
    const HolderReport hr = holder_mass_check(frozen(fv, 0.1), u, phi, 0.5, 0.7, 1.25, 2.0);
    CHECK(hr.K_hat > 0.0);
    CHECK(hr.X.front() < hr.X.back());
}

TEST_CASE("check matrix CSV") {
    std::ostringstream os;
    write_check_matrix(os, {{"comparison", "ordering", "small data", 0.0, 1e-8, 1e-8, true}});
    CHECK(os.str() == "theorem,check,regime,value,bound,slack,pass\n"
                      "comparison,ordering,small data,0,1e-08,1e-08,true\n");
}
