#include <doctest.h>

#include "fracrd/eigen.hpp"
#include "fracrd/errors.hpp"
#include "fracrd/evolution.hpp"
#include "fracrd/fractional_time.hpp"
#include "fracrd/special_functions.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace fracrd;

namespace {

Field bump(const Grid& g, double amp, double c = 0.0, double w = 0.3) {
    Field u(g);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.coord(i) - c;
        u[i] = amp * std::exp(-x * x / (w * w));
    }
    return u;
}

Kernel box_kernel(const Grid& g) {
    return Kernel::make(g, KernelShape::box, 0.25, 0.1, 0.1);
}

}  // namespace

TEST_CASE("zero is a fixed point of every integrator") {
    const Grid g = Grid::make(1, 1.0, 17);
    const Kernel J = box_kernel(g);
    SimParams p;
    p.t_end = 0.05;
    const Field zero(g);
    for (const Trajectory& t :
         {run(zero, p, J), spectral_duhamel_run(zero, p, J)}) {
        CHECK(t.status == RunStatus::completed);
        for (const Field& f : t.fields) {
            for (double v : f.values) {
                CHECK(v == 0.0);
            }
        }
    }
    SimParams q = p;
    q.op.s = 0.7;
    q.op.p = 1.25;
    q.m = 2.0;
    const Trajectory tp = run_porous(zero, q);
    CHECK(tp.sup_norm.back() == 0.0);
    const std::vector<Field> hist{zero};
    CHECK(step(hist, p, J).sup_norm() == 0.0);
}

TEST_CASE("pure relaxation follows u0 E_alpha(-gamma t^alpha)") {
    const Grid g = Grid::make(1, 1.0, 9);
    const Kernel J = box_kernel(g);
    const Field u0 = bump(g, 0.5);
    SimParams p;
    p.alpha = 0.6;
    p.mu = 0.0;
    p.gamma = 1.5;
    p.diffusion = false;
    p.t_end = 1.0;
    double prev = INFINITY;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        p.dt = dt;
        const Trajectory t = run(u0, p, J);
        const double e = mittag_leffler(p.alpha, -p.gamma);
        double err = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i) {
            err = std::max(err, std::fabs(t.fields.back()[i] - u0[i] * e));
        }
        CHECK(err < 0.02 * u0.sup_norm());
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("alpha close to 1: one step is forward Euler") {
    const Grid g = Grid::make(1, 2.0, 33);
    const Kernel J = box_kernel(g);
    const Field u0 = bump(g, 0.3, 0.0, 0.5);
    SimParams p;
    p.alpha = 0.999;
    p.dt = 1e-3;
    p.t_end = 1e-3;
    p.mu = 2.0;
    const std::vector<Field> hist{u0};
    const Field u1 = step(hist, p, J);
    const Field Lu = frac_p_laplacian(u0, p.op);
    const Field f = reaction(u0, convolve(u0, J), p.mu, p.k, p.gamma);
    double diff = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const double euler = u0[i] + p.dt * (-Lu[i] + f[i]);
        diff = std::max(diff, std::fabs(u1[i] - euler));
        sup = std::max(sup, std::fabs(euler));
    }
    CHECK(diff <= 1e-3 * sup);
}

TEST_CASE("large data on the first eigenfunction blows up") {
    const Grid g = Grid::make(1, 1.0, 33);
    const EigenPair ep = first_eigenpair_linear(g, 0.5);
    Field u0 = ep.e1;
    for (double& v : u0.values) {
        v *= 20.0;
    }
    SimParams p;
    p.mu = 1.0;
    p.k = 1e-6;
    p.dt = 1e-4;
    p.t_end = 0.5;
    const Trajectory t = run(u0, p, box_kernel(g));
    CHECK(t.status == RunStatus::blowup);
    CHECK(t.t_star < p.t_end);
    CHECK(t.sup_norm.back() > p.blowup_threshold);
    CHECK(t.times.size() == t.sup_norm.size());
    std::ostringstream os;
    t.write_scalars_csv(os);
    const std::string csv = os.str();
    CHECK(csv.rfind("t,sup_norm,l1,l2,mass,status\n", 0) == 0);
    CHECK(csv.find(",blowup\n") != std::string::npos);
}

TEST_CASE("larger data never blow up later") {
    const Grid g = Grid::make(1, 1.0, 17);
    const EigenPair ep = first_eigenpair_linear(g, 0.5);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    SimParams p;
    p.k = 1e-6;
    p.dt = 2e-4;
    p.t_end = 0.4;
    p.store_stride = 1000;
    const Kernel J = box_kernel(g);
    for (int trial = 0; trial < 5; ++trial) {
        Field lo = ep.e1, hi = ep.e1;
        const double a = 15.0 + 10.0 * U(rng);
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] *= a;
            hi[i] = lo[i] * (1.0 + 0.5 * U(rng));
        }
        const Trajectory tl = run(lo, p, J), th = run(hi, p, J);
        REQUIRE(th.status == RunStatus::blowup);
        CHECK(th.t_star <= tl.t_star);
    }
}

TEST_CASE("runs are bit-reproducible") {
    const Grid g = Grid::make(1, 2.0, 33);
    const Kernel J = box_kernel(g);
    SimParams p;
    p.t_end = 0.1;
    const Trajectory a = run(bump(g, 0.2), p, J), b = run(bump(g, 0.2), p, J);
    std::ostringstream sa, sb;
    a.write_scalars_csv(sa);
    b.write_scalars_csv(sb);
    CHECK(sa.str() == sb.str());
    CHECK(a.fields.back().values == b.fields.back().values);
}

TEST_CASE("comparison experiment") {
    const Grid g = Grid::make(1, 1.0, 33);
    const Kernel J = box_kernel(g);
    SimParams p;
    p.alpha = 0.8;
    p.mu = 0.1;
    p.t_end = 0.2;
    const Field a = bump(g, 0.05);
    CHECK(comparison_experiment(a, a, p, J).max_violation == 0.0);
    const ComparisonReport r = comparison_experiment(Field(g), a, p, J);
    CHECK(r.pass);
    CHECK(r.horizon == doctest::Approx(0.2));
    Field b = a;
    for (double& v : b.values) {
        v += 0.1;
    }
    CHECK(comparison_experiment(a, b, p, J).pass);
    CHECK_THROWS_AS(comparison_experiment(b, a, p, J), DataError);
}

TEST_CASE("spectral Duhamel path agrees with the L1 path") {
    const Grid g = Grid::make(1, 2.0, 17);
    const Kernel J = box_kernel(g);
    SimParams p;
    p.mu = 0.5;
    p.dt = 2e-3;
    p.t_end = 0.2;
    const Field u0 = bump(g, 0.1, 0.0, 0.6);
    const Trajectory a = run(u0, p, J);
    const Trajectory b = spectral_duhamel_run(u0, p, J);
    REQUIRE(b.status == RunStatus::completed);
    REQUIRE(a.fields.size() == b.fields.size());
    double diff = 0.0;
    for (std::size_t n = 0; n < a.fields.size(); ++n) {
        for (std::size_t i = 0; i < u0.size(); ++i) {
            diff = std::max(diff, std::fabs(a.fields[n][i] - b.fields[n][i]));
        }
    }
    CHECK(diff <= 5.0 * std::max(std::pow(p.dt, 2.0 - p.alpha), g.h));
    CHECK(diff < 0.05 * u0.sup_norm());
}

TEST_CASE("spectral path without forcing decays mode by mode") {
    const Grid g = Grid::make(1, 1.0, 9);
    const Kernel J = box_kernel(g);
    SimParams p;
    p.mu = 0.0;
    p.gamma = 1.0;
    p.dt = 0.01;
    p.t_end = 0.2;
    const SpectralBasis B = SpectralBasis::make(g, p.op);
    // The linear reaction -u only shifts every eigenvalue by gamma.
    const Field u0(g, std::vector<double>(B.V.col(0).data(), B.V.col(0).data() + g.size()));
    const Trajectory t = spectral_duhamel_run(u0, p, J, B);
    const double e = mittag_leffler(p.alpha, -(B.lambda(0) + 1.0) * std::pow(0.2, p.alpha));
    for (std::size_t i = 0; i < u0.size(); ++i) {
        CHECK(t.fields.back()[i] == doctest::Approx(u0[i] * e).epsilon(1e-3));
    }
}

TEST_CASE("solution operators are bounded") {
    const Grid g = Grid::make(1, 1.0, 17);
    const SpectralBasis B = SpectralBasis::make(g, OperatorParams{});
    const Field phi = bump(g, 1.0);
    const std::vector<double> ts{0.0, 0.1, 0.5, 1.0, 5.0, 10.0};
    for (double alpha : {0.3, 0.7}) {
        const OperatorBoundReport r = operator_bound_check(phi, alpha, B, ts);
        CHECK(r.s_norm[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.k_norm[0] == doctest::Approx(1.0 / std::tgamma(alpha)).epsilon(1e-13));
        CHECK(r.s_phi[0] == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 1; i < ts.size(); ++i) {
            CHECK(r.s_norm[i] <= r.s_norm[i - 1] + 1e-14);
        }
        CHECK(r.bounded);
    }
}

TEST_CASE("stability monitor rejects an oversized step") {
    const Grid g = Grid::make(1, 1.0, 65);
    SimParams p;
    p.dt = 0.05;
    p.t_end = 1.0;
    try {
        run(bump(g, 0.1), p, box_kernel(g));
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK(e.advisory_dt() > 0.0);
        CHECK(e.advisory_dt() < p.dt);
    }
}

TEST_CASE("parameter validation") {
    const Grid g = Grid::make(1, 1.0, 17);
    const Kernel J = box_kernel(g);
    SimParams p;
    p.gamma = 0.5;
    CHECK_THROWS_AS(run(bump(g, 0.1), p, J), ParameterError);
    p = SimParams{};
    p.t_end = 0.0105;
    CHECK_THROWS_AS(run(bump(g, 0.1), p, J), ParameterError);
    p = SimParams{};
    p.op.p = 1.5;
    p.op.s = 0.5;
    p.m = 2.0;
    CHECK_THROWS_AS(run_porous(bump(g, 0.1), p), ParameterError);
    p.op.p = 2.0;
    p.m = 2.0;
    CHECK_THROWS_AS(spectral_duhamel_run(bump(g, 0.1), p, J), ParameterError);
    Field bad = bump(g, 0.1);
    bad[3] = NAN;
    CHECK_THROWS_AS(run(bad, SimParams{}, J), DataError);
}
