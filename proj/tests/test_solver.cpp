#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kfp/solver.hpp"

using namespace kfp;

namespace {

PotentialModel quad1d(double a0) {
    Matrix m(1, 1);
    m(0, 0) = a0;
    return PotentialModel::quadratic(SymMatrix(m), {0.0}, 0.0);
}

double stable_dt(const KineticSolver& s, double safety = 0.45) {
    return safety / (s.max_speed_x() / s.grid().dx + s.max_speed_v() / s.grid().dv);
}

GaussianInit default_gaussian() {
    Matrix cov(2, 2);
    cov(0, 0) = 1.0;
    cov(1, 1) = 1.0;
    return GaussianInit{{1.0, 0.0}, SymMatrix(cov)};
}

} // namespace

TEST_CASE("grid sizing keeps the steady tail below threshold") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    CHECK(s.grid().Lv == doctest::Approx(7.0));
    // Boltzmann factor at the edge is at the 1e-14 threshold
    CHECK(std::exp(-0.5 * s.grid().Lx * s.grid().Lx) <= 1.001e-14);
    CHECK(s.alpha0() == doctest::Approx(1.0));
}

TEST_CASE("steady state is an exact fixed point") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    Field f = s.init(SteadyInit{});
    CHECK(s.mass(f) == doctest::Approx(1.0).epsilon(1e-14));
    const double dt = stable_dt(s);
    for (int k = 0; k < 500; ++k)
        s.step(f, dt);
    const FunctionalSample fs = s.functionals(f, IdentityWeight{}, 0.0);
    CHECK(std::abs(fs.mass - 1.0) <= 1e-12);
    CHECK(fs.l2sq <= 1e-20);
    CHECK(fs.gradx_sq <= 1e-20);
    CHECK(fs.gradv_weighted <= 1e-20);
    CHECK(fs.S <= 1e-20);
}

TEST_CASE("weighted mass is conserved to roundoff per step") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 96, 96);
    Field f = s.init(default_gaussian());
    CHECK(s.mass(f) == doctest::Approx(1.0).epsilon(1e-13));
    const double dt = stable_dt(s);
    double prev = s.mass(f);
    for (int k = 0; k < 50; ++k) {
        s.step(f, dt);
        const double m = s.mass(f);
        CHECK(std::abs(m - prev) <= 1e-12);
        prev = m;
    }
}

TEST_CASE("friction-diffusion sub-flow matches its closed-form mode") {
    // d_t h = sigma d_vv h - nu v d_v h with h0 = v decays as e^{-nu t} v
    const double nu = 1.0, sigma = 1.0;
    const KineticSolver s(quad1d(1.0), nu, sigma, 64, 128);
    Field f = s.init(SteadyInit{});
    for (int i = 0; i < s.grid().nx; ++i)
        for (int j = 0; j < s.grid().nv; ++j)
            f.h[static_cast<size_t>(i) * s.grid().nv + j] = s.grid().v_center(j);

    const double dt = 1e-3, T = 1.0;
    for (int k = 0; k < static_cast<int>(T / dt); ++k)
        s.substep_ou(f, dt);

    // compare in the weighted L2 norm
    double err2 = 0.0, ref2 = 0.0;
    Field exact = s.init(SteadyInit{});
    for (int i = 0; i < s.grid().nx; ++i)
        for (int j = 0; j < s.grid().nv; ++j) {
            const double want = std::exp(-nu * T) * s.grid().v_center(j);
            exact.h[static_cast<size_t>(i) * s.grid().nv + j] = want;
        }
    for (size_t m = 0; m < f.h.size(); ++m) {
        const double d = f.h[m] - exact.h[m];
        err2 += d * d;
        ref2 += exact.h[m] * exact.h[m];
    }
    CHECK(std::sqrt(err2 / ref2) <= 2e-3);
}

TEST_CASE("transport sub-flow leaves the steady state invariant") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    Field f = s.init(SteadyInit{});
    for (int k = 0; k < 100; ++k)
        s.substep_transport(f, stable_dt(s));
    for (double h : f.h)
        CHECK(h == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("initial data variants") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);

    const Field g = s.init(default_gaussian());
    CHECK(s.mass(g) == doctest::Approx(1.0).epsilon(1e-13));
    for (double h : g.h)
        CHECK(h >= 0.0);

    const Field b = s.init(BumpInit{0.5, 0.0, 0.0, 1.0});
    CHECK(s.mass(b) == doctest::Approx(1.0).epsilon(1e-13));

    const Field r = s.init(RoughIndicatorInit{-0.5, 0.5, 0.0});
    CHECK(s.mass(r) == doctest::Approx(1.0).epsilon(1e-13));
    const FunctionalSample fr = s.functionals(r, IdentityWeight{}, 0.0);
    CHECK(fr.gradx_sq > 10.0); // rough data carries large gradient energy
    CHECK(fr.gradv_weighted <= 1e-18);

    CHECK_THROWS_AS(s.init(RoughIndicatorInit{0.5, -0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(s.init(BumpInit{-2.0, 0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("CFL violation is rejected") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    Field f = s.init(SteadyInit{});
    CHECK_THROWS_AS(s.step(f, 1.0), NumericError);
}

TEST_CASE("weighted L2 distance decreases along trajectories") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    Field f = s.init(default_gaussian());
    const double dt = stable_dt(s);
    FunctionalSeries series = s.evolve(f, 2.0, dt, 5, ShiftedWeight{0.0}, 0.0);
    for (size_t k = 1; k < series.samples.size(); ++k) {
        CHECK(series.samples[k].l2sq <=
              series.samples[k - 1].l2sq * (1.0 + 1e-12));
        CHECK(series.samples[k].Phi <=
              series.samples[k - 1].Phi * (1.0 + 1e-6));
    }
}

TEST_CASE("functional definitions") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    const Field f = s.init(default_gaussian());

    // for V = x^2/2 the gradient weight V'' + 1 - alpha0 is exactly one, so
    // the identity-weight functional splits into the two gradient energies
    const FunctionalSample id = s.functionals(f, IdentityWeight{}, 3.0);
    CHECK(id.S == doctest::Approx(2.0 * (id.gradx_sq + id.gradv_weighted)).epsilon(1e-12));
    CHECK(id.Phi == doctest::Approx(3.0 * id.l2sq + id.S).epsilon(1e-12));

    // steady data: everything but mass vanishes
    const Field h1 = s.init(SteadyInit{});
    const FunctionalSample fs = s.functionals(h1, ShiftedWeight{0.0}, 1.0);
    CHECK(fs.mass == doctest::Approx(1.0));
    CHECK(fs.l2sq == 0.0);
    CHECK(fs.S == 0.0);
}

TEST_CASE("dissipation functional is equivalent to the gradient energies") {
    // c1 * S/2 <= gradx_sq + gradv_weighted <= c2 * S/2 with the equivalence
    // constants at shift a = 0 for V = x^2/2
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    Field f = s.init(default_gaussian());
    const double c1 = 1.0 / 3.0, c2 = 1.0;
    const double dt = stable_dt(s);
    for (int k = 0; k < 40; ++k) {
        const FunctionalSample fs = s.functionals(f, ShiftedWeight{0.0}, 0.0);
        const double mid = fs.gradx_sq + fs.gradv_weighted;
        CHECK(c1 * 0.5 * fs.S <= mid * (1.0 + 1e-9) + 1e-15);
        CHECK(mid <= c2 * 0.5 * fs.S * (1.0 + 1e-9) + 1e-15);
        s.step(f, dt);
    }
}

TEST_CASE("dissipation rate identity in the friction-limited regime") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 128, 128);
    Field f = s.init(default_gaussian());
    const double dt = stable_dt(s);
    for (int k = 0; k < 20; ++k)
        s.step(f, dt); // smooth out the initial layer

    const LyapunovSelection sel = select_gamma_delta(0.0, 0.0, 1.0, 1.0, 1.0);
    const double resid = s.ds_dt_residual(f, dt, sel);
    CHECK(resid < 1e-3);

    // refinement must reduce the defect
    const KineticSolver s2(quad1d(1.0), 1.0, 1.0, 256, 256);
    Field f2 = s2.init(default_gaussian());
    const double dt2 = stable_dt(s2);
    for (int k = 0; k < 40; ++k)
        s2.step(f2, dt2);
    const double resid2 = s2.ds_dt_residual(f2, dt2, sel);
    CHECK(resid2 <= 0.5 * resid);
}

TEST_CASE("long-run decay rate matches the sharp exponential") {
    // coarse version of the acceptance experiment: fitted rate of l2sq near
    // 2*lambda = 1 for nu = sigma = 1 and unit curvature
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 128, 128);
    Field f = s.init(default_gaussian());
    const double dt = stable_dt(s, 0.4);
    FunctionalSeries series = s.evolve(f, 8.0, dt, 10, ShiftedWeight{0.0}, 0.0);
    std::vector<double> ts, l2;
    for (const auto& x : series.samples) {
        ts.push_back(x.t);
        l2.push_back(x.l2sq);
    }
    const double rate = fit_loglinear_rate(ts, l2, 4.0, 8.0);
    CHECK(rate == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("smooth data produce flat short-time slopes") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 128, 128);
    const HypoSlopes slopes = s.hypoelliptic_experiment(
        BumpInit{0.5, 0.0, 0.0, 1.0}, 2e-3, 2e-2, 1e-4);
    CHECK(std::abs(slopes.slope_x) < 0.3);
    CHECK(std::abs(slopes.slope_v) < 0.3);
}

TEST_CASE("hypoelliptic window validation") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    CHECK_THROWS_AS(
        s.hypoelliptic_experiment(RoughIndicatorInit{-0.5, 0.5, 0.0}, 2e-3, 2e-2, 1e-3),
        NumericError);
}

TEST_CASE("evolve sampling cadence") {
    const KineticSolver s(quad1d(1.0), 1.0, 1.0, 64, 64);
    Field f = s.init(SteadyInit{});
    const double dt = stable_dt(s);
    FunctionalSeries series = s.evolve(f, 20 * dt, dt, 5, IdentityWeight{}, 0.0);
    CHECK(series.samples.size() == 5); // t=0 plus every 5th of 20 steps
}
