#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kfp/lyapunov.hpp"

using namespace kfp;

namespace {

PotentialModel quad1d(double a0) {
    Matrix m(1, 1);
    m(0, 0) = a0;
    return PotentialModel::quadratic(SymMatrix(m), {0.0}, 0.0);
}

} // namespace

TEST_CASE("drift block assembly") {
    const PotentialModel V = quad1d(1.0);
    const Matrix Q = build_Q(V, {0.3}, 1.0);
    REQUIRE(Q.rows() == 2);
    CHECK(Q(0, 0) == 0.0);
    CHECK(Q(0, 1) == 1.0);
    CHECK(Q(1, 0) == -1.0);
    CHECK(Q(1, 1) == 1.0);
}

TEST_CASE("drift spectrum closed form against the characteristic polynomial") {
    SUBCASE("critical damping") {
        const auto s = q_spectrum({1.0}, 2.0); // nu^2 = 4 alpha
        CHECK(s.beta[0].real() == doctest::Approx(1.0));
        CHECK(s.beta[1].real() == doctest::Approx(1.0));
        CHECK(s.beta[0].imag() == 0.0);
        CHECK(s.mu == doctest::Approx(1.0));
    }
    SUBCASE("underdamped pair") {
        const auto s = q_spectrum({1.0}, 1.0);
        CHECK(s.beta[0].real() == doctest::Approx(0.5));
        CHECK(std::abs(s.beta[0].imag()) == doctest::Approx(0.5 * std::sqrt(3.0)));
        CHECK(s.mu == doctest::Approx(0.5));
        CHECK(s.positive_stable);
    }
    SUBCASE("overdamped distinct roots") {
        const auto s = q_spectrum({3.0 / 16.0}, 1.0);
        CHECK(s.beta[0].real() == doctest::Approx(0.25));
        CHECK(s.beta[1].real() == doctest::Approx(0.75));
    }
    SUBCASE("degenerate direction is not positive stable") {
        const auto s = q_spectrum({0.0}, 1.3);
        CHECK(s.beta[0].real() == doctest::Approx(0.0));
        CHECK(s.beta[1].real() == doctest::Approx(1.3));
        CHECK_FALSE(s.positive_stable);
    }
    SUBCASE("roots satisfy beta^2 - nu beta + alpha = 0") {
        std::mt19937 rng(8);
        std::uniform_real_distribution<double> ua(-2.0, 3.0), unu(0.3, 2.5);
        for (int t = 0; t < 100; ++t) {
            const double a = ua(rng), nu = unu(rng);
            for (const auto& b : q_spectrum({a}, nu).beta) {
                const std::complex<double> resid = b * b - nu * b + a;
                CHECK(std::abs(resid) <= 1e-12 * std::max(1.0, std::abs(b * b)));
            }
        }
    }
}

TEST_CASE("weight matrix P and its uniform floor") {
    const PotentialModel V = quad1d(1.0);
    const SymMatrix P = build_P(V, {0.0}, 0.0, 1.0, 1.0);
    CHECK(P(0, 0) == 2.0);
    CHECK(P(0, 1) == 1.0);
    CHECK(P(1, 1) == 2.0);
    const auto ev = sym_eig(P).eigenvalues;
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));

    const LyapunovSelection sel = select_gamma_delta(0.0, 0.0, 1.0, 1.0, 1.0);
    CHECK(sel.eta == doctest::Approx(1.0)); // 4(1-1/4)/(1+1+1)
    CHECK(ev[0] >= sel.eta - 1e-12);

    CHECK_THROWS_AS(build_P(V, {0.0}, -1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("P eigenvalues match the closed form") {
    std::mt19937 rng(44);
    std::uniform_real_distribution<double> ua(0.0, 2.0), ual(0.3, 3.0),
        unu(0.3, 2.0);
    for (int t = 0; t < 100; ++t) {
        const double a = ua(rng), al = ual(rng), nu = unu(rng);
        if (!(a + al > 0.25 * nu * nu + 1e-3))
            continue;
        Matrix P(2, 2);
        P(0, 0) = 2.0;
        P(0, 1) = P(1, 0) = nu;
        P(1, 1) = 2.0 * al + 2.0 * a;
        const auto ev = sym_eig(SymMatrix(P)).eigenvalues;
        const double zeta = al + a;
        const double root = std::sqrt((zeta + 1.0) * (zeta + 1.0) -
                                      (4.0 * zeta - nu * nu));
        CHECK(ev[0] == doctest::Approx(1.0 + zeta - root).epsilon(1e-10));
        CHECK(ev[1] == doctest::Approx(1.0 + zeta + root).epsilon(1e-10));
    }
}

TEST_CASE("rate give-back selection") {
    SUBCASE("gamma = 0 closed form") {
        const LyapunovSelection s = select_gamma_delta(2.0, 0.0, 1.0, 1.0, 0.5);
        CHECK(s.delta == doctest::Approx(2.0 / std::sqrt(2.0 + 0.5 - 0.25)));
    }
    SUBCASE("a = 0 gives delta = 0 for every gamma") {
        for (double g : {0.0, 1.0, 50.0})
            CHECK(select_gamma_delta(0.0, g, 1.0, 1.0, 1.0).delta == 0.0);
    }
    SUBCASE("delta decreases to zero as gamma grows") {
        double prev = 1e300;
        for (double g : {0.0, 1.0, 4.0, 16.0, 64.0, 256.0}) {
            const double d = select_gamma_delta(1.0, g, 1.0, 1.0, 0.5).delta;
            CHECK(d <= prev);
            prev = d;
        }
        CHECK(prev < 0.05);
    }
    SUBCASE("defining quadratic identity holds to near machine precision") {
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> ua(0.1, 4.0), ug(0.0, 30.0),
            ual(-1.0, 2.0), unu(0.3, 2.0);
        for (int t = 0; t < 200; ++t) {
            const double a = ua(rng), g = ug(rng), al = ual(rng), nu = unu(rng);
            const double m = a + al - 0.25 * nu * nu;
            if (!(m > 1e-3))
                continue;
            const double d = select_gamma_delta(a, g, nu, 1.0, al).delta;
            const double resid = 4.0 * d * d * m + 2.0 * d * g * 1.0 - 4.0 * a * a;
            CHECK(std::abs(resid) <= 1e-12 * std::max(1.0, a * a));
        }
    }
    SUBCASE("s parameterization matches the gamma parameterization") {
        const double a = 1.5, nu = 1.0, sigma = 2.0, al = 0.3;
        const double m = a + al - 0.25;
        const double s = 0.8;
        const double gamma = 4.0 * a * std::sqrt(m) * s / sigma;
        const LyapunovSelection s1 = select_from_s(a, s, nu, sigma, al);
        const LyapunovSelection s2 = select_gamma_delta(a, gamma, nu, sigma, al);
        CHECK(s1.delta == doctest::Approx(s2.delta).epsilon(1e-14));
        CHECK(s1.gamma == doctest::Approx(gamma).epsilon(1e-14));
    }
}

TEST_CASE("friction-limited identity: Q P + P Q^T = nu P exactly") {
    const PotentialModel V = quad1d(1.0); // alpha0 = 1 > nu^2/4
    const double nu = 1.0;
    for (double x : {-2.0, 0.0, 1.5}) {
        const Matrix Q = build_Q(V, {x}, nu);
        const SymMatrix P = build_P(V, {x}, 0.0, nu, 1.0);
        const Matrix resid = Q * P.mat() + P.mat() * Q.transposed() - nu * P.mat();
        CHECK(resid.frobenius_norm() <= 1e-14);
    }
}

TEST_CASE("shifted inequality certificate on the double well") {
    const PotentialModel V = PotentialModel::double_well(1, 1.0, 1.0);
    const double nu = 1.0, sigma = 1.0, alpha0 = -2.0;
    const double a = 0.25 * nu * nu - alpha0 + 1.0; // P floor margin 1
    const double gamma = gamma_for_delta(a, 0.8 * nu, nu, sigma, alpha0);
    const LyapunovSelection sel = select_gamma_delta(a, gamma, nu, sigma, alpha0);
    REQUIRE(sel.delta <= 0.8 * nu + 1e-9);

    const Box box{{-5.0}, {5.0}};
    const auto cert = verify_lyapunov_inequality(V, box, {201}, sel,
                                                 {nu, sigma, 2.0, 0.0});
    CHECK(cert.passed);
    CHECK(cert.worst_min_eig >= -cert.tol);

    // falsification: claiming a faster rate (smaller give-back) must fail
    LyapunovSelection bogus = sel;
    bogus.delta = std::max(0.0, sel.delta - 0.5);
    const auto bad = verify_lyapunov_inequality(V, box, {201}, bogus,
                                                {nu, sigma, 2.0, 0.0});
    CHECK_FALSE(bad.passed);

    // the inflated give-back violates the defining quadratic identity instead
    const double d = sel.delta + 0.5;
    const double m = a + alpha0 - 0.25 * nu * nu;
    const double resid = 4.0 * d * d * m + 2.0 * d * gamma * sigma - 4.0 * a * a;
    CHECK(std::abs(resid) > 1e-6 * std::max(1.0, a * a));
}

TEST_CASE("quadratic potential with gamma = 0 passes at delta = 0") {
    const PotentialModel V = quad1d(1.0);
    const LyapunovSelection sel = select_gamma_delta(0.0, 0.0, 1.0, 1.0, 1.0);
    CHECK(sel.delta == 0.0);
    const auto cert = verify_lyapunov_inequality(V, Box{{-3.0}, {3.0}}, {41}, sel,
                                                 {1.0, 1.0, -1.0, 0.0});
    CHECK(cert.passed);
    CHECK(std::abs(cert.worst_min_eig) <= 1e-10);
}

TEST_CASE("sandwich constants") {
    const SandwichConstants sc = sandwich_constants(0.0, 1.0, 1.0);
    CHECK(sc.c1 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(sc.c2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(sandwich_constants(0.0, 0.25, 1.0), std::invalid_argument);

    // special case a = eps^2/2 at the critical floor alpha0 = nu^2/4
    const double nu = 1.3, eps = 0.4;
    const SandwichConstants sb =
        sandwich_constants(0.5 * eps * eps, 0.25 * nu * nu, nu);
    const double w = (nu * nu + 2.0 * eps * eps) / 4.0;
    CHECK(sb.c1 == doctest::Approx(1.0 / (1.0 + w + std::sqrt((1.0 - w) * (1.0 - w) +
                                                              nu * nu))));
    CHECK(sb.c2 ==
          doctest::Approx((1.0 + w + std::sqrt((1.0 - w) * (1.0 - w) + nu * nu)) /
                          (2.0 * eps * eps)));
}

TEST_CASE("sandwich inequalities hold on random positive definite Hessians") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ua(0.0, 2.0),
        unu(0.3, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + trial % 4;
        Matrix b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                b(i, j) = u(rng);
        Matrix h = b.transposed() * b;
        const SymMatrix H(h);
        const double alpha0 = sym_eig(H).eigenvalues.front();
        const double nu = unu(rng);
        double a = ua(rng);
        if (!(a + alpha0 > 0.25 * nu * nu))
            a = 0.25 * nu * nu - alpha0 + 0.3;
        const SandwichConstants sc = sandwich_constants(a, alpha0, nu);

        Matrix P(2 * n, 2 * n), E(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            P(i, i) = 2.0;
            P(i, n + i) = P(n + i, i) = nu;
            P(n + i, n + i) = 2.0 * a;
            E(i, i) = 1.0;
            E(n + i, n + i) = 1.0 - alpha0;
            for (int j = 0; j < n; ++j) {
                P(n + i, n + j) += 2.0 * H(i, j);
                E(n + i, n + j) += H(i, j);
            }
        }
        const SymMatrix lower(E - sc.c1 * P);
        const SymMatrix upper(sc.c2 * P - E);
        CHECK(sym_eig(lower).eigenvalues.front() >= -1e-10 * (1.0 + P.frobenius_norm()));
        CHECK(sym_eig(upper).eigenvalues.front() >= -1e-10 * (1.0 + P.frobenius_norm()));
    }
}

TEST_CASE("sandwich verifier over a box") {
    const PotentialModel V = PotentialModel::double_well(1, 1.0, 1.0);
    const double alpha0 = -2.0;
    const double a = 0.25 + 2.0 + 1.0;
    const auto [lo, hi] = verify_sandwich(V, Box{{-5.0}, {5.0}}, {201}, a, alpha0,
                                          {1.0, 1.0, 2.0, 0.0});
    CHECK(lo.passed);
    CHECK(hi.passed);
}

TEST_CASE("trace comparison of the curvature and its derivative") {
    SUBCASE("quadratic potentials have vanishing right-hand sides") {
        const PotentialModel V = quad1d(1.0);
        const auto tc = trace_inequality_check(V, {1.2}, {1.0, 1.0, -1.0, 0.5});
        CHECK(tc.ok);
        CHECK(tc.lhs >= 0.0);
        REQUIRE(tc.rhs_per_k.size() == 1);
        CHECK(tc.rhs_per_k[0] == 0.0);
    }
    SUBCASE("tau = 0 with curvature variation degenerates") {
        const PotentialModel V = PotentialModel::double_well(1, 1.0, 1.0);
        const auto tc = trace_inequality_check(V, {1.0}, {1.0, 1.0, 2.1, 0.0});
        CHECK_FALSE(tc.ok); // lhs = 0 but Tr[(V''+c) V'''] > 0 at x = 1
    }
    SUBCASE("holds at certified double-well parameters") {
        const PotentialModel V = PotentialModel::double_well(1, 1.0, 1.0);
        const auto fs = find_feasible(V, Box{{-5.0}, {5.0}}, {201}, 1.0, 1.0, 0.1);
        REQUIRE(fs.found);
        REQUIRE(fs.params.tau > 0.0);
        const auto tc = trace_inequality_check(V, {1.0}, fs.params);
        CHECK(tc.ok);
    }
}

TEST_CASE("Kronecker route of the trace bound at certified points") {
    const PotentialModel V = PotentialModel::double_well(1, 1.0, 1.0);
    const auto fs = find_feasible(V, Box{{-5.0}, {5.0}}, {201}, 1.0, 1.0, 0.1);
    REQUIRE(fs.found);
    REQUIRE(fs.params.tau > 0.0);
    const double delta = std::sqrt(2.0 * fs.params.sigma / fs.params.tau);

    Matrix rank1(2, 2);
    rank1(0, 0) = 1.0;
    rank1(0, 1) = rank1(1, 0) = delta;
    rank1(1, 1) = delta * delta;

    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const PotentialJet J = jet(V, {x});
        Matrix shifted = J.hessian.mat();
        shifted(0, 0) += fs.params.c;
        const SymMatrix X = kron(SymMatrix(rank1), SymMatrix(shifted));

        Matrix Y(2, 2);
        Y(0, 0) = fs.params.nu * shifted(0, 0);
        Y(0, 1) = Y(1, 0) = -0.5 * J.third_slices[0](0, 0);
        Y(1, 1) = fs.params.tau * fs.params.nu / (2.0 * fs.params.sigma) *
                  shifted(0, 0);

        const Matrix prod = X.mat() * Y;
        double tr = 0.0;
        for (int i = 0; i < 2; ++i)
            tr += prod(i, i);
        CHECK(tr >= -1e-10 * std::max(1.0, X.mat().frobenius_norm()));
    }
}

TEST_CASE("short-time certificate epsilon margin") {
    CHECK(hypo_epsilon_margin(0.5, 1.0) < 0.0); // 1 - 1.5 - ... rejected
    CHECK(hypo_epsilon_margin(0.05, 1.0) > 0.5);
}

TEST_CASE("short-time certificate with flat curvature bound") {
    const HypoellipticCertificate cert =
        hypoelliptic_certificate(0.1, {1.0, 1.0, -1.0, 0.0}, 0.0);
    CHECK(cert.feasible);
    CHECK(cert.epsilon > 0.0);
    CHECK(cert.worst_margin >= 0.0);
    CHECK(cert.gamma1 <= 16.0);
    CHECK(cert.gamma2 <= 16.0);
}

TEST_CASE("short-time certificate for a confining quadratic") {
    // V = x^2/2 with c = -1: the shifted curvature vanishes, but certify the
    // quadratic-in-w residual on a curvature range as well
    const HypoellipticCertificate cert =
        hypoelliptic_certificate(1.0, {1.0, 1.0, -1.0, 0.0}, 2.0);
    CHECK(cert.feasible);
    CHECK(cert.worst_margin >= 0.0);
    // the residual is indeed nonnegative on a denser probe grid
    for (int i = 0; i <= 37; ++i)
        for (int j = 0; j <= 41; ++j) {
            const double w = 2.0 * i / 37.0, t = 1.0 * j / 41.0;
            CHECK(hypo_quadratic_residual(w, t, cert.epsilon, cert.gamma1,
                                          cert.gamma2, {1.0, 1.0, -1.0, 0.0},
                                          1) >= -1e-9);
        }
}

TEST_CASE("short-time certificate input validation") {
    CHECK_THROWS_AS(hypoelliptic_certificate(0.0, {1.0, 1.0, 0.0, 0.0}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(hypoelliptic_certificate(1.0, {1.0, 1.0, 0.0, 0.0}, -1.0),
                    std::invalid_argument);
}
