// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit status = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "kfp/assumptions.hpp"
#include "kfp/lyapunov.hpp"
#include "kfp/propagator.hpp"
#include "kfp/rates.hpp"
#include "kfp/solver.hpp"

using namespace kfp;

namespace {

int g_failures = 0;

struct Criterion {
    std::string label;
    bool ok = true;
    std::string detail;
    double seconds = 0.0;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

template <typename Fn> void criterion(const std::string& label, Fn&& body) {
    Criterion c;
    c.label = label;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    std::printf("[%s] %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", c.label.c_str(),
                c.seconds, c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok)
        ++g_failures;
}

PotentialModel quad1d(double a0) {
    Matrix m(1, 1);
    m(0, 0) = a0;
    return PotentialModel::quadratic(SymMatrix(m), {0.0}, 0.0);
}

GaussianInit gaussian_perturbation() {
    Matrix cov(2, 2);
    cov(0, 0) = 1.0;
    cov(1, 1) = 1.0;
    return GaussianInit{{1.0, 0.0}, SymMatrix(cov)};
}

double stable_dt(const KineticSolver& s, double safety) {
    return safety / (s.max_speed_x() / s.grid().dx + s.max_speed_v() / s.grid().dv);
}

} // namespace

int main() {
    criterion("criterion 1: sharp rate in the friction-limited case", [](Criterion& c) {
        const RateReport r = decay_rate({1.0, 1.0, -1.0, 0.0}, 1.0, 1.0);
        c.require(r.ok && r.case_tag == RateCase::a, "expected case (a)");
        c.require(r.lambda == 0.5, "lambda != 0.5 exactly");
    });

    criterion("criterion 2: sharp rate in the spectral-gap case", [](Criterion& c) {
        for (double a0 : {0.10, 0.1875, 0.24}) {
            const double c_pi = poincare_constant_quadratic(1.0, 1.0, a0);
            const RateReport r = decay_rate({1.0, 1.0, -a0, 0.0}, a0, c_pi);
            const double want = 1.0 - std::sqrt(1.0 - 4.0 * a0);
            c.require(r.ok && r.case_tag == RateCase::d,
                      "expected case (d) at alpha0=" + std::to_string(a0));
            c.require(std::abs(r.two_lambda - want) <= 1e-12,
                      "2*lambda mismatch at alpha0=" + std::to_string(a0));
            c.require(check_a2_inequality(1.0, 1.0, a0),
                      "gap inequality false at alpha0=" + std::to_string(a0));
        }
    });

    criterion("criterion 3: propagator-norm asymptotics", [](Criterion& c) {
        {
            const OdeSystem sys = build_ode(SymMatrix::identity(1), 1.0, 1.0);
            const PropagatorCurve curve = norm_curve(sys, default_time_grid());
            const FittedRate fr = fit_rate(curve, 20.0, 50.0);
            c.require(std::abs(fr.rate - 0.5) <= 0.005, "rate not within 1% of 0.5");
            c.require(fr.poly_degree == 0, "unexpected polynomial factor");
        }
        {
            Matrix m(1, 1);
            m(0, 0) = 0.25;
            const OdeSystem sys = build_ode(SymMatrix(m), 1.0, 1.0);
            const PropagatorCurve curve = norm_curve(sys, default_time_grid());
            bool in_band = true;
            for (size_t i = 0; i < curve.times.size(); ++i) {
                const double env =
                    (1.0 + curve.times[i]) * std::exp(-0.5 * curve.times[i]);
                const double ratio = curve.norms[i] / env;
                in_band = in_band && ratio >= 0.1 && ratio <= 10.0;
            }
            c.require(in_band, "norm/envelope left [0.1, 10]");
            const JordanReport jr = classify(SymMatrix(m), 1.0);
            c.require(jr.defective && jr.jordan_block_size == 2,
                      "expected a size-2 Jordan block");
        }
        {
            Matrix m(1, 1);
            m(0, 0) = 0.1875;
            const OdeSystem sys = build_ode(SymMatrix(m), 1.0, 1.0);
            const PropagatorCurve curve = norm_curve(sys, default_time_grid());
            const FittedRate fr = fit_rate(curve, 20.0, 50.0);
            c.require(std::abs(fr.rate - 0.25) <= 0.0025, "rate not within 1% of 0.25");
        }
    });

    criterion("criterion 4: rate/propagator cross-consistency", [](Criterion& c) {
        std::mt19937 rng(20240801);
        std::uniform_real_distribution<double> unu(0.5, 2.0), ua(0.0, 1.0);
        for (int draw = 0; draw < 20; ++draw) {
            const double nu = unu(rng);
            const double a0 = ua(rng) * 4.0 * nu * nu + 1e-6;
            const double c_pi = poincare_constant_quadratic(nu, 1.0, a0);
            const RateReport r = decay_rate({nu, 1.0, -a0, 0.0}, a0, c_pi);
            if (!r.ok) {
                c.require(false, "uncovered draw nu=" + std::to_string(nu) +
                                     " alpha0=" + std::to_string(a0));
                continue;
            }
            Matrix m(1, 1);
            m(0, 0) = a0;
            const OdeSystem sys = build_ode(SymMatrix(m), nu, 1.0);
            // fit in units of 1/nu so every draw sees the same decade
            std::vector<double> times;
            for (int i = 0; i <= 300; ++i)
                times.push_back((1.0 + i * 49.0 / 300.0) / nu);
            const PropagatorCurve curve = norm_curve(sys, times);
            const FittedRate fr = fit_rate(curve, 20.0 / nu, 50.0 / nu);
            c.require(r.lambda <= fr.rate + 0.01 * std::max(1.0, fr.rate),
                      "lambda exceeds fitted rate at nu=" + std::to_string(nu) +
                          " alpha0=" + std::to_string(a0));
        }
    });

    criterion("criterion 5: phase-space decay at the sharp rate", [](Criterion& c) {
        const KineticSolver solver(quad1d(1.0), 1.0, 1.0, 256, 256);
        Field f = solver.init(gaussian_perturbation());
        const double dt = stable_dt(solver, 0.4);
        const FunctionalSeries series =
            solver.evolve(f, 10.0, dt, 20, ShiftedWeight{0.0}, 0.0);

        std::vector<double> ts, l2;
        for (const auto& s : series.samples) {
            ts.push_back(s.t);
            l2.push_back(s.l2sq);
            c.require(std::abs(s.mass - 1.0) <= 1e-10, "mass drift beyond 1e-10");
        }
        for (size_t k = 1; k < series.samples.size(); ++k)
            c.require(series.samples[k].Phi <=
                          series.samples[k - 1].Phi *
                              (1.0 + 1e-6),
                      "Phi increased at sample " + std::to_string(k));
        const double rate = fit_loglinear_rate(ts, l2, 5.0, 10.0);
        c.require(rate >= 0.95, "fitted l2 rate " + std::to_string(rate) + " < 0.95");
        c.require(rate <= 1.05, "fitted l2 rate " + std::to_string(rate) + " > 1.05");
    });

    criterion("criterion 6: dissipation rate identity", [](Criterion& c) {
        const LyapunovSelection sel = select_gamma_delta(0.0, 0.0, 1.0, 1.0, 1.0);

        const KineticSolver s1(quad1d(1.0), 1.0, 1.0, 128, 128);
        Field f1 = s1.init(gaussian_perturbation());
        const double dt1 = stable_dt(s1, 0.4);
        for (int k = 0; k < 20; ++k)
            s1.step(f1, dt1);
        const double r1 = s1.ds_dt_residual(f1, dt1, sel);
        c.require(r1 < 1e-3, "residual " + std::to_string(r1) + " >= 1e-3 at 128^2");

        const KineticSolver s2(quad1d(1.0), 1.0, 1.0, 256, 256);
        Field f2 = s2.init(gaussian_perturbation());
        const double dt2 = stable_dt(s2, 0.4);
        for (int k = 0; k < 40; ++k)
            s2.step(f2, dt2);
        const double r2 = s2.ds_dt_residual(f2, dt2, sel);
        c.require(r2 <= 0.5 * r1, "refinement gain only " + std::to_string(r1 / r2));
    });

    criterion("criterion 7: short-time regularization exponents", [](Criterion& c) {
        const KineticSolver solver(quad1d(1.0), 1.0, 1.0, 2048, 256);
        const HypoSlopes slopes = solver.hypoelliptic_experiment(
            RoughIndicatorInit{-0.5, 0.5, 0.0}, 2e-3, 2e-2, 1e-4);
        c.require(slopes.slope_x >= -3.3 && slopes.slope_x <= -2.7,
                  "slope_x = " + std::to_string(slopes.slope_x));
        c.require(slopes.slope_v >= -1.3 && slopes.slope_v <= -0.7,
                  "slope_v = " + std::to_string(slopes.slope_v));
    });

    criterion("criterion 8: matrix-inequality property suite", [](Criterion& c) {
        // (i) shifted inequality for the double well over [-5, 5]
        const PotentialModel W = PotentialModel::double_well(1, 1.0, 1.0);
        const double nu = 1.0, sigma = 1.0, alpha0 = -2.0;
        const double a = 0.25 - alpha0 + 1.0;
        const double gamma = gamma_for_delta(a, 0.8 * nu, nu, sigma, alpha0);
        const LyapunovSelection sel = select_gamma_delta(a, gamma, nu, sigma, alpha0);
        const ConditionCertificate cert = verify_lyapunov_inequality(
            W, Box{{-5.0}, {5.0}}, {10000}, sel, {nu, sigma, 2.0, 0.0});
        c.require(cert.passed, "shifted inequality certificate failed");
        c.require(cert.worst_min_eig >= -100.0 * cert.tol, // -1e-8 * scale
                  "worst eigenvalue below -1e-8*scale");

        // (ii) equivalence sandwich on random positive definite Hessians
        std::mt19937 rng(88);
        std::uniform_real_distribution<double> u(-1.0, 1.0), unu(0.3, 2.0),
            ush(0.0, 2.0);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = 1 + trial % 3;
            Matrix b(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    b(i, j) = u(rng);
            Matrix h = b.transposed() * b;
            const SymMatrix H(h);
            const double al = sym_eig(H).eigenvalues.front();
            const double nuu = unu(rng);
            double sh = ush(rng);
            if (!(sh + al > 0.25 * nuu * nuu))
                sh = 0.25 * nuu * nuu - al + 0.25;
            const SandwichConstants sc = sandwich_constants(sh, al, nuu);
            Matrix P(2 * n, 2 * n), E(2 * n, 2 * n);
            for (int i = 0; i < n; ++i) {
                P(i, i) = 2.0;
                P(i, n + i) = P(n + i, i) = nuu;
                P(n + i, n + i) = 2.0 * sh;
                E(i, i) = 1.0;
                E(n + i, n + i) = 1.0 - al;
                for (int j = 0; j < n; ++j) {
                    P(n + i, n + j) += 2.0 * H(i, j);
                    E(n + i, n + j) += H(i, j);
                }
            }
            const double lo =
                sym_eig(SymMatrix(E - sc.c1 * P)).eigenvalues.front();
            const double hi =
                sym_eig(SymMatrix(sc.c2 * P - E)).eigenvalues.front();
            const double tol = 1e-10 * (1.0 + P.frobenius_norm());
            if (lo < -tol || hi < -tol) {
                c.require(false, "sandwich violated at trial " + std::to_string(trial));
                break;
            }
        }

        // (iii) the give-back solves its defining quadratic exactly
        const double m = a + alpha0 - 0.25 * nu * nu;
        const double resid =
            4.0 * sel.delta * sel.delta * m + 2.0 * sel.delta * gamma * sigma -
            4.0 * a * a;
        c.require(std::abs(resid) <= 1e-12 * std::max(1.0, a * a),
                  "give-back residual " + std::to_string(resid));

        // (iv) falsification probes
        const double bad_delta = sel.delta + 0.5;
        const double bad_resid = 4.0 * bad_delta * bad_delta * m +
                                 2.0 * bad_delta * gamma * sigma - 4.0 * a * a;
        c.require(std::abs(bad_resid) > 1e-12 * std::max(1.0, a * a),
                  "inflated give-back still satisfies the identity");
        LyapunovSelection overclaim = sel;
        overclaim.delta = std::max(0.0, sel.delta - 0.5);
        const ConditionCertificate bad_cert = verify_lyapunov_inequality(
            W, Box{{-5.0}, {5.0}}, {2001}, overclaim, {nu, sigma, 2.0, 0.0});
        c.require(!bad_cert.passed, "rate overclaim passed the sweep");
        c.require(hypo_epsilon_margin(0.5, 1.0) < 0.5,
                  "epsilon = 0.5 accepted by the short-time margin");
    });

    criterion("criterion 9: sufficient condition implies the block condition",
              [](Criterion& c) {
        std::mt19937 rng(424242);
        std::uniform_real_distribution<double> ux(-2.0, 2.0), unu(0.5, 2.0),
            utau(0.1, 0.9), uslack(0.01, 1.0);
        const PotentialModel W = PotentialModel::double_well(2, 1.0, 0.8);
        const PotentialModel R =
            PotentialModel::radial_poly(2, 0.5, 2, {0.0, 0.7, 0.2});
        int bad = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const PotentialModel& V = (trial % 2 == 0) ? W : R;
            Vec x{ux(rng), ux(rng)};
            const double nu = unu(rng), sigma = 1.0, tau = utau(rng) * nu;
            const PotentialJet J = jet(V, x);
            const double ax = sym_eig(J.hessian).eigenvalues.front();
            double tmax = 0.0;
            for (const auto& T : J.third_slices) {
                const auto ev = sym_eig(T).eigenvalues;
                tmax = std::max({tmax, std::abs(ev.front()), std::abs(ev.back())});
            }
            const double root = std::sqrt(2.0 * tau * nu * nu / (2.0 * sigma));
            const double cc = -ax + tmax / root + uslack(rng);
            const SymMatrix M = build_condition_matrix(V, x, {nu, sigma, cc, tau});
            const double mn = sym_eig(M).eigenvalues.front();
            if (mn < -1e-9 * std::max(1.0, M.mat().frobenius_norm()))
                ++bad;
        }
        c.require(bad == 0, std::to_string(bad) + " violations out of 1000");
    });

    criterion("criterion 10: gap inequality sweep", [](Criterion& c) {
        for (double nu : {0.5, 1.0, 2.0, 4.0})
            for (int i = 1; i <= 100; ++i) {
                const double a0 = 0.25 * nu * nu * i / 101.0;
                if (!check_a2_inequality(nu, 1.0, a0)) {
                    c.require(false, "false at nu=" + std::to_string(nu) +
                                         " alpha0=" + std::to_string(a0));
                    return;
                }
            }
    });

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
