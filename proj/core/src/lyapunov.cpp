#include "kfp/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kfp {

Matrix build_Q(const PotentialModel& V, const Vec& x, double nu) {
    const int n = V.n();
    const PotentialJet J = jet(V, x);
    Matrix Q(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        Q(i, n + i) = 1.0;
        Q(n + i, n + i) = nu;
        for (int j = 0; j < n; ++j)
            Q(n + i, j) = -J.hessian(i, j);
    }
    return Q;
}

QSpectrum q_spectrum(const std::vector<double>& alphas, double nu) {
    QSpectrum out;
    out.positive_stable = true;
    out.mu = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
        const double disc = nu * nu - 4.0 * a;
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            out.beta.emplace_back(0.5 * (nu - root), 0.0);
            out.beta.emplace_back(0.5 * (nu + root), 0.0);
            out.mu = std::min(out.mu, 0.5 * (nu - root));
        } else {
            const double im = 0.5 * std::sqrt(-disc);
            out.beta.emplace_back(0.5 * nu, -im);
            out.beta.emplace_back(0.5 * nu, im);
            out.mu = std::min(out.mu, 0.5 * nu);
        }
        if (!(a > 0.0))
            out.positive_stable = false;
    }
    if (alphas.empty())
        out.mu = 0.0;
    return out;
}

SymMatrix build_P(const PotentialModel& V, const Vec& x, double a, double nu,
                  double alpha0) {
    if (!(a + alpha0 > 0.25 * nu * nu))
        throw std::invalid_argument("build_P: requires a + alpha0 > nu^2/4");
    const int n = V.n();
    const PotentialJet J = jet(V, x);
    Matrix P(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        P(i, i) = 2.0;
        P(i, n + i) = nu;
        P(n + i, i) = nu;
        P(n + i, n + i) = 2.0 * a;
        for (int j = 0; j < n; ++j)
            P(n + i, n + j) += 2.0 * J.hessian(i, j);
    }
    return SymMatrix(P);
}

LyapunovSelection select_gamma_delta(double a, double gamma, double nu,
                                     double sigma, double alpha0) {
    if (!(a + alpha0 > 0.25 * nu * nu))
        throw std::invalid_argument("select_gamma_delta: requires a + alpha0 > nu^2/4");
    if (!(gamma >= 0.0))
        throw std::invalid_argument("select_gamma_delta: gamma must be nonnegative");
    const double m = a + alpha0 - 0.25 * nu * nu;
    const double rt = std::sqrt(m);
    const double q = gamma * sigma / (4.0 * rt);

    LyapunovSelection sel;
    sel.a = a;
    sel.gamma = gamma;
    sel.delta = (std::sqrt(q * q + a * a) - q) / rt;
    sel.eta = 4.0 * m /
              (1.0 + a + alpha0 +
               std::sqrt((a + alpha0 - 1.0) * (a + alpha0 - 1.0) + nu * nu));
    sel.mu = (alpha0 <= 0.25 * nu * nu)
                 ? 0.5 * (nu - std::sqrt(nu * nu - 4.0 * alpha0))
                 : 0.5 * nu;
    return sel;
}

LyapunovSelection select_from_s(double a, double s, double nu, double sigma,
                                double alpha0) {
    if (!(s >= 0.0))
        throw std::invalid_argument("select_from_s: s must be nonnegative");
    if (!(a + alpha0 > 0.25 * nu * nu))
        throw std::invalid_argument("select_from_s: requires a + alpha0 > nu^2/4");
    const double m = a + alpha0 - 0.25 * nu * nu;
    const double gamma = 4.0 * a * std::sqrt(m) * s / sigma;
    return select_gamma_delta(a, gamma, nu, sigma, alpha0);
}

double gamma_for_delta(double a, double delta_target, double nu, double sigma,
                       double alpha0) {
    if (!(delta_target > 0.0))
        throw std::invalid_argument("gamma_for_delta: target must be positive");
    const double m = a + alpha0 - 0.25 * nu * nu;
    if (!(m > 0.0))
        throw std::invalid_argument("gamma_for_delta: requires a + alpha0 > nu^2/4");
    const double B = a / std::sqrt(m);
    if (B <= delta_target)
        return 0.0;
    // delta = B (sqrt(1+s^2) - s) == target  <=>  s = (1 - r^2) / (2r), r = target/B
    const double r = delta_target / B;
    const double s = (1.0 - r * r) / (2.0 * r);
    return 4.0 * a * std::sqrt(m) * s / sigma;
}

ConditionCertificate verify_lyapunov_inequality(const PotentialModel& V,
                                                const Box& box,
                                                const GridSpec& resolution,
                                                const LyapunovSelection& sel,
                                                const HypoParams& p) {
    p.validate();
    const int n = V.n();

    ConditionCertificate cert;
    cert.params = p;
    cert.box = box;
    cert.resolution = resolution;
    cert.checked_condition = ConditionKind::lyapunov_inequality;
    cert.worst_min_eig = std::numeric_limits<double>::infinity();

    // alpha0 only enters through the precondition of build_P; recover it
    // from the selection to keep assembly local.
    double tol = 0.0;
    for_each_grid_point(box, resolution, [&](const Vec& x) {
        const PotentialJet J = jet(V, x);
        Matrix Q(2 * n, 2 * n), P(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            Q(i, n + i) = 1.0;
            Q(n + i, n + i) = p.nu;
            P(i, i) = 2.0;
            P(i, n + i) = p.nu;
            P(n + i, i) = p.nu;
            P(n + i, n + i) = 2.0 * sel.a;
            for (int j = 0; j < n; ++j) {
                Q(n + i, j) = -J.hessian(i, j);
                P(n + i, n + j) += 2.0 * J.hessian(i, j);
            }
        }
        Matrix M = Q * P + P * Q.transposed();
        for (int i = 0; i < n; ++i)
            M(n + i, n + i) += sel.gamma * p.sigma;
        M -= (p.nu - sel.delta) * P;
        const SymMatrix S(M);
        const double mn = sym_eig(S).eigenvalues.front();
        tol = std::max(tol, psd_tol(S));
        if (mn < cert.worst_min_eig) {
            cert.worst_min_eig = mn;
            cert.worst_point = x;
        }
    });
    cert.tol = tol;
    cert.passed = cert.worst_min_eig >= -tol;
    return cert;
}

SandwichConstants sandwich_constants(double a, double alpha0, double nu) {
    const double denom = 4.0 * (a + alpha0) - nu * nu;
    if (!(denom > 0.0))
        throw std::invalid_argument("sandwich_constants: requires a + alpha0 > nu^2/4");
    const double w = a + alpha0;
    const double root = std::sqrt((w - 1.0) * (w - 1.0) + nu * nu);
    return {1.0 / (w + 1.0 + root), (w + 1.0 + root) / denom};
}

std::pair<ConditionCertificate, ConditionCertificate>
verify_sandwich(const PotentialModel& V, const Box& box,
                const GridSpec& resolution, double a, double alpha0,
                const HypoParams& p) {
    const SandwichConstants sc = sandwich_constants(a, alpha0, p.nu);
    const int n = V.n();

    auto make_cert = [&](ConditionKind kind) {
        ConditionCertificate c;
        c.params = p;
        c.box = box;
        c.resolution = resolution;
        c.checked_condition = kind;
        c.worst_min_eig = std::numeric_limits<double>::infinity();
        return c;
    };
    ConditionCertificate lower = make_cert(ConditionKind::sandwich_lower);
    ConditionCertificate upper = make_cert(ConditionKind::sandwich_upper);

    double tol_lo = 0.0, tol_hi = 0.0;
    for_each_grid_point(box, resolution, [&](const Vec& x) {
        const SymMatrix P = build_P(V, x, a, p.nu, alpha0);
        const PotentialJet J = jet(V, x);
        Matrix E(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            E(i, i) = 1.0;
            E(n + i, n + i) = 1.0 - alpha0;
            for (int j = 0; j < n; ++j)
                E(n + i, n + j) += J.hessian(i, j);
        }
        const SymMatrix lowerM(E - sc.c1 * P.mat());
        const SymMatrix upperM(sc.c2 * P.mat() - E);
        const double mn_lo = sym_eig(lowerM).eigenvalues.front();
        const double mn_hi = sym_eig(upperM).eigenvalues.front();
        tol_lo = std::max(tol_lo, psd_tol(lowerM));
        tol_hi = std::max(tol_hi, psd_tol(upperM));
        if (mn_lo < lower.worst_min_eig) {
            lower.worst_min_eig = mn_lo;
            lower.worst_point = x;
        }
        if (mn_hi < upper.worst_min_eig) {
            upper.worst_min_eig = mn_hi;
            upper.worst_point = x;
        }
    });
    lower.tol = tol_lo;
    upper.tol = tol_hi;
    lower.passed = lower.worst_min_eig >= -tol_lo;
    upper.passed = upper.worst_min_eig >= -tol_hi;
    return {lower, upper};
}

TraceCheck trace_inequality_check(const PotentialModel& V, const Vec& x,
                                  const HypoParams& p) {
    p.validate();
    const int n = V.n();
    const PotentialJet J = jet(V, x);
    Matrix shifted = J.hessian.mat();
    for (int i = 0; i < n; ++i)
        shifted(i, i) += p.c;

    double tr_sq = 0.0;
    const Matrix s2 = shifted * shifted;
    for (int i = 0; i < n; ++i)
        tr_sq += s2(i, i);

    TraceCheck out;
    out.lhs = std::sqrt(2.0 * p.tau * p.nu * p.nu / p.sigma) * tr_sq;
    out.ok = true;
    double scale = std::max(1.0, std::abs(out.lhs));
    for (int k = 0; k < n; ++k) {
        const Matrix prod = shifted * J.third_slices[k].mat();
        double tr = 0.0;
        for (int i = 0; i < n; ++i)
            tr += prod(i, i);
        out.rhs_per_k.push_back(tr);
        scale = std::max(scale, std::abs(tr));
    }
    for (double rhs : out.rhs_per_k)
        if (out.lhs < rhs - 1e-10 * scale)
            out.ok = false;
    return out;
}

double hypo_epsilon_margin(double eps, double t0) {
    // |1 - 2 eps^2 t^2| attains its max over [0, t0] at an endpoint
    const double at_end = std::abs(1.0 - 2.0 * eps * eps * t0 * t0);
    const double m = std::max(1.0, at_end);
    return 1.0 - 3.0 * eps - eps * m;
}

double hypo_quadratic_residual(double w, double t, double eps, double gamma1,
                               double gamma2, const HypoParams& p, int dim) {
    const double e2 = eps * eps, e3 = e2 * eps, t2 = t * t;
    const double corner = 1.0 - 3.0 * eps - eps * std::abs(1.0 - 2.0 * e2 * t2);
    const double quad_coeff =
        p.sigma * std::exp(-8.0 * p.tau * dim * t) * gamma1 -
        std::abs(1.0 - 2.0 * e3 * t2) / (2.0 * e3);
    const double lin_coeff = std::abs(-1.0 + 2.0 * p.nu * t - 2.0 * e2 * t2) + p.tau * t;
    const double mixed = 2.0 * p.c * e2 * t2 + p.nu * eps * t + 2.0 * (1.0 - eps);
    const double constant = 2.0 * p.sigma * gamma2 + 2.0 * p.c * e2 * t2 +
                            4.0 * eps * p.nu * t - 2.0 * eps -
                            mixed * mixed / (2.0 * corner);
    return quad_coeff * w * w - lin_coeff * w + constant;
}

HypoellipticCertificate hypoelliptic_certificate(double t0, const HypoParams& p,
                                                 double hessnorm_max, int dim) {
    p.validate();
    if (!(t0 > 0.0))
        throw std::invalid_argument("hypoelliptic_certificate: t0 must be positive");
    if (!(hessnorm_max >= 0.0))
        throw std::invalid_argument("hypoelliptic_certificate: hessnorm_max must be >= 0");
    if (dim < 1)
        throw std::invalid_argument("hypoelliptic_certificate: dim must be >= 1");

    HypoellipticCertificate cert;
    cert.t0 = t0;
    cert.hessnorm_max = hessnorm_max;

    // largest eps with corner margin >= 1/2 on [0, t0]
    double lo = 0.0, hi = 1.0 / 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hypo_epsilon_margin(mid, t0) >= 0.5)
            lo = mid;
        else
            hi = mid;
    }
    cert.epsilon = lo;
    if (!(cert.epsilon > 0.0))
        return cert;

    constexpr int kNw = 1000, kNt = 1000;
    auto worst_margin = [&](double g1, double g2, bool bail_on_negative) {
        double worst = std::numeric_limits<double>::infinity();
        for (int jt = 0; jt <= kNt; ++jt) {
            const double t = t0 * jt / double(kNt);
            const int nw = hessnorm_max == 0.0 ? 0 : kNw;
            for (int jw = 0; jw <= nw; ++jw) {
                const double w = nw == 0 ? 0.0 : hessnorm_max * jw / double(kNw);
                worst = std::min(worst, hypo_quadratic_residual(w, t, cert.epsilon,
                                                                g1, g2, p, dim));
                if (bail_on_negative && worst < 0.0)
                    return worst;
            }
        }
        return worst;
    };

    const double cap = 1e12;
    double g = 1.0;
    bool found = false;
    for (; g <= cap; g *= 2.0) {
        if (worst_margin(g, g, true) >= 0.0) {
            found = true;
            break;
        }
    }
    if (!found) {
        cert.feasible = false;
        cert.gamma1 = cert.gamma2 = cap;
        cert.worst_margin = worst_margin(cap, cap, false);
        return cert;
    }

    // shrink each weight separately while feasibility persists
    double g1 = g, g2 = g;
    while (g1 > 1e-6 && worst_margin(0.5 * g1, g2, true) >= 0.0)
        g1 *= 0.5;
    while (g2 > 1e-6 && worst_margin(g1, 0.5 * g2, true) >= 0.0)
        g2 *= 0.5;

    cert.gamma1 = g1;
    cert.gamma2 = g2;
    cert.worst_margin = worst_margin(g1, g2, false);
    cert.feasible = cert.worst_margin >= 0.0;
    return cert;
}

} // namespace kfp
