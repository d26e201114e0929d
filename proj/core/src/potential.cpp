#include "kfp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kfp {

namespace {

double sqnorm(const Vec& x) {
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return s;
}

void check_point(const Vec& x, int n) {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("potential: point has wrong dimension");
    for (double v : x)
        if (!std::isfinite(v))
            throw std::invalid_argument("potential: non-finite point");
}

double poly_eval(const Vec& c, double s) {
    double acc = 0.0;
    for (size_t j = c.size(); j-- > 0;)
        acc = acc * s + c[j];
    return acc;
}

// order-th derivative of the univariate polynomial sum_j c[j] s^j
double poly_deriv(const Vec& c, double s, int order) {
    double acc = 0.0;
    for (size_t j = 0; j < c.size(); ++j) {
        const int ji = static_cast<int>(j);
        if (ji < order)
            continue;
        double f = 1.0;
        for (int m = 0; m < order; ++m)
            f *= static_cast<double>(ji - m);
        acc += f * c[j] * std::pow(s, ji - order);
    }
    return acc;
}

} // namespace

bool Box::empty() const {
    if (lo.size() != hi.size() || lo.empty())
        return true;
    for (size_t d = 0; d < lo.size(); ++d)
        if (!(lo[d] <= hi[d]))
            return true;
    return false;
}

PotentialModel PotentialModel::quadratic(SymMatrix m_inv, Vec p, double q) {
    const int n = m_inv.dim();
    if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument("quadratic potential: p has wrong size");
    const PsdResult psd = is_psd(m_inv, 0.0);
    if (!psd.flag || psd.min_eig <= 0.0)
        throw std::invalid_argument("quadratic potential: M^{-1} must be positive definite");
    return PotentialModel(n, QuadraticPotential{std::move(m_inv), std::move(p), q});
}

PotentialModel PotentialModel::radial_poly(int n, double r, int k, Vec v0_coeffs) {
    if (n < 1 || r <= 0.0 || k < 2)
        throw std::invalid_argument("radial_poly potential: need n>=1, r>0, k>=2");
    if (static_cast<int>(v0_coeffs.size()) > 2 * k)
        throw std::invalid_argument("radial_poly potential: deg(V0) must be < 2k");
    return PotentialModel(n, RadialPolyPotential{r, k, std::move(v0_coeffs)});
}

PotentialModel PotentialModel::double_well(int n, double r1, double r2) {
    if (n < 1 || r1 <= 0.0 || r2 <= 0.0)
        throw std::invalid_argument("double_well potential: need n>=1, r1>0, r2>0");
    return PotentialModel(n, DoubleWellPotential{r1, r2});
}

PotentialModel PotentialModel::tabulated(int n, std::function<double(const Vec&)> f) {
    if (n < 1 || !f)
        throw std::invalid_argument("tabulated potential: need n>=1 and a callback");
    return PotentialModel(n, TabulatedPotential{std::move(f)});
}

double PotentialModel::value(const Vec& x) const {
    check_point(x, n_);
    if (const auto* q = std::get_if<QuadraticPotential>(&kind_)) {
        double acc = q->q;
        for (int i = 0; i < n_; ++i) {
            acc += q->p[i] * x[i];
            for (int j = 0; j < n_; ++j)
                acc += 0.5 * x[i] * q->m_inv(i, j) * x[j];
        }
        return acc;
    }
    if (const auto* rp = std::get_if<RadialPolyPotential>(&kind_)) {
        double acc = rp->r * std::pow(sqnorm(x), rp->k);
        for (double xi : x)
            acc += poly_eval(rp->v0_coeffs, xi);
        return acc;
    }
    if (const auto* dw = std::get_if<DoubleWellPotential>(&kind_)) {
        const double s = sqnorm(x);
        return dw->r1 * s * s - dw->r2 * s;
    }
    const auto& tab = std::get<TabulatedPotential>(kind_);
    const double v = tab.eval(x);
    if (!std::isfinite(v))
        throw std::domain_error("tabulated potential: non-finite value");
    return v;
}

namespace {

PotentialJet jet_quadratic(const QuadraticPotential& q, const PotentialModel& V,
                           const Vec& x) {
    const int n = static_cast<int>(x.size());
    PotentialJet out;
    out.x = x;
    out.value = V.value(x);
    out.gradient.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        out.gradient[i] = q.p[i];
        for (int j = 0; j < n; ++j)
            out.gradient[i] += q.m_inv(i, j) * x[j];
    }
    out.hessian = q.m_inv;
    out.third_slices.assign(n, SymMatrix(n));
    return out;
}

PotentialJet jet_radial_poly(const RadialPolyPotential& rp, const PotentialModel& V,
                             const Vec& x) {
    const int n = static_cast<int>(x.size());
    const int k = rp.k;
    const double r = rp.r;
    const double s = sqnorm(x);

    // radial part r*s^k with s = |x|^2:
    //   grad   = 2kr s^{k-1} x
    //   hess   = 2kr s^{k-1} I + 4k(k-1) r s^{k-2} x x^T
    //   third  = 4k(k-1) r s^{k-2} (d_ij x_k + d_ik x_j + d_jk x_i)
    //            + 8k(k-1)(k-2) r s^{k-3} x_i x_j x_k
    const double sk1 = (k >= 1) ? std::pow(s, k - 1) : 0.0;
    const double sk2 = (k >= 2) ? std::pow(s, k - 2) : 0.0;
    const double sk3 = (k >= 3) ? std::pow(s, k - 3) : 0.0;
    const double c1 = 2.0 * k * r * sk1;
    const double c2 = 4.0 * k * (k - 1) * r * sk2;
    const double c3 = 8.0 * k * (k - 1) * (k - 2) * r * sk3;

    PotentialJet out;
    out.x = x;
    out.value = V.value(x);
    out.gradient.assign(n, 0.0);
    Matrix H(n, n);
    for (int i = 0; i < n; ++i) {
        out.gradient[i] = c1 * x[i] + poly_deriv(rp.v0_coeffs, x[i], 1);
        for (int j = 0; j < n; ++j)
            H(i, j) = c2 * x[i] * x[j] + (i == j ? c1 : 0.0);
        H(i, i) += poly_deriv(rp.v0_coeffs, x[i], 2);
    }
    out.hessian = SymMatrix(H);

    out.third_slices.assign(n, SymMatrix(n));
    for (int kk = 0; kk < n; ++kk) {
        Matrix T(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double t = c3 * x[i] * x[j] * x[kk];
                if (i == j)
                    t += c2 * x[kk];
                if (i == kk)
                    t += c2 * x[j];
                if (j == kk)
                    t += c2 * x[i];
                T(i, j) = t;
            }
        T(kk, kk) += poly_deriv(rp.v0_coeffs, x[kk], 3);
        out.third_slices[kk] = SymMatrix(T);
    }
    return out;
}

PotentialJet jet_double_well(const DoubleWellPotential& dw, const PotentialModel& V,
                             const Vec& x) {
    const int n = static_cast<int>(x.size());
    const double s = sqnorm(x);
    PotentialJet out;
    out.x = x;
    out.value = V.value(x);
    out.gradient.assign(n, 0.0);
    Matrix H(n, n);
    for (int i = 0; i < n; ++i) {
        out.gradient[i] = (4.0 * dw.r1 * s - 2.0 * dw.r2) * x[i];
        for (int j = 0; j < n; ++j)
            H(i, j) = 8.0 * dw.r1 * x[i] * x[j] +
                      (i == j ? 4.0 * dw.r1 * s - 2.0 * dw.r2 : 0.0);
    }
    out.hessian = SymMatrix(H);
    out.third_slices.assign(n, SymMatrix(n));
    for (int kk = 0; kk < n; ++kk) {
        Matrix T(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double t = 0.0;
                if (i == j)
                    t += 8.0 * dw.r1 * x[kk];
                if (i == kk)
                    t += 8.0 * dw.r1 * x[j];
                if (j == kk)
                    t += 8.0 * dw.r1 * x[i];
                T(i, j) = t;
            }
        out.third_slices[kk] = SymMatrix(T);
    }
    return out;
}

PotentialJet jet_tabulated(const PotentialModel& V, const Vec& x) {
    const int n = static_cast<int>(x.size());
    const double h = 1e-4 * (1.0 + std::sqrt(sqnorm(x)));

    auto at = [&](Vec p) { return V.value(p); };
    auto shifted = [&](const Vec& p, int d, double step) {
        Vec q = p;
        q[d] += step;
        return q;
    };

    PotentialJet out;
    out.x = x;
    out.value = at(x);
    out.gradient.assign(n, 0.0);
    for (int d = 0; d < n; ++d)
        out.gradient[d] = (at(shifted(x, d, h)) - at(shifted(x, d, -h))) / (2.0 * h);

    Matrix H(n, n);
    for (int i = 0; i < n; ++i) {
        H(i, i) = (at(shifted(x, i, h)) - 2.0 * out.value + at(shifted(x, i, -h))) / (h * h);
        for (int j = i + 1; j < n; ++j) {
            const double vpp = at(shifted(shifted(x, i, h), j, h));
            const double vpm = at(shifted(shifted(x, i, h), j, -h));
            const double vmp = at(shifted(shifted(x, i, -h), j, h));
            const double vmm = at(shifted(shifted(x, i, -h), j, -h));
            H(i, j) = H(j, i) = (vpp - vpm - vmp + vmm) / (4.0 * h * h);
        }
    }
    out.hessian = SymMatrix(H);

    // third_slices[k] = central difference of the Hessian along x_k,
    // then symmetrized over all permutations of (i,j,k)
    std::vector<Matrix> raw(n, Matrix(n, n));
    for (int kk = 0; kk < n; ++kk) {
        auto hess_at = [&](const Vec& p) {
            Matrix G(n, n);
            for (int i = 0; i < n; ++i) {
                const double vc = at(p);
                G(i, i) = (at(shifted(p, i, h)) - 2.0 * vc + at(shifted(p, i, -h))) / (h * h);
                for (int j = i + 1; j < n; ++j) {
                    const double vpp = at(shifted(shifted(p, i, h), j, h));
                    const double vpm = at(shifted(shifted(p, i, h), j, -h));
                    const double vmp = at(shifted(shifted(p, i, -h), j, h));
                    const double vmm = at(shifted(shifted(p, i, -h), j, -h));
                    G(i, j) = G(j, i) = (vpp - vpm - vmp + vmm) / (4.0 * h * h);
                }
            }
            return G;
        };
        const Matrix Hp = hess_at(shifted(x, kk, h));
        const Matrix Hm = hess_at(shifted(x, kk, -h));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                raw[kk](i, j) = (Hp(i, j) - Hm(i, j)) / (2.0 * h);
    }
    out.third_slices.assign(n, SymMatrix(n));
    for (int kk = 0; kk < n; ++kk) {
        Matrix T(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double sym = (raw[kk](i, j) + raw[kk](j, i) + raw[i](j, kk) +
                                    raw[i](kk, j) + raw[j](i, kk) + raw[j](kk, i)) /
                                   6.0;
                T(i, j) = sym;
            }
        out.third_slices[kk] = SymMatrix(T);
    }
    return out;
}

} // namespace

PotentialJet jet(const PotentialModel& V, const Vec& x) {
    check_point(x, V.n());
    if (const auto* q = std::get_if<QuadraticPotential>(&V.kind()))
        return jet_quadratic(*q, V, x);
    if (const auto* rp = std::get_if<RadialPolyPotential>(&V.kind()))
        return jet_radial_poly(*rp, V, x);
    if (const auto* dw = std::get_if<DoubleWellPotential>(&V.kind()))
        return jet_double_well(*dw, V, x);
    return jet_tabulated(V, x);
}

double alpha(const PotentialModel& V, const Vec& x) {
    const PotentialJet j = jet(V, x);
    return sym_eig(j.hessian).eigenvalues.front();
}

void for_each_grid_point(const Box& box, const GridSpec& resolution,
                         const std::function<void(const Vec&)>& f) {
    const int n = box.dim();
    if (box.empty())
        throw std::invalid_argument("grid sweep: empty box");
    if (static_cast<int>(resolution.size()) != n)
        throw std::invalid_argument("grid sweep: resolution dimension mismatch");
    for (int c : resolution)
        if (c < 1)
            throw std::invalid_argument("grid sweep: resolution counts must be >= 1");

    Vec x(n);
    std::vector<int> idx(n, 0);
    while (true) {
        for (int d = 0; d < n; ++d) {
            if (resolution[d] == 1)
                x[d] = 0.5 * (box.lo[d] + box.hi[d]);
            else
                x[d] = box.lo[d] +
                       (box.hi[d] - box.lo[d]) * idx[d] / double(resolution[d] - 1);
        }
        f(x);
        int d = 0;
        while (d < n && ++idx[d] == resolution[d]) {
            idx[d] = 0;
            ++d;
        }
        if (d == n)
            break;
    }
}

Alpha0Estimate estimate_alpha0(const PotentialModel& V, const Box& box,
                               const GridSpec& resolution) {
    if (box.empty())
        throw std::invalid_argument("estimate_alpha0: empty box");

    if (const auto* q = std::get_if<QuadraticPotential>(&V.kind())) {
        const Spectrum s = sym_eig(q->m_inv);
        Vec mid(V.n());
        for (int d = 0; d < V.n(); ++d)
            mid[d] = 0.5 * (box.lo[d] + box.hi[d]);
        return {s.eigenvalues.front(), mid, true};
    }
    if (const auto* dw = std::get_if<DoubleWellPotential>(&V.kind())) {
        // min over x of the smallest Hessian eigenvalue sits at the origin
        return {-2.0 * dw->r2, Vec(V.n(), 0.0), true};
    }

    double best = std::numeric_limits<double>::infinity();
    Vec best_x(V.n(), 0.0);
    for_each_grid_point(box, resolution, [&](const Vec& x) {
        const double a = alpha(V, x);
        if (a < best) {
            best = a;
            best_x = x;
        }
    });

    // local pattern-search refinement from the best grid point
    const int n = V.n();
    Vec x = best_x;
    double step = 0.0;
    for (int d = 0; d < n; ++d)
        step = std::max(step, (box.hi[d] - box.lo[d]) /
                                  std::max(1, resolution[d] - 1));
    if (step == 0.0)
        step = 1.0;
    for (int iter = 0; iter < 200 && step > 1e-10; ++iter) {
        bool moved = false;
        for (int d = 0; d < n; ++d) {
            for (double sgn : {+1.0, -1.0}) {
                Vec y = x;
                y[d] = std::clamp(y[d] + sgn * step, box.lo[d], box.hi[d]);
                const double a = alpha(V, y);
                if (a < best) {
                    best = a;
                    x = y;
                    moved = true;
                }
            }
        }
        if (!moved)
            step *= 0.5;
    }
    return {best, x, false};
}

} // namespace kfp
