#include "kfp/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace kfp {

const char* to_string(DecayClass c) {
    switch (c) {
    case DecayClass::exp_half_nu: return "exp(nu/2)";
    case DecayClass::poly_times_exp_half_nu: return "poly_times_exp(nu/2)";
    case DecayClass::exp_slow: return "exp((nu-sqrt(nu^2-4*alpha0))/2)";
    }
    return "unknown";
}

OdeSystem build_ode(const SymMatrix& m_inv, double nu, double sigma) {
    if (!(nu > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("build_ode: nu, sigma must be positive");
    const int n = m_inv.dim();
    const Spectrum spec = sym_eig(m_inv);
    if (!(spec.eigenvalues.front() > 0.0))
        throw std::invalid_argument("build_ode: Hessian must be positive definite");

    OdeSystem sys;
    sys.n = n;
    sys.m_inv = m_inv;
    sys.nu = nu;
    sys.sigma = sigma;

    const SymMatrix mhalf = spd_sqrt(m_inv);
    sys.C = Matrix(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        sys.C(n + i, n + i) = nu;
        for (int j = 0; j < n; ++j) {
            sys.C(i, n + j) = -mhalf(i, j);
            sys.C(n + i, j) = mhalf(i, j);
        }
    }

    sys.positive_stable = q_spectrum(spec.eigenvalues, nu).positive_stable;

    // The kernel of the diffusion block is span{(psi, 0)}; its image under
    // the mixing map has lower block -psi, so an invariant subspace would
    // need that n x n lower block to be singular.
    Matrix T(2 * n, 2 * n); // K^{-1}(D - R) = [[0, M^{-1}], [-I, nu I]]
    for (int i = 0; i < n; ++i) {
        T(n + i, i) = -1.0;
        T(n + i, n + i) = nu;
        for (int j = 0; j < n; ++j)
            T(i, n + j) = m_inv(i, j);
    }
    Matrix lower(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            lower(i, j) = T(n + i, j);
    const double smin = [&] {
        const Spectrum s = sym_eig(SymMatrix(lower.transposed() * lower));
        return std::sqrt(std::max(0.0, s.eigenvalues.front()));
    }();
    sys.no_invariant_kerD_subspace = smin > 1e-12;
    return sys;
}

std::vector<double> default_time_grid() {
    std::vector<double> t;
    for (int i = 0; i < 50; ++i)
        t.push_back(i / 49.0);
    for (int k = 1; k <= 200; ++k)
        t.push_back(1.0 + k * 49.0 / 200.0);
    return t;
}

PropagatorCurve norm_curve(const OdeSystem& sys, const std::vector<double>& times) {
    if (times.empty())
        throw std::invalid_argument("norm_curve: empty time grid");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("norm_curve: time grid must be ascending");
    if (!sys.positive_stable || !sys.no_invariant_kerD_subspace)
        throw std::invalid_argument("norm_curve: reduction hypotheses not satisfied");

    PropagatorCurve curve;
    curve.times = times;
    curve.norms.reserve(times.size());
    for (double t : times)
        curve.norms.push_back(op_norm2(mat_exp(sys.C, -t)));
    curve.classification = classify(sys.m_inv, sys.nu).classification;
    return curve;
}

JordanReport classify(const SymMatrix& m_inv, double nu) {
    const Spectrum spec = sym_eig(m_inv);
    JordanReport rep;
    rep.alphas = spec.eigenvalues;
    rep.alpha0 = spec.eigenvalues.front();
    rep.betas = q_spectrum(spec.eigenvalues, nu).beta;

    const double q = 0.25 * nu * nu;
    const double tol = 1e-8 * std::max(1.0, q);
    for (size_t i = 0; i < rep.alphas.size(); ++i)
        if (std::abs(rep.alphas[i] - q) <= tol)
            rep.defective_indices.push_back(static_cast<int>(i));
    rep.defective = !rep.defective_indices.empty();
    rep.jordan_block_size = rep.defective ? 2 : 1;

    if (std::abs(rep.alpha0 - q) <= tol) {
        rep.classification = DecayClass::poly_times_exp_half_nu;
        rep.rate = 0.5 * nu;
    } else if (rep.alpha0 > q) {
        rep.classification = DecayClass::exp_half_nu;
        rep.rate = 0.5 * nu;
    } else {
        rep.classification = DecayClass::exp_slow;
        rep.rate = 0.5 * (nu - std::sqrt(nu * nu - 4.0 * rep.alpha0));
    }
    return rep;
}

FittedRate fit_rate(const PropagatorCurve& curve, double t_lo, double t_hi) {
    if (!(t_hi > t_lo) || !(t_lo >= 1.0))
        throw std::invalid_argument("fit_rate: window must satisfy t_hi > t_lo >= 1");

    // normal equations for log n ~ b0 + b1 t + b2 log(1+t)
    Matrix G(3, 3), rhs(3, 1);
    int count = 0;
    for (size_t i = 0; i < curve.times.size(); ++i) {
        const double t = curve.times[i];
        if (t < t_lo || t > t_hi)
            continue;
        if (!(curve.norms[i] > 0.0))
            throw std::invalid_argument("fit_rate: nonpositive norm sample");
        const double y = std::log(curve.norms[i]);
        const double phi[3] = {1.0, t, std::log1p(t)};
        for (int r = 0; r < 3; ++r) {
            rhs(r, 0) += phi[r] * y;
            for (int c = 0; c < 3; ++c)
                G(r, c) += phi[r] * phi[c];
        }
        ++count;
    }
    if (count < 4)
        throw std::invalid_argument("fit_rate: window selects fewer than 4 samples");

    const Matrix b = solve_linear(G, rhs);
    FittedRate out;
    out.rate = -b(1, 0);
    out.log_poly_coeff = b(2, 0);
    out.poly_degree = b(2, 0) > 0.5 ? 1 : 0;
    return out;
}

} // namespace kfp
