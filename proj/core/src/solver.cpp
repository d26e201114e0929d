#include "kfp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kfp {

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0)
        return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

} // namespace

double fit_loglinear_rate(const std::vector<double>& times,
                          const std::vector<double>& values, double t_lo,
                          double t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi)
            continue;
        if (!(values[i] > 0.0))
            continue;
        const double x = times[i], y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2)
        throw std::invalid_argument("fit_loglinear_rate: fewer than 2 samples in window");
    const double denom = n * sxx - sx * sx;
    return -(n * sxy - sx * sy) / denom;
}

KineticSolver::KineticSolver(PotentialModel V, double nu, double sigma, int nx,
                             int nv)
    : V_(std::move(V)), nu_(nu), sigma_(sigma) {
    if (V_.n() != 1)
        throw std::invalid_argument("KineticSolver: spatial dimension must be 1");
    if (!(nu > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("KineticSolver: nu, sigma must be positive");
    if (nx < 64 || nv < 64)
        throw std::invalid_argument("KineticSolver: need nx, nv >= 64");

    // velocity extent from the Gaussian factor, spatial extent from V growth
    const double Lv = 1.0 + 6.0 * std::sqrt(sigma / nu);

    // locate the potential minimum along the axis, then the radius at which
    // the Boltzmann factor drops below 1e-14
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
        const double x = -20.0 + 40.0 * i / 4000.0;
        vmin = std::min(vmin, V_.value({x}));
    }
    const double drop = 14.0 * std::log(10.0) * sigma / nu; // V - Vmin at the edge
    auto small_enough = [&](double L) {
        return V_.value({L}) - vmin >= drop && V_.value({-L}) - vmin >= drop;
    };
    double Lx = 1.0;
    while (!small_enough(Lx)) {
        Lx *= 2.0;
        if (Lx > 1e6)
            throw std::invalid_argument("KineticSolver: potential grows too slowly");
    }
    double lo = Lx / 2.0, hi = Lx;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (small_enough(mid) ? hi : lo) = mid;
    }
    Lx = hi;

    grid_.Lx = Lx;
    grid_.Lv = Lv;
    grid_.nx = nx;
    grid_.nv = nv;
    grid_.dx = 2.0 * Lx / nx;
    grid_.dv = 2.0 * Lv / nv;
    vmin_ = vmin;

    xc_.resize(nx);
    vc_.resize(nv);
    Vp_.resize(nx);
    Vpp_.resize(nx);
    Vppp_.resize(nx);
    gx_.resize(nx);
    gv_.resize(nv);
    gxf_.resize(nx + 1);
    gvf_.resize(nv + 1);
    qx_.resize(nx);
    qv_.resize(nv);

    const double beta = nu_ / sigma_;
    alpha0_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
        xc_[i] = grid_.x_center(i);
        const PotentialJet J = jet(V_, {xc_[i]});
        Vp_[i] = J.gradient[0];
        Vpp_[i] = J.hessian(0, 0);
        Vppp_[i] = J.third_slices[0](0, 0);
        gx_[i] = std::exp(-beta * (J.value - vmin_));
        qx_[i] = grid_.dx * ((i == 0 || i == nx - 1) ? 0.5 : 1.0);
        alpha0_ = std::min(alpha0_, Vpp_[i]);
    }
    if (const auto* q = std::get_if<QuadraticPotential>(&V_.kind()))
        alpha0_ = q->m_inv(0, 0);
    else if (const auto* dw = std::get_if<DoubleWellPotential>(&V_.kind()))
        alpha0_ = -2.0 * dw->r2;

    for (int j = 0; j < nv; ++j) {
        vc_[j] = grid_.v_center(j);
        gv_[j] = std::exp(-beta * 0.5 * vc_[j] * vc_[j]);
        qv_[j] = grid_.dv * ((j == 0 || j == nv - 1) ? 0.5 : 1.0);
    }
    for (int i = 0; i <= nx; ++i) {
        const double xf = -Lx + i * grid_.dx;
        gxf_[i] = std::exp(-beta * (V_.value({xf}) - vmin_));
    }
    for (int j = 0; j <= nv; ++j) {
        const double vf = -Lv + j * grid_.dv;
        gvf_[j] = std::exp(-beta * 0.5 * vf * vf);
    }

    double sx = 0.0, sv = 0.0;
    for (int i = 0; i < nx; ++i)
        sx += qx_[i] * gx_[i];
    for (int j = 0; j < nv; ++j)
        sv += qv_[j] * gv_[j];
    cnorm_ = 1.0 / (sx * sv);
}

double KineticSolver::max_speed_x() const { return grid_.Lv; }

double KineticSolver::max_speed_v() const {
    double m = 0.0;
    for (double vp : Vp_)
        m = std::max(m, std::abs(vp));
    return m;
}

double KineticSolver::quad_sum(const std::function<double(int, int)>& f) const {
    double acc = 0.0;
    for (int i = 0; i < grid_.nx; ++i) {
        double row = 0.0;
        const double wx = qx_[i] * gx_[i];
        for (int j = 0; j < grid_.nv; ++j)
            row += f(i, j) * qv_[j] * gv_[j];
        acc += wx * row;
    }
    return acc * cnorm_;
}

double KineticSolver::mass(const Field& f) const {
    double acc = 0.0;
    for (int i = 0; i < grid_.nx; ++i) {
        double row = 0.0;
        for (int j = 0; j < grid_.nv; ++j)
            row += f.h[static_cast<size_t>(i) * grid_.nv + j] * qv_[j] * gv_[j];
        acc += row * qx_[i] * gx_[i];
    }
    return acc * cnorm_;
}

Field KineticSolver::init(const F0Spec& spec) const {
    Field f;
    f.grid = grid_;
    f.h.assign(grid_.cells(), 1.0);
    const int nv = grid_.nv;

    if (std::holds_alternative<SteadyInit>(spec)) {
        return f;
    } else if (const auto* g = std::get_if<GaussianInit>(&spec)) {
        if (g->cov.dim() != 2 || g->mean.size() != 2)
            throw std::invalid_argument("init: Gaussian spec needs 2d mean and 2x2 covariance");
        const Spectrum s = sym_eig(g->cov);
        if (!(s.eigenvalues.front() > 0.0))
            throw std::invalid_argument("init: covariance must be positive definite");
        // inverse covariance
        const double det = g->cov(0, 0) * g->cov(1, 1) - g->cov(0, 1) * g->cov(1, 0);
        const double i00 = g->cov(1, 1) / det, i11 = g->cov(0, 0) / det,
                     i01 = -g->cov(0, 1) / det;
        const double beta = nu_ / sigma_;
        for (int i = 0; i < grid_.nx; ++i) {
            const double dxm = xc_[i] - g->mean[0];
            const double logw =
                -beta * (V_.value({xc_[i]}) - vmin_); // log of x-factor of f_inf
            for (int j = 0; j < nv; ++j) {
                const double dvm = vc_[j] - g->mean[1];
                const double logf0 =
                    -0.5 * (i00 * dxm * dxm + 2.0 * i01 * dxm * dvm + i11 * dvm * dvm);
                const double logg = logw - beta * 0.5 * vc_[j] * vc_[j];
                f.h[static_cast<size_t>(i) * nv + j] = std::exp(logf0 - logg);
            }
        }
    } else if (const auto* b = std::get_if<BumpInit>(&spec)) {
        if (!(b->width > 0.0) || !(b->amplitude > -1.0))
            throw std::invalid_argument("init: bump needs width > 0 and amplitude > -1");
        for (int i = 0; i < grid_.nx; ++i)
            for (int j = 0; j < nv; ++j) {
                const double dx0 = xc_[i] - b->x0, dv0 = vc_[j] - b->v0;
                f.h[static_cast<size_t>(i) * nv + j] =
                    1.0 + b->amplitude *
                              std::exp(-(dx0 * dx0 + dv0 * dv0) /
                                       (2.0 * b->width * b->width));
            }
    } else {
        const auto& r = std::get<RoughIndicatorInit>(spec);
        if (!(r.x_hi > r.x_lo))
            throw std::invalid_argument("init: indicator needs x_hi > x_lo");
        for (int i = 0; i < grid_.nx; ++i) {
            double prof;
            if (r.smoothing > 0.0) {
                prof = 0.5 * (std::tanh((xc_[i] - r.x_lo) / r.smoothing) -
                              std::tanh((xc_[i] - r.x_hi) / r.smoothing));
            } else {
                prof = (xc_[i] >= r.x_lo && xc_[i] <= r.x_hi) ? 1.0 : 0.0;
            }
            for (int j = 0; j < nv; ++j)
                f.h[static_cast<size_t>(i) * nv + j] = prof;
        }
    }

    const double m = mass(f);
    if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("init: initial datum is not normalizable on the grid");
    for (double& v : f.h)
        v /= m;
    return f;
}

void KineticSolver::transport_rhs(const std::vector<double>& h,
                                  std::vector<double>& out) const {
    const int nx = grid_.nx, nv = grid_.nv;
    const double soverv = sigma_ / nu_;
    out.assign(grid_.cells(), 0.0);

    auto H = [&](int i, int j) -> double {
        return h[static_cast<size_t>(i) * nv + j];
    };
    auto cell = [&](int i, int j) -> double& {
        return out[static_cast<size_t>(i) * nv + j];
    };

    // x-faces: integrated flux coefficient Ux = -(s/n) gxf[i] (gvf[j+1]-gvf[j])
    for (int i = 0; i <= nx; ++i) {
        const double cx = -soverv * cnorm_ * gxf_[i];
        for (int j = 0; j < nv; ++j) {
            const double U = cx * (gvf_[j + 1] - gvf_[j]);
            double hface;
            if (U >= 0.0) {
                const int d = i - 1; // donor cell left of the face
                if (d < 0)
                    hface = H(0, j);
                else if (d == 0 || d == nx - 1)
                    hface = H(d, j);
                else
                    hface = H(d, j) + 0.5 * minmod(H(d, j) - H(d - 1, j),
                                                   H(d + 1, j) - H(d, j));
            } else {
                const int d = i; // donor cell right of the face
                if (d > nx - 1)
                    hface = H(nx - 1, j);
                else if (d == 0 || d == nx - 1)
                    hface = H(d, j);
                else
                    hface = H(d, j) - 0.5 * minmod(H(d, j) - H(d - 1, j),
                                                   H(d + 1, j) - H(d, j));
            }
            const double flux = U * hface;
            if (i > 0)
                cell(i - 1, j) -= flux;
            if (i < nx)
                cell(i, j) += flux;
        }
    }

    // v-faces: Uv = (s/n) gvf[j] (gxf[i+1]-gxf[i])
    for (int j = 0; j <= nv; ++j) {
        const double cv = soverv * cnorm_ * gvf_[j];
        for (int i = 0; i < nx; ++i) {
            const double U = cv * (gxf_[i + 1] - gxf_[i]);
            double hface;
            if (U >= 0.0) {
                const int d = j - 1;
                if (d < 0)
                    hface = H(i, 0);
                else if (d == 0 || d == nv - 1)
                    hface = H(i, d);
                else
                    hface = H(i, d) + 0.5 * minmod(H(i, d) - H(i, d - 1),
                                                   H(i, d + 1) - H(i, d));
            } else {
                const int d = j;
                if (d > nv - 1)
                    hface = H(i, nv - 1);
                else if (d == 0 || d == nv - 1)
                    hface = H(i, d);
                else
                    hface = H(i, d) - 0.5 * minmod(H(i, d) - H(i, d - 1),
                                                   H(i, d + 1) - H(i, d));
            }
            const double flux = U * hface;
            if (j > 0)
                cell(i, j - 1) -= flux;
            if (j < nv)
                cell(i, j) += flux;
        }
    }

    // divergence -> dh/dt against the cell's steady weight
    const double cellvol = grid_.dx * grid_.dv;
    for (int i = 0; i < nx; ++i) {
        const double wx = cnorm_ * gx_[i] * cellvol;
        for (int j = 0; j < nv; ++j)
            cell(i, j) = -cell(i, j) / (wx * gv_[j]);
    }
}

void KineticSolver::transport_substep(std::vector<double>& h, double dt) const {
    // one SSP-RK2 step
    static thread_local std::vector<double> k1, h1, k2;
    transport_rhs(h, k1);
    h1.resize(h.size());
    for (size_t m = 0; m < h.size(); ++m)
        h1[m] = h[m] + dt * k1[m];
    transport_rhs(h1, k2);
    for (size_t m = 0; m < h.size(); ++m)
        h[m] = 0.5 * (h[m] + h1[m] + dt * k2[m]);
}

void KineticSolver::ou_step(std::vector<double>& h, double dt) const {
    const int nx = grid_.nx, nv = grid_.nv;
    if (ou_cache_.dt != dt) {
        // M = I - (dt/2) L with L in self-adjoint flux form; outer faces carry
        // zero flux (Neumann)
        ou_cache_.dt = dt;
        ou_cache_.sub.assign(nv, 0.0);
        ou_cache_.cp.assign(nv, 0.0);
        ou_cache_.den.assign(nv, 0.0);
        std::vector<double> diag(nv), sup(nv);
        const double r = 0.5 * dt * sigma_ / (grid_.dv * grid_.dv);
        for (int j = 0; j < nv; ++j) {
            const double fl = (j == 0) ? 0.0 : gvf_[j];     // lower face factor
            const double fu = (j == nv - 1) ? 0.0 : gvf_[j + 1];
            ou_cache_.sub[j] = -r * fl / gv_[j];
            sup[j] = -r * fu / gv_[j];
            diag[j] = 1.0 + r * (fl + fu) / gv_[j];
        }
        ou_cache_.den[0] = diag[0];
        ou_cache_.cp[0] = sup[0] / diag[0];
        for (int j = 1; j < nv; ++j) {
            ou_cache_.den[j] = diag[j] - ou_cache_.sub[j] * ou_cache_.cp[j - 1];
            ou_cache_.cp[j] = sup[j] / ou_cache_.den[j];
        }
    }

    const double r = 0.5 * dt * sigma_ / (grid_.dv * grid_.dv);
    static thread_local std::vector<double> d;
    d.resize(nv);
    for (int i = 0; i < nx; ++i) {
        double* col = h.data() + static_cast<size_t>(i) * nv;
        // rhs = (I + (dt/2) L) h
        for (int j = 0; j < nv; ++j) {
            const double fl = (j == 0) ? 0.0 : gvf_[j];
            const double fu = (j == nv - 1) ? 0.0 : gvf_[j + 1];
            const double lap = fu * ((j == nv - 1 ? 0.0 : col[j + 1]) - col[j]) -
                               fl * (col[j] - (j == 0 ? 0.0 : col[j - 1]));
            d[j] = col[j] + r * lap / gv_[j];
        }
        // Thomas solve with cached factorization
        d[0] /= ou_cache_.den[0];
        for (int j = 1; j < nv; ++j)
            d[j] = (d[j] - ou_cache_.sub[j] * d[j - 1]) / ou_cache_.den[j];
        col[nv - 1] = d[nv - 1];
        for (int j = nv - 2; j >= 0; --j)
            col[j] = d[j] - ou_cache_.cp[j] * col[j + 1];
    }
}

void KineticSolver::step(Field& f, double dt) const {
    if (!(dt > 0.0))
        throw std::invalid_argument("step: dt must be positive");
    const double cfl = max_speed_x() * dt / grid_.dx + max_speed_v() * dt / grid_.dv;
    if (cfl > 0.9)
        throw NumericError("step: CFL number " + std::to_string(cfl) +
                           " exceeds 0.9; reduce dt");
    transport_substep(f.h, 0.5 * dt);
    ou_step(f.h, dt);
    transport_substep(f.h, 0.5 * dt);
    f.time += dt;
}

void KineticSolver::substep_transport(Field& f, double dt) const {
    transport_substep(f.h, dt);
    f.time += dt;
}

void KineticSolver::substep_ou(Field& f, double dt) const {
    ou_step(f.h, dt);
    f.time += dt;
}

void KineticSolver::gradients(const std::vector<double>& h, std::vector<double>& ux,
                              std::vector<double>& uv) const {
    const int nx = grid_.nx, nv = grid_.nv;
    ux.resize(h.size());
    uv.resize(h.size());
    auto H = [&](int i, int j) { return h[static_cast<size_t>(i) * nv + j]; };
    const double idx = 1.0 / (2.0 * grid_.dx), idv = 1.0 / (2.0 * grid_.dv);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j) {
            double gx;
            if (i == 0)
                gx = (-3.0 * H(0, j) + 4.0 * H(1, j) - H(2, j)) * idx;
            else if (i == nx - 1)
                gx = (3.0 * H(nx - 1, j) - 4.0 * H(nx - 2, j) + H(nx - 3, j)) * idx;
            else
                gx = (H(i + 1, j) - H(i - 1, j)) * idx;
            double gv;
            if (j == 0)
                gv = (-3.0 * H(i, 0) + 4.0 * H(i, 1) - H(i, 2)) * idv;
            else if (j == nv - 1)
                gv = (3.0 * H(i, nv - 1) - 4.0 * H(i, nv - 2) + H(i, nv - 3)) * idv;
            else
                gv = (H(i, j + 1) - H(i, j - 1)) * idv;
            ux[static_cast<size_t>(i) * nv + j] = gx;
            uv[static_cast<size_t>(i) * nv + j] = gv;
        }
}

FunctionalSample KineticSolver::functionals(const Field& f, const PChoice& weight,
                                            double gamma) const {
    static thread_local std::vector<double> ux, uv;
    gradients(f.h, ux, uv);
    const int nv = grid_.nv;
    auto at = [&](const std::vector<double>& a, int i, int j) {
        return a[static_cast<size_t>(i) * nv + j];
    };

    FunctionalSample s;
    s.t = f.time;
    s.mass = mass(f);
    s.l2sq = quad_sum([&](int i, int j) {
        const double d = at(f.h, i, j) - 1.0;
        return d * d;
    });
    s.gradx_sq = quad_sum([&](int i, int j) {
        const double g = at(ux, i, j);
        return g * g;
    });
    s.gradv_weighted = quad_sum([&](int i, int j) {
        const double g = at(uv, i, j);
        return (Vpp_[i] + 1.0 - alpha0_) * g * g;
    });
    if (std::holds_alternative<IdentityWeight>(weight)) {
        s.S = 2.0 * quad_sum([&](int i, int j) {
            const double a = at(ux, i, j), b = at(uv, i, j);
            return a * a + b * b;
        });
    } else {
        const double a = std::get<ShiftedWeight>(weight).a;
        s.S = 2.0 * quad_sum([&](int i, int j) {
            const double u1 = at(ux, i, j), u2 = at(uv, i, j);
            return 2.0 * u1 * u1 + 2.0 * nu_ * u1 * u2 +
                   (2.0 * Vpp_[i] + 2.0 * a) * u2 * u2;
        });
    }
    s.Phi = gamma * s.l2sq + s.S;
    return s;
}

FunctionalSeries KineticSolver::evolve(Field& f, double T, double dt,
                                       int sample_every, const PChoice& weight,
                                       double gamma) const {
    if (!(T > 0.0) || sample_every < 1)
        throw std::invalid_argument("evolve: need T > 0 and sample_every >= 1");
    const long nsteps = std::lround(T / dt);
    FunctionalSeries series;
    series.samples.push_back(functionals(f, weight, gamma));
    for (long k = 1; k <= nsteps; ++k) {
        step(f, dt);
        if (k % sample_every == 0 || k == nsteps)
            series.samples.push_back(functionals(f, weight, gamma));
    }
    return series;
}

double KineticSolver::ds_dt_residual(const Field& f, double dt,
                                     const LyapunovSelection& sel) const {
    const PChoice weight = ShiftedWeight{sel.a};

    Field g = f;
    const double S0 = functionals(g, weight, 0.0).S;
    step(g, dt);
    Field mid = g; // state at t + dt
    step(g, dt);
    const double S2 = functionals(g, weight, 0.0).S;
    const double fd = (S2 - S0) / (2.0 * dt);

    static thread_local std::vector<double> ux, uv, uxv, uvv;
    gradients(mid.h, ux, uv);
    // v-derivatives of the gradient field
    const int nx = grid_.nx, nv = grid_.nv;
    uxv.resize(ux.size());
    uvv.resize(uv.size());
    const double idv = 1.0 / (2.0 * grid_.dv);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j) {
            auto dv_of = [&](const std::vector<double>& a) {
                if (j == 0)
                    return (-3.0 * a[size_t(i) * nv] + 4.0 * a[size_t(i) * nv + 1] -
                            a[size_t(i) * nv + 2]) *
                           idv;
                if (j == nv - 1)
                    return (3.0 * a[size_t(i) * nv + nv - 1] -
                            4.0 * a[size_t(i) * nv + nv - 2] +
                            a[size_t(i) * nv + nv - 3]) *
                           idv;
                return (a[size_t(i) * nv + j + 1] - a[size_t(i) * nv + j - 1]) * idv;
            };
            uxv[size_t(i) * nv + j] = dv_of(ux);
            uvv[size_t(i) * nv + j] = dv_of(uv);
        }

    auto at = [&](const std::vector<double>& a, int i, int j) {
        return a[static_cast<size_t>(i) * nv + j];
    };

    // second-derivative term: 4 sigma int (d_v u)^T P (d_v u)
    const double t1 = quad_sum([&](int i, int j) {
        const double a = at(uxv, i, j), b = at(uvv, i, j);
        return 2.0 * a * a + 2.0 * nu_ * a * b +
               (2.0 * Vpp_[i] + 2.0 * sel.a) * b * b;
    });

    // drift term: 2 int u^T (QP + PQ^T) u
    const double t2 = quad_sum([&](int i, int j) {
        const double u1 = at(ux, i, j), u2 = at(uv, i, j);
        // Q = [[0,1],[-V'',nu]], P = [[2,nu],[nu,2V''+2a]]
        const double p11 = 2.0, p12 = nu_, p22 = 2.0 * Vpp_[i] + 2.0 * sel.a;
        const double q21 = -Vpp_[i];
        // W = QP + PQ^T
        const double w11 = 2.0 * p12;                    // row1 of QP is row2 of P
        const double w12 = p22 + (p11 * q21 + p12 * nu_);
        const double w22 = 2.0 * (q21 * p12 + nu_ * p22);
        return w11 * u1 * u1 + 2.0 * w12 * u1 * u2 + w22 * u2 * u2;
    });

    // weight-transport term: 2 int u^T ([v d_x ... ] P) u with only the
    // lower-right entry -2 v V''' surviving for x-dependent P
    const double t3 = quad_sum([&](int i, int j) {
        const double u2 = at(uv, i, j);
        return -2.0 * vc_[j] * Vppp_[i] * u2 * u2;
    });

    const double rhs = -4.0 * sigma_ * t1 - 2.0 * t2 - 2.0 * t3;
    return std::abs(fd - rhs) /
           std::max(std::abs(fd), std::numeric_limits<double>::epsilon());
}

HypoSlopes KineticSolver::hypoelliptic_experiment(const F0Spec& rough, double t_lo,
                                                  double t_hi, double dt) const {
    if (!(t_hi > t_lo) || !(t_lo > 0.0))
        throw std::invalid_argument("hypoelliptic_experiment: bad window");
    if (t_lo < 10.0 * dt)
        throw NumericError("hypoelliptic_experiment: window below resolvable "
                           "time scale; reduce dt");

    Field f = init(rough);
    std::vector<double> ts, gx, gv;
    const long nsteps = std::lround(t_hi / dt);
    for (long k = 1; k <= nsteps; ++k) {
        step(f, dt);
        if (f.time >= t_lo - 1e-12) {
            const FunctionalSample s = functionals(f, IdentityWeight{}, 0.0);
            ts.push_back(f.time);
            gx.push_back(s.gradx_sq);
            gv.push_back(s.gradv_weighted);
        }
    }

    HypoSlopes out;
    out.samples = static_cast<int>(ts.size());
    // log-log least squares
    auto slope = [&](const std::vector<double>& val) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (size_t m = 0; m < ts.size(); ++m) {
            if (!(val[m] > 0.0))
                continue;
            const double X = std::log(ts[m]), Y = std::log(val[m]);
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
            ++n;
        }
        if (n < 2)
            throw NumericError("hypoelliptic_experiment: too few usable samples");
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    out.slope_x = slope(gx);
    out.slope_v = slope(gv);
    return out;
}

} // namespace kfp
