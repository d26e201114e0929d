#pragma once

#include <variant>

#include "kfp/lyapunov.hpp"
#include "kfp/potential.hpp"

namespace kfp {

/// Numeric failures at run time (CFL violation, non-SPD data, overflow).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated phase-space box [-Lx, Lx] x [-Lv, Lv] with cell-centered
/// samples; sized so the steady state carries < 1e-12 mass outside.
struct PhaseGrid {
    double Lx = 0.0, Lv = 0.0;
    int nx = 0, nv = 0;
    double dx = 0.0, dv = 0.0;

    double x_center(int i) const { return -Lx + (i + 0.5) * dx; }
    double v_center(int j) const { return -Lv + (j + 0.5) * dv; }
    size_t cells() const { return static_cast<size_t>(nx) * nv; }
};

/// h = f / f_inf on the grid, row-major (i * nv + j).
struct Field {
    PhaseGrid grid;
    std::vector<double> h;
    double time = 0.0;
};

struct SteadyInit {};
struct GaussianInit { // phase-space Gaussian density f0 = N(mean, cov)
    Vec mean;         // (x, v)
    SymMatrix cov;    // 2x2 SPD
};
struct BumpInit { // h0 = 1 + amplitude * exp(-((x-x0)^2+(v-v0)^2)/(2 width^2))
    double amplitude = 0.5;
    double x0 = 0.0, v0 = 0.0;
    double width = 1.0;
};
struct RoughIndicatorInit { // h0 = indicator of [x_lo, x_hi], optional edge smoothing
    double x_lo = -0.5, x_hi = 0.5;
    double smoothing = 0.0; // 0 => sharp edges
};
using F0Spec = std::variant<SteadyInit, GaussianInit, BumpInit, RoughIndicatorInit>;

struct IdentityWeight {};
struct ShiftedWeight { // P(x) = [[2, nu], [nu, 2 V''(x) + 2a]]
    double a = 0.0;
};
using PChoice = std::variant<IdentityWeight, ShiftedWeight>;

struct FunctionalSample {
    double t = 0.0;
    double mass = 0.0;
    double l2sq = 0.0;          // int (h-1)^2 f_inf
    double gradx_sq = 0.0;      // int |d_x h|^2 f_inf
    double gradv_weighted = 0.0;// int (V'' + 1 - alpha0) (d_v h)^2 f_inf
    double S = 0.0;             // 2 int u^T P u f_inf
    double Phi = 0.0;           // gamma * l2sq + S
};

struct FunctionalSeries {
    std::vector<FunctionalSample> samples;
};

struct HypoSlopes {
    double slope_x = 0.0;
    double slope_v = 0.0;
    int samples = 0;
};

/// Least-squares slope of log(values) against t over [t_lo, t_hi];
/// returns the decay rate (negated slope).
double fit_loglinear_rate(const std::vector<double>& times,
                          const std::vector<double>& values, double t_lo,
                          double t_hi);

/// Phase-space solver for the h-formulation in one spatial dimension:
/// transport (v d_x - V' d_v) by flux-form MUSCL upwinding with face
/// coefficients from the exact stream function of the weighted flow,
/// velocity friction-diffusion by Crank-Nicolson in self-adjoint form,
/// Strang ordering transport-OU-transport.
class KineticSolver {
public:
    KineticSolver(PotentialModel V, double nu, double sigma, int nx, int nv);

    const PhaseGrid& grid() const { return grid_; }
    const PotentialModel& potential() const { return V_; }
    double nu() const { return nu_; }
    double sigma() const { return sigma_; }
    double alpha0() const { return alpha0_; }
    double max_speed_x() const; // max |v|
    double max_speed_v() const; // max |V'|

    /// Weighted mass of h (== 1 after init).
    double mass(const Field& f) const;

    Field init(const F0Spec& spec) const;

    /// One Strang step; throws NumericError when
    /// max|v| dt/dx + max|V'| dt/dv > 0.9.
    void step(Field& f, double dt) const;

    /// Sub-flows, exposed for diagnostics and closed-form comparisons.
    void substep_transport(Field& f, double dt) const;
    void substep_ou(Field& f, double dt) const;

    FunctionalSample functionals(const Field& f, const PChoice& weight,
                                 double gamma) const;

    FunctionalSeries evolve(Field& f, double T, double dt, int sample_every,
                            const PChoice& weight, double gamma) const;

    /// Centered time difference of S against the quadrature of its exact
    /// rate-of-change identity (second-derivative, drift and weight-transport
    /// terms); returns |FD - RHS| / max(|FD|, eps).
    double ds_dt_residual(const Field& f, double dt,
                          const LyapunovSelection& sel) const;

    /// Short-time regularization probe: evolves rough data with step dt and
    /// fits log-log slopes of gradx_sq and gradv_weighted over the window.
    HypoSlopes hypoelliptic_experiment(const F0Spec& rough, double t_lo,
                                       double t_hi, double dt) const;

private:
    void transport_substep(std::vector<double>& h, double dt) const;
    void transport_rhs(const std::vector<double>& h, std::vector<double>& out) const;
    void ou_step(std::vector<double>& h, double dt) const;
    void gradients(const std::vector<double>& h, std::vector<double>& ux,
                   std::vector<double>& uv) const;
    double quad_sum(const std::function<double(int, int)>& f) const;

    PotentialModel V_;
    double nu_, sigma_;
    PhaseGrid grid_;
    double alpha0_ = 0.0;
    double vmin_ = 0.0;

    // cell-center and face tabulations (separable steady-state factors)
    std::vector<double> xc_, vc_, Vp_, Vpp_, Vppp_;
    std::vector<double> gx_, gv_;   // cell-centered Boltzmann factors
    std::vector<double> gxf_, gvf_; // at faces, sizes nx+1 / nv+1
    std::vector<double> qx_, qv_;   // trapezoid quadrature weights (lengths)
    double cnorm_ = 1.0;            // normalization of f_inf on the grid

    mutable struct {
        double dt = -1.0;
        std::vector<double> sub, cp, den;
    } ou_cache_;
};

} // namespace kfp
