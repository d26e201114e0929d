#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "kfp/matrixkit.hpp"

namespace kfp {

using Vec = std::vector<double>;

/// Axis-aligned box in R^n.
struct Box {
    Vec lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    bool empty() const;
};

/// Per-dimension sample counts for grid sweeps.
using GridSpec = std::vector<int>;

/// V(x) = x^T M^{-1} x / 2 + p.x + q with M^{-1} symmetric positive definite.
struct QuadraticPotential {
    SymMatrix m_inv;
    Vec p;
    double q = 0.0;
};

/// V(x) = r |x|^{2k} + V0(x) with V0 a polynomial of degree < 2k applied
/// per coordinate and summed: V0(x) = sum_i P(x_i), P given by coeffs
/// (coeffs[j] multiplies s^j).
struct RadialPolyPotential {
    double r = 1.0;
    int k = 2;
    Vec v0_coeffs;
};

/// V(x) = r1 |x|^4 - r2 |x|^2.
struct DoubleWellPotential {
    double r1 = 1.0;
    double r2 = 1.0;
};

/// Arbitrary callback; derivatives by central finite differences.
struct TabulatedPotential {
    std::function<double(const Vec&)> eval;
};

/// Confining potential with all derivative data downstream formulas need.
class PotentialModel {
public:
    using Kind = std::variant<QuadraticPotential, RadialPolyPotential,
                              DoubleWellPotential, TabulatedPotential>;

    static PotentialModel quadratic(SymMatrix m_inv, Vec p, double q);
    static PotentialModel radial_poly(int n, double r, int k, Vec v0_coeffs);
    static PotentialModel double_well(int n, double r1, double r2);
    static PotentialModel tabulated(int n, std::function<double(const Vec&)> f);

    int n() const { return n_; }
    const Kind& kind() const { return kind_; }
    bool is_quadratic() const { return std::holds_alternative<QuadraticPotential>(kind_); }
    bool is_double_well() const { return std::holds_alternative<DoubleWellPotential>(kind_); }

    double value(const Vec& x) const;

private:
    PotentialModel(int n, Kind k) : n_(n), kind_(std::move(k)) {}
    int n_ = 0;
    Kind kind_;
};

/// Value, gradient, Hessian and the n third-derivative slices of V at x;
/// slice k holds the Hessian of the k-th gradient component.
struct PotentialJet {
    Vec x;
    double value = 0.0;
    Vec gradient;
    SymMatrix hessian;
    std::vector<SymMatrix> third_slices;
};

/// Derivative data at x: analytic for the built-in kinds, central finite
/// differences (step 1e-4 * (1+|x|)) for tabulated callbacks.
PotentialJet jet(const PotentialModel& V, const Vec& x);

/// Smallest eigenvalue of the Hessian at x.
double alpha(const PotentialModel& V, const Vec& x);

struct Alpha0Estimate {
    double alpha0;
    Vec argmin;
    bool exact; // closed form (quadratic / double-well) rather than sampled
};

/// Lower bound of alpha over the box: grid scan plus local pattern-search
/// refinement; exact closed forms for the quadratic and double-well kinds.
Alpha0Estimate estimate_alpha0(const PotentialModel& V, const Box& box,
                               const GridSpec& resolution);

/// Iterates f over all points of the sampling grid (resolution[d] points in
/// dimension d, endpoints included; a single point sits at the box center).
void for_each_grid_point(const Box& box, const GridSpec& resolution,
                         const std::function<void(const Vec&)>& f);

} // namespace kfp
