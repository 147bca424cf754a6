#ifndef TAILINV_MEASURE_HPP
#define TAILINV_MEASURE_HPP

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "tailinv/errors.hpp"

namespace tailinv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Discrete measures
// ---------------------------------------------------------------------------

struct Atom {
    Vec point;
    double mass;
};

/// Finite nonnegative atomic measure on R^d.  Construction canonicalizes:
/// atoms are sorted lexicographically by point and identical points are
/// merged (masses added).  All values are immutable after construction.
class DiscreteMeasure {
public:
    DiscreteMeasure(int dim, std::vector<Atom> atoms);

    /// Empty measure of the given dimension.
    explicit DiscreteMeasure(int dim);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    double total_mass() const;

private:
    int dim_;
    std::vector<Atom> atoms_;
};

/// Convenience factory matching the JSON shape: points given as vectors.
DiscreteMeasure make_discrete(int dim, const std::vector<std::pair<std::vector<double>, double>>& atoms);

// ---------------------------------------------------------------------------
// Homogeneous tail measures
// ---------------------------------------------------------------------------

struct SpectralAtom {
    Vec direction; // unit vector
    double weight; // > 0
};

/// An alpha-homogeneous measure on R^d \ {0} represented by a finite spectral
/// decomposition: mu(A) = sum_i w_i * integral_0^inf 1{r u_i in A} alpha r^{-alpha-1} dr.
/// Directions are normalized on construction; directions closer than 1e-9 in
/// Euclidean distance are merged.  mu({|x| > 1}) equals the sum of weights.
class HomogeneousTailMeasure {
public:
    HomogeneousTailMeasure(int dim, double alpha, std::vector<SpectralAtom> spectral);

    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    const std::vector<SpectralAtom>& spectral() const { return spectral_; }
    double total_weight() const;

    /// Measure scaled by c > 0 (all weights multiplied).
    HomogeneousTailMeasure scaled(double c) const;
    /// Reflection through the origin: mu(-A).
    HomogeneousTailMeasure reflected() const;
    /// Sum of two measures with equal dim and alpha.
    HomogeneousTailMeasure operator+(const HomogeneousTailMeasure& other) const;

private:
    int dim_;
    double alpha_;
    std::vector<SpectralAtom> spectral_;
};

// ---------------------------------------------------------------------------
// Evaluation sets
// ---------------------------------------------------------------------------

/// Closed box prod_j [lo_j, hi_j]; entries may be +-inf.  Some coordinate
/// interval must exclude 0, which keeps the set away from the origin.
struct Rect {
    Vec lo;
    Vec hi;
};

/// { x : |x| > radius }, radius > 0.
struct NormExceed {
    double radius;
};

/// prod_j S_j with S_j = [t_j, inf) for sign +1, (-inf, -t_j] for sign -1,
/// the whole line for sign 0.  At least one nonzero sign must carry t_j > 0.
struct HalfLineProduct {
    std::vector<int> signs;  // entries in {-1, 0, +1}
    Vec thresholds;          // nonnegative
};

/// The family of sets on which tail measures are evaluated.  All three
/// variants have closed-form radial sections along any ray from the origin
/// and are closed under positive scaling.
class EvalSet {
public:
    static EvalSet rect(Vec lo, Vec hi);
    static EvalSet norm_exceed(int dim, double radius);
    static EvalSet half_line(std::vector<int> signs, Vec thresholds);

    int dim() const { return dim_; }
    const std::variant<Rect, NormExceed, HalfLineProduct>& body() const { return body_; }

    /// The scaled set tA, t > 0 (thresholds, radii, and box edges scaled).
    EvalSet scaled(double t) const;

    /// Pointwise membership (closed inequalities for Rect/HalfLineProduct,
    /// strict for NormExceed).
    bool contains(const Vec& x) const;

    /// inf { |z| : z in A }, in closed form.  Positive for any valid set.
    double inf_norm() const;

private:
    EvalSet(int dim, std::variant<Rect, NormExceed, HalfLineProduct> body)
        : dim_(dim), body_(std::move(body)) {}
    int dim_;
    std::variant<Rect, NormExceed, HalfLineProduct> body_;
};

/// Radial section { r > 0 : r v in A } of an EvalSet along the ray through v.
/// Always an interval; empty is encoded as hi <= lo.  hi may be +inf.
struct RayInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
};

RayInterval ray_interval(const EvalSet& set, const Vec& v);

/// mu(A) for the spectral representation; exact via radial closed forms.
/// Throws ComputeError if some radial section reaches down to the origin
/// (the measure of such a set is infinite).
double tail_eval(const HomogeneousTailMeasure& mu, const EvalSet& set);

/// mu(M B) for an invertible matrix M, evaluated by transporting the
/// spectral rays through M^{-1} instead of materializing the image set.
double tail_eval_mapped(const HomogeneousTailMeasure& mu, const Mat& m_inverse, const EvalSet& set);

/// Pushforward mu o M^{-1}: spectral atom (u, w) maps to (Mu/|Mu|, w |Mu|^alpha).
/// Exact, same alpha.  Throws ValidationError for singular M with a
/// condition-number diagnostic.
HomogeneousTailMeasure pushforward(const HomogeneousTailMeasure& mu, const Mat& m);

// ---------------------------------------------------------------------------
// Quadrant decomposition
// ---------------------------------------------------------------------------

/// Sign vector v in {-1,+1}^d, stored as a bitmask (bit j set means +1).
class QuadrantSign {
public:
    explicit QuadrantSign(const std::vector<int>& signs);

    static QuadrantSign from_mask(int dim, std::uint32_t mask) { return QuadrantSign(dim, mask); }
    static std::vector<QuadrantSign> all(int dim);
    static QuadrantSign positive(int dim) { return QuadrantSign(dim, low_bits(dim)); }

    int dim() const { return dim_; }
    int sign(int j) const { return (mask_ >> j) & 1u ? +1 : -1; }
    std::uint32_t mask() const { return mask_; }
    std::vector<int> signs() const;

    /// Coordinatewise product in the group {-1,+1}^d.
    QuadrantSign operator*(const QuadrantSign& other) const;

    bool operator==(const QuadrantSign& o) const { return dim_ == o.dim_ && mask_ == o.mask_; }
    bool operator<(const QuadrantSign& o) const { return mask_ < o.mask_; }

private:
    QuadrantSign(int dim, std::uint32_t mask) : dim_(dim), mask_(mask & low_bits(dim)) {
        if (dim < 1 || dim > 26) throw ValidationError("quadrant sign: dim out of range");
    }
    static std::uint32_t low_bits(int dim) { return (dim >= 32) ? ~0u : ((1u << dim) - 1u); }
    int dim_;
    std::uint32_t mask_;
};

using QuadrantMeasures = std::map<QuadrantSign, DiscreteMeasure>;

/// Result of splitting a measure on R^d by orthant.  Atoms with a zero
/// coordinate are collected separately instead of being dropped.
struct QuadrantSplit {
    int dim;
    QuadrantMeasures parts;          // per sign vector, coordinates stored as absolute values
    DiscreteMeasure axes_remainder;  // atoms with some zero coordinate, unchanged
    const DiscreteMeasure& part(const QuadrantSign& v) const;
};

QuadrantSplit quadrant_split(const DiscreteMeasure& m);

} // namespace tailinv

#endif
