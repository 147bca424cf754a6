#ifndef TAILINV_FORWARD_HPP
#define TAILINV_FORWARD_HPP

#include <vector>

#include "tailinv/measure.hpp"

namespace tailinv {

enum class WeightKind { Scalars, DiagonalVectors, Matrices };

/// A finite family of coefficient weights: scalars psi_j, diagonal vectors,
/// or full square matrices, all conforming to one ambient dimension.
/// Exactly zero scalar / diagonal entries are allowed (they drop the term)
/// and recorded by has_zero_entry(); checkers treat such families specially.
class WeightFamily {
public:
    static WeightFamily scalars(int dim, std::vector<double> entries);
    static WeightFamily diagonals(std::vector<Vec> entries);
    static WeightFamily matrices(std::vector<Mat> entries);

    WeightKind kind() const { return kind_; }
    int dim() const { return dim_; }
    std::size_t size() const;
    bool has_zero_entry() const { return has_zero_entry_; }

    const std::vector<double>& scalar_entries() const;
    const std::vector<Vec>& diagonal_entries() const;
    const std::vector<Mat>& matrix_entries() const;

    /// The j-th coefficient as a dim x dim matrix, any kind.
    Mat matrix(std::size_t j) const;

private:
    WeightFamily(WeightKind kind, int dim) : kind_(kind), dim_(dim) {}
    WeightKind kind_;
    int dim_;
    bool has_zero_entry_ = false;
    std::vector<double> scalars_;
    std::vector<Vec> diagonals_;
    std::vector<Mat> matrices_;
};

/// The law of a random diagonal multiplier A = diag(A_1,...,A_d), or of a
/// scalar multiplier when dim = 1, as a finite atomic probability law.
/// Masses are normalized to total 1.  Finite support makes every moment
/// E|A|^{alpha+delta} finite; delta records the margin reported downstream.
class ProductLaw {
public:
    explicit ProductLaw(DiscreteMeasure representation, double delta = 0.5);

    const DiscreteMeasure& representation() const { return rep_; }
    int dim() const { return rep_.dim(); }
    bool is_scalar() const { return rep_.dim() == 1; }
    double delta() const { return delta_; }
    bool has_zero_coordinate() const { return has_zero_coordinate_; }

private:
    DiscreteMeasure rep_;
    double delta_;
    bool has_zero_coordinate_;
};

/// Multiplicative convolution of two atomic measures:
/// atoms (x o y coordinatewise, m_x * m_y) over all pairs, canonicalized.
DiscreteMeasure mult_convolve(const DiscreteMeasure& nu, const DiscreteMeasure& rho);

/// (nu (*) rho)(A) without materializing the product measure.
double mult_convolve_eval(const DiscreteMeasure& nu, const DiscreteMeasure& rho, const EvalSet& set);

/// Tail of the weighted sum X = sum_j Psi_j Z^(j): the measure sum_j mu_Z o Psi_j^{-1}.
/// Family entries must be invertible; zero diagonal entries are rejected.
HomogeneousTailMeasure weighted_sum_tail(const HomogeneousTailMeasure& mu_z, const WeightFamily& fam);

struct ScalarWeightTail {
    double psi_plus;   // sum of psi_j^alpha over positive weights
    double psi_minus;  // sum of |psi_j|^alpha over negative weights
    HomogeneousTailMeasure mu_x;
};

/// Scalar-weight two-sided tail: mu_X = psi_plus * mu_Z + psi_minus * mu_Z(-.).
ScalarWeightTail scalar_weight_tail(const HomogeneousTailMeasure& mu_z, const WeightFamily& psis);

/// Product tail E[mu_Z o A^{-1}] for an atomic diagonal multiplier law:
/// the mixture sum_a m_a * (mu_Z o diag(a)^{-1}).  Atoms with a zero
/// coordinate are rejected.
HomogeneousTailMeasure product_tail(const HomogeneousTailMeasure& mu_z, const ProductLaw& law);

} // namespace tailinv

#endif
