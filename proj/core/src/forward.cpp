#include "tailinv/forward.hpp"

#include <cmath>
#include <sstream>

namespace tailinv {

// ---------------------------------------------------------------------------
// WeightFamily
// ---------------------------------------------------------------------------

WeightFamily WeightFamily::scalars(int dim, std::vector<double> entries) {
    if (dim < 1) throw ValidationError("weight family: dim must be >= 1");
    if (entries.empty()) throw ValidationError("weight family: must be nonempty");
    WeightFamily f(WeightKind::Scalars, dim);
    for (double v : entries) {
        if (!std::isfinite(v)) throw ValidationError("weight family: non-finite scalar entry");
        if (v == 0.0) f.has_zero_entry_ = true;
    }
    f.scalars_ = std::move(entries);
    return f;
}

WeightFamily WeightFamily::diagonals(std::vector<Vec> entries) {
    if (entries.empty()) throw ValidationError("weight family: must be nonempty");
    const int dim = static_cast<int>(entries.front().size());
    if (dim < 1) throw ValidationError("weight family: dim must be >= 1");
    WeightFamily f(WeightKind::DiagonalVectors, dim);
    for (const Vec& v : entries) {
        if (v.size() != dim) throw ValidationError("weight family: diagonal entry dimension mismatch");
        if (!v.allFinite()) throw ValidationError("weight family: non-finite diagonal entry");
        if ((v.array() == 0.0).any()) f.has_zero_entry_ = true;
    }
    f.diagonals_ = std::move(entries);
    return f;
}

WeightFamily WeightFamily::matrices(std::vector<Mat> entries) {
    if (entries.empty()) throw ValidationError("weight family: must be nonempty");
    const int dim = static_cast<int>(entries.front().rows());
    if (dim < 1) throw ValidationError("weight family: dim must be >= 1");
    WeightFamily f(WeightKind::Matrices, dim);
    for (const Mat& m : entries) {
        if (m.rows() != dim || m.cols() != dim)
            throw ValidationError("weight family: matrices must be square and of equal dimension");
        if (!m.allFinite()) throw ValidationError("weight family: non-finite matrix entry");
    }
    f.matrices_ = std::move(entries);
    return f;
}

std::size_t WeightFamily::size() const {
    switch (kind_) {
        case WeightKind::Scalars: return scalars_.size();
        case WeightKind::DiagonalVectors: return diagonals_.size();
        case WeightKind::Matrices: return matrices_.size();
    }
    return 0;
}

const std::vector<double>& WeightFamily::scalar_entries() const {
    if (kind_ != WeightKind::Scalars) throw ValidationError("weight family: not a scalar family");
    return scalars_;
}

const std::vector<Vec>& WeightFamily::diagonal_entries() const {
    if (kind_ != WeightKind::DiagonalVectors) throw ValidationError("weight family: not a diagonal family");
    return diagonals_;
}

const std::vector<Mat>& WeightFamily::matrix_entries() const {
    if (kind_ != WeightKind::Matrices) throw ValidationError("weight family: not a matrix family");
    return matrices_;
}

Mat WeightFamily::matrix(std::size_t j) const {
    if (j >= size()) throw ValidationError("weight family: index out of range");
    switch (kind_) {
        case WeightKind::Scalars: return scalars_[j] * Mat::Identity(dim_, dim_);
        case WeightKind::DiagonalVectors: return Mat(diagonals_[j].asDiagonal());
        case WeightKind::Matrices: return matrices_[j];
    }
    return Mat();
}

// ---------------------------------------------------------------------------
// ProductLaw
// ---------------------------------------------------------------------------

ProductLaw::ProductLaw(DiscreteMeasure representation, double delta)
    : rep_(DiscreteMeasure(representation.dim())), delta_(delta), has_zero_coordinate_(false) {
    if (representation.empty()) throw ValidationError("product law: needs at least one atom");
    if (!(delta > 0.0)) throw ValidationError("product law: delta must be positive");
    const double total = representation.total_mass();
    std::vector<Atom> atoms = representation.atoms();
    for (Atom& a : atoms) {
        a.mass /= total;
        if ((a.point.array() == 0.0).any()) has_zero_coordinate_ = true;
    }
    rep_ = DiscreteMeasure(representation.dim(), std::move(atoms));
}

// ---------------------------------------------------------------------------
// Forward maps
// ---------------------------------------------------------------------------

DiscreteMeasure mult_convolve(const DiscreteMeasure& nu, const DiscreteMeasure& rho) {
    if (nu.dim() != rho.dim()) throw ValidationError("mult_convolve: dimension mismatch");
    std::vector<Atom> atoms;
    atoms.reserve(nu.atoms().size() * rho.atoms().size());
    for (const Atom& x : nu.atoms())
        for (const Atom& y : rho.atoms())
            atoms.push_back(Atom{x.point.cwiseProduct(y.point), x.mass * y.mass});
    return DiscreteMeasure(nu.dim(), std::move(atoms));
}

double mult_convolve_eval(const DiscreteMeasure& nu, const DiscreteMeasure& rho, const EvalSet& set) {
    if (nu.dim() != rho.dim()) throw ValidationError("mult_convolve_eval: dimension mismatch");
    if (set.dim() != nu.dim()) throw ValidationError("mult_convolve_eval: set dimension mismatch");
    double total = 0.0;
    Vec prod(nu.dim());
    for (const Atom& y : rho.atoms()) {
        for (const Atom& x : nu.atoms()) {
            prod = x.point.cwiseProduct(y.point);
            if (set.contains(prod)) total += x.mass * y.mass;
        }
    }
    return total;
}

HomogeneousTailMeasure weighted_sum_tail(const HomogeneousTailMeasure& mu_z, const WeightFamily& fam) {
    if (fam.kind() == WeightKind::Scalars)
        throw ValidationError("weighted_sum_tail: use scalar_weight_tail for scalar families");
    if (fam.dim() != mu_z.dim()) throw ValidationError("weighted_sum_tail: dimension mismatch");
    if (fam.kind() == WeightKind::DiagonalVectors && fam.has_zero_entry())
        throw ValidationError(
            "weighted_sum_tail: a diagonal entry is zero, so the coefficient matrix is singular; "
            "families that put mass on coordinate subspaces are not supported here");

    std::vector<SpectralAtom> acc;
    for (std::size_t j = 0; j < fam.size(); ++j) {
        Mat m = fam.matrix(j);
        HomogeneousTailMeasure part = pushforward(mu_z, m); // rejects singular matrices
        acc.insert(acc.end(), part.spectral().begin(), part.spectral().end());
    }
    if (acc.empty()) throw ComputeError("weighted_sum_tail: right-hand side vanishes");
    return HomogeneousTailMeasure(mu_z.dim(), mu_z.alpha(), std::move(acc));
}

ScalarWeightTail scalar_weight_tail(const HomogeneousTailMeasure& mu_z, const WeightFamily& psis) {
    if (psis.kind() != WeightKind::Scalars)
        throw ValidationError("scalar_weight_tail: needs a scalar weight family");
    const double alpha = mu_z.alpha();
    double plus = 0.0;
    double minus = 0.0;
    for (double p : psis.scalar_entries()) {
        if (p > 0.0)
            plus += std::pow(p, alpha);
        else if (p < 0.0)
            minus += std::pow(-p, alpha);
    }
    if (plus == 0.0 && minus == 0.0)
        throw ValidationError("scalar_weight_tail: all weights are zero");

    std::vector<SpectralAtom> acc;
    for (const SpectralAtom& s : mu_z.spectral()) {
        if (plus > 0.0) acc.push_back(SpectralAtom{s.direction, s.weight * plus});
        if (minus > 0.0) acc.push_back(SpectralAtom{-s.direction, s.weight * minus});
    }
    return ScalarWeightTail{plus, minus, HomogeneousTailMeasure(mu_z.dim(), alpha, std::move(acc))};
}

HomogeneousTailMeasure product_tail(const HomogeneousTailMeasure& mu_z, const ProductLaw& law) {
    if (law.dim() != mu_z.dim()) throw ValidationError("product_tail: dimension mismatch");
    if (law.has_zero_coordinate())
        throw ValidationError("product_tail: multiplier law has an atom with a zero coordinate; "
                              "the multiplier must be nonzero in every coordinate almost surely");
    std::vector<SpectralAtom> acc;
    for (const Atom& a : law.representation().atoms()) {
        Mat diag = Mat(a.point.asDiagonal());
        HomogeneousTailMeasure part = pushforward(mu_z, diag);
        for (const SpectralAtom& s : part.spectral())
            acc.push_back(SpectralAtom{s.direction, s.weight * a.mass});
    }
    if (acc.empty()) throw ComputeError("product_tail: right-hand side vanishes");
    return HomogeneousTailMeasure(mu_z.dim(), mu_z.alpha(), std::move(acc));
}

} // namespace tailinv
