#include "tailinv/measure.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tailinv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

std::string ord(std::size_t i) {
    std::ostringstream os;
    os << "atom " << i;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure
// ---------------------------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(int dim) : dim_(dim) {
    if (dim < 1) throw ValidationError("discrete measure: dim must be >= 1");
}

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms) : dim_(dim) {
    if (dim < 1) throw ValidationError("discrete measure: dim must be >= 1");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].point.size() != dim)
            throw ValidationError("discrete measure: " + ord(i) + " has wrong dimension");
        if (!(atoms[i].mass > 0.0) || !std::isfinite(atoms[i].mass))
            throw ValidationError("discrete measure: " + ord(i) + " has nonpositive mass");
        if (!atoms[i].point.allFinite())
            throw ValidationError("discrete measure: " + ord(i) + " has non-finite coordinates");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return lex_less(a.point, b.point); });
    for (const Atom& a : atoms) {
        if (!atoms_.empty() && atoms_.back().point == a.point)
            atoms_.back().mass += a.mass;
        else
            atoms_.push_back(a);
    }
}

double DiscreteMeasure::total_mass() const {
    double t = 0.0;
    for (const Atom& a : atoms_) t += a.mass;
    return t;
}

DiscreteMeasure make_discrete(int dim, const std::vector<std::pair<std::vector<double>, double>>& atoms) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& [pt, mass] : atoms) {
        Atom a;
        a.point = Eigen::Map<const Vec>(pt.data(), static_cast<Eigen::Index>(pt.size()));
        a.mass = mass;
        out.push_back(std::move(a));
    }
    return DiscreteMeasure(dim, std::move(out));
}

// ---------------------------------------------------------------------------
// HomogeneousTailMeasure
// ---------------------------------------------------------------------------

HomogeneousTailMeasure::HomogeneousTailMeasure(int dim, double alpha, std::vector<SpectralAtom> spectral)
    : dim_(dim), alpha_(alpha) {
    if (dim < 1) throw ValidationError("tail measure: dim must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ValidationError("tail measure: alpha must be positive");
    for (std::size_t i = 0; i < spectral.size(); ++i) {
        SpectralAtom& s = spectral[i];
        if (s.direction.size() != dim)
            throw ValidationError("tail measure: direction " + ord(i) + " has wrong dimension");
        if (!(s.weight > 0.0) || !std::isfinite(s.weight))
            throw ValidationError("tail measure: " + ord(i) + " has nonpositive weight");
        const double n = s.direction.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw ValidationError("tail measure: direction " + ord(i) + " is zero or non-finite");
        s.direction /= n;
    }
    std::sort(spectral.begin(), spectral.end(),
              [](const SpectralAtom& a, const SpectralAtom& b) { return lex_less(a.direction, b.direction); });
    // Merge directions closer than 1e-9; after sorting, candidates are adjacent.
    for (const SpectralAtom& s : spectral) {
        if (!spectral_.empty() && (spectral_.back().direction - s.direction).norm() < 1e-9)
            spectral_.back().weight += s.weight;
        else
            spectral_.push_back(s);
    }
}

double HomogeneousTailMeasure::total_weight() const {
    double t = 0.0;
    for (const SpectralAtom& s : spectral_) t += s.weight;
    return t;
}

HomogeneousTailMeasure HomogeneousTailMeasure::scaled(double c) const {
    if (!(c > 0.0)) throw ValidationError("tail measure: scale factor must be positive");
    std::vector<SpectralAtom> s = spectral_;
    for (SpectralAtom& a : s) a.weight *= c;
    return HomogeneousTailMeasure(dim_, alpha_, std::move(s));
}

HomogeneousTailMeasure HomogeneousTailMeasure::reflected() const {
    std::vector<SpectralAtom> s = spectral_;
    for (SpectralAtom& a : s) a.direction = -a.direction;
    return HomogeneousTailMeasure(dim_, alpha_, std::move(s));
}

HomogeneousTailMeasure HomogeneousTailMeasure::operator+(const HomogeneousTailMeasure& other) const {
    if (other.dim_ != dim_) throw ValidationError("tail measure sum: dimension mismatch");
    if (other.alpha_ != alpha_) throw ValidationError("tail measure sum: alpha mismatch");
    std::vector<SpectralAtom> s = spectral_;
    s.insert(s.end(), other.spectral_.begin(), other.spectral_.end());
    return HomogeneousTailMeasure(dim_, alpha_, std::move(s));
}

// ---------------------------------------------------------------------------
// EvalSet
// ---------------------------------------------------------------------------

EvalSet EvalSet::rect(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || lo.size() < 1)
        throw ValidationError("rect: lo/hi must be nonempty and of equal dimension");
    bool zero_free = false;
    for (Eigen::Index j = 0; j < lo.size(); ++j) {
        if (std::isnan(lo[j]) || std::isnan(hi[j]))
            throw ValidationError("rect: NaN bound");
        if (lo[j] > hi[j]) throw ValidationError("rect: lo > hi in some coordinate");
        if (lo[j] > 0.0 || hi[j] < 0.0) zero_free = true;
    }
    if (!zero_free)
        throw ValidationError("rect: every coordinate interval contains 0; set is not bounded away from the origin");
    return EvalSet(static_cast<int>(lo.size()), Rect{std::move(lo), std::move(hi)});
}

EvalSet EvalSet::norm_exceed(int dim, double radius) {
    if (dim < 1) throw ValidationError("norm_exceed: dim must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ValidationError("norm_exceed: radius must be positive");
    return EvalSet(dim, NormExceed{radius});
}

EvalSet EvalSet::half_line(std::vector<int> signs, Vec thresholds) {
    const int d = static_cast<int>(signs.size());
    if (d < 1 || thresholds.size() != d)
        throw ValidationError("half_line: signs/thresholds must be nonempty and of equal dimension");
    bool anchored = false;
    for (int j = 0; j < d; ++j) {
        if (signs[j] < -1 || signs[j] > 1)
            throw ValidationError("half_line: signs must be in {-1,0,+1}");
        if (thresholds[j] < 0.0 || !std::isfinite(thresholds[j]))
            throw ValidationError("half_line: thresholds must be nonnegative and finite");
        if (signs[j] != 0 && thresholds[j] > 0.0) anchored = true;
    }
    if (!anchored)
        throw ValidationError("half_line: need some nonzero sign with a positive threshold");
    return EvalSet(d, HalfLineProduct{std::move(signs), std::move(thresholds)});
}

EvalSet EvalSet::scaled(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("EvalSet::scaled: factor must be positive");
    if (const auto* r = std::get_if<Rect>(&body_))
        return EvalSet(dim_, Rect{t * r->lo, t * r->hi});
    if (const auto* n = std::get_if<NormExceed>(&body_))
        return EvalSet(dim_, NormExceed{t * n->radius});
    const auto& h = std::get<HalfLineProduct>(body_);
    return EvalSet(dim_, HalfLineProduct{h.signs, t * h.thresholds});
}

bool EvalSet::contains(const Vec& x) const {
    if (x.size() != dim_) throw ValidationError("EvalSet::contains: dimension mismatch");
    if (const auto* r = std::get_if<Rect>(&body_)) {
        for (Eigen::Index j = 0; j < x.size(); ++j)
            if (x[j] < r->lo[j] || x[j] > r->hi[j]) return false;
        return true;
    }
    if (const auto* n = std::get_if<NormExceed>(&body_)) return x.norm() > n->radius;
    const auto& h = std::get<HalfLineProduct>(body_);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (h.signs[j] == +1 && x[j] < h.thresholds[j]) return false;
        if (h.signs[j] == -1 && x[j] > -h.thresholds[j]) return false;
    }
    return true;
}

double EvalSet::inf_norm() const {
    if (const auto* r = std::get_if<Rect>(&body_)) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < r->lo.size(); ++j) {
            const double c = std::clamp(0.0, r->lo[j], r->hi[j]);
            s += c * c;
        }
        return std::sqrt(s);
    }
    if (const auto* n = std::get_if<NormExceed>(&body_)) return n->radius;
    const auto& h = std::get<HalfLineProduct>(body_);
    double s = 0.0;
    for (std::size_t j = 0; j < h.signs.size(); ++j)
        if (h.signs[j] != 0) s += h.thresholds[j] * h.thresholds[j];
    return std::sqrt(s);
}

RayInterval ray_interval(const EvalSet& set, const Vec& v) {
    if (v.size() != set.dim()) throw ValidationError("ray_interval: dimension mismatch");
    RayInterval out{0.0, kInf};
    const auto intersect = [&out](double lo, double hi) {
        out.lo = std::max(out.lo, lo);
        out.hi = std::min(out.hi, hi);
    };
    if (const auto* r = std::get_if<Rect>(&set.body())) {
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            const double u = v[j];
            if (u == 0.0) {
                if (r->lo[j] > 0.0 || r->hi[j] < 0.0) return RayInterval{};
            } else if (u > 0.0) {
                intersect(r->lo[j] / u, r->hi[j] / u);
            } else {
                intersect(r->hi[j] / u, r->lo[j] / u);
            }
            if (out.empty()) return RayInterval{};
        }
    } else if (const auto* n = std::get_if<NormExceed>(&set.body())) {
        const double nv = v.norm();
        if (!(nv > 0.0)) return RayInterval{};
        intersect(n->radius / nv, kInf);
    } else {
        const auto& h = std::get<HalfLineProduct>(set.body());
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (h.signs[j] == 0) continue;
            const double u = (h.signs[j] == +1) ? v[j] : -v[j];
            const double t = h.thresholds[j];
            if (u > 0.0) {
                intersect(t / u, kInf);
            } else {
                // The ray points away from this half-line; only t == 0 with
                // u == 0 leaves the coordinate unconstrained.
                if (t > 0.0 || u < 0.0) return RayInterval{};
            }
            if (out.empty()) return RayInterval{};
        }
    }
    out.lo = std::max(out.lo, 0.0);
    if (out.empty()) return RayInterval{};
    return out;
}

namespace {

double radial_mass(double alpha, const RayInterval& iv) {
    if (iv.empty()) return 0.0;
    if (!(iv.lo > 0.0))
        throw ComputeError("tail evaluation: set reaches the origin along a spectral ray; measure is infinite");
    const double lo_part = std::pow(iv.lo, -alpha);
    const double hi_part = std::isinf(iv.hi) ? 0.0 : std::pow(iv.hi, -alpha);
    return lo_part - hi_part;
}

} // namespace

double tail_eval(const HomogeneousTailMeasure& mu, const EvalSet& set) {
    if (set.dim() != mu.dim()) throw ValidationError("tail_eval: dimension mismatch");
    double total = 0.0;
    for (const SpectralAtom& s : mu.spectral())
        total += s.weight * radial_mass(mu.alpha(), ray_interval(set, s.direction));
    return total;
}

double tail_eval_mapped(const HomogeneousTailMeasure& mu, const Mat& m_inverse, const EvalSet& set) {
    if (set.dim() != mu.dim()) throw ValidationError("tail_eval_mapped: dimension mismatch");
    if (m_inverse.rows() != mu.dim() || m_inverse.cols() != mu.dim())
        throw ValidationError("tail_eval_mapped: matrix dimension mismatch");
    double total = 0.0;
    Vec ray(mu.dim());
    for (const SpectralAtom& s : mu.spectral()) {
        ray.noalias() = m_inverse * s.direction;
        total += s.weight * radial_mass(mu.alpha(), ray_interval(set, ray));
    }
    return total;
}

HomogeneousTailMeasure pushforward(const HomogeneousTailMeasure& mu, const Mat& m) {
    if (m.rows() != mu.dim() || m.cols() != mu.dim())
        throw ValidationError("pushforward: matrix must be square of the measure's dimension");
    Eigen::JacobiSVD<Mat> svd(m);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > smax * 1e-13)) {
        std::ostringstream os;
        os << "pushforward: matrix is singular to working precision (sigma_min=" << smin
           << ", sigma_max=" << smax << ", condition=" << (smin > 0.0 ? smax / smin : kInf) << ")";
        throw ValidationError(os.str());
    }
    std::vector<SpectralAtom> out;
    out.reserve(mu.spectral().size());
    for (const SpectralAtom& s : mu.spectral()) {
        Vec v = m * s.direction;
        const double n = v.norm();
        out.push_back(SpectralAtom{v / n, s.weight * std::pow(n, mu.alpha())});
    }
    return HomogeneousTailMeasure(mu.dim(), mu.alpha(), std::move(out));
}

// ---------------------------------------------------------------------------
// Quadrants
// ---------------------------------------------------------------------------

QuadrantSign::QuadrantSign(const std::vector<int>& signs) : dim_(static_cast<int>(signs.size())), mask_(0) {
    if (dim_ < 1 || dim_ > 26) throw ValidationError("quadrant sign: dim out of range");
    for (int j = 0; j < dim_; ++j) {
        if (signs[j] == +1)
            mask_ |= (1u << j);
        else if (signs[j] != -1)
            throw ValidationError("quadrant sign: entries must be exactly +1 or -1");
    }
}

std::vector<QuadrantSign> QuadrantSign::all(int dim) {
    if (dim < 1 || dim > 26) throw ValidationError("quadrant sign: dim out of range");
    std::vector<QuadrantSign> out;
    out.reserve(std::size_t{1} << dim);
    for (std::uint32_t m = 0; m < (1u << dim); ++m) out.push_back(QuadrantSign::from_mask(dim, m));
    return out;
}

std::vector<int> QuadrantSign::signs() const {
    std::vector<int> out(dim_);
    for (int j = 0; j < dim_; ++j) out[j] = sign(j);
    return out;
}

QuadrantSign QuadrantSign::operator*(const QuadrantSign& other) const {
    if (other.dim_ != dim_) throw ValidationError("quadrant sign product: dimension mismatch");
    // +1 * +1 = +1, -1 * -1 = +1: the product bit is the XNOR of the inputs.
    return QuadrantSign(dim_, ~(mask_ ^ other.mask_));
}

const DiscreteMeasure& QuadrantSplit::part(const QuadrantSign& v) const {
    auto it = parts.find(v);
    if (it != parts.end()) return it->second;
    static const auto empties = [] {
        std::vector<DiscreteMeasure> e;
        for (int d = 1; d <= 26; ++d) e.emplace_back(d);
        return e;
    }();
    return empties[static_cast<std::size_t>(v.dim()) - 1];
}

QuadrantSplit quadrant_split(const DiscreteMeasure& m) {
    const int d = m.dim();
    std::map<QuadrantSign, std::vector<Atom>> buckets;
    std::vector<Atom> axes;
    for (const Atom& a : m.atoms()) {
        bool on_axis = false;
        std::uint32_t mask = 0;
        for (int j = 0; j < d; ++j) {
            if (a.point[j] == 0.0) {
                on_axis = true;
                break;
            }
            if (a.point[j] > 0.0) mask |= (1u << j);
        }
        if (on_axis) {
            axes.push_back(a);
        } else {
            Atom abs_atom{a.point.cwiseAbs(), a.mass};
            buckets[QuadrantSign::from_mask(d, mask)].push_back(std::move(abs_atom));
        }
    }
    QuadrantSplit out{d, {}, DiscreteMeasure(d, std::move(axes))};
    for (auto& [v, atoms] : buckets) out.parts.emplace(v, DiscreteMeasure(d, std::move(atoms)));
    return out;
}

} // namespace tailinv
