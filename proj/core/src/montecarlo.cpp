#include "tailinv/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "tailinv/rng.hpp"

namespace tailinv {

namespace {

// Streams per family term; laws use at most a handful of streams each.
constexpr std::uint64_t kStreamsPerTerm = 64;

void parallel_chunks(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 4096) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(n, static_cast<std::size_t>(t) * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (std::thread& t : pool) t.join();
}

} // namespace

Vec SampleBatch::row(std::size_t i) const {
    Vec out(dim);
    for (int j = 0; j < dim; ++j) out[j] = values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
    return out;
}

std::vector<double> SampleBatch::magnitudes() const {
    std::vector<double> out(n);
    if (dim == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(values[i]);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double v = values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
            s += v * v;
        }
        out[i] = std::sqrt(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ZLaw
// ---------------------------------------------------------------------------

ZLaw::ZLaw(ParetoLaw law, int dim) : law_(law), dim_(dim) {
    if (dim < 1) throw ValidationError("ZLaw: dim must be >= 1");
    if (!(law.alpha > 0.0) || !(law.xm > 0.0))
        throw ValidationError("ZLaw: Pareto parameters must be positive");
    std::ostringstream os;
    os << "pareto(alpha=" << law.alpha << ",xm=" << law.xm << ",dim=" << dim << ")";
    description_ = os.str();
}

ZLaw::ZLaw(SpectralParetoLaw law) : law_(law), dim_(law.mu.dim()) {
    if (law.mu.spectral().empty()) throw ValidationError("ZLaw: spectral law needs at least one direction");
    std::ostringstream os;
    os << "spectral_pareto(alpha=" << law.mu.alpha() << ",atoms=" << law.mu.spectral().size()
       << ",dim=" << dim_ << ")";
    description_ = os.str();
}

ZLaw::ZLaw(OscillatingLaw law, int dim) : law_(std::move(law)), dim_(dim) {
    if (dim < 1) throw ValidationError("ZLaw: dim must be >= 1");
    const OscLawParams& p = std::get<OscillatingLaw>(law_).params();
    std::ostringstream os;
    os << "oscillating(alpha=" << p.alpha << ",theta0=" << p.theta0 << ",a=" << p.a << ",b=" << p.b
       << ",r=" << p.r << (p.sign_flip ? ",flip" : "") << ",dim=" << dim << ")";
    description_ = os.str();
}

ZLaw::ZLaw(MixedLaw law, int dim) : law_(std::move(law)), dim_(dim) {
    if (dim < 1) throw ValidationError("ZLaw: dim must be >= 1");
    const MixedLaw& m = std::get<MixedLaw>(law_);
    const OscLawParams& p = m.positive_part().params();
    std::ostringstream os;
    os << "mixed(" << (m.variant() == MixVariant::Symmetric ? "symmetric" : "opposite-flip")
       << ",alpha=" << p.alpha << ",theta0=" << p.theta0 << ",a=" << p.a << ",b=" << p.b << ",r=" << p.r
       << ",dim=" << dim << ")";
    description_ = os.str();
}

Vec ZLaw::draw(std::uint64_t seed, std::uint64_t stream_base, std::uint64_t i) const {
    Vec out = Vec::Zero(dim_);
    if (const auto* p = std::get_if<ParetoLaw>(&law_)) {
        for (int j = 0; j < dim_; ++j) {
            const double u = rng::u01(seed, stream_base + static_cast<std::uint64_t>(j), i);
            out[j] = p->xm * std::pow(u, -1.0 / p->alpha);
        }
        return out;
    }
    if (const auto* s = std::get_if<SpectralParetoLaw>(&law_)) {
        const double ud = rng::u01(seed, stream_base, i);
        const double ur = rng::u01(seed, stream_base + 1, i);
        const auto& spectral = s->mu.spectral();
        const double total = s->mu.total_weight();
        double acc = 0.0;
        std::size_t pick = spectral.size() - 1;
        for (std::size_t k = 0; k < spectral.size(); ++k) {
            acc += spectral[k].weight / total;
            if (ud <= acc) {
                pick = k;
                break;
            }
        }
        const double radius = std::pow(ur, -1.0 / s->mu.alpha());
        out = radius * spectral[pick].direction;
        return out;
    }
    if (const auto* o = std::get_if<OscillatingLaw>(&law_)) {
        out[0] = o->quantile(rng::u01(seed, stream_base, i));
        return out;
    }
    const MixedLaw& m = std::get<MixedLaw>(law_);
    out[0] = m.draw(seed, stream_base, i);
    return out;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

SampleBatch simulate_weighted_sum(const ZLaw& law, const WeightFamily& fam, std::size_t n,
                                  std::uint64_t seed, int threads) {
    if (n < 1) throw ValidationError("simulate_weighted_sum: n must be >= 1");
    const int d = law.dim();
    if (fam.kind() != WeightKind::Scalars && fam.dim() != d)
        throw ValidationError("simulate_weighted_sum: family and law dimensions differ");

    SampleBatch batch;
    batch.dim = d;
    batch.n = n;
    batch.seed = seed;
    {
        std::ostringstream os;
        os << "weighted_sum(law=" << law.description() << ",terms=" << fam.size() << ")";
        batch.provenance = os.str();
    }
    batch.values.assign(n * static_cast<std::size_t>(d), 0.0);

    const std::size_t q = fam.size();
    parallel_chunks(n, threads, [&](std::size_t lo, std::size_t hi) {
        Vec x(d);
        for (std::size_t i = lo; i < hi; ++i) {
            x.setZero();
            for (std::size_t l = 0; l < q; ++l) {
                const Vec z = law.draw(seed, l * kStreamsPerTerm, i);
                switch (fam.kind()) {
                    case WeightKind::Scalars:
                        x += fam.scalar_entries()[l] * z;
                        break;
                    case WeightKind::DiagonalVectors:
                        x += fam.diagonal_entries()[l].cwiseProduct(z);
                        break;
                    case WeightKind::Matrices:
                        x.noalias() += fam.matrix_entries()[l] * z;
                        break;
                }
            }
            for (int j = 0; j < d; ++j)
                batch.values[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = x[j];
        }
    });
    return batch;
}

SampleBatch simulate_product(const MultiplierLaw& law_a, const ZLaw& law_z, std::size_t n,
                             std::uint64_t seed, int threads) {
    if (n < 1) throw ValidationError("simulate_product: n must be >= 1");
    const int d = law_z.dim();

    std::string a_desc;
    if (const auto* u = std::get_if<UniformMultiplier>(&law_a)) {
        if (!(u->a < u->b)) throw ValidationError("simulate_product: need a < b for the uniform multiplier");
        std::ostringstream os;
        os << "uniform(" << u->a << "," << u->b << ")";
        a_desc = os.str();
    } else {
        const ProductLaw& p = std::get<ProductLaw>(law_a);
        if (p.dim() != 1 && p.dim() != d)
            throw ValidationError("simulate_product: multiplier dimension mismatch");
        std::ostringstream os;
        os << "atomic(dim=" << p.dim() << ",atoms=" << p.representation().atoms().size() << ")";
        a_desc = os.str();
    }

    SampleBatch batch;
    batch.dim = d;
    batch.n = n;
    batch.seed = seed;
    {
        std::ostringstream os;
        os << "product(A=" << a_desc << ",law=" << law_z.description() << ")";
        batch.provenance = os.str();
    }
    batch.values.assign(n * static_cast<std::size_t>(d), 0.0);

    // Stream 0 belongs to the multiplier; Z starts at kStreamsPerTerm.
    parallel_chunks(n, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Vec z = law_z.draw(seed, kStreamsPerTerm, i);
            if (const auto* u = std::get_if<UniformMultiplier>(&law_a)) {
                const double a = u->a + (u->b - u->a) * rng::u01(seed, 0, i);
                z *= a;
            } else {
                const ProductLaw& p = std::get<ProductLaw>(law_a);
                const double ua = rng::u01(seed, 0, i);
                const auto& atoms = p.representation().atoms();
                double acc = 0.0;
                std::size_t pick = atoms.size() - 1;
                for (std::size_t k = 0; k < atoms.size(); ++k) {
                    acc += atoms[k].mass;
                    if (ua <= acc) {
                        pick = k;
                        break;
                    }
                }
                if (p.dim() == 1)
                    z *= atoms[pick].point[0];
                else
                    z = atoms[pick].point.cwiseProduct(z);
            }
            for (int j = 0; j < d; ++j)
                batch.values[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = z[j];
        }
    });
    return batch;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

HillEstimate hill(const std::vector<double>& magnitudes, std::size_t k) {
    const std::size_t n = magnitudes.size();
    if (k < 1 || k >= n) throw ValidationError("hill: need 1 <= k < n");
    std::vector<double> top(magnitudes);
    std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(),
                     std::greater<double>());
    const double pivot = top[k];
    if (!(pivot > 0.0)) throw ComputeError("hill: nonpositive magnitude among the top k+1 order statistics");
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(top[i] > 0.0)) throw ComputeError("hill: nonpositive magnitude among the top k+1 order statistics");
        acc += std::log(top[i] / pivot);
    }
    acc /= static_cast<double>(k);
    if (!(acc > 0.0)) throw ComputeError("hill: degenerate sample (zero log-spacings)");
    const double alpha_hat = 1.0 / acc;
    const double half = 1.96 / std::sqrt(static_cast<double>(k));
    return HillEstimate{alpha_hat, k, alpha_hat * (1.0 - half), alpha_hat * (1.0 + half)};
}

std::vector<TailRatioRow> tail_ratio(const std::vector<double>& magnitudes,
                                     const std::vector<double>& thresholds) {
    std::vector<double> sorted(magnitudes);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<TailRatioRow> rows;
    for (double s : thresholds) {
        if (!(s > 0.0)) throw ValidationError("tail_ratio: thresholds must be positive");
        const auto count_above = [&](double t) {
            return sorted.size() - static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                                            sorted.begin());
        };
        const std::size_t n_s = count_above(s);
        const std::size_t n_2s = count_above(2.0 * s);
        TailRatioRow row;
        row.s = s;
        row.exceed_s = n_s;
        row.exceed_2s = n_2s;
        row.sufficient = n_2s >= 100;
        row.ratio = n_s > 0 ? static_cast<double>(n_2s) / static_cast<double>(n_s)
                            : std::numeric_limits<double>::quiet_NaN();
        // Conditional binomial error for n_2s given n_s trials.
        row.sigma = n_s > 0 ? std::sqrt(std::max(row.ratio * (1.0 - row.ratio), 1.0 / n) /
                                        static_cast<double>(n_s))
                            : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

EmpiricalSpectral empirical_spectral(const SampleBatch& batch, double radius_quantile, int k_bins) {
    if (!(radius_quantile > 0.0 && radius_quantile < 1.0))
        throw ValidationError("empirical_spectral: quantile must lie in (0,1)");
    if (k_bins < 1) throw ValidationError("empirical_spectral: k_bins must be >= 1");
    std::vector<double> mags = batch.magnitudes();
    std::vector<double> sorted(mags);
    const std::size_t pos = static_cast<std::size_t>(radius_quantile * (sorted.size() - 1));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(pos), sorted.end());
    const double radius = sorted[pos];

    std::vector<Vec> dirs;
    for (std::size_t i = 0; i < batch.n; ++i)
        if (mags[i] > radius && mags[i] > 0.0) dirs.push_back(batch.row(i) / mags[i]);
    if (dirs.size() < 500)
        throw ComputeError("empirical_spectral: fewer than 500 exceedances above the quantile radius");

    // Deterministic k-means on the unit sphere: farthest-point seeding, then
    // Lloyd iterations with renormalized centroids.
    const int k = std::min<int>(k_bins, static_cast<int>(dirs.size()));
    std::vector<Vec> centers;
    centers.push_back(dirs.front());
    while (static_cast<int>(centers.size()) < k) {
        double best_d = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const Vec& c : centers) dmin = std::min(dmin, (dirs[i] - c).squaredNorm());
            if (dmin > best_d) {
                best_d = dmin;
                best_i = i;
            }
        }
        if (best_d <= 1e-20) break; // all remaining points coincide with a center
        centers.push_back(dirs[best_i]);
    }
    std::vector<int> assign(dirs.size(), 0);
    for (int it = 0; it < 50; ++it) {
        bool moved = false;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            double dmin = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const double dd = (dirs[i] - centers[c]).squaredNorm();
                if (dd < dmin) {
                    dmin = dd;
                    arg = static_cast<int>(c);
                }
            }
            if (assign[i] != arg) {
                assign[i] = arg;
                moved = true;
            }
        }
        std::vector<Vec> sums(centers.size(), Vec::Zero(batch.dim));
        std::vector<std::size_t> counts(centers.size(), 0);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            sums[static_cast<std::size_t>(assign[i])] += dirs[i];
            ++counts[static_cast<std::size_t>(assign[i])];
        }
        for (std::size_t c = 0; c < centers.size(); ++c)
            if (counts[c] > 0 && sums[c].norm() > 0.0) centers[c] = sums[c] / sums[c].norm();
        if (!moved && it > 0) break;
    }

    std::vector<std::size_t> counts(centers.size(), 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    std::vector<Atom> atoms;
    for (std::size_t c = 0; c < centers.size(); ++c)
        if (counts[c] > 0)
            atoms.push_back(Atom{centers[c], static_cast<double>(counts[c]) / static_cast<double>(dirs.size())});
    return EmpiricalSpectral{DiscreteMeasure(batch.dim, std::move(atoms)), dirs.size(), radius};
}

namespace {

CompareReport build_report(const std::vector<EvalSet>& panel,
                           const std::function<double(const EvalSet&)>& empirical,
                           const HomogeneousTailMeasure& theoretical, std::size_t n_exceed) {
    const double theo_norm = tail_eval(theoretical, EvalSet::norm_exceed(theoretical.dim(), 1.0));
    CompareReport report;
    for (const EvalSet& set : panel) {
        CompareRow row{set, empirical(set), tail_eval(theoretical, set) / theo_norm, 0.0, 0.0};
        const double p = std::clamp(row.theoretical, 0.0, 1.0);
        row.sigma = std::sqrt(std::max(p * (1.0 - p), 1e-9) / static_cast<double>(std::max<std::size_t>(n_exceed, 1)));
        row.dev_sigmas = std::abs(row.empirical - row.theoretical) / row.sigma;
        report.max_abs_dev = std::max(report.max_abs_dev, std::abs(row.empirical - row.theoretical));
        report.max_dev_sigmas = std::max(report.max_dev_sigmas, row.dev_sigmas);
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace

CompareReport compare_tail_measures(const EmpiricalSpectral& empirical,
                                    const HomogeneousTailMeasure& theoretical,
                                    const std::vector<EvalSet>& panel) {
    std::vector<SpectralAtom> atoms;
    for (const Atom& a : empirical.directions.atoms()) atoms.push_back(SpectralAtom{a.point, a.mass});
    const HomogeneousTailMeasure emp(theoretical.dim(), theoretical.alpha(), std::move(atoms));
    const double emp_norm = tail_eval(emp, EvalSet::norm_exceed(emp.dim(), 1.0));
    return build_report(
        panel, [&](const EvalSet& set) { return tail_eval(emp, set) / emp_norm; }, theoretical,
        empirical.n_exceed);
}

CompareReport compare_tail_measures(const SampleBatch& batch, double radius_quantile,
                                    const HomogeneousTailMeasure& theoretical,
                                    const std::vector<EvalSet>& panel) {
    if (!(radius_quantile > 0.0 && radius_quantile < 1.0))
        throw ValidationError("compare_tail_measures: quantile must lie in (0,1)");
    std::vector<double> mags = batch.magnitudes();
    std::vector<double> sorted(mags);
    const std::size_t pos = static_cast<std::size_t>(radius_quantile * (sorted.size() - 1));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(pos), sorted.end());
    const double radius = sorted[pos];

    std::size_t n_exceed = 0;
    for (double m : mags)
        if (m > radius) ++n_exceed;
    if (n_exceed == 0) throw ComputeError("compare_tail_measures: no exceedances above the quantile radius");

    return build_report(
        panel,
        [&](const EvalSet& set) {
            const EvalSet scaled = set.scaled(radius);
            std::size_t count = 0;
            for (std::size_t i = 0; i < batch.n; ++i)
                if (mags[i] > 0.0 && scaled.contains(batch.row(i))) ++count;
            return static_cast<double>(count) / static_cast<double>(n_exceed);
        },
        theoretical, n_exceed);
}

} // namespace tailinv
