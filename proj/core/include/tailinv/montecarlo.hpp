#ifndef TAILINV_MONTECARLO_HPP
#define TAILINV_MONTECARLO_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tailinv/forward.hpp"
#include "tailinv/measure.hpp"
#include "tailinv/oscillating.hpp"

namespace tailinv {

struct SampleBatch {
    int dim = 1;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string provenance;
    std::vector<double> values; // row-major n x dim

    Vec row(std::size_t i) const;
    std::vector<double> magnitudes() const; // Euclidean norms (|x| for dim 1)
};

/// iid Pareto(alpha, xm) in every coordinate.
struct ParetoLaw {
    double alpha;
    double xm;
};

/// R * U with R ~ Pareto(alpha, 1) and U drawn from the spectral directions
/// with probabilities proportional to the weights; samples are exactly
/// distributed like the tail measure's normalized polar form.
struct SpectralParetoLaw {
    HomogeneousTailMeasure mu;
};

/// Simulatable law of Z.  Scalar laws embed into dimension d as (Z, 0, ..., 0).
class ZLaw {
public:
    ZLaw(ParetoLaw law, int dim);
    explicit ZLaw(SpectralParetoLaw law);
    ZLaw(OscillatingLaw law, int dim = 1);
    ZLaw(MixedLaw law, int dim = 1);

    int dim() const { return dim_; }
    const std::string& description() const { return description_; }

    /// One draw; pure function of (seed, stream_base, i).
    Vec draw(std::uint64_t seed, std::uint64_t stream_base, std::uint64_t i) const;

private:
    std::variant<ParetoLaw, SpectralParetoLaw, OscillatingLaw, MixedLaw> law_;
    int dim_;
    std::string description_;
};

/// Simulates X = sum_l Psi_l Z^(l), n iid copies.  Generation is chunked
/// across threads with counter-based draws, so results are bit-identical for
/// any thread count.
SampleBatch simulate_weighted_sum(const ZLaw& law, const WeightFamily& fam, std::size_t n,
                                  std::uint64_t seed, int threads = 1);

struct UniformMultiplier {
    double a;
    double b;
};

using MultiplierLaw = std::variant<ProductLaw, UniformMultiplier>;

/// Simulates X = A Z with A an independent diagonal (or scalar) multiplier.
SampleBatch simulate_product(const MultiplierLaw& law_a, const ZLaw& law_z, std::size_t n,
                             std::uint64_t seed, int threads = 1);

struct HillEstimate {
    double alpha_hat;
    std::size_t k;
    double ci_lo; // alpha_hat * (1 - 1.96/sqrt(k))
    double ci_hi;
};

/// Hill estimator on the top k order statistics of the magnitudes.
HillEstimate hill(const std::vector<double>& magnitudes, std::size_t k);

struct TailRatioRow {
    double s;
    double ratio; // P(>2s) / P(>s), empirical
    double sigma; // binomial standard error
    std::size_t exceed_s;
    std::size_t exceed_2s;
    bool sufficient; // at least 100 exceedances at 2s
};

std::vector<TailRatioRow> tail_ratio(const std::vector<double>& magnitudes,
                                     const std::vector<double>& thresholds);

struct EmpiricalSpectral {
    DiscreteMeasure directions; // unit direction points with frequency masses
    std::size_t n_exceed;
    double radius;
};

/// Normalized directions of the exceedances above the given radius quantile,
/// binned by k-means into at most k_bins direction atoms.
EmpiricalSpectral empirical_spectral(const SampleBatch& batch, double radius_quantile, int k_bins = 8);

struct CompareRow {
    EvalSet set;
    double empirical;
    double theoretical;
    double sigma;
    double dev_sigmas;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double max_abs_dev = 0.0;
    double max_dev_sigmas = 0.0;
};

/// Normalized set-mass comparison on a panel: measure(A) / measure(|x| > 1)
/// for the empirical spectral estimate against the theoretical tail measure.
CompareReport compare_tail_measures(const EmpiricalSpectral& empirical,
                                    const HomogeneousTailMeasure& theoretical,
                                    const std::vector<EvalSet>& panel);

/// Batch-level variant: empirical masses are exceedance counts of the scaled
/// panel sets at the quantile radius.
CompareReport compare_tail_measures(const SampleBatch& batch, double radius_quantile,
                                    const HomogeneousTailMeasure& theoretical,
                                    const std::vector<EvalSet>& panel);

} // namespace tailinv

#endif
