#ifndef TAILINV_INVERSE_HPP
#define TAILINV_INVERSE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tailinv/forward.hpp"
#include "tailinv/measure.hpp"

namespace tailinv {

/// Smallest singular value of M, which under the Euclidean norm equals
/// min_{|z|=1} |M z|.  Returns 0 for singular M.
double gamma_min(const Mat& m);

/// Operator norm (largest singular value).
double op_norm(const Mat& m);

struct ContractionCertificate {
    double alpha;
    double gamma1;              // gamma of the (preconditioned) first coefficient
    std::vector<double> norms;  // operator norms of the remaining coefficients
    double kappa;               // gamma1^{-alpha} * sum_j norms_j^alpha
    bool feasible;              // kappa < 1, the strict contraction condition
    std::optional<Mat> preconditioner;
};

/// Contraction certificate for the alternating series: feasibility means
/// gamma(Psi_1)^alpha > sum_{j>=2} |Psi_j|^alpha (with A Psi_j throughout
/// when a preconditioner A is supplied).  All entries must be invertible.
ContractionCertificate certify(const WeightFamily& fam, double alpha,
                               const std::optional<Mat>& preconditioner = std::nullopt);

/// First candidate A with kappa < 1, if any.
std::optional<std::pair<Mat, ContractionCertificate>> search_preconditioner(
    const WeightFamily& fam, double alpha, const std::vector<Mat>& candidates);

/// Default candidate generator: identity, Psi_1^{-1}, random diagonal
/// rescalings, and random orthogonal-times-diagonal draws (deterministic).
std::vector<Mat> default_preconditioner_candidates(const WeightFamily& fam, std::uint64_t seed = 0x9c0ULL);

std::optional<std::pair<Mat, ContractionCertificate>> search_preconditioner(
    const WeightFamily& fam, double alpha);

struct NeumannResult {
    double value;      // alternating partial sum through order n
    int terms_used;    // series order n (levels 0..n evaluated)
    double tail_bound; // proven remainder bound mass_bound * inf_b^{-alpha} * kappa^{n+1}
    std::vector<double> per_term; // level sums (all nonnegative)
    double kappa;
    double mass_bound; // computable bound for sup_s s^alpha mu_*({|z|>s})
    double inf_b;
    bool bound_achieved; // false when the term budget stopped the series before tol
};

struct NeumannOptions {
    std::uint64_t max_terms = 10'000'000;
    std::optional<Mat> preconditioner;
};

/// Evaluates mu_*(B) for the solution of mu_X = sum_j mu_* o Psi_j^{-1} by the
/// alternating series over transported sets, with exact symbolic transport of
/// B through the accumulated matrix products.  The series order is the
/// smallest n whose remainder bound is at most tol.
NeumannResult neumann_invert(const HomogeneousTailMeasure& mu_x, const WeightFamily& fam,
                             const EvalSet& b, double tol, const NeumannOptions& opts = {});

struct RoundtripRow {
    EvalSet set;
    double truth;
    double recovered;
    double bound;
    bool pass; // |truth - recovered| <= bound + 1e-12
};

/// Forward map then inversion on every panel set, against the known mu_Z.
std::vector<RoundtripRow> roundtrip_report(const HomogeneousTailMeasure& mu_z, const WeightFamily& fam,
                                           const std::vector<EvalSet>& panel, double tol,
                                           const NeumannOptions& opts = {});

} // namespace tailinv

#endif
