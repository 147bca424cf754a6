#ifndef TAILINV_CANCELLATION_HPP
#define TAILINV_CANCELLATION_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tailinv/forward.hpp"
#include "tailinv/measure.hpp"

namespace tailinv {

using Complex = std::complex<double>;

/// Exponent pattern m in {0,1}^d entering the signed Mellin sums.
class SignPattern {
public:
    SignPattern(int dim, std::uint32_t mask) : dim_(dim), mask_(mask & ((dim >= 32) ? ~0u : ((1u << dim) - 1u))) {
        if (dim < 1 || dim > 26) throw ValidationError("sign pattern: dim out of range");
    }
    explicit SignPattern(const std::vector<int>& m);
    static SignPattern zeros(int dim) { return SignPattern(dim, 0u); }
    static std::vector<SignPattern> all(int dim);

    int dim() const { return dim_; }
    int bit(int j) const { return (mask_ >> j) & 1u; }
    std::uint32_t mask() const { return mask_; }
    std::vector<int> bits() const;

    /// prod_k v_k^{m_k} in {-1,+1}.
    int apply(const QuadrantSign& v) const;

private:
    int dim_;
    std::uint32_t mask_;
};

/// Which coordinates the cancellation conditions must cover, with the tail
/// index and the moment margin delta' in (0, alpha).
struct CancellationTask {
    std::vector<int> coords_k; // 1-based coordinate labels, nonempty
    double alpha;
    double delta_prime;
    void validate(int dim) const;
};

/// The signed Mellin-type sum over quadrant measures:
/// sum_v prod_k v_k^{m_k} * sum_atoms mass * x_j^alpha * exp(i theta . ln x).
/// Exact finite sum; atoms must have strictly positive coordinates.
Complex mellin_eval(const QuadrantMeasures& rho_by_quadrant, const CancellationTask& task,
                    int j, const SignPattern& pattern, const Vec& theta);

struct MellinProfile {
    double alpha;
    int j; // 1-based
    SignPattern pattern;
    std::vector<Vec> thetas;
    std::vector<Complex> values;
};

MellinProfile mellin_profile(const QuadrantMeasures& rho_by_quadrant, const CancellationTask& task,
                             int j, const SignPattern& pattern, const std::vector<Vec>& thetas);

// ---------------------------------------------------------------------------
// Zero scanning
// ---------------------------------------------------------------------------

struct ScanOptions {
    double theta_max = 50.0;
    double grid_step = 0.01;
    double zero_tol = 1e-9;
    double refine_tol = 1e-12;       // refinement tolerance in theta
    std::uint64_t random_draws = 1000000; // used when dim(theta) > 3
    std::uint64_t rng_seed = 0x5eedULL;
};

struct ScanWitness {
    Vec theta;
    double abs_value;
};

struct ScanResult {
    std::vector<ScanWitness> zeros;      // |value| <= zero_tol, sorted by |theta|
    std::vector<ScanWitness> near_zeros; // |value| in (zero_tol, 1e3 * zero_tol]
    std::optional<ScanWitness> global_min;
    bool randomized = false;
};

using ThetaEvaluator = std::function<Complex(const Vec& theta)>;

/// Scans |evaluator| over the box [-theta_max, theta_max]^dim.  Grid local
/// minima are refined by golden-section minimization to refine_tol in theta;
/// refined minima at or below zero_tol are returned as zero witnesses.  An
/// empty result means "no zero found up to theta_max", never a certificate.
/// For dim > 3 the grid is replaced by uniform random draws plus local
/// refinement and the result is flagged as randomized.
ScanResult scan_zeros(const ThetaEvaluator& evaluator, int theta_dim, const ScanOptions& opts);

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class VerdictStatus { Certified, NoZeroUpTo, Refuted };

std::string to_string(VerdictStatus s);

struct DeterminingVerdict {
    VerdictStatus status = VerdictStatus::NoZeroUpTo;
    double theta_max = 0.0;

    // Certified
    std::string certificate;

    // Refuted
    std::string condition_id;
    Vec witness_theta;
    double witness_abs_value = 0.0;
    int witness_j = 0;                // 1-based when meaningful
    std::vector<int> witness_pattern; // empty when not meaningful

    std::vector<std::string> conditions_checked;
    std::vector<std::string> warnings;
    bool randomized_search = false;

    // Smallest |value| seen across all scans, for diagnostics.
    double min_abs_value = std::numeric_limits<double>::infinity();
    Vec min_theta;
    std::string min_condition;
};

/// Condition ids are stable strings used in reports:
///   eq3.3, eq3.4  scalar weight families
///   eq3.2         diagonal weight families
///   eq4.1         diagonal multiplier laws
///   eq4.2, eq4.3  scalar multiplier laws
///   eq2.12        raw quadrant-system condition
///   eq2.13a/b     the d=1 pair (plain and signed sum)

DeterminingVerdict check_scalar_determining(const WeightFamily& psis, double alpha,
                                            const ScanOptions& opts = {});
DeterminingVerdict check_scalar_determining(const std::vector<double>& psis, double alpha,
                                            const ScanOptions& opts = {});

DeterminingVerdict check_diagonal_determining(const WeightFamily& fam, double alpha,
                                              const ScanOptions& opts = {});

DeterminingVerdict check_product_determining(const ProductLaw& law, double alpha,
                                             const ScanOptions& opts = {});

/// Multiplier uniform on (a, b), via closed-form Mellin integrals of the
/// uniform density.  Refuted exactly when a = -b; one-sided supports are
/// certified from the closed form, two-sided ones report grid evidence.
DeterminingVerdict check_uniform_product(double a, double b, double alpha,
                                         const ScanOptions& opts = {});

// ---------------------------------------------------------------------------
// Certificates and hypothesis validation
// ---------------------------------------------------------------------------

struct DominanceCertificate {
    int j; // 1-based coordinate
    QuadrantSign quadrant;
    Vec atom;
    double mass;
    double margin; // dominant j-moment minus the total of all other atoms
};

/// Searches, for each j in task.coords_k, for a single atom whose j-th moment
/// mass strictly exceeds the combined j-th moment of everything else.  Such
/// an atom makes every signed Mellin sum nonvanishing for all theta.
std::vector<std::optional<DominanceCertificate>> certify_atom_dominance(
    const QuadrantMeasures& rho_by_quadrant, const CancellationTask& task);

struct MomentReport {
    std::vector<double> nonconcentration;  // per coordinate: rho({x_j != 0})
    bool concentrated_on_subspace = false; // some coordinate mass is zero
    double moment_minus = 0.0;             // sum mass * |y|^(alpha - delta')
    double moment_plus = 0.0;              // sum mass * |y|^(alpha + delta')
    std::vector<double> quadrant_moments;  // per j in K: sum_v int x_j^alpha d rho_v
    std::string small_multiplier;          // always passes for atomic rho (bounded support)
    double tail_probe_sup = 0.0;           // sup over probe of s^alpha * value
    bool hypotheses_ok = true;
};

/// Report-only validation of the moment / nondegeneracy hypotheses behind the
/// cancellation results.  The probe is an optional sampled tail function
/// (s, nu({x_j > s})) used to report sup_s s^alpha * value.
MomentReport validate_hypotheses(const DiscreteMeasure& rho,
                                 const std::vector<std::pair<double, double>>& nu_tail_probe,
                                 const CancellationTask& task);

/// Max absolute residual of the quadrant equation system
///   sum_w nu1_w (*) rho_{v w} = sum_w nu2_w (*) rho_{v w}   for every v,
/// evaluated on a panel of positive-quadrant sets.
double system_residual(const QuadrantMeasures& rho, const QuadrantMeasures& nu1,
                       const QuadrantMeasures& nu2, const std::vector<EvalSet>& panel);

} // namespace tailinv

#endif
