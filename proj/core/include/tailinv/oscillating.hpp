#ifndef TAILINV_OSCILLATING_HPP
#define TAILINV_OSCILLATING_HPP

#include <cstdint>
#include <vector>

#include "tailinv/measure.hpp"

namespace tailinv {

// Log-periodically perturbed Pareto measures: density
//   [1 + a cos(theta0 ln x) + b sin(theta0 ln x)] * alpha x^{-alpha-1}  on (0, inf),
// heavy-tailed but, for (a,b) != 0, not regularly varying.

/// integral_x^inf [a cos(theta0 ln u) + b sin(theta0 ln u)] alpha u^{-alpha-1} du.
double oscillating_tail_part(double alpha, double theta0, double a, double b, double x);

/// Full upper tail of the perturbed measure from x: x^{-alpha} + oscillating part.
double oscillating_tail(double alpha, double theta0, double a, double b, double x);

/// Peak deviation of x^alpha * tail(x) from 1: alpha sqrt(a^2+b^2) / sqrt(alpha^2+theta0^2).
double oscillation_amplitude(double alpha, double theta0, double a, double b);

struct OscLawParams {
    double alpha;    // > 0
    double theta0;   // != 0
    double a;
    double b;        // a^2 + b^2 <= 1 keeps the density nonnegative
    double r;        // truncation point, > 0
    bool sign_flip;  // false: +(a,b); true: -(a,b)

    double eff_a() const { return sign_flip ? -a : a; }
    double eff_b() const { return sign_flip ? -b : b; }
    void validate() const;
};

/// Probability law on {1} u (r, inf): the perturbed measure restricted to
/// (r, inf) plus an atom at 1 carrying the leftover probability.
class OscillatingLaw {
public:
    explicit OscillatingLaw(OscLawParams params);

    const OscLawParams& params() const { return params_; }
    double tail_at_r() const { return tail_at_r_; }
    double atom_at_one() const { return atom_; }

    /// P(X > x) for x >= params().r.
    double tail(double x) const;

    /// Inverse CDF for u in (0,1): the atom value 1 when u < atom mass,
    /// otherwise the solution of tail(x) = 1 - u on [r, inf), found by
    /// bracketed Newton/bisection on ln x to 1e-12 relative.
    double quantile(double u) const;

    /// E[X]; requires alpha > 1.
    double mean() const;

    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    OscLawParams params_;
    double tail_at_r_;
    double atom_;
};

OscillatingLaw build_law(const OscLawParams& params);

enum class MixVariant {
    Symmetric,    // (1/2) mu_0(.) + (1/2) mu_0(-.)
    OppositeFlip  // (1/2) mu_0(.) + (1/2) mu_1(-.), mu_1 built with -(a,b)
};

/// Half/half mixture of an oscillating law on the right half-line and one on
/// the left.  For OppositeFlip the two oscillations cancel in |X|'s tail.
/// When alpha > 1 samples are centered at the mean.
class MixedLaw {
public:
    MixedLaw(OscLawParams base, MixVariant variant);

    const OscillatingLaw& positive_part() const { return pos_; }
    const OscillatingLaw& negative_part() const { return neg_; }
    MixVariant variant() const { return variant_; }
    bool centered() const { return centered_; }
    double mean_shift() const { return mean_shift_; }

    /// One draw, from two uniform streams (side and quantile).
    double draw(std::uint64_t seed, std::uint64_t stream_base, std::uint64_t i) const;

    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    OscillatingLaw pos_;
    OscillatingLaw neg_;
    MixVariant variant_;
    bool centered_;
    double mean_shift_;
};

struct OscillationCertificate {
    double sup;
    double inf;
    bool non_rv; // sup - inf > 1e-6
};

/// Exact sup and inf of x^alpha * tail(x) over the requested number of
/// ln-periods past r, by dense evaluation plus derivative-root refinement.
/// A gap certifies that the law is not regularly varying.
OscillationCertificate oscillation_certificate(const OscillatingLaw& law, int windows);

// ---------------------------------------------------------------------------
// Non-uniqueness fixture for the quadrant equation system (d = 1)
// ---------------------------------------------------------------------------

struct Remark22Options {
    bool second_line = false;      // fail the signed condition instead of the plain sum
    double window_half_width = 8.0;
    int target_nodes = 10000;
    double rho_minus_scale = 1.0;  // perturbation knobs; 1.0 keeps the exact fixture
    double nu1_plus_scale = 1.0;
};

/// Two families of measures on the positive half-line that both solve the
/// same quadrant equation system against rho, although they differ: nu1 has
/// log-periodic perturbations on top of nu2 = c_i * (pure power measure).
/// All measures are discretized on a common log-uniform grid whose step
/// divides pi/theta0, so that set boundaries and the rho shift land exactly
/// on cell edges and the discretized system residual vanishes to float
/// precision.
struct Remark22Fixture {
    QuadrantMeasures rho;
    QuadrantMeasures nu1;
    QuadrantMeasures nu2;
    std::vector<EvalSet> panel;
    double tv_window;  // total variation between nu1 and nu2 across the window
    double alpha;
    double theta0;
};

Remark22Fixture remark22_fixture(double c1, double c_minus1, double alpha, double theta0,
                                 double a, double b, const Remark22Options& opts = {});

} // namespace tailinv

#endif
