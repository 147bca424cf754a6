#include "tailinv/oscillating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tailinv/rng.hpp"

namespace tailinv {

namespace {

// integral_T^inf e^{-beta t} cos(w t) dt and the sine analogue, beta > 0.
double exp_cos_tail(double beta, double w, double t) {
    return std::exp(-beta * t) * (beta * std::cos(w * t) - w * std::sin(w * t)) / (beta * beta + w * w);
}

double exp_sin_tail(double beta, double w, double t) {
    return std::exp(-beta * t) * (beta * std::sin(w * t) + w * std::cos(w * t)) / (beta * beta + w * w);
}

} // namespace

double oscillating_tail_part(double alpha, double theta0, double a, double b, double x) {
    if (!(x > 0.0)) throw ValidationError("oscillating tail: x must be positive");
    const double t = std::log(x);
    return alpha * (a * exp_cos_tail(alpha, theta0, t) + b * exp_sin_tail(alpha, theta0, t));
}

double oscillating_tail(double alpha, double theta0, double a, double b, double x) {
    return std::pow(x, -alpha) + oscillating_tail_part(alpha, theta0, a, b, x);
}

double oscillation_amplitude(double alpha, double theta0, double a, double b) {
    return alpha * std::sqrt(a * a + b * b) / std::sqrt(alpha * alpha + theta0 * theta0);
}

void OscLawParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ValidationError("oscillating law: alpha must be positive");
    if (theta0 == 0.0 || !std::isfinite(theta0))
        throw ValidationError("oscillating law: theta0 must be nonzero");
    if (!(a * a + b * b <= 1.0 + 1e-15))
        throw ValidationError("oscillating law: need a^2 + b^2 <= 1 (density nonnegativity)");
    if (!(r > 0.0) || !std::isfinite(r))
        throw ValidationError("oscillating law: truncation point r must be positive");
}

OscillatingLaw::OscillatingLaw(OscLawParams params) : params_(params) {
    params_.validate();
    tail_at_r_ = oscillating_tail(params_.alpha, params_.theta0, params_.eff_a(), params_.eff_b(), params_.r);
    if (tail_at_r_ > 1.0 + 1e-12) {
        // Suggest the smallest admissible truncation point.
        double lo = params_.r;
        double hi = params_.r;
        while (oscillating_tail(params_.alpha, params_.theta0, params_.eff_a(), params_.eff_b(), hi) > 1.0)
            hi *= 2.0;
        for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (oscillating_tail(params_.alpha, params_.theta0, params_.eff_a(), params_.eff_b(), mid) > 1.0)
                lo = mid;
            else
                hi = mid;
        }
        std::ostringstream os;
        os << "oscillating law: tail mass past r exceeds 1 (" << tail_at_r_
           << "); smallest admissible r is about " << hi;
        throw ValidationError(os.str());
    }
    tail_at_r_ = std::min(tail_at_r_, 1.0);
    atom_ = 1.0 - tail_at_r_;
}

OscillatingLaw build_law(const OscLawParams& params) { return OscillatingLaw(params); }

double OscillatingLaw::tail(double x) const {
    if (!(x >= params_.r)) throw ValidationError("oscillating law tail: x must be >= r");
    return oscillating_tail(params_.alpha, params_.theta0, params_.eff_a(), params_.eff_b(), x);
}

double OscillatingLaw::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile: u must lie in (0,1)");
    if (u < atom_) return 1.0;
    const double target = 1.0 - u; // in (0, tail_at_r_]
    const double alpha = params_.alpha;
    const double theta0 = params_.theta0;
    const double a = params_.eff_a();
    const double b = params_.eff_b();
    const double amp = oscillation_amplitude(alpha, theta0, a, b);

    double lo = std::log(params_.r);
    double hi = std::max(lo, std::log1p(amp) / alpha - std::log(target) / alpha);
    auto f = [&](double t) { return oscillating_tail(alpha, theta0, a, b, std::exp(t)) - target; };
    auto fprime = [&](double t) {
        // d/dt of tail(e^t): minus the density in log scale.
        return -alpha * std::exp(-alpha * t) * (1.0 + a * std::cos(theta0 * t) + b * std::sin(theta0 * t));
    };
    double flo = f(lo);
    if (flo <= 0.0) return params_.r;
    while (f(hi) > 0.0) hi += 1.0 / alpha; // amp rounding can leave the bracket short

    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double ft = f(t);
        if (ft > 0.0)
            lo = t;
        else
            hi = t;
        const double dft = fprime(t);
        double tn = (dft < 0.0) ? t - ft / dft : 0.5 * (lo + hi);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
            t = tn;
            break;
        }
        t = tn;
    }
    return std::exp(t);
}

double OscillatingLaw::mean() const {
    const double alpha = params_.alpha;
    if (!(alpha > 1.0)) throw ComputeError("oscillating law mean: needs alpha > 1");
    const double beta = alpha - 1.0;
    const double t = std::log(params_.r);
    const double power = std::exp(-beta * t) / beta;
    const double osc = params_.eff_a() * exp_cos_tail(beta, params_.theta0, t) +
                       params_.eff_b() * exp_sin_tail(beta, params_.theta0, t);
    return atom_ * 1.0 + alpha * (power + osc);
}

std::vector<double> OscillatingLaw::sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw ValidationError("sample: n must be >= 1");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = quantile(rng::u01(seed, 0, i));
    return out;
}

MixedLaw::MixedLaw(OscLawParams base, MixVariant variant)
    : pos_(OscillatingLaw([&] {
          OscLawParams p = base;
          p.sign_flip = false;
          return p;
      }())),
      neg_(OscillatingLaw([&] {
          OscLawParams p = base;
          p.sign_flip = (variant == MixVariant::OppositeFlip);
          return p;
      }())),
      variant_(variant) {
    centered_ = base.alpha > 1.0;
    mean_shift_ = centered_ ? 0.5 * pos_.mean() - 0.5 * neg_.mean() : 0.0;
}

double MixedLaw::draw(std::uint64_t seed, std::uint64_t stream_base, std::uint64_t i) const {
    const double side = rng::u01(seed, stream_base, i);
    const double u = rng::u01(seed, stream_base + 1, i);
    const double v = (side < 0.5) ? pos_.quantile(u) : -neg_.quantile(u);
    return v - mean_shift_;
}

std::vector<double> MixedLaw::sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw ValidationError("sample: n must be >= 1");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = draw(seed, 0, i);
    return out;
}

OscillationCertificate oscillation_certificate(const OscillatingLaw& law, int windows) {
    if (windows < 1) throw ValidationError("oscillation_certificate: windows must be >= 1");
    const OscLawParams& p = law.params();
    const double a = p.eff_a();
    const double b = p.eff_b();
    // x^alpha tail(x) = 1 + A cos(theta0 t) + B sin(theta0 t) at t = ln x.
    const double scale = p.alpha / (p.alpha * p.alpha + p.theta0 * p.theta0);
    const double coef_cos = scale * (a * p.alpha + b * p.theta0);
    const double coef_sin = scale * (b * p.alpha - a * p.theta0);
    auto h = [&](double t) { return 1.0 + coef_cos * std::cos(p.theta0 * t) + coef_sin * std::sin(p.theta0 * t); };
    auto hprime = [&](double t) {
        return p.theta0 * (-coef_cos * std::sin(p.theta0 * t) + coef_sin * std::cos(p.theta0 * t));
    };

    const double period = 2.0 * std::numbers::pi / std::abs(p.theta0);
    const double t0 = std::log(p.r);
    const double t1 = t0 + windows * period;
    const int n = 1000 * windows;
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    double prev_t = t0;
    double prev_d = hprime(t0);
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * i / n;
        const double v = h(t);
        sup = std::max(sup, v);
        inf = std::min(inf, v);
        const double d = hprime(t);
        if (i > 0 && ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0))) {
            double lo = prev_t;
            double hi = t;
            double dlo = prev_d;
            for (int k = 0; k < 80; ++k) {
                const double mid = 0.5 * (lo + hi);
                const double dm = hprime(mid);
                if ((dm < 0.0) == (dlo < 0.0)) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            const double v2 = h(0.5 * (lo + hi));
            sup = std::max(sup, v2);
            inf = std::min(inf, v2);
        }
        prev_t = t;
        prev_d = d;
    }
    return OscillationCertificate{sup, inf, sup - inf > 1e-6};
}

// ---------------------------------------------------------------------------
// Remark-type fixture: two solutions of one quadrant system
// ---------------------------------------------------------------------------

Remark22Fixture remark22_fixture(double c1, double c_minus1, double alpha, double theta0,
                                 double a, double b, const Remark22Options& opts) {
    if (!(alpha > 0.0)) throw ValidationError("fixture: alpha must be positive");
    if (!(theta0 > 0.0)) throw ValidationError("fixture: theta0 must be positive");
    if (a * a + b * b > 1.0 + 1e-15) throw ValidationError("fixture: need a^2 + b^2 <= 1");
    const double amp_ab = std::sqrt(a * a + b * b);
    if (c1 < amp_ab - 1e-15 || c_minus1 < amp_ab - 1e-15)
        throw ValidationError("fixture: densities go negative; need c_i >= sqrt(a^2 + b^2)");
    if (opts.target_nodes < 10) throw ValidationError("fixture: too few quadrature nodes");

    const double shift = std::numbers::pi / theta0; // rho offset in ln x
    // Window wide enough that no panel evaluation ever reaches past it.
    const double width = std::max(opts.window_half_width, 2.5 + shift + 1.0);
    // Grid step dividing the rho shift exactly, close to the requested density.
    const double target_step = 2.0 * width / opts.target_nodes;
    const long long subdiv = std::max(1ll, std::llround(shift / target_step));
    const double step = shift / static_cast<double>(subdiv);
    const long long m_edge = static_cast<long long>(std::ceil(width / step));

    const QuadrantSign plus = QuadrantSign::from_mask(1, 1u);
    const QuadrantSign minus = QuadrantSign::from_mask(1, 0u);

    // rho: unit mass at 1 in the + quadrant; in the - quadrant either the
    // shifted atom that cancels the Mellin sum at theta0 (plain condition) or
    // a second unit atom at 1 (signed condition).
    QuadrantMeasures rho;
    {
        std::vector<Atom> rp{Atom{Vec::Constant(1, 1.0), 1.0}};
        std::vector<Atom> rm;
        if (opts.second_line)
            rm.push_back(Atom{Vec::Constant(1, 1.0), 1.0 * opts.rho_minus_scale});
        else
            rm.push_back(Atom{Vec::Constant(1, std::exp(shift)), std::exp(-alpha * shift) * opts.rho_minus_scale});
        rho.emplace(plus, DiscreteMeasure(1, std::move(rp)));
        rho.emplace(minus, DiscreteMeasure(1, std::move(rm)));
    }

    // Discretize nu_i^{(1)} = [c_i + sigma_i osc] nu^alpha and nu_i^{(2)} = c_i nu^alpha
    // with exact cell masses and the exact upper-tail remainder as a final atom.
    const auto power_tail = [&](double lnx) { return std::exp(-alpha * lnx); };
    const auto osc_tail_ln = [&](double lnx) {
        return oscillating_tail_part(alpha, theta0, a, b, std::exp(lnx));
    };

    QuadrantMeasures nu1;
    QuadrantMeasures nu2;
    double tv = 0.0;
    for (int side = 0; side < 2; ++side) {
        const QuadrantSign v = (side == 0) ? plus : minus;
        const double c = (side == 0) ? c1 : c_minus1;
        const double sigma = (side == 0 || !opts.second_line) ? 1.0 : -1.0;
        const double scale1 = (side == 0) ? opts.nu1_plus_scale : 1.0;
        std::vector<Atom> a1;
        std::vector<Atom> a2;
        a1.reserve(static_cast<std::size_t>(2 * m_edge + 1));
        a2.reserve(static_cast<std::size_t>(2 * m_edge + 1));
        for (long long k = -m_edge; k < m_edge; ++k) {
            const double l = k * step;
            const double rgt = (k + 1) * step;
            const double base = power_tail(l) - power_tail(rgt);
            const double osc = sigma * (osc_tail_ln(l) - osc_tail_ln(rgt));
            const Vec node = Vec::Constant(1, std::exp(0.5 * (l + rgt)));
            const double m1 = (c * base + osc) * scale1;
            const double m2 = c * base;
            if (m1 > 0.0) a1.push_back(Atom{node, m1});
            if (m2 > 0.0) a2.push_back(Atom{node, m2});
            tv += std::abs(m1 - m2);
        }
        {
            const double l = m_edge * step;
            const Vec node = Vec::Constant(1, std::exp(l));
            const double m1 = (c * power_tail(l) + sigma * osc_tail_ln(l)) * scale1;
            const double m2 = c * power_tail(l);
            if (m1 > 0.0) a1.push_back(Atom{node, m1});
            if (m2 > 0.0) a2.push_back(Atom{node, m2});
            tv += std::abs(m1 - m2);
        }
        nu1.emplace(v, DiscreteMeasure(1, std::move(a1)));
        nu2.emplace(v, DiscreteMeasure(1, std::move(a2)));
    }

    // Panel of half-line sets with thresholds on grid edges.
    std::vector<EvalSet> panel;
    for (double lnt : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double aligned = std::round(lnt / step) * step;
        panel.push_back(EvalSet::half_line({+1}, Vec::Constant(1, std::exp(aligned))));
    }

    return Remark22Fixture{std::move(rho), std::move(nu1), std::move(nu2),
                           std::move(panel), tv, alpha, theta0};
}

} // namespace tailinv
