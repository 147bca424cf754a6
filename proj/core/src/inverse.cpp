#include "tailinv/inverse.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tailinv/rng.hpp"

namespace tailinv {

double gamma_min(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ValidationError("gamma_min: matrix must be square and nonempty");
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().minCoeff();
}

double op_norm(const Mat& m) {
    if (m.rows() < 1) throw ValidationError("op_norm: empty matrix");
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().maxCoeff();
}

ContractionCertificate certify(const WeightFamily& fam, double alpha,
                               const std::optional<Mat>& preconditioner) {
    if (!(alpha > 0.0)) throw ValidationError("certify: alpha must be positive");
    const int d = fam.dim();
    Mat a = preconditioner.value_or(Mat::Identity(d, d));
    if (a.rows() != d || a.cols() != d)
        throw ValidationError("certify: preconditioner dimension mismatch");
    if (!(gamma_min(a) > 0.0)) throw ValidationError("certify: preconditioner is singular");

    ContractionCertificate cert;
    cert.alpha = alpha;
    cert.preconditioner = preconditioner;
    for (std::size_t j = 0; j < fam.size(); ++j) {
        const Mat mj = a * fam.matrix(j);
        const double smin = gamma_min(mj);
        const double smax = op_norm(mj);
        if (!(smin > smax * 1e-13)) {
            std::ostringstream os;
            os << "certify: coefficient " << (j + 1) << " is singular to working precision";
            throw ValidationError(os.str());
        }
        if (j == 0)
            cert.gamma1 = smin;
        else
            cert.norms.push_back(smax);
    }
    double sum = 0.0;
    for (double n : cert.norms) sum += std::pow(n, alpha);
    cert.kappa = sum / std::pow(cert.gamma1, alpha);
    cert.feasible = cert.kappa < 1.0;
    return cert;
}

std::optional<std::pair<Mat, ContractionCertificate>> search_preconditioner(
    const WeightFamily& fam, double alpha, const std::vector<Mat>& candidates) {
    if (candidates.empty()) throw ValidationError("search_preconditioner: candidate list is empty");
    for (const Mat& a : candidates) {
        ContractionCertificate cert;
        try {
            cert = certify(fam, alpha, a);
        } catch (const ValidationError&) {
            continue; // singular candidate
        }
        if (cert.feasible) return std::make_pair(a, cert);
    }
    return std::nullopt;
}

std::vector<Mat> default_preconditioner_candidates(const WeightFamily& fam, std::uint64_t seed) {
    const int d = fam.dim();
    std::vector<Mat> out;
    out.push_back(Mat::Identity(d, d));
    {
        const Mat psi1 = fam.matrix(0);
        Eigen::FullPivLU<Mat> lu(psi1);
        if (lu.isInvertible()) out.push_back(lu.inverse());
    }
    rng::Stream diag_stream(seed, 1);
    for (int k = 0; k < 20; ++k) {
        Vec dia(d);
        for (int i = 0; i < d; ++i) dia[i] = std::pow(10.0, 4.0 * diag_stream.next() - 2.0);
        out.push_back(Mat(dia.asDiagonal()));
    }
    rng::Stream orth_stream(seed, 2);
    for (int k = 0; k < 80; ++k) {
        Mat g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                // Box-Muller from two counter-based uniforms.
                const double u1 = orth_stream.next();
                const double u2 = orth_stream.next();
                g(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            }
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        Vec dia(d);
        for (int i = 0; i < d; ++i) dia[i] = std::pow(10.0, 4.0 * orth_stream.next() - 2.0);
        out.push_back(q * Mat(dia.asDiagonal()));
    }
    return out;
}

std::optional<std::pair<Mat, ContractionCertificate>> search_preconditioner(const WeightFamily& fam,
                                                                            double alpha) {
    return search_preconditioner(fam, alpha, default_preconditioner_candidates(fam));
}

namespace {

struct TermEnumerator {
    const HomogeneousTailMeasure* mu_x;
    const EvalSet* set;
    std::vector<Mat> t_inv; // T_j^{-1} = Psi_1^{-1} Psi_j for j = 2..q
    Mat psi1_inv;
    std::vector<double> level_sums;

    void recurse(int depth, int max_depth, const Mat& p_inv) {
        level_sums[static_cast<std::size_t>(depth)] += tail_eval_mapped(*mu_x, p_inv * psi1_inv, *set);
        if (depth == max_depth) return;
        for (const Mat& ti : t_inv) recurse(depth + 1, max_depth, p_inv * ti);
    }
};

} // namespace

NeumannResult neumann_invert(const HomogeneousTailMeasure& mu_x, const WeightFamily& fam,
                             const EvalSet& b, double tol, const NeumannOptions& opts) {
    if (!(tol > 0.0)) throw ValidationError("neumann_invert: tol must be positive");
    if (fam.dim() != mu_x.dim()) throw ValidationError("neumann_invert: dimension mismatch");
    if (b.dim() != mu_x.dim()) throw ValidationError("neumann_invert: set dimension mismatch");

    // Preconditioning replaces (mu_X, {Psi_j}) by (mu_X o A^{-1}, {A Psi_j});
    // the solution measure is unchanged.
    HomogeneousTailMeasure mu = opts.preconditioner ? pushforward(mu_x, *opts.preconditioner) : mu_x;
    const int d = fam.dim();
    const Mat a = opts.preconditioner.value_or(Mat::Identity(d, d));

    ContractionCertificate cert = certify(fam, mu.alpha(), opts.preconditioner);
    if (!cert.feasible) {
        std::ostringstream os;
        os << "neumann_invert: contraction condition fails (kappa=" << cert.kappa
           << " >= 1); try a preconditioner";
        throw ComputeError(os.str());
    }

    const double alpha = mu.alpha();
    const double inf_b = b.inf_norm();
    if (!(inf_b > 0.0)) throw ValidationError("neumann_invert: set must be bounded away from the origin");
    const double mass_bound =
        tail_eval(mu, EvalSet::norm_exceed(d, 1.0)) * std::pow(cert.gamma1, -alpha) / (1.0 - cert.kappa);
    const double lead = mass_bound * std::pow(inf_b, -alpha);

    const std::size_t q = fam.size();
    const auto bound_at = [&](int n) { return lead * std::pow(cert.kappa, n + 1); };

    int n = 0;
    if (cert.kappa > 0.0)
        while (bound_at(n) > tol && n < 10000) ++n;
    bool achieved = cert.kappa == 0.0 || bound_at(n) <= tol;

    // Cap the series order so the total number of terms stays within budget.
    {
        const double branches = static_cast<double>(q) - 1.0;
        double level_terms = 1.0;
        double total = 0.0;
        int affordable = -1;
        for (int k = 0; k <= n; ++k) {
            total += level_terms;
            if (total > static_cast<double>(opts.max_terms)) break;
            affordable = k;
            level_terms *= branches;
        }
        if (affordable < 0)
            throw ComputeError("neumann_invert: term budget too small for even the first term");
        if (affordable < n) {
            n = affordable;
            achieved = false;
        }
    }

    TermEnumerator en;
    en.mu_x = &mu;
    en.set = &b;
    {
        const Mat psi1 = a * fam.matrix(0);
        Eigen::FullPivLU<Mat> lu(psi1);
        en.psi1_inv = lu.inverse();
        for (std::size_t j = 1; j < q; ++j)
            en.t_inv.push_back(en.psi1_inv * (a * fam.matrix(j))); // (Psi_j^{-1} Psi_1)^{-1}
    }
    en.level_sums.assign(static_cast<std::size_t>(n) + 1, 0.0);
    en.recurse(0, n, Mat::Identity(d, d));

    double value = 0.0;
    for (int k = n; k >= 0; --k) {
        const double s = en.level_sums[static_cast<std::size_t>(k)];
        value = (k % 2 == 0) ? value + s : value - s;
    }

    NeumannResult res;
    res.value = value;
    res.terms_used = n;
    res.tail_bound = (cert.kappa == 0.0) ? 0.0 : bound_at(n);
    res.per_term = en.level_sums;
    res.kappa = cert.kappa;
    res.mass_bound = mass_bound;
    res.inf_b = inf_b;
    res.bound_achieved = achieved;
    return res;
}

std::vector<RoundtripRow> roundtrip_report(const HomogeneousTailMeasure& mu_z, const WeightFamily& fam,
                                           const std::vector<EvalSet>& panel, double tol,
                                           const NeumannOptions& opts) {
    const HomogeneousTailMeasure mu_x = weighted_sum_tail(mu_z, fam);
    std::vector<RoundtripRow> rows;
    rows.reserve(panel.size());
    for (const EvalSet& set : panel) {
        const NeumannResult res = neumann_invert(mu_x, fam, set, tol, opts);
        const double truth = tail_eval(mu_z, set);
        rows.push_back(RoundtripRow{set, truth, res.value, res.tail_bound,
                                    std::abs(truth - res.value) <= res.tail_bound + 1e-12});
    }
    return rows;
}

} // namespace tailinv
