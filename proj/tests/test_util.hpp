#ifndef TAILINV_TESTS_TEST_UTIL_HPP
#define TAILINV_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <vector>

#include "tailinv/measure.hpp"
#include "tailinv/rng.hpp"

namespace testutil {

using tailinv::EvalSet;
using tailinv::HomogeneousTailMeasure;
using tailinv::Mat;
using tailinv::SpectralAtom;
using tailinv::Vec;

inline Vec vec(std::initializer_list<double> vals) {
    Vec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

inline HomogeneousTailMeasure random_tail_measure(int dim, double alpha, tailinv::rng::Stream& rs,
                                                  int n_atoms = 4) {
    std::vector<SpectralAtom> atoms;
    for (int i = 0; i < n_atoms; ++i) {
        Vec u(dim);
        for (int j = 0; j < dim; ++j) u[j] = 2.0 * rs.next() - 1.0;
        if (u.norm() < 1e-3) u[0] = 1.0;
        atoms.push_back(SpectralAtom{u, 0.1 + rs.next()});
    }
    return HomogeneousTailMeasure(dim, alpha, std::move(atoms));
}

inline EvalSet random_eval_set(int dim, tailinv::rng::Stream& rs) {
    const double pick = rs.next();
    if (pick < 0.34) {
        return EvalSet::norm_exceed(dim, 0.5 + 3.0 * rs.next());
    }
    if (pick < 0.67) {
        // box with the first coordinate interval strictly positive
        Vec lo(dim);
        Vec hi(dim);
        lo[0] = 0.3 + rs.next();
        hi[0] = lo[0] + 0.2 + 2.0 * rs.next();
        for (int j = 1; j < dim; ++j) {
            lo[j] = -2.0 + 3.0 * rs.next();
            hi[j] = lo[j] + 0.2 + 2.5 * rs.next();
        }
        return EvalSet::rect(lo, hi);
    }
    std::vector<int> signs(static_cast<std::size_t>(dim), 0);
    Vec thresholds = Vec::Zero(dim);
    signs[0] = rs.next() < 0.5 ? +1 : -1;
    thresholds[0] = 0.2 + 2.0 * rs.next();
    for (int j = 1; j < dim; ++j) {
        const double p = rs.next();
        if (p < 0.4) {
            signs[static_cast<std::size_t>(j)] = p < 0.2 ? +1 : -1;
            thresholds[j] = 0.1 + rs.next();
        }
    }
    return EvalSet::half_line(std::move(signs), std::move(thresholds));
}

/// Deterministic panel of sets of all three kinds.
inline std::vector<EvalSet> fixed_panel(int dim, int count = 20) {
    tailinv::rng::Stream rs(0xfeedULL, 7);
    std::vector<EvalSet> panel;
    while (static_cast<int>(panel.size()) < count) panel.push_back(random_eval_set(dim, rs));
    return panel;
}

inline Mat rotation2(double angle) {
    Mat r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

} // namespace testutil

#endif
