#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slowfast/assembly.hpp"
#include "slowfast/equilibria.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/manifold.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

/// Finite sample of an attractor: nodal points stored as matrix columns and
/// the reduced-coordinate interval that generated them.
struct AttractorSample {
    Matrix points; ///< dim x n_pts
    double v_lo = 0.0;
    double v_hi = 0.0;

    int size() const { return static_cast<int>(points.cols()); }
};

/// Samples the attractor as the graph of the section over the interval
/// between the extremal equilibria; the endpoint columns are the exact
/// equilibrium fields rather than graph reconstructions.
inline AttractorSample attractor_sample(const DiscreteOperator& op,
                                        const SpectralDecomposition& dec,
                                        const GraphSection& section, const PerturbedSet& set,
                                        int n_pts) {
    if (n_pts < 2) throw DomainError("attractor_sample: need at least two points");
    if (set.items.empty()) throw DomainError("attractor_sample: empty equilibrium set");

    const PerturbedEquilibrium* lo_eq = &set.items.front();
    const PerturbedEquilibrium* hi_eq = &set.items.front();
    for (const PerturbedEquilibrium& item : set.items) {
        if (item.eq.reduced < lo_eq->eq.reduced) lo_eq = &item;
        if (item.eq.reduced > hi_eq->eq.reduced) hi_eq = &item;
    }
    const double lo = lo_eq->eq.reduced;
    const double hi = hi_eq->eq.reduced;
    if (lo < section.v_lo() || hi > section.v_hi())
        throw DomainError("attractor_sample: equilibria fall outside the section grid range");

    AttractorSample sample;
    sample.v_lo = lo;
    sample.v_hi = hi;
    sample.points.resize(op.dim(), n_pts);
    const int k = section.fast_modes() + 1;
    for (int i = 0; i < n_pts; ++i) {
        const double v = lo + (hi - lo) * i / (n_pts - 1);
        Vector u = dec.eigenvectors.col(0) * v;
        u.noalias() += dec.eigenvectors.middleCols(1, k - 1) * detail::section_coords(section, v);
        sample.points.col(i) = u;
    }
    sample.points.col(0) = lo_eq->eq.value;
    sample.points.col(n_pts - 1) = hi_eq->eq.value;
    return sample;
}

/// Limit attractor: constants spanning the interval between the extremal
/// scalar equilibria.
inline AttractorSample limit_attractor_sample(int dim, const std::vector<LimitEquilibrium>& roots,
                                              int n_pts) {
    if (n_pts < 2) throw DomainError("limit_attractor_sample: need at least two points");
    if (roots.empty()) throw DomainError("limit_attractor_sample: empty equilibrium set");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const LimitEquilibrium& r : roots) {
        lo = std::min(lo, r.value);
        hi = std::max(hi, r.value);
    }
    AttractorSample sample;
    sample.v_lo = lo;
    sample.v_hi = hi;
    sample.points.resize(dim, n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const double v = lo + (hi - lo) * i / (n_pts - 1);
        sample.points.col(i) = Vector::Constant(dim, v);
    }
    return sample;
}

/// Both directed Hausdorff components and their sum.
struct HausdorffReport {
    double dist_ab = 0.0;
    double dist_ba = 0.0;
    double total = 0.0;
};

/// Brute-force point-set Hausdorff metric in the energy norm of the given
/// operator; the symmetric value is the sum of the two directed distances.
inline HausdorffReport hausdorff(const AttractorSample& a, const AttractorSample& b,
                                 const DiscreteOperator& op) {
    if (a.size() == 0 || b.size() == 0) throw DomainError("hausdorff: empty sample");
    if (a.points.rows() != op.dim() || b.points.rows() != op.dim())
        throw DimensionError("hausdorff: samples do not match the operator dimension");

    // Each squared distance is evaluated on the difference vector,
    // d'G d = (a_i - b_j) . (G a_i - G b_j), with the Gram images precomputed
    // once per point. Expanding into ||a||^2 + ||b||^2 - 2 a'G b instead would
    // cancel large equal terms for nearby points and floor the result at the
    // square root of the rounding error of the large products.
    const Matrix ga = op.gram * a.points;
    const Matrix gb = op.gram * b.points;

    Matrix sq(a.size(), b.size());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
            sq(i, j) = (a.points.col(i) - b.points.col(j)).dot(ga.col(i) - gb.col(j));

    HausdorffReport report;
    for (int i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < b.size(); ++j) best = std::min(best, sq(i, j));
        report.dist_ab = std::max(report.dist_ab, std::sqrt(std::max(0.0, best)));
    }
    for (int j = 0; j < b.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < a.size(); ++i) best = std::min(best, sq(i, j));
        report.dist_ba = std::max(report.dist_ba, std::sqrt(std::max(0.0, best)));
    }
    report.total = report.dist_ab + report.dist_ba;
    return report;
}

/// Distance between the sampled attractor and its limit, with the three
/// intermediate comparison legs (sample vs spectral projection of the sample,
/// projected sample vs averaged projected sample, averaged vs limit) for
/// diagnostic attribution.
struct AttractorGapReport {
    HausdorffReport overall;
    double legs[3] = {0.0, 0.0, 0.0};
};

inline AttractorGapReport attractor_gap(const DiscreteOperator& op,
                                        const SpectralDecomposition& dec,
                                        const RieszProjection& q,
                                        const AveragingProjection& proj,
                                        const GraphSection& section, const PerturbedSet& set,
                                        const std::vector<LimitEquilibrium>& roots, int n_pts) {
    const AttractorSample a_eps = attractor_sample(op, dec, section, set, n_pts);
    const AttractorSample a_lim = limit_attractor_sample(op.dim(), roots, n_pts);

    AttractorSample qa;
    qa.points = q.matrix * a_eps.points;
    qa.v_lo = a_eps.v_lo;
    qa.v_hi = a_eps.v_hi;

    AttractorSample pqa;
    pqa.points.resize(op.dim(), qa.size());
    for (int i = 0; i < qa.size(); ++i)
        pqa.points.col(i) = Vector::Constant(op.dim(), proj.average(qa.points.col(i)));
    pqa.v_lo = qa.v_lo;
    pqa.v_hi = qa.v_hi;

    AttractorGapReport report;
    report.overall = hausdorff(a_eps, a_lim, op);
    report.legs[0] = hausdorff(a_eps, qa, op).total;
    report.legs[1] = hausdorff(qa, pqa, op).total;
    report.legs[2] = hausdorff(pqa, a_lim, op).total;
    return report;
}

} // namespace slowfast
