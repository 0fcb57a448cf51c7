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
#include "slowfast/flow.hpp"
#include "slowfast/reaction.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

/// Section of the fast space over the slow coordinate: at each grid value v
/// the graph stores the fast field z(v) both as modal coefficients on the
/// trailing eigenmodes and as a nodal reconstruction. Distances on sections
/// use the energy norm, which is diagonal in the modal coefficients.
struct GraphSection {
    Vector v_grid;              ///< ascending, uniform
    Matrix coords;              ///< (k-1) x m modal coefficients on modes 2..k
    Matrix z_values;            ///< dim x m nodal reconstructions
    double lipschitz_cap = 4.0; ///< prescribed bound for the Lipschitz quotient
    double lipschitz = 0.0;     ///< measured adjacent-quotient maximum
    double sup_norm = 0.0;      ///< max energy norm of z over the grid

    int grid_size() const { return static_cast<int>(v_grid.size()); }
    int fast_modes() const { return static_cast<int>(coords.rows()); }
    double v_lo() const { return v_grid[0]; }
    double v_hi() const { return v_grid[grid_size() - 1]; }
};

namespace detail {

/// Interpolates section coefficients linearly at v, clamping to the grid
/// range; sets *clamped when v fell outside.
inline Vector section_coords(const GraphSection& s, double v, bool* clamped = nullptr) {
    const int m = s.grid_size();
    const double lo = s.v_lo(), hi = s.v_hi();
    double vc = v;
    if (vc < lo || vc > hi) {
        vc = std::clamp(vc, lo, hi);
        if (clamped) *clamped = true;
    }
    const double h = (hi - lo) / (m - 1);
    int cell = static_cast<int>((vc - lo) / h);
    cell = std::clamp(cell, 0, m - 2);
    const double t = (vc - (lo + cell * h)) / h;
    return (1.0 - t) * s.coords.col(cell) + t * s.coords.col(cell + 1);
}

/// Energy norm of a fast modal coefficient vector on modes 2..k.
inline double fast_energy_norm(const SpectralDecomposition& dec, const Vector& coords) {
    double sq = 0.0;
    for (int j = 0; j < coords.size(); ++j)
        sq += dec.eigenvalues[j + 1] * coords[j] * coords[j];
    return std::sqrt(std::max(0.0, sq));
}

/// Refreshes nodal values, the sup norm, and the Lipschitz quotient of a
/// section from its modal coefficients.
inline void refresh_section_stats(const SpectralDecomposition& dec, GraphSection& s) {
    const int m = s.grid_size();
    const int kf = s.fast_modes();
    s.z_values = dec.eigenvectors.middleCols(1, kf) * s.coords;
    s.sup_norm = 0.0;
    s.lipschitz = 0.0;
    const double slow_energy = std::sqrt(dec.eigenvalues[0]);
    for (int i = 0; i < m; ++i)
        s.sup_norm = std::max(s.sup_norm, fast_energy_norm(dec, s.coords.col(i)));
    for (int i = 0; i + 1 < m; ++i) {
        const Vector dz = s.coords.col(i + 1) - s.coords.col(i);
        const double dv = (s.v_grid[i + 1] - s.v_grid[i]) * slow_energy;
        if (dv > 0.0)
            s.lipschitz = std::max(s.lipschitz, fast_energy_norm(dec, dz) / dv);
    }
}

/// Product-trapezoid weights for int_0^h exp(-y x/h) g(x) dx with g linear:
/// the integral equals h (a(y) g0 + b(y) g1); exact for any y, so stiff
/// modes cannot overshoot the way plain trapezoid weights would.
inline void duhamel_weights(double y, double& a, double& b) {
    if (y < 1e-2) {
        // Series branch: the exact quotients below lose ~eps/y absolute
        // accuracy, so small arguments use expansions truncated at ~1e-13.
        b = 0.5 - y / 3.0 + y * y / 8.0 - y * y * y / 30.0 + y * y * y * y / 144.0;
        a = 0.5 - y / 6.0 + y * y / 24.0 - y * y * y / 120.0 + y * y * y * y / 720.0;
    } else {
        const double e = std::exp(-y);
        const double p1 = -std::expm1(-y) / y;
        b = (p1 - e) / y;
        a = p1 - b;
    }
}

} // namespace detail

/// Zero section on a uniform v-grid with k-1 fast modes.
inline GraphSection zero_section(const SpectralDecomposition& dec, int k_modes, double v_lo,
                                 double v_hi, int n_grid, double lipschitz_cap = 4.0) {
    if (k_modes < 2 || k_modes > dec.count())
        throw DomainError("zero_section: mode count must lie in [2, decomposition size]");
    if (n_grid < 3) throw DomainError("zero_section: grid needs at least three points");
    if (!(v_lo < v_hi)) throw DomainError("zero_section: grid range must be nonempty");
    GraphSection s;
    s.v_grid = Vector::LinSpaced(n_grid, v_lo, v_hi);
    s.coords = Matrix::Zero(k_modes - 1, n_grid);
    s.lipschitz_cap = lipschitz_cap;
    detail::refresh_section_stats(dec, s);
    return s;
}

/// Nodal value of the section at a slow coordinate v (clamped to the grid).
inline Vector section_value(const SpectralDecomposition& dec, const GraphSection& s, double v) {
    const Vector c = detail::section_coords(s, v);
    return dec.eigenvectors.middleCols(1, s.fast_modes()) * c;
}

struct TransformStats {
    bool clamped = false;          ///< a backward trajectory left the grid range
    bool lipschitz_warning = false;///< output quotient exceeded the prescribed cap
};

/// One application of the graph transform.
///
/// For each grid value eta, the slow equation dv/dt = -lambda_1 v +
/// <phi_1, f(v phi_1 + s(v))> is integrated backward from eta by the midpoint
/// rule; along the stored backward trajectory the fast forcing coefficients
/// are accumulated into the variation-of-constants integral with exact
/// exponential weights per mode, truncated once the fastest surviving weight
/// underflows the tail tolerance. Out-of-range backward values clamp to the
/// grid (flagged); with clamping disabled an excursion past ball_radius is an
/// escape error.
inline GraphSection graph_transform(const DiscreteOperator& op, const SpectralDecomposition& dec,
                                    const Reaction& reaction, const GraphSection& s,
                                    double horizon, double dt, TransformStats* stats = nullptr,
                                    bool clamp_to_grid = true, double ball_radius = 4.0) {
    const int k = s.fast_modes() + 1;
    if (k > dec.count())
        throw DimensionError("graph_transform: section uses more modes than the decomposition");
    if (!(horizon > 0.0) || !(dt > 0.0))
        throw DomainError("graph_transform: horizon and step must be positive");
    const double lambda1 = dec.eigenvalues[0];
    const double lambda2 = dec.eigenvalues[1];
    if (std::exp(-lambda2 * horizon) > 1e-10)
        throw DomainError("graph_transform: horizon too short for the fast-mode tail");

    // Fast weights vanish below ~1e-13 of their initial size past this lag,
    // so integrating further only accumulates rounding.
    const double sigma_cut = std::min(horizon, 30.0 / lambda2);
    const int n_steps = std::max(64, static_cast<int>(std::ceil(sigma_cut / dt)));
    if (n_steps > 2000000)
        throw DomainError("graph_transform: quadrature step too small for the horizon");
    const double step = sigma_cut / n_steps;

    const Matrix basis = dec.eigenvectors.leftCols(k);
    const Matrix weighted = op.mass * basis;

    TransformStats local;
    // Forcing coefficients <phi_j, f(v phi_1 + s(v))> for j = 1..k.
    auto forcing = [&](double v) -> Vector {
        bool clamped = false;
        const Vector c = detail::section_coords(s, v, &clamped);
        if (clamped) {
            if (!clamp_to_grid)
                throw ConvergenceError("graph_transform: backward trajectory escaped the section range");
            local.clamped = true;
        }
        if (!clamp_to_grid && std::abs(v) > ball_radius)
            throw ConvergenceError("graph_transform: backward trajectory escaped the dissipative ball");
        Vector u = basis.col(0) * std::clamp(v, s.v_lo(), s.v_hi());
        u.noalias() += basis.middleCols(1, k - 1) * c;
        const Vector fu = reaction.apply(u);
        if (!fu.allFinite())
            throw ConvergenceError("graph_transform: reaction blew up along a backward trajectory");
        return weighted.transpose() * fu;
    };

    GraphSection out = s;
    Matrix g(k, n_steps + 1);

    for (int i = 0; i < s.grid_size(); ++i) {
        // Backward march of the slow coordinate, storing forcing at nodes.
        double v = s.v_grid[i];
        g.col(0) = forcing(v);
        for (int q = 0; q < n_steps; ++q) {
            const double f0 = lambda1 * v - g(0, q);
            const double v_half = v + 0.5 * step * f0;
            const Vector g_half = forcing(v_half);
            v += step * (lambda1 * v_half - g_half[0]);
            if (clamp_to_grid) v = std::clamp(v, s.v_lo(), s.v_hi());
            g.col(q + 1) = forcing(v);
        }
        // Exponentially weighted trapezoid per fast mode.
        for (int j = 1; j < k; ++j) {
            const double y = dec.eigenvalues[j] * step;
            double wa, wb;
            detail::duhamel_weights(y, wa, wb);
            const double decay = std::exp(-y);
            double weight = 1.0;
            double acc = 0.0;
            for (int q = 0; q < n_steps && weight > 1e-18; ++q) {
                acc += weight * step * (wa * g(j, q) + wb * g(j, q + 1));
                weight *= decay;
            }
            out.coords(j - 1, i) = acc;
        }
    }

    detail::refresh_section_stats(dec, out);
    if (out.lipschitz > out.lipschitz_cap) local.lipschitz_warning = true;
    if (!out.coords.allFinite())
        throw NumericalError("graph_transform: non-finite section coefficients");
    if (stats) *stats = local;
    return out;
}

/// Parameters of the fixed-point solve; the grid range must cover the slow
/// coordinates of all equilibria with margin.
struct ManifoldConfig {
    double v_lo = -1.0;
    double v_hi = 1.0;
    int n_grid = 129;
    int k_modes = 12;
    double quad_dt = 1e-3;
    double fixpoint_tol = 1e-9;
    int max_iterations = 100;
    double lipschitz_cap = 4.0;
    double tail_tol = 1e-10; ///< horizon chosen so exp(-lambda_2 T) <= tail_tol
};

/// Grid range covering the reduced coordinates of the given equilibria,
/// widened by the margin fraction on each side.
inline void set_grid_from_equilibria(ManifoldConfig& cfg, const PerturbedSet& set,
                                     double margin = 0.2) {
    if (set.items.empty()) throw DomainError("set_grid_from_equilibria: empty equilibrium set");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const PerturbedEquilibrium& item : set.items) {
        lo = std::min(lo, item.eq.reduced);
        hi = std::max(hi, item.eq.reduced);
    }
    const double span = std::max(hi - lo, 0.5);
    cfg.v_lo = lo - margin * span;
    cfg.v_hi = hi + margin * span;
}

struct ManifoldResult {
    GraphSection section;
    int iterations = 0;
    double contraction = 0.0;          ///< max ratio of successive increments
    bool clamped = false;
    std::vector<double> increments;    ///< sup-distance between successive iterates
};

/// Supremum over the grid of the energy distance between two sections.
inline double section_distance(const SpectralDecomposition& dec, const GraphSection& a,
                               const GraphSection& b) {
    if (a.grid_size() != b.grid_size() || a.fast_modes() != b.fast_modes())
        throw DimensionError("section_distance: sections are not comparable");
    double worst = 0.0;
    for (int i = 0; i < a.grid_size(); ++i)
        worst = std::max(worst, detail::fast_energy_norm(dec, a.coords.col(i) - b.coords.col(i)));
    return worst;
}

/// Fixed point of the graph transform from the zero section.
inline ManifoldResult solve_manifold(const DiscreteOperator& op, const SpectralDecomposition& dec,
                                     const Reaction& reaction, const ManifoldConfig& cfg) {
    if (cfg.k_modes < 2 || cfg.k_modes > dec.count())
        throw DomainError("solve_manifold: mode count must lie in [2, decomposition size]");
    const double lambda1 = dec.eigenvalues[0];
    const double lambda2 = dec.eigenvalues[1];
    const double horizon = std::max(10.0 / lambda1, -std::log(cfg.tail_tol) / lambda2);

    ManifoldResult result;
    result.section =
        zero_section(dec, cfg.k_modes, cfg.v_lo, cfg.v_hi, cfg.n_grid, cfg.lipschitz_cap);

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        TransformStats stats;
        GraphSection next =
            graph_transform(op, dec, reaction, result.section, horizon, cfg.quad_dt, &stats);
        result.clamped = result.clamped || stats.clamped;
        const double dist = section_distance(dec, next, result.section);
        result.increments.push_back(dist);
        result.section = std::move(next);
        result.iterations = it;
        if (dist <= cfg.fixpoint_tol) {
            // Contraction estimate from increments still above rounding noise.
            for (std::size_t i = 0; i + 1 < result.increments.size(); ++i) {
                const double den = result.increments[i];
                const double num = result.increments[i + 1];
                if (den > 1e-11 && num > 1e-13)
                    result.contraction = std::max(result.contraction, num / den);
            }
            return result;
        }
    }
    throw ConvergenceError("solve_manifold: no contraction to tolerance within " +
                           std::to_string(cfg.max_iterations) + " iterations");
}

/// Decay observation for one initial state.
struct AttractionResult {
    double rate = std::numeric_limits<double>::quiet_NaN(); ///< fitted decay exponent
    double max_deviation = 0.0; ///< peak off-section energy distance over [0, t_hi]
    int n_used = 0;             ///< samples entering the rate fit
    bool monotone_ok = true;    ///< no growth beyond transient tolerance
    bool fit_ok = false;        ///< enough usable samples for a fit
};

/// Tracks the off-section component xi(t) = z(t) - s(v(t)) along trajectories
/// and fits its exponential decay rate on the window [t_lo, t_hi]; samples
/// below the rounding floor are excluded from the fit.
inline std::vector<AttractionResult>
exponential_attraction_check(const DiscreteOperator& op, const SpectralDecomposition& dec,
                             const Reaction& reaction, const GraphSection& section,
                             const std::vector<Vector>& u0_batch, double dt = 1e-3,
                             double t_lo = 0.1, double t_hi = 1.0) {
    if (dec.count() != op.dim())
        throw DimensionError("exponential_attraction_check: decomposition must span the full space");
    if (!(0.0 < t_lo && t_lo < t_hi))
        throw DomainError("exponential_attraction_check: need 0 < t_lo < t_hi");
    const int kf = section.fast_modes();

    std::vector<AttractionResult> report;
    report.reserve(u0_batch.size());
    for (const Vector& u0 : u0_batch) {
        if (u0.size() != op.dim())
            throw DimensionError("exponential_attraction_check: state length mismatch");
        AttractionResult res;
        std::vector<double> times, devs;
        Vector u = u0;
        double t = 0.0;
        const int n_steps = static_cast<int>(std::ceil(t_hi / dt - 1e-12));
        for (int i = 0; i <= n_steps; ++i) {
            const Vector c = dec.eigenvectors.transpose() * (op.mass * u);
            const Vector s_at_v = detail::section_coords(section, c[0]);
            double sq = 0.0;
            for (int j = 1; j < dec.count(); ++j) {
                const double coeff = (j <= kf) ? c[j] - s_at_v[j - 1] : c[j];
                sq += dec.eigenvalues[j] * coeff * coeff;
            }
            const double dev = std::sqrt(std::max(0.0, sq));
            times.push_back(t);
            devs.push_back(dev);
            res.max_deviation = std::max(res.max_deviation, dev);
            if (i < n_steps) {
                const double step = std::min(dt, t_hi - t);
                u = exp_euler_step(op, dec, reaction, u, step);
                t = std::min(t_hi, t + step);
            }
        }

        const double fit_floor = std::max(1e-12, 1e-9 * res.max_deviation);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double running_min = std::numeric_limits<double>::infinity();
        int n = 0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] < t_lo || devs[i] < fit_floor) continue;
            if (devs[i] > 2.0 * running_min && devs[i] > 10.0 * fit_floor)
                res.monotone_ok = false;
            running_min = std::min(running_min, devs[i]);
            const double x = times[i];
            const double y = std::log(devs[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        res.n_used = n;
        if (n >= 5) {
            const double denom = n * sxx - sx * sx;
            if (denom > 0.0) {
                res.rate = -(n * sxy - sx * sy) / denom;
                res.fit_ok = true;
            }
        }
        report.push_back(res);
    }
    return report;
}

/// Reduced scalar flow dv/dt = -lambda_1 v + <phi_1, f(v phi_1 + s(v))>
/// integrated by the classical fourth-order scheme; returns v at each step.
inline std::vector<std::pair<double, double>>
reduced_trajectory(const DiscreteOperator& op, const SpectralDecomposition& dec,
                   const Reaction& reaction, const GraphSection& section, double v0, double dt,
                   double t_end) {
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw DomainError("reduced_trajectory: time parameters must be positive");
    const int k = section.fast_modes() + 1;
    const Matrix basis = dec.eigenvectors.leftCols(k);
    const Vector slow_weight = op.mass * basis.col(0);
    auto rhs = [&](double v) {
        const Vector c = detail::section_coords(section, v);
        Vector u = basis.col(0) * v;
        u.noalias() += basis.middleCols(1, k - 1) * c;
        return -dec.eigenvalues[0] * v + slow_weight.dot(reaction.apply(u));
    };
    std::vector<std::pair<double, double>> out;
    double v = v0, t = 0.0;
    out.emplace_back(t, v);
    const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    for (int i = 0; i < n_steps; ++i) {
        const double h = std::min(dt, t_end - t);
        const double k1 = rhs(v);
        const double k2 = rhs(v + 0.5 * h * k1);
        const double k3 = rhs(v + 0.5 * h * k2);
        const double k4 = rhs(v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = std::min(t_end, t + h);
        out.emplace_back(t, v);
    }
    return out;
}

} // namespace slowfast
