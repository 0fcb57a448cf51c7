#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slowfast/assembly.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/reaction.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

/// Root of the scalar limit problem lambda_bar u = f(u).
struct LimitEquilibrium {
    double value = 0.0;
    double margin = 0.0; ///< |lambda_bar - f'(value)|
    bool stable = false; ///< lambda_bar - f'(value) > 0
};

/// Roots of g(u) = lambda_bar u - f(u) inside a bracket, located by a sign
/// scan over n_scan subintervals, bisection, and Newton polish. Rejects
/// non-hyperbolic roots where the linearization margin nearly vanishes.
inline std::vector<LimitEquilibrium> limit_equilibria(const Reaction& reaction, double lambda_bar,
                                                      double lo, double hi, int n_scan = 400) {
    if (!(lo < hi)) throw DomainError("limit_equilibria: bracket must satisfy lo < hi");
    if (n_scan < 2) throw DomainError("limit_equilibria: scan needs at least two subintervals");
    reaction.validate();

    auto g = [&](double u) { return lambda_bar * u - reaction.value(u); };
    auto gp = [&](double u) { return lambda_bar - reaction.slope(u); };

    auto polish = [&](double a, double b) {
        // Bisection to high accuracy, then Newton to squeeze out the rest.
        double fa = g(a);
        for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = g(mid);
            if (fm == 0.0) return mid;
            if ((fa < 0.0) != (fm < 0.0)) {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        double u = 0.5 * (a + b);
        for (int it = 0; it < 8; ++it) {
            const double denom = gp(u);
            if (std::abs(denom) < 1e-14) break;
            const double step = g(u) / denom;
            u -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(u))) break;
        }
        return u;
    };

    std::vector<double> roots;
    const double width = (hi - lo) / n_scan;
    double prev = g(lo);
    if (prev == 0.0) roots.push_back(lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double x = lo + i * width;
        const double cur = g(x);
        if (cur == 0.0) {
            roots.push_back(polish(x - 0.5 * width, std::min(hi, x + 0.5 * width)));
        } else if ((prev < 0.0) != (cur < 0.0)) {
            roots.push_back(polish(x - width, x));
        }
        prev = cur;
    }

    // Merge duplicates from adjacent subintervals or exact grid hits.
    std::sort(roots.begin(), roots.end());
    std::vector<LimitEquilibrium> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back().value) <= 1e-10 * std::max(1.0, std::abs(r)))
            continue;
        const double margin = gp(r);
        if (std::abs(margin) <= 1e-8)
            throw HyperbolicityError("limit_equilibria: non-hyperbolic root near u = " +
                                     std::to_string(r));
        out.push_back({r, std::abs(margin), margin > 0.0});
    }
    return out;
}

/// Discrete steady state of the semilinear problem with its linearization data.
struct FieldEquilibrium {
    Vector value;
    double reduced = 0.0;  ///< coordinate along the slow eigenvector
    double margin = 0.0;   ///< smallest |eigenvalue| of the symmetric linearization pencil
    bool stable = false;
    double residual = 0.0; ///< dual-norm residual of the nonlinear equation
};

struct PerturbedEquilibrium {
    FieldEquilibrium eq;
    double distance = 0.0; ///< energy distance to the constant seed
    bool unique_ok = true; ///< Newton re-runs from jittered seeds landed on the same point
};

struct PerturbedSet {
    std::vector<PerturbedEquilibrium> items;
    bool collision = false; ///< two seeds converged to the same point
};

namespace detail {

/// Elementwise slope samples f'(u) at element midpoints of a nodal field.
inline std::vector<double> midpoint_slope_weights(const DiscreteOperator& op,
                                                  const Reaction& reaction, const Vector& u) {
    std::vector<double> w(static_cast<std::size_t>(op.mesh.n_elems()));
    for (int e = 0; e < op.mesh.n_elems(); ++e)
        w[static_cast<std::size_t>(e)] = reaction.slope(0.5 * (u[e] + u[e + 1]));
    return w;
}

/// Newton iteration on gram u = mass f(u) with damping on residual increase.
inline Vector newton_equilibrium(const DiscreteOperator& op, const Reaction& reaction,
                                 const Vector& seed, double tol, int max_steps) {
    Vector u = seed;
    double res = dual_norm(op, op.gram * u - op.mass * reaction.apply(u));
    for (int step = 0; step < max_steps; ++step) {
        if (res <= tol) return u;
        const Vector r = op.gram * u - op.mass * reaction.apply(u);
        Matrix jac = op.gram;
        jac.noalias() -= assemble_weighted_mass(op.mesh, midpoint_slope_weights(op, reaction, u));
        Eigen::PartialPivLU<Matrix> lu(jac);
        const Vector delta = lu.solve(r);
        double scale = 1.0;
        for (int halving = 0; halving <= 8; ++halving) {
            const Vector trial = u - scale * delta;
            const double trial_res =
                dual_norm(op, op.gram * trial - op.mass * reaction.apply(trial));
            if (trial_res < res || halving == 8) {
                u = trial;
                res = trial_res;
                break;
            }
            scale *= 0.5;
        }
    }
    if (res > tol)
        throw ConvergenceError("newton_equilibrium: no convergence within " +
                               std::to_string(max_steps) + " steps (residual " +
                               std::to_string(res) + ")");
    return u;
}

} // namespace detail

/// Continues constant limit equilibria to discrete steady states by Newton
/// iteration, reporting energy distances to the seeds. Local uniqueness is
/// probed by re-running Newton from slightly shifted seeds; seeds collapsing
/// onto one point raise the collision flag.
inline PerturbedSet perturbed_equilibria(const DiscreteOperator& op,
                                         const SpectralDecomposition& dec,
                                         const Reaction& reaction,
                                         const std::vector<LimitEquilibrium>& seeds,
                                         double tol = 1e-10, int max_steps = 50) {
    if (seeds.empty()) throw DomainError("perturbed_equilibria: no seeds supplied");
    if (dec.eigenvectors.rows() != op.dim())
        throw DimensionError("perturbed_equilibria: decomposition does not match the operator");

    // Jitter scale: a tenth of the smallest seed separation (or of 1).
    double sep = 1.0;
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
        sep = std::min(sep, std::abs(seeds[i + 1].value - seeds[i].value));
    const double jitter = 0.1 * sep;

    const Vector phi = dec.eigenvectors.col(0);
    PerturbedSet set;
    for (const LimitEquilibrium& seed : seeds) {
        const Vector seed_vec = Vector::Constant(op.dim(), seed.value);
        const Vector u = detail::newton_equilibrium(op, reaction, seed_vec, tol, max_steps);

        FieldEquilibrium eq;
        eq.value = u;
        eq.reduced = phi.dot(op.mass * u);
        eq.residual = dual_norm(op, op.gram * u - op.mass * reaction.apply(u));

        // Hyperbolicity margin from the symmetric linearization pencil.
        Matrix lin = op.gram;
        lin.noalias() -= assemble_weighted_mass(op.mesh, detail::midpoint_slope_weights(op, reaction, u));
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(0.5 * (lin + lin.transpose()), op.mass,
                                                                Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
        if (solver.info() != Eigen::Success)
            throw NumericalError("perturbed_equilibria: linearization eigensolver failed");
        double margin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < solver.eigenvalues().size(); ++j)
            margin = std::min(margin, std::abs(solver.eigenvalues()[j]));
        eq.margin = margin;
        eq.stable = solver.eigenvalues().minCoeff() > 0.0;
        if (!(eq.margin > 1e-8))
            throw HyperbolicityError("perturbed_equilibria: equilibrium lost hyperbolicity");

        PerturbedEquilibrium item;
        item.eq = eq;
        item.distance = norm(u - seed_vec, op, NormKind::energy);

        // Local uniqueness probe from jittered constant seeds.
        for (double sign : {1.0, -1.0}) {
            const Vector alt_seed = Vector::Constant(op.dim(), seed.value + sign * jitter);
            const Vector alt = detail::newton_equilibrium(op, reaction, alt_seed, tol, max_steps);
            if (norm(alt - u, op, NormKind::energy) > 1e-8 * (1.0 + norm(u, op, NormKind::energy)))
                item.unique_ok = false;
        }
        set.items.push_back(std::move(item));
    }

    // Distinct seeds must keep distinct continuations.
    for (std::size_t i = 0; i < set.items.size(); ++i)
        for (std::size_t j = i + 1; j < set.items.size(); ++j)
            if (norm(set.items[i].eq.value - set.items[j].eq.value, op, NormKind::energy) <= 1e-8)
                set.collision = true;
    return set;
}

} // namespace slowfast
