#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/assembly.hpp"
#include "slowfast/attractor.hpp"
#include "slowfast/config.hpp"
#include "slowfast/equilibria.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/family.hpp"
#include "slowfast/gaps.hpp"
#include "slowfast/manifold.hpp"
#include "slowfast/rates.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

enum class Quantity {
    resolvent,
    projection,
    eigenspace,
    equilibria,
    manifold,
    attractor,
    norm_ratio,
    spectrum_gap,
};

inline const std::vector<Quantity>& all_quantities() {
    static const std::vector<Quantity> list = {
        Quantity::resolvent, Quantity::projection, Quantity::eigenspace, Quantity::equilibria,
        Quantity::manifold,  Quantity::attractor,  Quantity::norm_ratio, Quantity::spectrum_gap,
    };
    return list;
}

inline std::string quantity_name(Quantity q) {
    switch (q) {
    case Quantity::resolvent: return "resolvent";
    case Quantity::projection: return "projection";
    case Quantity::eigenspace: return "eigenspace";
    case Quantity::equilibria: return "equilibria";
    case Quantity::manifold: return "manifold";
    case Quantity::attractor: return "attractor";
    case Quantity::norm_ratio: return "norm_ratio";
    case Quantity::spectrum_gap: return "spectrum_gap";
    }
    throw DomainError("quantity_name: unhandled quantity");
}

inline Quantity parse_quantity(const std::string& name) {
    for (Quantity q : all_quantities())
        if (quantity_name(q) == name) return q;
    throw ConfigError("parse_quantity: unknown quantity '" + name + "'");
}

/// Per-eps lazily built artifacts, shared across quantities within a run so
/// that expensive pieces (eigensolve, manifold) are computed once.
struct CaseAssets {
    DiscreteOperator op;
    std::optional<SpectralDecomposition> dec;
    std::optional<RieszProjection> riesz;
    std::optional<PerturbedSet> equilibria;
    std::optional<ManifoldResult> manifold;
};

/// Run-scoped state: configuration, family, reaction, mesh, the mean-value
/// projection, limit equilibria, and the per-eps cache.
class SweepContext {
public:
    explicit SweepContext(RunConfig config) : cfg_(std::move(config)) {
        cfg_.validate();
        family_ = make_family(cfg_.family);
        reaction_ = make_reaction(cfg_.reaction);
        mesh_ = IntervalMesh::uniform(0.0, 1.0, cfg_.n);
        proj_ = make_averaging(mesh_);
        grid_ = epsilon_grid(cfg_);
    }

    const RunConfig& config() const { return cfg_; }
    const ScaleFamily& family() const { return family_; }
    const Reaction& reaction() const { return reaction_; }
    const IntervalMesh& mesh() const { return mesh_; }
    const AveragingProjection& averaging() const { return proj_; }
    const std::vector<double>& grid() const { return grid_; }

    const std::vector<LimitEquilibrium>& limit_equilibria_cached() {
        if (!limit_) {
            const double radius = reaction_.dissipative_radius;
            limit_ = limit_equilibria(reaction_, family_.lambda_limit(), -1.5 * radius,
                                      1.5 * radius, 400);
        }
        return *limit_;
    }

    CaseAssets& assets(double eps) {
        auto it = cache_.find(eps);
        if (it == cache_.end()) {
            CaseAssets assets;
            assets.op = assemble(mesh_, family_.coefficients(mesh_, eps));
            it = cache_.emplace(eps, std::move(assets)).first;
        }
        return it->second;
    }

    const SpectralDecomposition& decomposition(double eps) {
        CaseAssets& a = assets(eps);
        if (!a.dec) a.dec = eigensolve(a.op, a.op.dim());
        return *a.dec;
    }

    const RieszProjection& riesz(double eps) {
        CaseAssets& a = assets(eps);
        if (!a.riesz) {
            const SpectralDecomposition& dec = decomposition(eps);
            const double center = family_.lambda_limit();
            const double radius = default_contour_radius(a.op, dec, center);
            a.riesz = riesz_projection(a.op, dec, center, radius, cfg_.n_quad);
        }
        return *a.riesz;
    }

    const PerturbedSet& perturbed(double eps) {
        CaseAssets& a = assets(eps);
        if (!a.equilibria)
            a.equilibria = perturbed_equilibria(a.op, decomposition(eps), reaction_,
                                                limit_equilibria_cached(), cfg_.newton_tol);
        return *a.equilibria;
    }

    const ManifoldResult& manifold(double eps) {
        CaseAssets& a = assets(eps);
        if (!a.manifold) {
            ManifoldConfig mc;
            mc.n_grid = cfg_.manifold_grid;
            mc.k_modes = std::min(cfg_.k_modes, a.op.dim());
            mc.quad_dt = cfg_.dt;
            mc.fixpoint_tol = cfg_.manifold_tol;
            mc.lipschitz_cap = cfg_.lipschitz_cap;
            set_grid_from_equilibria(mc, perturbed(eps));
            a.manifold = solve_manifold(a.op, decomposition(eps), reaction_, mc);
        }
        return *a.manifold;
    }

private:
    RunConfig cfg_;
    ScaleFamily family_;
    Reaction reaction_;
    IntervalMesh mesh_;
    AveragingProjection proj_;
    std::vector<double> grid_;
    std::optional<std::vector<LimitEquilibrium>> limit_;
    std::map<double, CaseAssets> cache_;
};

/// Evaluates one quantity across the eps grid. Soft per-eps failures
/// (nonconvergence, collisions) record flagged rows; hard failures abort
/// with the failing eps named.
inline RateSeries sweep(SweepContext& ctx, Quantity quantity) {
    RateSeries series;
    series.quantity = quantity_name(quantity);

    for (double eps : ctx.grid()) {
        RateRow row;
        row.eps = eps;
        row.delta = ctx.family().delta(eps, ctx.mesh());
        try {
            switch (quantity) {
            case Quantity::resolvent:
                row.error = resolvent_gap(ctx.assets(eps).op, ctx.family().lambda_limit(),
                                          ctx.averaging());
                break;
            case Quantity::projection:
                row.error = projection_gap(ctx.riesz(eps), ctx.averaging(), ctx.assets(eps).op);
                break;
            case Quantity::eigenspace:
                row.error = eigenspace_hausdorff(ctx.assets(eps).op, ctx.decomposition(eps),
                                                 ctx.averaging());
                break;
            case Quantity::equilibria: {
                const PerturbedSet& set = ctx.perturbed(eps);
                double worst = 0.0;
                bool unique_ok = true;
                for (const PerturbedEquilibrium& item : set.items) {
                    worst = std::max(worst, item.distance);
                    unique_ok = unique_ok && item.unique_ok;
                }
                row.error = worst;
                if (set.collision) row.flag = "collision";
                else if (!unique_ok) row.flag = "nonunique";
                break;
            }
            case Quantity::manifold: {
                const ManifoldResult& result = ctx.manifold(eps);
                row.error = result.section.sup_norm;
                if (result.clamped) row.flag = "clamped";
                break;
            }
            case Quantity::attractor: {
                const AttractorGapReport report = attractor_gap(
                    ctx.assets(eps).op, ctx.decomposition(eps), ctx.riesz(eps), ctx.averaging(),
                    ctx.manifold(eps).section, ctx.perturbed(eps), ctx.limit_equilibria_cached(),
                    ctx.config().attractor_pts);
                row.error = report.overall.total;
                if (ctx.manifold(eps).clamped) row.flag = "clamped";
                break;
            }
            case Quantity::norm_ratio:
                row.error = norm_ratio_probe(ctx.assets(eps).op);
                break;
            case Quantity::spectrum_gap:
                row.error = ctx.decomposition(eps).eigenvalues[1] / ctx.family().p_min(eps);
                break;
            }
        } catch (const ConvergenceError&) {
            row.error = 0.0;
            row.flag = "noconv";
        } catch (const Error& err) {
            throw Error("sweep '" + series.quantity + "' failed at eps = " + std::to_string(eps) +
                        ": " + err.what());
        }
        series.rows.push_back(std::move(row));
    }
    series.validate();
    return series;
}

} // namespace slowfast
