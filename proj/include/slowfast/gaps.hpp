#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slowfast/assembly.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

/// Operator norm of A^{-1} - (lambda_limit)^{-1} P from L2 into the energy
/// space, where A is the assembled operator and P the mean-value projection.
/// The limit inverse maps a load to the constant field (mean g) / lambda_limit.
inline double resolvent_gap(const DiscreteOperator& op, double lambda_limit,
                            const AveragingProjection& proj) {
    const int n = op.dim();
    if (proj.weights.size() != n)
        throw DimensionError("resolvent_gap: projection does not match the operator mesh");
    if (!(lambda_limit > 0.0))
        throw DomainError("resolvent_gap: limit coefficient must be positive");
    Eigen::LDLT<Matrix> ldlt(op.gram);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("resolvent_gap: factorization of the energy Gram matrix failed");
    Matrix e = ldlt.solve(op.mass);
    e.noalias() -= (1.0 / lambda_limit) * (Vector::Ones(n) * proj.weights.transpose());
    return l2_to_energy_norm(e, op);
}

/// Shifted variant: operator norm of (mu + A)^{-1} - (mu + lambda_limit)^{-1} P
/// for a complex shift mu away from both spectra.
inline double sector_resolvent_gap(const DiscreteOperator& op, double lambda_limit,
                                   const AveragingProjection& proj, std::complex<double> mu,
                                   double excluded_radius = 1e-8) {
    using Complex = std::complex<double>;
    using MatrixC = Eigen::MatrixXcd;

    const int n = op.dim();
    if (proj.weights.size() != n)
        throw DimensionError("sector_resolvent_gap: projection does not match the operator mesh");
    // Both pencils have spectrum on the real ray [floor, infinity); mu must
    // stay away from the mirrored ray and from -lambda_limit.
    if (std::abs(mu + Complex(lambda_limit, 0.0)) < excluded_radius)
        throw DomainError("sector_resolvent_gap: shift too close to the limit pole");
    if (mu.imag() == 0.0 && mu.real() <= -op.floor + excluded_radius)
        throw DomainError("sector_resolvent_gap: real shift lies on the excluded spectral ray");

    const MatrixC mass_c = op.mass.cast<Complex>();
    MatrixC shifted = mu * mass_c + op.gram.cast<Complex>();
    Eigen::PartialPivLU<MatrixC> lu(shifted);
    MatrixC e = lu.solve(mass_c);
    const Complex limit_pole = 1.0 / (mu + Complex(lambda_limit, 0.0));
    e.noalias() -= limit_pole * (Eigen::VectorXcd::Ones(n) * proj.weights.transpose().cast<Complex>());

    const MatrixC b = e.adjoint() * op.gram.cast<Complex>() * e;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixC> solver(
        0.5 * (b + b.adjoint()), mass_c, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success)
        throw NumericalError("sector_resolvent_gap: Hermitian pencil eigensolver failed");
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (lo < -1e-12 * std::max(1.0, std::abs(hi)))
        throw NumericalError("sector_resolvent_gap: pencil is indefinite beyond rounding");
    return std::sqrt(std::max(0.0, hi));
}

/// Operator norm of Q - P from L2 into the energy space.
inline double projection_gap(const RieszProjection& q, const AveragingProjection& proj,
                             const DiscreteOperator& op) {
    const int n = op.dim();
    if (q.matrix.rows() != n || proj.weights.size() != n)
        throw DimensionError("projection_gap: inputs do not match the operator dimension");
    Matrix e = q.matrix - Vector::Ones(n) * proj.weights.transpose();
    return l2_to_energy_norm(e, op);
}

/// Hausdorff distance (sum of both directed distances) in the energy norm
/// between the unit segments {t phi_1 : |t| <= 1} and {t 1 : |t| <= 1} with
/// energy-normalized generators, sampled on n_param points per segment.
inline double eigenspace_hausdorff(const DiscreteOperator& op, const SpectralDecomposition& dec,
                                   const AveragingProjection& proj, int n_param = 65) {
    if (dec.count() < 1 || dec.eigenvectors.rows() != op.dim())
        throw DimensionError("eigenspace_hausdorff: decomposition does not match the operator");
    if (n_param < 65)
        throw DomainError("eigenspace_hausdorff: parameter grid needs at least 65 points");
    (void)proj; // the limit generator is the constant field the projection produces

    const Vector phi = dec.eigenvectors.col(0);
    const Vector ones = Vector::Ones(op.dim());
    const double phi_energy = norm(phi, op, NormKind::energy);
    const double ones_energy = norm(ones, op, NormKind::energy);
    if (phi_energy < 1e-12 || ones_energy < 1e-12)
        throw DomainError("eigenspace_hausdorff: degenerate subspace generator");
    const Vector a_gen = phi / phi_energy;
    const Vector b_gen = ones / ones_energy;

    // Distances between t*a_gen and s*b_gen reduce to a 2x2 quadratic form.
    const double aa = 1.0;
    const double bb = 1.0;
    const double ab = a_gen.dot(op.gram * b_gen);
    auto dist = [&](double t, double s) {
        const double sq = t * t * aa - 2.0 * t * s * ab + s * s * bb;
        return std::sqrt(std::max(0.0, sq));
    };
    auto param = [&](int i) { return -1.0 + 2.0 * i / (n_param - 1); };

    double sup_ab = 0.0, sup_ba = 0.0;
    for (int i = 0; i < n_param; ++i) {
        double inf_b = std::numeric_limits<double>::infinity();
        double inf_a = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_param; ++j) {
            inf_b = std::min(inf_b, dist(param(i), param(j)));
            inf_a = std::min(inf_a, dist(param(j), param(i)));
        }
        sup_ab = std::max(sup_ab, inf_b);
        sup_ba = std::max(sup_ba, inf_a);
    }
    return sup_ab + sup_ba;
}

/// Ratios ||exp(-A t) z||_energy * exp(lambda_2 t) / ||z||_energy over the
/// fast modes of the decomposition; every ratio is bounded by one up to
/// rounding because each fast mode decays at least as fast as the second
/// eigenvalue.
inline std::vector<std::pair<double, double>>
semigroup_decay_check(const DiscreteOperator& op, const SpectralDecomposition& dec,
                      const std::vector<double>& t_samples, const Vector& z) {
    if (z.size() != op.dim())
        throw DimensionError("semigroup_decay_check: vector length does not match the operator");
    if (dec.count() < 2)
        throw DomainError("semigroup_decay_check: needs at least two modes");
    for (double t : t_samples)
        if (!(t > 0.0)) throw DomainError("semigroup_decay_check: time samples must be positive");

    const Vector coords = dec.eigenvectors.transpose() * (op.mass * z);
    const double z_mass_norm = std::sqrt(std::max(0.0, z.dot(op.mass * z)));
    if (std::abs(coords[0]) > 1e-10 * std::max(1.0, z_mass_norm))
        throw DomainError("semigroup_decay_check: data has a slow-mode component beyond tolerance");

    // Energy norm of the fast part captured by the decomposition.
    double captured_sq = 0.0;
    for (int j = 1; j < dec.count(); ++j)
        captured_sq += dec.eigenvalues[j] * coords[j] * coords[j];
    if (!(captured_sq > 0.0))
        throw DomainError("semigroup_decay_check: data has no fast-mode component");

    const double beta = dec.eigenvalues[1];
    std::vector<std::pair<double, double>> report;
    report.reserve(t_samples.size());
    for (double t : t_samples) {
        double decayed_sq = 0.0;
        for (int j = 1; j < dec.count(); ++j) {
            const double factor = std::exp(-dec.eigenvalues[j] * t);
            decayed_sq += dec.eigenvalues[j] * factor * factor * coords[j] * coords[j];
        }
        const double ratio = std::sqrt(decayed_sq / captured_sq) * std::exp(beta * t);
        report.emplace_back(t, ratio);
    }
    return report;
}

/// Largest Rayleigh quotient of the energy form against the unit-coefficient
/// H1 form: the supremum of ||u||^2_energy / ||u||^2_h1 over nodal fields.
/// Grows proportionally to the diffusion scale, exhibiting that no uniform
/// equivalence constant between the two norms exists.
inline double norm_ratio_probe(const DiscreteOperator& op) {
    std::vector<double> unit(static_cast<std::size_t>(op.mesh.n_elems()), 1.0);
    const Matrix h1_gram = assemble_stiffness(op.mesh, unit) + op.mass;
    return max_pencil_eigenvalue(op.gram, h1_gram);
}

/// Largest deviation between the slow decay factor exp(-lambda_1 t) and its
/// limit exp(-lambda_limit t) over backward times t in [-1, 0].
inline double slow_backward_gap(double lambda_1, double lambda_limit, int n_samples = 33) {
    if (n_samples < 2) throw DomainError("slow_backward_gap: needs at least two samples");
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = -1.0 + static_cast<double>(i) / (n_samples - 1);
        worst = std::max(worst, std::abs(std::exp(-lambda_1 * t) - std::exp(-lambda_limit * t)));
    }
    return worst;
}

} // namespace slowfast
