#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slowfast/coefficients.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/mesh.hpp"

namespace slowfast {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Stiffness matrix for piecewise-linear elements with one diffusion sample
/// per element: contributes (p_e / h_e) [[1,-1],[-1,1]] on each element.
inline Matrix assemble_stiffness(const IntervalMesh& mesh, const std::vector<double>& p_elem) {
    const int ne = mesh.n_elems();
    if (static_cast<int>(p_elem.size()) != ne)
        throw DimensionError("assemble_stiffness: one diffusion sample per element required");
    Matrix s = Matrix::Zero(ne + 1, ne + 1);
    for (int e = 0; e < ne; ++e) {
        const double c = p_elem[static_cast<std::size_t>(e)] / mesh.width(e);
        s(e, e) += c;
        s(e + 1, e + 1) += c;
        s(e, e + 1) -= c;
        s(e + 1, e) -= c;
    }
    return s;
}

/// Mass matrix weighted by one zeroth-order sample per element:
/// contributes w_e (h_e / 6) [[2,1],[1,2]] on each element.
inline Matrix assemble_weighted_mass(const IntervalMesh& mesh, const std::vector<double>& w_elem) {
    const int ne = mesh.n_elems();
    if (static_cast<int>(w_elem.size()) != ne)
        throw DimensionError("assemble_weighted_mass: one weight sample per element required");
    Matrix m = Matrix::Zero(ne + 1, ne + 1);
    for (int e = 0; e < ne; ++e) {
        const double c = w_elem[static_cast<std::size_t>(e)] * mesh.width(e) / 6.0;
        m(e, e) += 2.0 * c;
        m(e + 1, e + 1) += 2.0 * c;
        m(e, e + 1) += c;
        m(e + 1, e) += c;
    }
    return m;
}

/// Unweighted mass matrix.
inline Matrix assemble_mass(const IntervalMesh& mesh) {
    return assemble_weighted_mass(mesh, std::vector<double>(static_cast<std::size_t>(mesh.n_elems()), 1.0));
}

/// Galerkin discretization of u -> -(p u')' + (lambda + V) u with natural
/// boundary conditions on a piecewise-linear nodal basis.
///
/// gram = stiffness + potential is the energy Gram matrix: u' gram u equals
/// the squared energy norm of the nodal field u. mass is the plain L2 Gram.
struct DiscreteOperator {
    IntervalMesh mesh;
    Matrix stiffness; ///< diffusion part, positive semidefinite with kernel = constants
    Matrix potential; ///< zeroth-order part weighted by lambda + V
    Matrix mass;      ///< unweighted L2 Gram
    Matrix gram;      ///< stiffness + potential, symmetric positive definite
    double floor = 0.0;     ///< coefficient floor m0
    double shift = 0.0;     ///< lambda
    double min_diffusion = 0.0; ///< smallest elementwise diffusion sample

    int dim() const { return static_cast<int>(gram.rows()); }
};

/// Assembles the discrete operator from midpoint coefficient samples.
inline DiscreteOperator assemble(const IntervalMesh& mesh, const CoefficientField& coeff) {
    mesh.validate();
    coeff.validate(mesh.n_elems());

    DiscreteOperator op;
    op.mesh = mesh;
    op.floor = coeff.floor;
    op.shift = coeff.shift;
    op.min_diffusion = coeff.min_diffusion();
    op.stiffness = assemble_stiffness(mesh, coeff.diffusion);
    std::vector<double> q(coeff.potential.size());
    for (std::size_t e = 0; e < q.size(); ++e) q[e] = coeff.shift + coeff.potential[e];
    op.potential = assemble_weighted_mass(mesh, q);
    op.mass = assemble_mass(mesh);
    op.gram = op.stiffness + op.potential;

    // Element blocks are symmetric, so any asymmetry is pure rounding.
    const double s_scale = op.gram.cwiseAbs().maxCoeff();
    const double asym = (op.gram - op.gram.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, s_scale))
        throw NumericalError("assemble: assembled matrices lost symmetry");
    // The stiffness part must annihilate constants (natural boundary conditions).
    const double kernel_defect =
        (op.stiffness * Vector::Ones(op.dim())).cwiseAbs().maxCoeff();
    if (kernel_defect > 1e-12 * std::max(1.0, op.stiffness.cwiseAbs().maxCoeff()))
        throw NumericalError("assemble: stiffness matrix does not annihilate constants");
    return op;
}

enum class NormKind { energy, h1, l2 };

/// Quadratic-form norms of a nodal field: the energy norm uses the weighted
/// Gram matrix, h1 uses unit coefficients, l2 uses the mass matrix.
inline double norm(const Vector& u, const DiscreteOperator& op, NormKind kind) {
    if (u.size() != op.dim())
        throw DimensionError("norm: vector length does not match the operator dimension");
    double sq = 0.0;
    switch (kind) {
    case NormKind::energy:
        sq = u.dot(op.gram * u);
        break;
    case NormKind::l2:
        sq = u.dot(op.mass * u);
        break;
    case NormKind::h1: {
        // Unit-coefficient energy: sum (du)^2/h + u' mass u, assembled on the fly.
        double grad = 0.0;
        for (int e = 0; e < op.mesh.n_elems(); ++e) {
            const double du = u[e + 1] - u[e];
            grad += du * du / op.mesh.width(e);
        }
        sq = grad + u.dot(op.mass * u);
        break;
    }
    }
    if (sq < -1e-14)
        throw NumericalError("norm: quadratic form returned a negative value");
    return std::sqrt(std::max(0.0, sq));
}

/// Mean-value projection: weights integrate a nodal field exactly and divide
/// by the interval length, so apply() reproduces constants exactly.
struct AveragingProjection {
    Vector weights;

    double average(const Vector& u) const {
        if (u.size() != weights.size())
            throw DimensionError("AveragingProjection: vector length does not match the mesh");
        return weights.dot(u);
    }

    Vector apply(const Vector& u) const {
        return Vector::Constant(weights.size(), average(u));
    }

    /// Dense projector onto constants (rank one).
    Matrix matrix() const {
        return Vector::Ones(weights.size()) * weights.transpose();
    }
};

/// Builds the mean-value projection for a mesh; the weights are the exact
/// integrals of the nodal basis functions scaled by 1/|domain|.
inline AveragingProjection make_averaging(const IntervalMesh& mesh) {
    mesh.validate();
    AveragingProjection proj;
    proj.weights = Vector::Zero(mesh.n_nodes());
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double half = 0.5 * mesh.width(e);
        proj.weights[e] += half;
        proj.weights[e + 1] += half;
    }
    proj.weights /= mesh.length();
    return proj;
}

/// Mean value of a nodal field under a projection built for the same mesh.
inline double average(const Vector& u, const AveragingProjection& proj) {
    return proj.average(u);
}

/// Solves the discrete elliptic problem gram u = mass g for a nodal load g.
///
/// Uses a symmetric indefinite factorization with one step of iterative
/// refinement; the residual is checked against the load scale plus the
/// unavoidable rounding floor of forming gram * u in double precision.
inline Vector solve_elliptic(const DiscreteOperator& op, const Vector& g) {
    if (g.size() != op.dim())
        throw DimensionError("solve_elliptic: load length does not match the operator dimension");
    const Vector b = op.mass * g;
    Eigen::LDLT<Matrix> ldlt(op.gram);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("solve_elliptic: factorization of the energy Gram matrix failed");
    Vector u = ldlt.solve(b);
    u += ldlt.solve(b - op.gram * u); // one refinement pass
    const double resid = (op.gram * u - b).norm();
    const double round_floor = 8.0 * std::numeric_limits<double>::epsilon() *
                               op.gram.cwiseAbs().maxCoeff() * u.cwiseAbs().maxCoeff() *
                               std::sqrt(static_cast<double>(op.dim()));
    if (resid > 1e-10 * b.norm() + round_floor)
        throw NumericalError("solve_elliptic: residual exceeds tolerance");
    return u;
}

/// Energy-dual norm sqrt(r' gram^{-1} r) of a residual vector.
inline double dual_norm(const DiscreteOperator& op, const Vector& r) {
    if (r.size() != op.dim())
        throw DimensionError("dual_norm: vector length does not match the operator dimension");
    Eigen::LDLT<Matrix> ldlt(op.gram);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("dual_norm: factorization of the energy Gram matrix failed");
    const double sq = r.dot(ldlt.solve(r));
    return std::sqrt(std::max(0.0, sq));
}

} // namespace slowfast
