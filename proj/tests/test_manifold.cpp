#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "slowfast/flow.hpp"
#include "slowfast/manifold.hpp"

using namespace slowfast;

namespace {

DiscreteOperator constant_operator(int n, double p, double lambda) {
    const IntervalMesh mesh = IntervalMesh::uniform(0.0, 1.0, n);
    const CoefficientField field = CoefficientField::sample(
        mesh, [p](double) { return p; }, [](double) { return 0.0; }, lambda,
        std::min(p, lambda) * 0.5);
    return assemble(mesh, field);
}

Reaction zero_reaction() {
    Reaction r;
    r.name = "zero";
    r.value = [](double) { return 0.0; };
    r.slope = [](double) { return 0.0; };
    return r;
}

} // namespace

TEST_CASE("integrator weight phi1 is accurate and continuous at the series switch") {
    REQUIRE(detail::phi1(1.0) == Catch::Approx(1.0 - std::exp(-1.0)).margin(1e-15));
    REQUIRE(detail::phi1(40.0) == Catch::Approx(1.0 / 40.0).epsilon(1e-12));
    REQUIRE(detail::phi1(1e-8) == Catch::Approx(1.0 - 0.5e-8).margin(1e-14));
    const double below = detail::phi1(0.999999e-6);
    const double above = detail::phi1(1.000001e-6);
    REQUIRE(std::abs(below - above) < 1e-11);
}

TEST_CASE("variation-of-constants weights integrate linear data exactly") {
    // h (a g0 + b g1) must equal the integral of exp(-y x / h) g(x) over
    // [0, h] for linear g; compare against fine Simpson quadrature.
    auto simpson = [](double y, double g0, double g1) {
        const int n = 20000;
        const double h = 1.0 / n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            auto f = [&](double x) { return std::exp(-y * x) * (g0 * (1.0 - x) + g1 * x); };
            acc += h / 6.0 * (f(i * h) + 4.0 * f((i + 0.5) * h) + f((i + 1) * h));
        }
        return acc;
    };
    // Arguments straddle the series/quotient switch so both branches face
    // the reference; the weights themselves vary smoothly in y.
    for (double y : {0.5, 2.0, 10.0, 5e-5, 0.99999e-2, 1.00001e-2}) {
        double a, b;
        detail::duhamel_weights(y, a, b);
        REQUIRE(a * 1.0 + b * 0.0 == Catch::Approx(simpson(y, 1.0, 0.0)).margin(1e-10));
        REQUIRE(a * 0.0 + b * 1.0 == Catch::Approx(simpson(y, 0.0, 1.0)).margin(1e-10));
    }
}

TEST_CASE("exponential step is exact for the pure linear flow") {
    const DiscreteOperator op = constant_operator(32, 2.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const Vector u0 = dec.eigenvectors.col(0) + 0.5 * dec.eigenvectors.col(2);
    const double dt = 0.05;
    const Vector u1 = exp_euler_step(op, dec, zero_reaction(), u0, dt);
    const Vector expected = std::exp(-dec.eigenvalues[0] * dt) * dec.eigenvectors.col(0) +
                            0.5 * std::exp(-dec.eigenvalues[2] * dt) * dec.eigenvectors.col(2);
    REQUIRE((u1 - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("exponential step keeps constant steady states fixed") {
    const DiscreteOperator op = constant_operator(48, 4.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const Vector star = Vector::Constant(op.dim(), std::sqrt(0.5));
    const Vector next = exp_euler_step(op, dec, cubic_reaction(), star, 0.01);
    REQUIRE((next - star).cwiseAbs().maxCoeff() < 5e-13);
}

TEST_CASE("exponential step converges at first order in the step size") {
    const DiscreteOperator op = constant_operator(32, 4.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const Reaction f = cubic_reaction();
    Vector u0 = Vector::Constant(op.dim(), 0.3);
    u0 += 0.2 * dec.eigenvectors.col(1);

    auto final_state = [&](double dt) {
        const Trajectory traj = integrate(op, dec, f, u0, dt, 0.5);
        return traj.states.back();
    };
    const Vector ref = final_state(0.5 / 512);
    const double e1 = (final_state(0.5 / 16) - ref).cwiseAbs().maxCoeff();
    const double e2 = (final_state(0.5 / 32) - ref).cwiseAbs().maxCoeff();
    REQUIRE(e1 / e2 == Catch::Approx(2.0).margin(0.35));
}

TEST_CASE("trajectories are absorbed into the dissipative ball") {
    // Constant data follows dv/dt = v/2 - v^3, whose square is logistic:
    // w(t) = a w0 e^{2at} / (a + w0 (e^{2at} - 1)) with a = 1/2.
    const DiscreteOperator op = constant_operator(32, 1.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const double t_end = 5.0, w0 = 9.0, a = 0.5;
    const Trajectory traj =
        integrate(op, dec, cubic_reaction(), Vector::Constant(op.dim(), 3.0), 0.01, t_end);
    const double grow = std::exp(2.0 * a * t_end);
    const double expected = std::sqrt(a * w0 * grow / (a + w0 * (grow - 1.0)));
    REQUIRE(traj.states.back().cwiseAbs().maxCoeff() == Catch::Approx(expected).epsilon(1e-3));
}

TEST_CASE("exponential step validates sizes and catches blowup") {
    const DiscreteOperator op = constant_operator(16, 1.0, 0.5);
    const SpectralDecomposition full = eigensolve(op, op.dim());
    const SpectralDecomposition truncated = eigensolve(op, 3);
    const Vector u = Vector::Zero(op.dim());
    REQUIRE_THROWS_AS(exp_euler_step(op, full, cubic_reaction(), u, 0.2), DomainError);
    REQUIRE_THROWS_AS(exp_euler_step(op, full, cubic_reaction(), Vector::Zero(4), 0.01),
                      DimensionError);
    REQUIRE_THROWS_AS(exp_euler_step(op, truncated, cubic_reaction(), u, 0.01), DimensionError);
    REQUIRE_THROWS_AS(
        integrate(op, full, cubic_reaction(), Vector::Constant(op.dim(), 1e8), 0.05, 1.0),
        ConvergenceError);
}

TEST_CASE("graph transform leaves the flat section fixed for decoupled flows") {
    const DiscreteOperator op = constant_operator(48, 4.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());

    // Constant slow mode: the cubic maps constants to constants, so no fast
    // forcing ever appears and the invariant graph is exactly flat.
    ManifoldConfig cfg;
    cfg.v_lo = -1.0;
    cfg.v_hi = 1.0;
    cfg.n_grid = 65;
    cfg.k_modes = 8;
    const ManifoldResult cubic_result = solve_manifold(op, dec, cubic_reaction(), cfg);
    REQUIRE(cubic_result.section.sup_norm < 1e-9);
    REQUIRE(cubic_result.iterations <= 2);
    // Grid edges beyond the steady states always clamp under the backward
    // march (those points flow outward in reverse time); the flat fixed point
    // is unaffected because the forcing vanishes identically.

    const ManifoldResult linear_result = solve_manifold(op, dec, linear_reaction(), cfg);
    REQUIRE(linear_result.section.sup_norm < 1e-9);
}

TEST_CASE("graph transform fixed point is nontrivial under a variable potential") {
    const IntervalMesh mesh = IntervalMesh::uniform(0.0, 1.0, 64);
    const CoefficientField field = CoefficientField::sample(
        mesh, [](double) { return 16.0; },
        [](double x) { return 0.25 * std::sin(2.0 * M_PI * x); }, 0.5, 0.25);
    const DiscreteOperator op = assemble(mesh, field);
    const SpectralDecomposition dec = eigensolve(op, op.dim());

    ManifoldConfig cfg;
    cfg.v_lo = -1.2;
    cfg.v_hi = 1.2;
    cfg.n_grid = 65;
    cfg.k_modes = 8;
    const ManifoldResult result = solve_manifold(op, dec, cubic_reaction(), cfg);

    REQUIRE(result.iterations < 100);
    REQUIRE(result.contraction < 1.0);
    REQUIRE(result.section.sup_norm > 1e-6);
    REQUIRE(result.section.sup_norm < 0.5);
    REQUIRE(result.section.lipschitz < result.section.lipschitz_cap);

    // The perturbed steady states lie on the invariant graph: their fast
    // coefficients agree with the section sampled at their slow coordinate.
    const Reaction f = cubic_reaction();
    const std::vector<LimitEquilibrium> seeds = limit_equilibria(f, 0.5, -3.0, 3.0);
    const PerturbedSet set = perturbed_equilibria(op, dec, f, seeds);
    for (const PerturbedEquilibrium& item : set.items) {
        const Vector c = dec.eigenvectors.transpose() * (op.mass * item.eq.value);
        const Vector on_section = detail::section_coords(result.section, c[0]);
        Vector diff = c.segment(1, cfg.k_modes - 1) - on_section;
        REQUIRE(detail::fast_energy_norm(dec, diff) < 5e-3);
    }
}

TEST_CASE("graph transform reports clamping and escape consistently") {
    const DiscreteOperator op = constant_operator(32, 1.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const Reaction f = linear_reaction();
    // A tiny window around a repelling (backward) coordinate forces the
    // backward march out of range.
    const GraphSection tiny = zero_section(dec, 4, -0.02, 0.02, 9);
    const double horizon = 40.0;

    TransformStats stats;
    REQUIRE_NOTHROW(graph_transform(op, dec, f, tiny, horizon, 1e-3, &stats));
    REQUIRE(stats.clamped);

    REQUIRE_THROWS_AS(graph_transform(op, dec, f, tiny, horizon, 1e-3, nullptr, false),
                      ConvergenceError);

    // Horizon too short for the fast tail.
    REQUIRE_THROWS_AS(graph_transform(op, dec, f, tiny, 0.5, 1e-3), DomainError);
    REQUIRE_THROWS_AS(graph_transform(op, dec, f, tiny, horizon, -1.0), DomainError);
}

TEST_CASE("section constructors and distances validate their inputs") {
    const DiscreteOperator op = constant_operator(16, 1.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, 6);
    REQUIRE_THROWS_AS(zero_section(dec, 1, -1.0, 1.0, 9), DomainError);
    REQUIRE_THROWS_AS(zero_section(dec, 7, -1.0, 1.0, 9), DomainError);
    REQUIRE_THROWS_AS(zero_section(dec, 4, -1.0, 1.0, 2), DomainError);
    REQUIRE_THROWS_AS(zero_section(dec, 4, 1.0, -1.0, 9), DomainError);

    const GraphSection a = zero_section(dec, 4, -1.0, 1.0, 9);
    const GraphSection b = zero_section(dec, 5, -1.0, 1.0, 9);
    REQUIRE_THROWS_AS(section_distance(dec, a, b), DimensionError);
    REQUIRE(section_distance(dec, a, a) == 0.0);
}

TEST_CASE("off-section deviation decays at the fast spectral rate") {
    const DiscreteOperator op = constant_operator(48, 1.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const Reaction f = cubic_reaction();
    const GraphSection flat = zero_section(dec, 8, -1.2, 1.2, 65);

    Vector u0 = Vector::Constant(op.dim(), std::sqrt(0.5));
    u0 += 0.3 * dec.eigenvectors.col(1);
    const std::vector<AttractionResult> report =
        exponential_attraction_check(op, dec, f, flat, {u0});
    REQUIRE(report.size() == 1);
    const AttractionResult& res = report.front();
    REQUIRE(res.fit_ok);
    REQUIRE(res.monotone_ok);
    REQUIRE(res.n_used >= 5);
    const double lambda2 = dec.eigenvalues[1];
    REQUIRE(res.rate >= 0.5 * lambda2);
    REQUIRE(res.rate == Catch::Approx(lambda2).epsilon(0.3));
    REQUIRE(res.max_deviation > 0.1);

    REQUIRE_THROWS_AS(exponential_attraction_check(op, dec, f, flat, {Vector::Zero(3)}),
                      DimensionError);
    REQUIRE_THROWS_AS(exponential_attraction_check(op, dec, f, flat, {u0}, 1e-3, 0.5, 0.2),
                      DomainError);
}

TEST_CASE("reduced flow matches the scalar logistic closed form") {
    const DiscreteOperator op = constant_operator(32, 1.0, 0.5);
    const SpectralDecomposition dec = eigensolve(op, op.dim());
    const GraphSection flat = zero_section(dec, 6, -1.2, 1.2, 33);

    // dv/dt = a v - v^3 with a = 1/2: v(t)^2 = a w0 e^{2at} / (a + w0 (e^{2at} - 1)).
    const double v0 = 0.1, a = 0.5, t_end = 2.0;
    const auto path = reduced_trajectory(op, dec, cubic_reaction(), flat, v0, 1e-3, t_end);
    REQUIRE(path.front().second == v0);
    REQUIRE(path.back().first == Catch::Approx(t_end).margin(1e-12));
    const double w0 = v0 * v0;
    const double grow = std::exp(2.0 * a * t_end);
    const double expected = std::sqrt(a * w0 * grow / (a + w0 * (grow - 1.0)));
    REQUIRE(std::abs(path.back().second) == Catch::Approx(expected).margin(1e-8));
}
