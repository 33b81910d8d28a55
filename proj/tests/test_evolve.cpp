#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/errors.hpp"
#include "ascal/evolve.hpp"
#include "ascal/field.hpp"
#include "ascal/grid.hpp"
#include "ascal/spectral_ops.hpp"
#include "doctest.h"

using namespace ascal;

namespace {
const double kPi = 3.14159265358979323846;

Grid box(std::size_t n = 32) { return make_grid(2, {n}, {2.0 * kPi}); }

// Two non-parallel modes so the self-induced transport is genuinely alive.
ScalarField two_mode(const Grid& g, double amp = 1.0) {
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1)
            v[flat_index(g, i0, i1)] =
                amp * (std::sin(g.coordinate(0, i0)) + 0.7 * std::cos(2.0 * g.coordinate(1, i1)));
    return ScalarField::from_values(g, std::move(v));
}

double sup_gap(const ScalarField& a, const ScalarField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    return worst;
}

ScalarField march(const ScalarField& theta0, const SolverConfig& cfg, const CouplingSpec& spec,
                  double T, double dt) {
    SolverConfig c = cfg;
    c.dt = dt;
    ScalarField state = theta0;
    double t = 0.0;
    const long n = std::lround(T / dt);
    for (long i = 0; i < n; ++i, t += dt) state = step(state, t, c, spec);
    return state;
}
}  // namespace

TEST_CASE("integrator names round trip") {
    CHECK(integrator_from_name("etdrk1") == Integrator::etdrk1);
    CHECK(integrator_from_name("etdrk2") == Integrator::etdrk2);
    CHECK(integrator_name(Integrator::etdrk2) == std::string("etdrk2"));
    CHECK_THROWS_AS(integrator_from_name("rk4"), ValidationError);
}

TEST_CASE("diagnostics exponent resolves to the window midpoint with fallbacks") {
    SolverConfig cfg;
    CHECK(resolve_diagnostics_q(cfg, 2, 1.0) == doctest::Approx(4.0));
    cfg.diagnostics_q = 3.5;
    CHECK(resolve_diagnostics_q(cfg, 2, 1.0) == doctest::Approx(3.5));
    cfg.diagnostics_q = 0.0;
    // Empty window but a critical exponent still exists.
    CHECK(resolve_diagnostics_q(cfg, 2, 1.9) == doctest::Approx(20.0));
    // No window and no critical exponent either.
    CHECK(resolve_diagnostics_q(cfg, 2, 2.5) == doctest::Approx(4.0));
}

TEST_CASE("solver validation rejects out-of-range settings") {
    auto broken = [](auto&& mutate) {
        SolverConfig cfg;
        mutate(cfg);
        return cfg;
    };
    CHECK_NOTHROW(validate_solver(SolverConfig{}));
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.kappa = -1.0; })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.gamma = 0.0; })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.dt = 0.0; })), ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.t_end = -1.0; })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) {
                        c.dt = 1.0;
                        c.t_end = 0.5;
                    })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.snapshot_every = -1; })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.blowup_factor = 1.0; })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.stability_constant = 0.0; })),
                    ValidationError);
    CHECK_THROWS_AS(validate_solver(broken([](SolverConfig& c) { c.diagnostics_q = 0.5; })),
                    ValidationError);
}

TEST_CASE("a step under the zero coupling is exactly the dissipative semigroup") {
    Grid g = box();
    ScalarField f = two_mode(g);
    SolverConfig cfg;
    cfg.kappa = 0.7;
    cfg.gamma = 0.8;
    cfg.dt = 0.01;
    const ScalarField stepped = step(f, 0.0, cfg, custom_preset("zero", 2));
    const ScalarField exact = apply_semigroup(f, cfg.kappa, cfg.gamma, cfg.dt);
    CHECK(sup_gap(stepped, exact) < 1e-13);
}

TEST_CASE("transport term is mean-free and vanishes for a lone plane wave") {
    Grid g = box();
    const CouplingSpec spec = sqg_spec();
    ScalarField alive = two_mode(g);
    ScalarField w = nonlinear_term(alive, spec, true);
    CHECK(std::abs(w.coefficients()[0]) == 0.0);  // forced exactly
    CHECK(lq_norm(w, std::numeric_limits<double>::infinity()) > 1e-3);

    // A single plane wave induces a velocity parallel to its level sets.
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1)
            v[flat_index(g, i0, i1)] = std::sin(g.coordinate(0, i0));
    ScalarField wave = ScalarField::from_values(g, std::move(v));
    CHECK(lq_norm(nonlinear_term(wave, spec, true),
                  std::numeric_limits<double>::infinity()) < 1e-13);
}

TEST_CASE("step families converge at their design orders under dt halving") {
    Grid g = box();
    ScalarField f = two_mode(g);
    const CouplingSpec spec = sqg_spec();
    SolverConfig cfg;
    cfg.t_end = 1.0;  // only dt matters for march()

    const double T = 0.02;
    auto ratio_for = [&](Integrator which) {
        cfg.integrator = which;
        const ScalarField a = march(f, cfg, spec, T, 2e-3);
        const ScalarField b = march(f, cfg, spec, T, 1e-3);
        const ScalarField c = march(f, cfg, spec, T, 5e-4);
        return sup_gap(a, b) / sup_gap(b, c);
    };
    CHECK(ratio_for(Integrator::etdrk2) > 3.3);   // second order: ~4
    const double first = ratio_for(Integrator::etdrk1);
    CHECK(first > 1.6);
    CHECK(first < 2.6);  // first order: ~2
}

TEST_CASE("evolution conserves the box mean exactly") {
    Grid g = box();
    std::vector<double> v = two_mode(g).values();
    for (double& x : v) x += 0.3;
    ScalarField f = ScalarField::from_values(g, std::move(v));
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_end = 0.05;
    cfg.snapshot_every = 1;
    Trajectory traj = evolve(f, cfg, sqg_spec());
    for (const auto& snap : traj.snapshots)
        CHECK(snap.mean() == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("snapshot and diagnostics cadences include both ends") {
    Grid g = box();
    ScalarField f = two_mode(g, 0.1);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.05;
    cfg.snapshot_every = 2;
    cfg.diagnostics_every = 1;
    Trajectory traj = evolve(f, cfg, sqg_spec());

    REQUIRE(traj.times.size() == 4);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.times[1] == doctest::Approx(0.02));
    CHECK(traj.times[2] == doctest::Approx(0.04));
    CHECK(traj.times[3] == doctest::Approx(0.05));
    CHECK(traj.snapshots.size() == 4);
    // One diagnostics row per accepted step plus the two ends, final step
    // recorded once.
    CHECK(traj.diagnostics.size() == 6);
    CHECK(traj.diagnostics.back().t == doctest::Approx(0.05));

    // snapshot_every = 0 keeps only the endpoints.
    cfg.snapshot_every = 0;
    cfg.diagnostics_every = 0;
    Trajectory ends = evolve(f, cfg, sqg_spec());
    CHECK(ends.times.size() == 2);
    CHECK(ends.diagnostics.size() == 2);
}

TEST_CASE("an impossible stability guard surfaces as blow-up with the partial run") {
    Grid g = box();
    ScalarField f = two_mode(g);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.1;
    cfg.stability_constant = 1e-30;  // rejects every step until dt underflows the floor
    try {
        evolve(f, cfg, sqg_spec());
        FAIL("expected EvolveBlowup");
    } catch (const EvolveBlowup& e) {
        CHECK(e.time == 0.0);
        REQUIRE(e.partial != nullptr);
        REQUIRE(e.partial->times.size() == 1);
        CHECK(e.partial->times[0] == 0.0);
    }
}

TEST_CASE("a single oversized step is rejected rather than taken") {
    Grid g = box();
    ScalarField f = two_mode(g);
    SolverConfig cfg;
    cfg.dt = 10.0;
    cfg.t_end = 100.0;
    CHECK_THROWS_AS(step(f, 0.0, cfg, sqg_spec()), StepRejection);
}

TEST_CASE("bilinear duhamel term matches the closed form on constant paths") {
    Grid g = box();
    ScalarField f = two_mode(g);
    const CouplingSpec spec = sqg_spec();
    SolverConfig cfg;
    cfg.kappa = 0.9;
    cfg.gamma = 1.0;

    const double t = 0.3;
    const int M = 16;
    const std::vector<ScalarField> path(static_cast<std::size_t>(M), f);
    const ScalarField got = duhamel_bilinear(path, path, t, cfg, spec);

    // Constant integrand: per mode the quadrature must produce
    // (1 - e^{-mu t}) / mu times the transport coefficient exactly.
    const auto& w = nonlinear_term(f, spec, cfg.dealias).coefficients();
    const auto& gc = got.coefficients();
    double worst = 0.0;
    double scale = 0.0;
    std::size_t idx = 0;
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1, ++idx) {
            const double k0 = g.wavenumber(0, i0);
            const double k1 = g.wavenumber(1, i1);
            const double mu = cfg.kappa * std::pow(k0 * k0 + k1 * k1, cfg.gamma);
            const std::complex<double> expect =
                mu > 0.0 ? w[idx] * (-std::expm1(-mu * t)) / mu : std::complex<double>(0.0);
            worst = std::max(worst, std::abs(gc[idx] - expect));
            scale = std::max(scale, std::abs(expect));
        }
    CHECK(worst < 1e-12 * scale);

    CHECK_THROWS_AS(duhamel_bilinear(path, {f, f}, t, cfg, spec), ConfigError);
    const std::vector<ScalarField> short_path(7, f);
    CHECK_THROWS_AS(duhamel_bilinear(short_path, short_path, t, cfg, spec), ConfigError);
    CHECK_THROWS_AS(duhamel_bilinear(path, path, -1.0, cfg, spec), DomainError);
}

TEST_CASE("duhamel path prefixes agree with one-shot evaluations") {
    Grid g = box();
    const CouplingSpec spec = sqg_spec();
    SolverConfig cfg;

    const double t = 0.3;
    const int M = 16;
    std::vector<ScalarField> path;
    for (int i = 0; i < M; ++i)
        path.push_back(apply_semigroup(two_mode(g), cfg.kappa, cfg.gamma,
                                       t * i / static_cast<double>(M - 1)));
    const auto prefixes = duhamel_bilinear_path(path, path, t, cfg, spec);
    REQUIRE(prefixes.size() == static_cast<std::size_t>(M));
    CHECK(lq_norm(prefixes[0], std::numeric_limits<double>::infinity()) == 0.0);

    const int cut = 10;  // same node spacing, so the prefix must coincide
    const std::vector<ScalarField> head(path.begin(), path.begin() + cut + 1);
    const double t_cut = t * cut / static_cast<double>(M - 1);
    CHECK(sup_gap(prefixes[cut], duhamel_bilinear(head, head, t_cut, cfg, spec)) < 1e-13);
}

TEST_CASE("picard iterates contract and their first gap is exactly quadratic in amplitude") {
    Grid g = box();
    const CouplingSpec spec = sqg_spec();
    SolverConfig cfg;
    cfg.dt = 5e-3;

    PicardRun run = picard_iterate(two_mode(g, 0.05), 0.3, 5, 12, 4.0, cfg, spec);
    CHECK(run.q == 4.0);
    CHECK(run.eta == doctest::Approx(0.25));
    CHECK(run.iterates.size() == 5);
    REQUIRE(run.kato_diffs.size() == 4);
    REQUIRE(run.ratios.size() == 3);
    for (double r : run.ratios) CHECK(r < 0.7);
    CHECK(run.evolve_discrepancy < 5e-3);

    // B is exactly bilinear, so doubling the datum quadruples the first gap.
    PicardRun twice = picard_iterate(two_mode(g, 0.1), 0.3, 3, 12, 4.0, cfg, spec);
    CHECK(twice.kato_diffs[0] ==
          doctest::Approx(4.0 * run.kato_diffs[0]).epsilon(1e-9));

    CHECK_THROWS_AS(picard_iterate(two_mode(g), 0.3, 2, 12, 4.0, cfg, spec), ValidationError);
    CHECK_THROWS_AS(picard_iterate(two_mode(g), 0.3, 5, 7, 4.0, cfg, spec), ValidationError);
    CHECK_THROWS_AS(picard_iterate(two_mode(g), 0.0, 5, 12, 4.0, cfg, spec), ValidationError);
    CHECK_THROWS_AS(picard_iterate(two_mode(g), 0.3, 5, 12, 0.5, cfg, spec), DomainError);
}

TEST_CASE("refining the picard node set converges at second order") {
    Grid g = box();
    const CouplingSpec spec = sqg_spec();
    SolverConfig cfg;
    cfg.dt = 5e-3;
    const ScalarField f = two_mode(g, 0.05);

    auto gap = [&](int M) { return picard_iterate(f, 0.3, 3, M, 4.0, cfg, spec).kato_diffs[0]; };
    const double d1 = gap(12);
    const double d2 = gap(24);
    const double d3 = gap(48);
    const double ratio = (d1 - d2) / (d2 - d3);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}
