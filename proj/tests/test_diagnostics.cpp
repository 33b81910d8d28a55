#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/diagnostics.hpp"
#include "ascal/errors.hpp"
#include "ascal/field.hpp"
#include "ascal/grid.hpp"
#include "doctest.h"

using namespace ascal;

namespace {
const double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

Grid box(std::size_t n = 64) { return make_grid(2, {n}, {2.0 * kPi}); }

ScalarField sin_of(const Grid& g, int axis, double freq = 1.0) {
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1) {
            const std::size_t idx[2] = {i0, i1};
            v[flat_index(g, i0, i1)] = std::sin(freq * g.coordinate(axis, idx[axis]));
        }
    return ScalarField::from_values(g, std::move(v));
}

ScalarField radial_bump(const Grid& g, double width) {
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1) {
            const double x = g.coordinate(0, i0);
            const double y = g.coordinate(1, i1);
            v[flat_index(g, i0, i1)] = std::exp(-(x * x + y * y) / (2.0 * width * width));
        }
    return ScalarField::from_values(g, std::move(v));
}
}  // namespace

TEST_CASE("lebesgue norms of a sine match closed forms") {
    Grid g = box();
    ScalarField f = sin_of(g, 0);

    // Smooth even powers are integrated exactly by the uniform grid sum.
    CHECK(lq_norm(f, 2.0) == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(lq_norm(f, 4.0) ==
          doctest::Approx(std::pow(1.5 * kPi * kPi, 0.25)).epsilon(1e-12));
    CHECK(lq_norm(f, kInf) == doctest::Approx(1.0).epsilon(1e-12));
    // |sin| has kinks at the zeros, so the quadrature is only second order.
    CHECK(lq_norm(f, 1.0) == doctest::Approx(8.0 * kPi).epsilon(1e-3));

    CHECK_THROWS_AS(lq_norm(f, 0.5), DomainError);
    CHECK_THROWS_AS(lq_norm(f, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("sobolev norm scales a single mode by its wavenumber power") {
    Grid g = box();
    ScalarField f = sin_of(g, 0, 2.0);
    const double base = kPi * std::sqrt(2.0);
    CHECK(sobolev_norm(f, 0.0, 2.0) == doctest::Approx(base).epsilon(1e-12));
    CHECK(sobolev_norm(f, 1.0, 2.0) == doctest::Approx(2.0 * base).epsilon(1e-12));
    CHECK(sobolev_norm(f, 1.5, 2.0) ==
          doctest::Approx(std::pow(2.0, 1.5) * base).epsilon(1e-12));
    CHECK_THROWS_AS(sobolev_norm(f, 1.0, 0.0), DomainError);
}

TEST_CASE("time weights follow the stated exponent formulas") {
    KatoWeights w = kato_weights(2, 1.0, 1.0, kInf);
    CHECK(w.eta == doctest::Approx(0.5));
    CHECK(w.eta_tilde == doctest::Approx(0.5));

    w = kato_weights(2, 1.0, 1.0, 4.0);
    CHECK(w.eta == doctest::Approx(0.25));
    CHECK(w.eta_tilde == doctest::Approx(0.25));

    w = kato_weights(2, 1.0, 1.0, 2.0);
    CHECK(w.eta == doctest::Approx(0.0));

    // A rougher coupling shifts only the tilde weight.
    w = kato_weights(2, 1.0, 1.2, 4.0);
    CHECK(w.eta == doctest::Approx(0.25));
    CHECK(w.eta_tilde == doctest::Approx(0.15));

    CHECK_THROWS_AS(kato_weights(4, 1.0, 1.0, 2.0), ValidationError);
    CHECK_THROWS_AS(kato_weights(2, 0.0, 1.0, 2.0), ValidationError);
    CHECK_THROWS_AS(kato_weights(2, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("critical exponent is n over the dissipation gap") {
    CHECK(critical_q(2, 1.0, 1.0) == doctest::Approx(2.0));
    CHECK(critical_q(2, 0.9, 1.2) == doctest::Approx(10.0 / 3.0));
    CHECK(critical_q(3, 1.0, 1.0) == doctest::Approx(3.0));
    // beta at or above 2 gamma leaves no Lebesgue exponent, as does a gap
    // wider than n.
    CHECK(std::isnan(critical_q(2, 0.5, 1.2)));
    CHECK(std::isnan(critical_q(2, 1.5, 0.5)));
}

TEST_CASE("picard exponent window reproduces hand-computed intervals") {
    QWindow w = picard_q_window(2, 1.0, 1.0);
    CHECK(w.nonempty);
    CHECK(w.inv_q_lower == doctest::Approx(0.0));
    CHECK(w.inv_q_upper == doctest::Approx(0.5));
    CHECK(w.q_lower == doctest::Approx(2.0));
    CHECK(w.q_upper == kInf);
    CHECK(w.midpoint_q == doctest::Approx(4.0));

    w = picard_q_window(2, 0.9, 1.2);
    CHECK(w.nonempty);
    CHECK(w.inv_q_lower == doctest::Approx(0.1));
    CHECK(w.inv_q_upper == doctest::Approx(0.3));
    CHECK(w.midpoint_q == doctest::Approx(5.0));

    // beta close to 2 gamma squeezes the interval shut.
    w = picard_q_window(2, 1.0, 1.9);
    CHECK_FALSE(w.nonempty);

    CHECK_THROWS_AS(picard_q_window(5, 1.0, 1.0), ValidationError);
}

TEST_CASE("least squares recovers an exact line and rejects degenerate input") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> ys{1.0, 3.0, 5.0, 7.0};
    auto [slope, intercept] = least_squares_line(xs, ys);
    CHECK(slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(intercept == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(least_squares_line({1.0}, {2.0}), ValidationError);
    CHECK_THROWS_AS(least_squares_line({1.0, 2.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(least_squares_line({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), ValidationError);
}

TEST_CASE("decay fit recovers an exact power law and judges predictions") {
    std::vector<double> times;
    std::vector<double> values;
    for (int i = 0; i < 12; ++i) {
        const double t = 0.01 * std::pow(100.0, i / 11.0);  // log-spaced in [0.01, 1]
        times.push_back(t);
        values.push_back(3.0 * std::pow(t, -0.7));
    }

    DecayFit fit = fit_decay(times, values, 0.005, 1.5, -0.7);
    CHECK(fit.points_used == 12);
    CHECK(fit.slope == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.residual < 1e-12);
    CHECK(fit.verdict == "ok");

    CHECK(fit_decay(times, values, 0.005, 1.5, -1.4).verdict == "mismatch");
    CHECK(fit_decay(times, values, 0.005, 1.5).verdict == "unchecked");

    // Window handling: too few points, inverted bounds, non-positive data.
    CHECK_THROWS_AS(fit_decay(times, values, 0.5, 0.6, -0.7), WindowError);
    CHECK_THROWS_AS(fit_decay(times, values, 1.0, 0.5, -0.7), WindowError);
    std::vector<double> bad = values;
    bad[5] = -1.0;
    CHECK_THROWS_AS(fit_decay(times, bad, 0.005, 1.5, -0.7), DomainError);
    CHECK_THROWS_AS(fit_decay(times, {1.0}, 0.005, 1.5, -0.7), ValidationError);
}

TEST_CASE("monotonicity check reports the indices that rise") {
    const std::vector<double> v{1.0, 0.9, 0.95, 0.8};
    const auto strict = check_monotone(v, 1e-12);
    REQUIRE(strict.size() == 1);
    CHECK(strict[0] == 2);
    // The same bump is inside a 10% relative allowance.
    CHECK(check_monotone(v, 0.1).empty());
    CHECK(check_monotone({1.0, 2.0}, 1e-12) == std::vector<std::size_t>{1});
}

TEST_CASE("symmetry defects separate odd, even and radial data") {
    Grid g = box();
    ScalarField s = sin_of(g, 0);

    CHECK(symmetry_defect(s, SymmetryKind::odd) < 1e-13);
    // sin checked as even: worst |sin(x) - sin(-x)| / max = 2.
    CHECK(symmetry_defect(s, SymmetryKind::even) == doctest::Approx(2.0).epsilon(1e-12));

    std::vector<double> cosv(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1)
            cosv[flat_index(g, i0, i1)] = std::cos(g.coordinate(0, i0));
    ScalarField c = ScalarField::from_values(g, std::move(cosv));
    CHECK(symmetry_defect(c, SymmetryKind::even) < 1e-13);
    CHECK(symmetry_defect(c, SymmetryKind::odd) == doctest::Approx(2.0).epsilon(1e-12));

    // Radial scatter: a centered bump only carries the binning floor, a plane
    // wave varies across every annulus.
    ScalarField b = radial_bump(g, g.side[0] / 10.0);
    CHECK(symmetry_defect(b, SymmetryKind::radial) < 0.1);
    CHECK(symmetry_defect(s, SymmetryKind::radial) > 0.3);
    CHECK(symmetry_defect(b, SymmetryKind::radial) <
          0.2 * symmetry_defect(s, SymmetryKind::radial));
}

TEST_CASE("symbol divergence radiality separates radial from anisotropic couplings") {
    const auto samples = dyadic_shell_samples(2);
    CHECK(divergence_symbol_radiality(sqg_spec(), 2, samples) < 1e-6);
    CHECK(divergence_symbol_radiality(modified_sqg_spec(1.3), 2, samples) < 1e-6);
    CHECK(divergence_symbol_radiality(custom_preset("even_aniso", 2), 2, samples) > 1e-3);

    CHECK_THROWS_AS(divergence_symbol_radiality(sqg_spec(), 2, {}), ValidationError);
    std::vector<std::array<double, kMaxDims>> zero{{0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(divergence_symbol_radiality(sqg_spec(), 2, zero), DomainError);
}

TEST_CASE("diagnostics record assembles norms and weights consistently") {
    Grid g = box();
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1)
            v[flat_index(g, i0, i1)] = std::sin(g.coordinate(0, i0)) + 0.25;
    ScalarField f = ScalarField::from_values(g, std::move(v));

    const CouplingSpec spec = sqg_spec();
    VelocityOperator op(g, spec);
    const double t = 0.5;
    DiagnosticsRecord rec = compute_diagnostics(f, t, op, spec, 1.0, 4.0);

    CHECK(rec.t == t);
    CHECK(rec.mean == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rec.l1 == doctest::Approx(lq_norm(f, 1.0)).epsilon(1e-14));
    CHECK(rec.l2 == doctest::Approx(lq_norm(f, 2.0)).epsilon(1e-14));
    CHECK(rec.linf == doctest::Approx(lq_norm(f, kInf)).epsilon(1e-14));
    // sqg is critical in L^2 here, and its order-zero Sobolev norm is plain L^4.
    CHECK(rec.lq_critical == doctest::Approx(rec.l2).epsilon(1e-14));
    CHECK(rec.sobolev_q_betam1 == doctest::Approx(lq_norm(f, 4.0)).epsilon(1e-12));
    const double w = std::pow(t, 0.25);
    CHECK(rec.kato_eta == doctest::Approx(w * lq_norm(f, 4.0)).epsilon(1e-12));
    CHECK(rec.kato_eta_tilde == doctest::Approx(rec.kato_eta).epsilon(1e-12));
    CHECK(rec.div_residual < 1e-10);
}
