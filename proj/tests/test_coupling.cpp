#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/errors.hpp"
#include "ascal/field.hpp"
#include "ascal/grid.hpp"
#include "doctest.h"

using namespace ascal;

namespace {
const double kPi = 3.14159265358979323846;

Grid box(std::size_t n = 32) { return make_grid(2, {n}, {2.0 * kPi}); }

ScalarField sin_axis(const Grid& g, int axis) {
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1) {
            const std::size_t idx[2] = {i0, i1};
            v[flat_index(g, i0, i1)] = std::sin(g.coordinate(axis, idx[axis]));
        }
    return ScalarField::from_values(g, std::move(v));
}

ScalarField noise_field(const Grid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(g.total_points());
    double mean = 0.0;
    for (double& x : v) {
        x = u(rng);
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
    return ScalarField::from_values(g, std::move(v));
}

double sup_gap(const ScalarField& a, const ScalarField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    return worst;
}

std::array<double, kMaxDims> xi2(double a, double b) { return {a, b, 0.0}; }
}  // namespace

TEST_CASE("family names round trip and unknown names are rejected") {
    for (CouplingFamily f : {CouplingFamily::sqg, CouplingFamily::modified_sqg,
                             CouplingFamily::log_field, CouplingFamily::log_power,
                             CouplingFamily::loglog_power, CouplingFamily::custom})
        CHECK(family_from_name(family_name(f)) == f);
    CHECK_THROWS_AS(family_from_name("modified"), ValidationError);
}

TEST_CASE("plain transform velocity of sin x2 is (cos x2, 0)") {
    Grid g = box();
    auto u = velocity(sin_axis(g, 1), sqg_spec());
    REQUIRE(u.size() == 2);
    double worst = 0.0;
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1) {
            const double want = std::cos(g.coordinate(1, i1));
            worst = std::max(worst, std::abs(u[0].values()[flat_index(g, i0, i1)] - want));
            worst = std::max(worst, std::abs(u[1].values()[flat_index(g, i0, i1)]));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("vector symbol at a unit frequency matches the perp arrangement") {
    auto sym = evaluate_symbol(sqg_spec(), xi2(1.0, 0.0), 2);
    CHECK(std::abs(sym[0] - std::complex<double>(0.0, 0.0)) < 1e-14);
    CHECK(std::abs(sym[1] - std::complex<double>(0.0, -1.0)) < 1e-14);
    auto sym2 = evaluate_symbol(sqg_spec(), xi2(0.0, 2.0), 2);
    // u_1 = +i xi_2 P / |xi|^2 = i at (0, 2) with P = |xi|
    CHECK(std::abs(sym2[0] - std::complex<double>(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(sym2[1]) < 1e-14);
    // zero frequency maps to zero
    auto zero = evaluate_symbol(sqg_spec(), xi2(0.0, 0.0), 2);
    CHECK(std::abs(zero[0]) == 0.0);
    CHECK(std::abs(zero[1]) == 0.0);
}

TEST_CASE("order-one power family reduces to the plain transform") {
    Grid g = box();
    ScalarField f = noise_field(g, 7);
    auto ua = velocity(f, sqg_spec());
    auto ub = velocity(f, modified_sqg_spec(1.0));
    CHECK(sup_gap(ua[0], ub[0]) < 1e-13);
    CHECK(sup_gap(ua[1], ub[1]) < 1e-13);
    for (double r : {0.5, 1.0, 4.0, 17.0}) {
        const auto a = scalar_symbol(sqg_spec(), 0, xi2(r, 0.3 * r), 2);
        const auto b = scalar_symbol(modified_sqg_spec(1.0), 0, xi2(r, 0.3 * r), 2);
        CHECK(std::abs(a - b) < 1e-13 * std::abs(a));
    }
}

TEST_CASE("declared order carries the slack of the log corrections") {
    CHECK(declared_order(sqg_spec()) == doctest::Approx(1.0));
    CHECK(declared_order(modified_sqg_spec(1.3)) == doctest::Approx(1.3));
    CHECK(declared_order(log_field_spec(0.5)) == doctest::Approx(1.05));
    CHECK(declared_order(log_power_spec(0.8, 0.25)) == doctest::Approx(0.85));
    CHECK(declared_order(log_power_spec(0.8, 0.25, 0.2)) == doctest::Approx(1.0));
    CHECK(declared_order(loglog_power_spec(1.1, 0.3)) == doctest::Approx(1.15));
}

TEST_CASE("perp couplings are divergence free, the broken preset is not") {
    Grid g = box();
    ScalarField f = noise_field(g, 11);
    CHECK(check_divergence_free(velocity(f, sqg_spec())) < 1e-12);
    CHECK(check_divergence_free(velocity(f, modified_sqg_spec(1.4))) < 1e-12);
    CHECK(check_divergence_free(velocity(f, custom_preset("even_aniso", 2))) < 1e-12);
    CHECK(check_divergence_free(velocity(f, custom_preset("div_broken", 2))) > 1e-3);
}

TEST_CASE("validation rejects inconsistent coupling setups") {
    CHECK_THROWS_AS(validate_coupling(sqg_spec(), 3), ValidationError);
    CouplingSpec empty_custom;
    empty_custom.family = CouplingFamily::custom;
    CHECK_THROWS_AS(validate_coupling(empty_custom, 2), ValidationError);
    CouplingSpec bad_matrix = sqg_spec();
    bad_matrix.matrix_a = {1.0, 0.0, 0.0};  // not n x n
    CHECK_THROWS_AS(validate_coupling(bad_matrix, 2), ValidationError);
    CHECK_THROWS_AS(validate_coupling(modified_sqg_spec(-0.5), 2), ValidationError);
    CHECK_THROWS_AS(custom_preset("spiral", 2), ValidationError);
    CHECK_NOTHROW(validate_coupling(custom_preset("zero", 3), 3));
}

TEST_CASE("shear preset has odd symbols, power presets even ones") {
    const CouplingSpec shear = custom_preset("odd_shear", 2);
    const auto at = [&](const CouplingSpec& s, double a, double b) {
        return scalar_symbol(s, 0, xi2(a, b), 2);
    };
    CHECK(std::abs(at(shear, 1.0, 2.0) - std::complex<double>(0.0, 3.0)) < 1e-14);
    CHECK(std::abs(at(shear, -1.0, -2.0) + at(shear, 1.0, 2.0)) < 1e-14);  // odd
    CHECK(std::abs(at(sqg_spec(), -1.5, 2.0) - at(sqg_spec(), 1.5, -2.0)) < 1e-14);  // even
    const CouplingSpec aniso = custom_preset("even_aniso", 2);
    CHECK(std::abs(at(aniso, -1.5, 2.0) - at(aniso, 1.5, -2.0)) < 1e-14);
    // anisotropic: different value on the same circle
    CHECK(std::abs(at(aniso, 2.0, 0.0) - at(aniso, 0.0, 2.0)) > 0.5);
}

TEST_CASE("admissibility window arithmetic on three reference triples") {
    AdmissibilityReport a = check_admissibility(2, 1.0, 1.0);
    CHECK(a.order_lhs == doctest::Approx(1.0));
    CHECK(a.two_gamma == doctest::Approx(2.0));
    CHECK(a.upper_bound == doctest::Approx(8.0 / 3.0));
    CHECK(a.admissible);

    // dissipation exactly at the transport order: excluded
    AdmissibilityReport b = check_admissibility(2, 1.0, 1.5);
    CHECK(b.order_lhs == doctest::Approx(2.0));
    CHECK_FALSE(b.below_dissipation);
    CHECK_FALSE(b.admissible);

    AdmissibilityReport c = check_admissibility(2, 0.9, 1.2);
    CHECK(c.admissible);
    CHECK(c.gamma_lower == doctest::Approx(0.7));
    CHECK(c.gamma_upper == doctest::Approx(1.4));

    // beta below 1 fails the order-one requirement
    AdmissibilityReport d = check_admissibility(2, 0.8, 0.9);
    CHECK_FALSE(d.order_at_least_one);
    CHECK_FALSE(d.admissible);
}

TEST_CASE("symbol order verification flags an understated exponent") {
    const auto samples = dyadic_shell_samples(2);
    const CouplingSpec lp = log_power_spec(0.75, 0.25);

    SymbolOrderReport tight = verify_symbol_order(lp, 2, 0.75, samples, 2);
    CHECK(tight.growth_flag);  // log factor keeps growing over |xi|^{0.75}

    SymbolOrderReport slack = verify_symbol_order(lp, 2, 0.85, samples, 2);
    CHECK_FALSE(slack.growth_flag);  // the declared slack absorbs the log

    SymbolOrderReport plain = verify_symbol_order(sqg_spec(), 2);
    CHECK_FALSE(plain.growth_flag);
    CHECK(plain.shell_radii.size() == 11);
    CHECK(plain.worst_constant[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("dyadic shell samples cover every shell with unit directions") {
    const auto samples = dyadic_shell_samples(2, 0, 4, 6);
    CHECK(samples.size() == 30);
    for (const auto& xi : samples) {
        // Radii sit just above each shell edge (factor 1.01) so that
        // floor(log2 r) bins them predictably.
        const double r = std::hypot(xi[0], xi[1]) / 1.01;
        const double l = std::log2(r);
        CHECK(std::abs(l - std::round(l)) < 1e-9);
        CHECK(r >= 1.0 - 1e-12);
        CHECK(r <= 16.0 + 1e-12);
    }
}

TEST_CASE("velocity operator applies precomputed tables consistently") {
    Grid g = box();
    ScalarField f = noise_field(g, 3);
    VelocityOperator op(g, sqg_spec());
    auto ua = op.apply(f);
    auto ub = velocity(f, sqg_spec());
    CHECK(sup_gap(ua[0], ub[0]) < 1e-14);
    CHECK(sup_gap(ua[1], ub[1]) < 1e-14);
    // linearity
    ScalarField h = noise_field(g, 4);
    std::vector<double> sum(g.total_points());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = f.values()[i] + 2.0 * h.values()[i];
    auto us = op.apply(ScalarField::from_values(g, std::move(sum)));
    auto uh = op.apply(h);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.total_points(); ++i)
        worst = std::max(worst, std::abs(us[0].values()[i] - ua[0].values()[i] -
                                         2.0 * uh[0].values()[i]));
    CHECK(worst < 1e-12);
}
