#include <cmath>
#include <complex>
#include <vector>

#include "ascal/errors.hpp"
#include "ascal/field.hpp"
#include "ascal/grid.hpp"
#include "doctest.h"

using namespace ascal;

namespace {
const double kPi = 3.14159265358979323846;

Grid small_box(std::size_t n = 16) { return make_grid(2, {n}, {2.0 * kPi}); }

ScalarField sine_along(const Grid& g, int axis) {
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1) {
            const std::size_t idx[2] = {i0, i1};
            v[flat_index(g, i0, i1)] = std::sin(g.coordinate(axis, idx[axis]));
        }
    return ScalarField::from_values(g, std::move(v));
}
}  // namespace

TEST_CASE("make_grid broadcasts single entries and centers the box") {
    Grid g = make_grid(2, {32}, {4.0});
    CHECK(g.points[0] == 32);
    CHECK(g.points[1] == 32);
    CHECK(g.side[0] == doctest::Approx(4.0));
    CHECK(g.side[1] == doctest::Approx(4.0));
    // default origin: x = 0 sits exactly on grid point N/2
    CHECK(g.origin[0] == doctest::Approx(2.0));
    CHECK(g.coordinate(0, 16) == doctest::Approx(0.0));
    CHECK(g.coordinate(0, 0) == doctest::Approx(-2.0));
    CHECK(g.spacing(0) == doctest::Approx(0.125));
}

TEST_CASE("make_grid zeroes the unused third axis") {
    Grid g = make_grid(2, {16}, {1.0});
    CHECK(g.points[2] == 0);
    CHECK(g.side[2] == 0.0);
    CHECK(g.total_points() == 256);
    CHECK(g.volume() == doctest::Approx(1.0));
    CHECK(g.cell_volume() == doctest::Approx(1.0 / 256.0));
}

TEST_CASE("make_grid rejects sizes that are not powers of two at least 8") {
    CHECK_THROWS_AS(make_grid(2, {48}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(2, {4}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(2, {0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(4, {16}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(2, {16, 16, 16}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(2, {16}, {-1.0}), ValidationError);
}

TEST_CASE("signed modes split at the Nyquist index") {
    Grid g = small_box();
    CHECK(g.signed_mode(0, 0) == 0);
    CHECK(g.signed_mode(0, 7) == 7);
    CHECK(g.signed_mode(0, 8) == 8);    // Nyquist keeps the positive alias
    CHECK(g.signed_mode(0, 9) == -7);
    CHECK(g.signed_mode(0, 15) == -1);
    // side 2 pi makes wavenumber = signed mode
    CHECK(g.wavenumber(0, 3) == doctest::Approx(3.0));
    CHECK(g.wavenumber(0, 15) == doctest::Approx(-1.0));
}

TEST_CASE("flat_index is row-major in two and three dimensions") {
    Grid g2 = make_grid(2, {8, 16}, {1.0, 2.0});
    CHECK(flat_index(g2, 0, 0) == 0);
    CHECK(flat_index(g2, 1, 0) == 16);
    CHECK(flat_index(g2, 2, 5) == 37);

    Grid g3 = make_grid(3, {8}, {1.0});
    CHECK(flat_index(g3, 0, 0, 0) == 0);
    CHECK(flat_index(g3, 0, 0, 3) == 3);
    CHECK(flat_index(g3, 0, 1, 0) == 8);
    CHECK(flat_index(g3, 1, 0, 0) == 64);
}

TEST_CASE("reflection through the origin is an index involution") {
    Grid g = make_grid(2, {16, 32}, {2.0, 2.0});
    for (std::size_t flat : {std::size_t{0}, std::size_t{17}, std::size_t{300}}) {
        const std::size_t r = reflected_index(g, flat);
        CHECK(reflected_index(g, r) == flat);
    }
    // index (N/2, N/2) is the coordinate origin: a fixed point
    const std::size_t center = flat_index(g, 8, 16);
    CHECK(reflected_index(g, center) == center);
    // a nonzero point lands where every coordinate is negated
    const std::size_t p = flat_index(g, 11, 5);
    const std::size_t q = reflected_index(g, p);
    CHECK(q == flat_index(g, 16 - 11, 32 - 5));
}

TEST_CASE("dealias limit and the dealiased max wavenumber agree") {
    Grid g = small_box();  // N = 16, limit = 5
    CHECK(dealias_limit(g, 0) == 5);
    const double expect = std::sqrt(2.0) * 5.0;
    CHECK(max_wavenumber(g, true) == doctest::Approx(expect));
    CHECK(max_wavenumber(g, false) == doctest::Approx(std::sqrt(2.0) * 8.0));
}

TEST_CASE("field round trip between values and coefficients is tight") {
    Grid g = small_box(32);
    ScalarField f = sine_along(g, 0);
    const auto coeffs = f.coefficients();  // copy before invalidation
    ScalarField back = ScalarField::from_coefficients(g, coeffs);
    const auto& v0 = f.values();
    const auto& v1 = back.values();
    double worst = 0.0;
    for (std::size_t i = 0; i < v0.size(); ++i)
        worst = std::max(worst, std::abs(v0[i] - v1[i]));
    CHECK(worst < 1e-13);
}

TEST_CASE("sine occupies exactly one conjugate mode pair") {
    Grid g = small_box(32);
    ScalarField f = sine_along(g, 1);
    const auto& c = f.coefficients();
    double off_mode_mass = 0.0;
    std::complex<double> c_plus, c_minus;
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.points[1]; ++i1) {
            const std::complex<double> z = c[flat_index(g, i0, i1)];
            if (i0 == 0 && i1 == 1)
                c_plus = z;
            else if (i0 == 0 && i1 == g.points[1] - 1)
                c_minus = z;
            else
                off_mode_mass = std::max(off_mode_mass, std::abs(z));
        }
    // sin = (e^{ix} - e^{-ix}) / 2i, and the centered box shifts mode 1 by
    // e^{-i pi}: the stored pair is (+i/2, -i/2)
    CHECK(std::abs(c_plus - std::complex<double>(0.0, 0.5)) < 1e-13);
    CHECK(std::abs(c_minus - std::complex<double>(0.0, -0.5)) < 1e-13);
    CHECK(off_mode_mass < 1e-13);
}

TEST_CASE("mean reads the zero mode") {
    Grid g = small_box();
    std::vector<double> v(g.total_points(), 0.25);
    v[3] += 1.0;  // mean shifts by 1/N^2
    ScalarField f = ScalarField::from_values(g, std::move(v));
    CHECK(f.mean() == doctest::Approx(0.25 + 1.0 / 256.0).epsilon(1e-12));
}

TEST_CASE("touching values invalidates cached coefficients") {
    Grid g = small_box();
    ScalarField f = sine_along(g, 0);
    (void)f.coefficients();
    CHECK(f.has_coefficients());
    f.mutable_values()[0] += 1.0;
    CHECK(!f.has_coefficients());
    CHECK(f.values()[0] == doctest::Approx(std::sin(-kPi) + 1.0));
}

TEST_CASE("broken Hermitian symmetry is rejected at synthesis") {
    Grid g = small_box();
    std::vector<std::complex<double>> c(g.total_points(), {0.0, 0.0});
    c[flat_index(g, 0, 1)] = {1.0, 0.0};  // no conjugate partner
    ScalarField f = ScalarField::from_coefficients(g, std::move(c));
    CHECK(hermitian_defect(g, f.coefficients()) > 0.5);
    CHECK_THROWS_AS((void)f.values(), SymmetryViolationError);
}

TEST_CASE("hermitian defect of a genuine real field is tiny") {
    Grid g = small_box(32);
    ScalarField f = sine_along(g, 0);
    CHECK(hermitian_defect(g, f.coefficients()) < 1e-14);
}

TEST_CASE("three dimensional transforms round trip too") {
    Grid g = make_grid(3, {8}, {2.0 * kPi});
    std::vector<double> v(g.total_points());
    for (std::size_t i0 = 0; i0 < 8; ++i0)
        for (std::size_t i1 = 0; i1 < 8; ++i1)
            for (std::size_t i2 = 0; i2 < 8; ++i2)
                v[flat_index(g, i0, i1, i2)] = std::cos(g.coordinate(0, i0)) +
                                               0.5 * std::sin(g.coordinate(2, i2));
    ScalarField f = ScalarField::from_values(g, v);
    const auto coeffs = f.coefficients();
    ScalarField back = ScalarField::from_coefficients(g, coeffs);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        worst = std::max(worst, std::abs(back.values()[i] - v[i]));
    CHECK(worst < 1e-13);
    CHECK(f.mean() == doctest::Approx(0.0).epsilon(1e-12));
}
