#include "ascal/field.hpp"

#include <cmath>
#include <string>

#include "ascal/errors.hpp"
#include "ascal/fft.hpp"

namespace ascal {

ScalarField ScalarField::from_values(Grid g, std::vector<double> v) {
    if (v.size() != g.total_points())
        throw ValidationError("value array has " + std::to_string(v.size()) +
                              " entries, grid has " + std::to_string(g.total_points()));
    ScalarField f;
    f.grid_ = g;
    f.values_ = std::move(v);
    f.values_ok_ = true;
    return f;
}

ScalarField ScalarField::from_coefficients(Grid g, std::vector<std::complex<double>> c) {
    if (c.size() != g.total_points())
        throw ValidationError("coefficient array has " + std::to_string(c.size()) +
                              " entries, grid has " + std::to_string(g.total_points()));
    ScalarField f;
    f.grid_ = g;
    f.coeffs_ = std::move(c);
    f.coeffs_ok_ = true;
    return f;
}

ScalarField ScalarField::zeros(const Grid& g) {
    return from_values(g, std::vector<double>(g.total_points(), 0.0));
}

const std::vector<double>& ScalarField::values() const {
    if (!values_ok_) {
        const double defect = hermitian_defect(grid_, coeffs_);
        if (defect > kHermitianTol)
            throw SymmetryViolationError(
                "coefficients are not Hermitian-symmetric (relative defect " +
                std::to_string(defect) + ")");
        detail::synthesize(grid_, coeffs_, values_);
        values_ok_ = true;
    }
    return values_;
}

const std::vector<std::complex<double>>& ScalarField::coefficients() const {
    if (!coeffs_ok_) {
        detail::analyze(grid_, values_, coeffs_);
        coeffs_ok_ = true;
    }
    return coeffs_;
}

std::vector<double>& ScalarField::mutable_values() {
    values();
    coeffs_ok_ = false;
    return values_;
}

std::vector<std::complex<double>>& ScalarField::mutable_coefficients() {
    coefficients();
    values_ok_ = false;
    return coeffs_;
}

double ScalarField::mean() const { return coefficients()[0].real(); }

const std::vector<std::complex<double>>& forward_transform(const ScalarField& f) {
    return f.coefficients();
}

const std::vector<double>& inverse_transform(const ScalarField& f) { return f.values(); }

double hermitian_defect(const Grid& g, const std::vector<std::complex<double>>& coeffs) {
    double max_coeff = 0.0;
    for (const auto& c : coeffs) max_coeff = std::max(max_coeff, std::abs(c));
    if (max_coeff == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const std::size_t j = reflected_index(g, i);
        worst = std::max(worst, std::abs(coeffs[i] - std::conj(coeffs[j])));
    }
    return worst / max_coeff;
}

}  // namespace ascal
