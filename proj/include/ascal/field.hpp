#pragma once

#include <complex>
#include <vector>

#include "ascal/grid.hpp"

namespace ascal {

// Relative tolerance for the Hermitian-symmetry check run before any
// synthesis back to real values.
inline constexpr double kHermitianTol = 1e-10;

// Real scalar field with lazily synchronized grid values and Fourier
// coefficients. Whichever representation was touched last is authoritative;
// the other is produced on demand. Synthesis from coefficients first checks
// c(-k) = conj(c(k)) and throws SymmetryViolationError beyond kHermitianTol.
class ScalarField {
  public:
    ScalarField() = default;

    static ScalarField from_values(Grid g, std::vector<double> v);
    static ScalarField from_coefficients(Grid g, std::vector<std::complex<double>> c);
    static ScalarField zeros(const Grid& g);

    const Grid& grid() const { return grid_; }

    const std::vector<double>& values() const;
    const std::vector<std::complex<double>>& coefficients() const;

    // Write access; invalidates the other representation.
    std::vector<double>& mutable_values();
    std::vector<std::complex<double>>& mutable_coefficients();

    bool has_values() const { return values_ok_; }
    bool has_coefficients() const { return coeffs_ok_; }

    // Mode-0 coefficient, i.e. the box average.
    double mean() const;

  private:
    Grid grid_;
    mutable std::vector<double> values_;
    mutable std::vector<std::complex<double>> coeffs_;
    mutable bool values_ok_ = false;
    mutable bool coeffs_ok_ = false;
};

// Explicit transform entry points. Both are idempotent: the work happens at
// most once per representation change.
const std::vector<std::complex<double>>& forward_transform(const ScalarField& f);
const std::vector<double>& inverse_transform(const ScalarField& f);

// max_k |c(k) - conj(c(-k))| / max_k |c(k)| (0 when the field vanishes).
double hermitian_defect(const Grid& g, const std::vector<std::complex<double>>& coeffs);

}  // namespace ascal
