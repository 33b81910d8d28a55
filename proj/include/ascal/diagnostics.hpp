#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/field.hpp"

namespace ascal {

// Ordinary least squares on (xs, ys); returns {slope, intercept}.
std::pair<double, double> least_squares_line(const std::vector<double>& xs,
                                             const std::vector<double>& ys);

// Uniform-cell quadrature of ‖f‖_q; q = inf is the grid maximum.
double lq_norm(const ScalarField& f, double q);

// ‖Λ^s f‖_q computed through the spectral fractional power. The paper's
// Sobolev machinery lives on 1 < q < inf; the discrete surrogate is harmless
// at the endpoints, so q in [1, inf] is accepted here (decay studies weight
// the grid max directly).
double sobolev_norm(const ScalarField& f, double s, double q);

struct KatoWeights {
    double eta = 0.0;        // (2g-1)/2g - n/(2gq)
    double eta_tilde = 0.0;  // (2g-b)/2g - n/(2gq)
};

KatoWeights kato_weights(int n, double gamma, double beta, double q);

// n/(2 gamma - beta); NaN when that is not a Lebesgue exponent (>= 1).
double critical_q(int n, double gamma, double beta);

// Admissible q-range of the weighted local theory, expressed in 1/q:
//   max{(b-1)/n, (g-1)/n} < 1/q < min{(2g-b)/n, (n+b-2g)/n, (n+b-1)/(2n)}
// midpoint_q halves the 1/q interval (the default study exponent).
struct QWindow {
    double inv_q_lower = 0.0;
    double inv_q_upper = 0.0;
    bool nonempty = false;
    double q_lower = 0.0;    // = 1/inv_q_upper
    double q_upper = 0.0;    // = 1/inv_q_lower, may be inf
    double midpoint_q = 0.0;
};

QWindow picard_q_window(int n, double gamma, double beta);

struct DecayFit {
    double q = 0.0;  // norm exponent the series was measured in (caller-set)
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t points_used = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of log-log fit residuals
    double predicted_slope = 0.0;
    std::string verdict;  // "ok" / "mismatch" / "unchecked"
};

// Log-log least squares of values against times inside [t_min, t_max].
// Needs at least 6 points in the window and positive values. When
// predicted_slope is finite the verdict compares |slope - predicted| against
// rel_tol * |predicted|.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double t_min, double t_max,
                   double predicted_slope = std::numeric_limits<double>::quiet_NaN(),
                   double rel_tol = 0.15);

// Indices i where values[i] exceeds values[i-1] by more than tol_rel relative.
std::vector<std::size_t> check_monotone(const std::vector<double>& values, double tol_rel);

enum class SymmetryKind { odd, even, radial };

// Odd/even: worst pointwise defect of f against its reflection through the
// grid origin, relative to max|f|. Radial: worst in-annulus standard
// deviation relative to max|f|, annulus width one grid spacing.
double symmetry_defect(const ScalarField& f, SymmetryKind kind);

// Finite-difference div_xi of the vector symbol on the samples; returns the
// worst spread over an equal-|xi| shell, normalized by the symbol's scale on
// that shell. Near zero for radially-symmetric divergences.
double divergence_symbol_radiality(const CouplingSpec& spec, int n_dims,
                                   const std::vector<std::array<double, kMaxDims>>& sample_xis);

struct DiagnosticsRecord {
    double t = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double lq_critical = 0.0;  // NaN when n/(2 gamma - beta) is not an exponent
    double linf = 0.0;
    double sobolev_q_betam1 = 0.0;  // ‖Λ^{beta-1} f‖_q at the study exponent
    double kato_eta = 0.0;          // t^eta * sobolev_q_betam1
    double kato_eta_tilde = 0.0;    // t^eta_tilde * ‖f‖_q
    double mean = 0.0;
    double div_residual = 0.0;
};

DiagnosticsRecord compute_diagnostics(const ScalarField& f, double t,
                                      const VelocityOperator& velocity_op,
                                      const CouplingSpec& spec, double gamma, double q);

}  // namespace ascal
