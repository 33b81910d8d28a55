#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ascal/field.hpp"

namespace ascal {

enum class CouplingFamily { sqg, modified_sqg, log_field, log_power, loglog_power, custom };

const char* family_name(CouplingFamily f);
CouplingFamily family_from_name(const std::string& name);

// Scalar multiplier evaluator for one slot of a custom coupling. Odd real
// operators carry purely imaginary symbols (like i xi_j for a derivative),
// hence the complex return type.
using SymbolFn = std::function<std::complex<double>(const std::array<double, kMaxDims>&)>;

// Velocity coupling u_j = sum_i a_ij * (-i xi_i / |xi|^2) * P_i(xi) acting on
// the scalar's coefficients; the -i factor is the i-th Riesz transform times
// the inverse half-Laplacian. Built-in families share one radial profile
// across the P_i slots and use the 2-D perp arrangement a_12 = 1 = -a_21,
// which reproduces u = (-R2 theta, R1 theta) for the plain |xi| profile.
struct CouplingSpec {
    CouplingFamily family = CouplingFamily::sqg;
    double beta = 1.0;       // declared multiplier order (modified_sqg, custom)
    double sigma = 1.0;      // power-law exponent of the log-corrected families
    double chi = 1.0;        // log exponent of the log-corrected families
    double epsilon = 0.05;   // order slack added on top of the power for log families
    std::vector<double> matrix_a;          // row-major a_ij, empty = family default
    std::vector<SymbolFn> custom_symbols;  // one per slot, family == custom
    std::string custom_name;               // registry preset used, if any
};

CouplingSpec sqg_spec();
CouplingSpec modified_sqg_spec(double beta);
CouplingSpec log_field_spec(double chi, double epsilon = 0.05);
CouplingSpec log_power_spec(double sigma, double chi, double epsilon = 0.05);
CouplingSpec loglog_power_spec(double sigma, double chi, double epsilon = 0.05);
CouplingSpec custom_spec(std::vector<SymbolFn> symbols, double beta,
                         std::vector<double> matrix_a = {});

// Named custom couplings reachable from config files:
//   zero        all-zero symbols (decouples the transport term)
//   odd_shear   P_i = i(xi_1 + ... + xi_n): odd symbols, even vector symbol
//   even_aniso  P_i = |xi| (1 + xi_1^2 / (2 |xi|^2)): even and anisotropic
//   div_broken  P_1 = -|xi|^2 with identity matrix: u = (d theta/dx_1, 0, ...)
CouplingSpec custom_preset(const std::string& name, int n_dims);

// Declared order of the P_i slots, used by the admissibility accounting and
// as the default exponent for the dyadic-shell bound check. Log-corrected
// profiles declare their power plus the epsilon slack.
double declared_order(const CouplingSpec& spec);

// Throws ValidationError for inconsistent specs (perp built-ins outside 2-D,
// missing custom evaluators, bad matrix shape, negative exponents).
void validate_coupling(const CouplingSpec& spec, int n_dims);

// Scalar slot symbol P_i(xi), i in [0, n_dims).
std::complex<double> scalar_symbol(const CouplingSpec& spec, int i,
                                   const std::array<double, kMaxDims>& xi, int n_dims);

// Full vector symbol; the zero frequency always maps to zero.
std::array<std::complex<double>, kMaxDims> evaluate_symbol(
    const CouplingSpec& spec, const std::array<double, kMaxDims>& xi, int n_dims);

// Precomputed per-mode tables of the vector symbol on one grid.
class VelocityOperator {
  public:
    VelocityOperator(const Grid& g, const CouplingSpec& spec);

    std::vector<ScalarField> apply(const ScalarField& theta) const;
    const Grid& grid() const { return grid_; }

  private:
    Grid grid_;
    std::vector<std::vector<std::complex<double>>> tables_;
};

std::vector<ScalarField> velocity(const ScalarField& theta, const CouplingSpec& spec);

// max_k |k . u^(k)| / max(1, max_k |u^(k)|): < 1e-12 for the perp built-ins.
double check_divergence_free(const std::vector<ScalarField>& u);

// The solvability window 1 <= 2 beta - 1 < 2 gamma < min{(2/3)(n+beta+1), n+1}.
// Configurations outside it still run; studies just record the verdict.
struct AdmissibilityReport {
    int n = 2;
    double gamma = 0.0;
    double beta = 0.0;
    double order_lhs = 0.0;        // 2 beta - 1
    double two_gamma = 0.0;        // 2 gamma
    double upper_bound = 0.0;      // min{(2/3)(n+beta+1), n+1}
    bool order_at_least_one = false;
    bool below_dissipation = false;
    bool dissipation_in_range = false;
    bool admissible = false;
    double gamma_lower = 0.0;      // admissible gamma window for this (n, beta)
    double gamma_upper = 0.0;
    std::string notes;
};

AdmissibilityReport check_admissibility(int n, double gamma, double beta);

struct SymbolOrderReport {
    std::vector<double> shell_radii;                    // dyadic |xi| shell markers
    std::vector<std::array<double, 3>> shell_constants; // per shell, |alpha| = 0,1,2
    std::array<double, 3> worst_constant{};             // max over all samples
    int max_alpha = 2;
    bool growth_flag = false;  // some constant grows across the shells
};

// Evaluates |d^alpha P_i(xi)| |xi|^{|alpha| - beta} on the sample points with
// central finite differences (step 1e-4 |xi|), bins the samples into dyadic
// shells, and flags when a per-|alpha| constant grows by more than 1.5x from
// the first shell to the last. A declared beta below the true order of the
// slot symbols is what trips the flag.
SymbolOrderReport verify_symbol_order(const CouplingSpec& spec, int n_dims, double beta,
                                      const std::vector<std::array<double, kMaxDims>>& sample_xis,
                                      int max_alpha);

// Default sweep: shells 2^0 .. 2^10, twelve directions each, declared order.
SymbolOrderReport verify_symbol_order(const CouplingSpec& spec, int n_dims);

std::vector<std::array<double, kMaxDims>> dyadic_shell_samples(int n_dims, int first_pow = 0,
                                                               int last_pow = 10,
                                                               int dirs_per_shell = 12);

}  // namespace ascal
