#include "ascal/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ascal/errors.hpp"

namespace ascal {

namespace {

double norm_of(const std::array<double, kMaxDims>& xi, int n_dims) {
    double s = 0.0;
    for (int a = 0; a < n_dims; ++a) s += xi[a] * xi[a];
    return std::sqrt(s);
}

// Radial profile shared by the P_i slots of the built-in families. beta = 1
// uses |xi| directly so that modified_sqg at beta = 1 matches sqg bit for bit.
double builtin_profile(const CouplingSpec& spec, double r) {
    if (r == 0.0) return 0.0;
    switch (spec.family) {
        case CouplingFamily::sqg:
            return r;
        case CouplingFamily::modified_sqg:
            return spec.beta == 1.0 ? r : std::pow(r, spec.beta);
        case CouplingFamily::log_field:
            // The log-corrected gradient coupling: one power of |xi| times
            // the log multiplier, declared order 1 + epsilon. Written this
            // way (rather than |xi|^2 times the log) so the admissibility
            // window (1/2 < gamma < 4/3) is non-empty.
            return r * std::pow(std::log1p(r * r), spec.chi);
        case CouplingFamily::log_power:
            return std::pow(r, spec.sigma) * std::pow(std::log1p(r * r), spec.chi);
        case CouplingFamily::loglog_power:
            return std::pow(r, spec.sigma) * std::pow(std::log1p(std::log1p(r * r)), spec.chi);
        case CouplingFamily::custom:
            break;
    }
    throw ValidationError("builtin_profile called for a custom coupling");
}

// a_ij defaults: the 2-D perp arrangement, or its antisymmetric 3-D analogue.
// Row index i is the slot, column j the velocity component.
std::vector<double> default_matrix(int n_dims) {
    if (n_dims == 2) return {0.0, 1.0, -1.0, 0.0};
    return {0.0, 1.0, -1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 0.0};
}

double matrix_entry(const CouplingSpec& spec, int n_dims, int i, int j) {
    if (spec.matrix_a.empty()) return default_matrix(n_dims)[static_cast<size_t>(i * n_dims + j)];
    return spec.matrix_a[static_cast<size_t>(i * n_dims + j)];
}

}  // namespace

const char* family_name(CouplingFamily f) {
    switch (f) {
        case CouplingFamily::sqg: return "sqg";
        case CouplingFamily::modified_sqg: return "modified_sqg";
        case CouplingFamily::log_field: return "log_field";
        case CouplingFamily::log_power: return "log_power";
        case CouplingFamily::loglog_power: return "loglog_power";
        case CouplingFamily::custom: return "custom";
    }
    return "unknown";
}

CouplingFamily family_from_name(const std::string& name) {
    static const std::map<std::string, CouplingFamily> table = {
        {"sqg", CouplingFamily::sqg},
        {"modified_sqg", CouplingFamily::modified_sqg},
        {"log_field", CouplingFamily::log_field},
        {"log_power", CouplingFamily::log_power},
        {"loglog_power", CouplingFamily::loglog_power},
        {"custom", CouplingFamily::custom},
    };
    auto it = table.find(name);
    if (it == table.end()) throw ValidationError("unknown coupling family '" + name + "'");
    return it->second;
}

CouplingSpec sqg_spec() {
    CouplingSpec s;
    s.family = CouplingFamily::sqg;
    s.beta = 1.0;
    return s;
}

CouplingSpec modified_sqg_spec(double beta) {
    CouplingSpec s;
    s.family = CouplingFamily::modified_sqg;
    s.beta = beta;
    return s;
}

CouplingSpec log_field_spec(double chi, double epsilon) {
    CouplingSpec s;
    s.family = CouplingFamily::log_field;
    s.chi = chi;
    s.epsilon = epsilon;
    s.beta = declared_order(s);
    return s;
}

CouplingSpec log_power_spec(double sigma, double chi, double epsilon) {
    CouplingSpec s;
    s.family = CouplingFamily::log_power;
    s.sigma = sigma;
    s.chi = chi;
    s.epsilon = epsilon;
    s.beta = declared_order(s);
    return s;
}

CouplingSpec loglog_power_spec(double sigma, double chi, double epsilon) {
    CouplingSpec s = log_power_spec(sigma, chi, epsilon);
    s.family = CouplingFamily::loglog_power;
    return s;
}

CouplingSpec custom_spec(std::vector<SymbolFn> symbols, double beta, std::vector<double> matrix_a) {
    CouplingSpec s;
    s.family = CouplingFamily::custom;
    s.beta = beta;
    s.custom_symbols = std::move(symbols);
    s.matrix_a = std::move(matrix_a);
    return s;
}

CouplingSpec custom_preset(const std::string& name, int n_dims) {
    if (n_dims != 2 && n_dims != 3) throw ValidationError("custom_preset: n_dims must be 2 or 3");
    const size_t n = static_cast<size_t>(n_dims);
    CouplingSpec s;
    s.family = CouplingFamily::custom;
    s.custom_name = name;
    if (name == "zero") {
        s.beta = 1.0;
        s.custom_symbols.assign(n, [](const std::array<double, kMaxDims>&) {
            return std::complex<double>(0.0, 0.0);
        });
    } else if (name == "odd_shear") {
        s.beta = 1.0;
        const int nd = n_dims;
        s.custom_symbols.assign(n, [nd](const std::array<double, kMaxDims>& xi) {
            double sum = 0.0;
            for (int a = 0; a < nd; ++a) sum += xi[a];
            return std::complex<double>(0.0, sum);
        });
    } else if (name == "even_aniso") {
        s.beta = 1.0;
        const int nd = n_dims;
        s.custom_symbols.assign(n, [nd](const std::array<double, kMaxDims>& xi) {
            double r = norm_of(xi, nd);
            if (r == 0.0) return std::complex<double>(0.0, 0.0);
            return std::complex<double>(r * (1.0 + xi[0] * xi[0] / (2.0 * r * r)), 0.0);
        });
    } else if (name == "div_broken") {
        s.beta = 2.0;
        const int nd = n_dims;
        s.custom_symbols.assign(n, [](const std::array<double, kMaxDims>&) {
            return std::complex<double>(0.0, 0.0);
        });
        s.custom_symbols[0] = [nd](const std::array<double, kMaxDims>& xi) {
            double r = norm_of(xi, nd);
            return std::complex<double>(-r * r, 0.0);
        };
        s.matrix_a.assign(n * n, 0.0);
        for (size_t d = 0; d < n; ++d) s.matrix_a[d * n + d] = 1.0;
    } else {
        throw ValidationError("unknown custom coupling preset '" + name + "'");
    }
    return s;
}

double declared_order(const CouplingSpec& spec) {
    switch (spec.family) {
        case CouplingFamily::sqg:
            return 1.0;
        case CouplingFamily::modified_sqg:
        case CouplingFamily::custom:
            return spec.beta;
        case CouplingFamily::log_field:
            return 1.0 + (spec.chi > 0.0 ? spec.epsilon : 0.0);
        case CouplingFamily::log_power:
        case CouplingFamily::loglog_power:
            return spec.sigma + (spec.chi > 0.0 ? spec.epsilon : 0.0);
    }
    return spec.beta;
}

void validate_coupling(const CouplingSpec& spec, int n_dims) {
    if (n_dims != 2 && n_dims != 3) throw ValidationError("coupling: n_dims must be 2 or 3");
    if (!std::isfinite(spec.beta) || spec.beta < 0.0)
        throw ValidationError("coupling: beta must be finite and >= 0");
    if (!std::isfinite(spec.chi) || spec.chi < 0.0)
        throw ValidationError("coupling: chi must be finite and >= 0");
    if (!std::isfinite(spec.sigma) || spec.sigma < 0.0)
        throw ValidationError("coupling: sigma must be finite and >= 0");
    if (!std::isfinite(spec.epsilon) || spec.epsilon <= 0.0)
        throw ValidationError("coupling: epsilon must be finite and > 0");
    if (!spec.matrix_a.empty() && spec.matrix_a.size() != static_cast<size_t>(n_dims * n_dims)) {
        std::ostringstream os;
        os << "coupling: matrix_a needs " << n_dims * n_dims << " row-major entries, got "
           << spec.matrix_a.size();
        throw ValidationError(os.str());
    }
    if (spec.family == CouplingFamily::custom) {
        if (spec.custom_symbols.size() != static_cast<size_t>(n_dims))
            throw ValidationError("custom coupling needs one symbol evaluator per dimension");
        for (const auto& fn : spec.custom_symbols)
            if (!fn) throw ValidationError("custom coupling has an empty symbol evaluator");
    } else if (n_dims != 2) {
        // The built-ins are the perp-arranged couplings of the 2-D theory.
        throw ValidationError(std::string("coupling family '") + family_name(spec.family) +
                              "' is defined for n_dims = 2 only");
    }
}

std::complex<double> scalar_symbol(const CouplingSpec& spec, int i,
                                   const std::array<double, kMaxDims>& xi, int n_dims) {
    if (i < 0 || i >= n_dims) throw ValidationError("scalar_symbol: slot index out of range");
    if (spec.family == CouplingFamily::custom) {
        if (static_cast<size_t>(i) >= spec.custom_symbols.size() || !spec.custom_symbols[i])
            throw ValidationError("custom coupling without symbol evaluators");
        return spec.custom_symbols[static_cast<size_t>(i)](xi);
    }
    return {builtin_profile(spec, norm_of(xi, n_dims)), 0.0};
}

std::array<std::complex<double>, kMaxDims> evaluate_symbol(const CouplingSpec& spec,
                                                           const std::array<double, kMaxDims>& xi,
                                                           int n_dims) {
    std::array<std::complex<double>, kMaxDims> out{};
    double r2 = 0.0;
    for (int a = 0; a < n_dims; ++a) r2 += xi[a] * xi[a];
    if (r2 == 0.0) return out;
    for (int i = 0; i < n_dims; ++i) {
        // -i xi_i / |xi|^2 is the Riesz transform composed with the inverse
        // half-Laplacian acting on slot i.
        const std::complex<double> riesz(0.0, -xi[i] / r2);
        const std::complex<double> slot = riesz * scalar_symbol(spec, i, xi, n_dims);
        for (int j = 0; j < n_dims; ++j) out[j] += matrix_entry(spec, n_dims, i, j) * slot;
    }
    return out;
}

VelocityOperator::VelocityOperator(const Grid& g, const CouplingSpec& spec) : grid_(g) {
    validate_coupling(spec, g.n_dims);
    const size_t total = g.total_points();
    tables_.assign(static_cast<size_t>(g.n_dims), std::vector<std::complex<double>>(total));
    const size_t n0 = g.points[0];
    const size_t n1 = g.n_dims > 1 ? g.points[1] : 1;
    const size_t n2 = g.n_dims > 2 ? g.points[2] : 1;
    std::array<double, kMaxDims> k{};
    size_t idx = 0;
    for (size_t m0 = 0; m0 < n0; ++m0) {
        k[0] = g.wavenumber(0, m0);
        const bool ny0 = m0 == n0 / 2;
        for (size_t m1 = 0; m1 < n1; ++m1) {
            if (g.n_dims > 1) k[1] = g.wavenumber(1, m1);
            const bool ny1 = g.n_dims > 1 && m1 == n1 / 2;
            for (size_t m2 = 0; m2 < n2; ++m2, ++idx) {
                if (g.n_dims > 2) k[2] = g.wavenumber(2, m2);
                auto symbol = evaluate_symbol(spec, k, g.n_dims);
                // A mode on the Nyquist band is its own conjugate partner in
                // that axis; only the real part of the symbol acts on a real
                // field there, so the odd (imaginary) part is dropped.
                if (ny0 || ny1 || (g.n_dims > 2 && m2 == n2 / 2))
                    for (auto& s : symbol) s = s.real();
                for (int j = 0; j < g.n_dims; ++j) tables_[static_cast<size_t>(j)][idx] = symbol[j];
            }
        }
    }
}

std::vector<ScalarField> VelocityOperator::apply(const ScalarField& theta) const {
    if (!(theta.grid() == grid_))
        throw ValidationError("velocity operator applied to a field on a different grid");
    const auto& coeffs = theta.coefficients();
    std::vector<ScalarField> u;
    u.reserve(tables_.size());
    for (const auto& table : tables_) {
        std::vector<std::complex<double>> c(coeffs.size());
        for (size_t i = 0; i < coeffs.size(); ++i) c[i] = table[i] * coeffs[i];
        u.push_back(ScalarField::from_coefficients(grid_, std::move(c)));
    }
    return u;
}

std::vector<ScalarField> velocity(const ScalarField& theta, const CouplingSpec& spec) {
    return VelocityOperator(theta.grid(), spec).apply(theta);
}

double check_divergence_free(const std::vector<ScalarField>& u) {
    if (u.empty()) throw ValidationError("check_divergence_free: empty velocity");
    const Grid& g = u[0].grid();
    if (u.size() != static_cast<size_t>(g.n_dims))
        throw ValidationError("check_divergence_free: one component per dimension expected");
    for (const auto& comp : u)
        if (!(comp.grid() == g))
            throw ValidationError("check_divergence_free: components on different grids");

    std::vector<const std::vector<std::complex<double>>*> coeffs;
    coeffs.reserve(u.size());
    for (const auto& comp : u) coeffs.push_back(&comp.coefficients());

    const size_t n0 = g.points[0];
    const size_t n1 = g.n_dims > 1 ? g.points[1] : 1;
    const size_t n2 = g.n_dims > 2 ? g.points[2] : 1;
    double worst = 0.0;
    double largest = 0.0;
    std::array<double, kMaxDims> k{};
    size_t idx = 0;
    for (size_t m0 = 0; m0 < n0; ++m0) {
        k[0] = g.wavenumber(0, m0);
        for (size_t m1 = 0; m1 < n1; ++m1) {
            if (g.n_dims > 1) k[1] = g.wavenumber(1, m1);
            for (size_t m2 = 0; m2 < n2; ++m2, ++idx) {
                if (g.n_dims > 2) k[2] = g.wavenumber(2, m2);
                std::complex<double> div(0.0, 0.0);
                double mag2 = 0.0;
                for (int j = 0; j < g.n_dims; ++j) {
                    const std::complex<double> cj = (*coeffs[static_cast<size_t>(j)])[idx];
                    div += k[j] * cj;
                    mag2 += std::norm(cj);
                }
                worst = std::max(worst, std::abs(div));
                largest = std::max(largest, mag2);
            }
        }
    }
    return worst / std::max(1.0, std::sqrt(largest));
}

AdmissibilityReport check_admissibility(int n, double gamma, double beta) {
    if (n != 2 && n != 3) throw ValidationError("check_admissibility: n must be 2 or 3");
    if (!std::isfinite(gamma) || !std::isfinite(beta))
        throw ValidationError("check_admissibility: gamma and beta must be finite");
    AdmissibilityReport r;
    r.n = n;
    r.gamma = gamma;
    r.beta = beta;
    r.order_lhs = 2.0 * beta - 1.0;
    r.two_gamma = 2.0 * gamma;
    r.upper_bound = std::min(2.0 / 3.0 * (n + beta + 1.0), n + 1.0);
    r.order_at_least_one = r.order_lhs >= 1.0;
    r.below_dissipation = r.order_lhs < r.two_gamma;
    r.dissipation_in_range = r.two_gamma < r.upper_bound;
    r.admissible = r.order_at_least_one && r.below_dissipation && r.dissipation_in_range;
    r.gamma_lower = r.order_lhs / 2.0;
    r.gamma_upper = r.upper_bound / 2.0;

    std::ostringstream os;
    os.precision(6);
    if (r.admissible) {
        os << "admissible: 1 <= " << r.order_lhs << " < " << r.two_gamma << " < " << r.upper_bound;
    } else {
        os << "outside_window:";
        if (!r.order_at_least_one) os << " 2*beta-1 = " << r.order_lhs << " is below 1;";
        if (!r.below_dissipation)
            os << " 2*beta-1 = " << r.order_lhs << " is not strictly below 2*gamma = " << r.two_gamma
               << ";";
        if (!r.dissipation_in_range)
            os << " 2*gamma = " << r.two_gamma << " is not below min{(2/3)(n+beta+1), n+1} = "
               << r.upper_bound << ";";
    }
    r.notes = os.str();
    return r;
}

namespace {

std::complex<double> sample_slot(const CouplingSpec& spec, int i,
                                 std::array<double, kMaxDims> xi, int n_dims, int axis_a,
                                 double da, int axis_b, double db) {
    if (axis_a >= 0) xi[axis_a] += da;
    if (axis_b >= 0) xi[axis_b] += db;
    return scalar_symbol(spec, i, xi, n_dims);
}

}  // namespace

SymbolOrderReport verify_symbol_order(const CouplingSpec& spec, int n_dims, double beta,
                                      const std::vector<std::array<double, kMaxDims>>& sample_xis,
                                      int max_alpha) {
    validate_coupling(spec, n_dims);
    if (max_alpha < 0 || max_alpha > 2)
        throw ValidationError("verify_symbol_order: max_alpha must be 0, 1 or 2");
    if (sample_xis.empty()) throw ValidationError("verify_symbol_order: no sample points");

    SymbolOrderReport report;
    report.max_alpha = max_alpha;

    // Bin samples into dyadic shells keyed by floor(log2 |xi|).
    std::map<int, std::array<double, 3>> shells;
    for (const auto& xi : sample_xis) {
        const double r = norm_of(xi, n_dims);
        if (!(r > 0.0) || !std::isfinite(r))
            throw DomainError("verify_symbol_order: sample points must be finite and nonzero");
        const double h = 1e-4 * r;
        std::array<double, 3> consts{};
        for (int i = 0; i < n_dims; ++i) {
            consts[0] = std::max(consts[0], std::abs(sample_slot(spec, i, xi, n_dims, -1, 0, -1, 0)));
            if (max_alpha >= 1) {
                for (int a = 0; a < n_dims; ++a) {
                    auto plus = sample_slot(spec, i, xi, n_dims, a, h, -1, 0);
                    auto minus = sample_slot(spec, i, xi, n_dims, a, -h, -1, 0);
                    consts[1] = std::max(consts[1], std::abs(plus - minus) / (2.0 * h));
                }
            }
            if (max_alpha >= 2) {
                auto center = sample_slot(spec, i, xi, n_dims, -1, 0, -1, 0);
                for (int a = 0; a < n_dims; ++a) {
                    auto plus = sample_slot(spec, i, xi, n_dims, a, h, -1, 0);
                    auto minus = sample_slot(spec, i, xi, n_dims, a, -h, -1, 0);
                    consts[2] = std::max(consts[2], std::abs(plus - 2.0 * center + minus) / (h * h));
                }
                for (int a = 0; a < n_dims; ++a) {
                    for (int b = a + 1; b < n_dims; ++b) {
                        auto pp = sample_slot(spec, i, xi, n_dims, a, h, b, h);
                        auto pm = sample_slot(spec, i, xi, n_dims, a, h, b, -h);
                        auto mp = sample_slot(spec, i, xi, n_dims, a, -h, b, h);
                        auto mm = sample_slot(spec, i, xi, n_dims, a, -h, b, -h);
                        consts[2] =
                            std::max(consts[2], std::abs(pp - pm - mp + mm) / (4.0 * h * h));
                    }
                }
            }
        }
        // Normalize against the declared order: |d^alpha P| |xi|^{|alpha|-beta}.
        for (int m = 0; m <= max_alpha; ++m) consts[static_cast<size_t>(m)] *= std::pow(r, m - beta);

        const int shell = static_cast<int>(std::floor(std::log2(r)));
        auto [it, inserted] = shells.try_emplace(shell, consts);
        if (!inserted)
            for (int m = 0; m <= max_alpha; ++m)
                it->second[static_cast<size_t>(m)] =
                    std::max(it->second[static_cast<size_t>(m)], consts[static_cast<size_t>(m)]);
    }

    for (const auto& [shell, consts] : shells) {
        report.shell_radii.push_back(std::pow(2.0, shell));
        report.shell_constants.push_back(consts);
        for (int m = 0; m <= max_alpha; ++m)
            report.worst_constant[static_cast<size_t>(m)] =
                std::max(report.worst_constant[static_cast<size_t>(m)], consts[static_cast<size_t>(m)]);
    }

    // Persistent growth check: last shell against the first. A bounded bump in
    // the middle shells is fine; a constant still rising at the top shell is
    // what an under-declared order produces.
    if (report.shell_constants.size() >= 2) {
        const auto& first = report.shell_constants.front();
        const auto& last = report.shell_constants.back();
        for (int m = 0; m <= max_alpha; ++m) {
            const size_t mm = static_cast<size_t>(m);
            if (last[mm] > 1.5 * std::max(first[mm], 1e-12)) report.growth_flag = true;
        }
    }
    return report;
}

std::vector<std::array<double, kMaxDims>> dyadic_shell_samples(int n_dims, int first_pow,
                                                               int last_pow, int dirs_per_shell) {
    if (n_dims != 2 && n_dims != 3) throw ValidationError("dyadic_shell_samples: n_dims 2 or 3");
    if (last_pow < first_pow || dirs_per_shell < 1)
        throw ValidationError("dyadic_shell_samples: empty sweep");
    std::vector<std::array<double, kMaxDims>> xs;
    const double golden = 2.3999632297286533;  // golden angle, for generic directions
    for (int p = first_pow; p <= last_pow; ++p) {
        // Sample just above the shell edge so floor(log2 r) bins predictably.
        const double r = std::pow(2.0, p) * 1.01;
        for (int d = 0; d < dirs_per_shell; ++d) {
            std::array<double, kMaxDims> xi{};
            if (n_dims == 2) {
                const double phi = (d + 0.371) * 2.0 * M_PI / dirs_per_shell;
                xi[0] = r * std::cos(phi);
                xi[1] = r * std::sin(phi);
            } else {
                const double z = 1.0 - 2.0 * (d + 0.5) / dirs_per_shell;
                const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = golden * d;
                xi[0] = r * rho * std::cos(phi);
                xi[1] = r * rho * std::sin(phi);
                xi[2] = r * z;
            }
            xs.push_back(xi);
        }
    }
    return xs;
}

SymbolOrderReport verify_symbol_order(const CouplingSpec& spec, int n_dims) {
    return verify_symbol_order(spec, n_dims, declared_order(spec), dyadic_shell_samples(n_dims), 2);
}

}  // namespace ascal
