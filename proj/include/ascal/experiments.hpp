#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/diagnostics.hpp"
#include "ascal/field.hpp"
#include "ascal/grid.hpp"
#include "ascal/run_config.hpp"

namespace ascal {

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

// Smooth compactly supported bump: amplitude * exp(1 - 1/(1 - r^2)) with
// r = |x - center| / radius, zero outside r >= 1.
ScalarField bump_field(const Grid& g, const std::array<double, kMaxDims>& center, double radius,
                       double amplitude = 1.0);

// Centered radial bump, radius min_side/8.
ScalarField radial_bump(const Grid& g);

// Single bump shifted off the origin so the result is neither odd, even, nor
// radial.  Support stays inside |x|_inf < 3/16 min_side, which keeps it usable
// for a lambda = 2 rescaling run.
ScalarField offset_bump(const Grid& g);

// b(x - c) - b(x + c) with a radial bump b: odd. c = min_side/4 along axis 0.
ScalarField odd_pair(const Grid& g);

// b(x - c) + b(x + c): even, not radial.
ScalarField even_pair(const Grid& g);
ScalarField asymmetric_pair(const Grid& g);

// Mean-free datum with |coeff(k)| = |k|^{-spectral_decay} on the dealias-safe
// band.  aligned_phases makes every coefficient positive real, so the field
// peaks at the origin and its sup norm is the plain coefficient sum; otherwise
// phases are uniform random from the seed (Hermitian symmetry enforced).
ScalarField power_spectrum_datum(const Grid& g, double spectral_decay, bool aligned_phases,
                                 std::uint64_t seed);

// Random-phase datum of low regularity: decay exponent n/2 + 0.1, so the field
// sits just inside L^2 with slowly decaying tails.
ScalarField rough_datum(const Grid& g, std::uint64_t seed);

// Registry used by config files: bump|radial, offset_bump|nonradial, odd,
// even, rough.  Unknown names raise ValidationError.
ScalarField make_datum(const std::string& name, const Grid& g, std::uint64_t seed);

// f scaled to unit L^q norm (q may be infinity).  DomainError on a zero field.
ScalarField normalized(const ScalarField& f, double q);

// ---------------------------------------------------------------------------
// Study reports
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double predicted = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    // True when theory says the quantity should violate the tolerance (e.g. a
    // log-corrected symbol cannot match exact rescaling); pass then records
    // that the violation was in fact observed.
    bool expected_mismatch = false;
    std::string note;
};

struct StudyReport {
    std::string kind;
    std::string config_echo;
    AdmissibilityReport admissibility;
    std::vector<CheckResult> checks;
    std::vector<DiagnosticsRecord> series;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;

    bool all_pass() const;
};

std::string report_text(const StudyReport& r);

struct ReportPaths {
    std::string report_path;
    std::string csv_path;
};

// Writes <kind>_<timestamp>.report and .csv under directory (created if
// missing) and returns the paths.
ReportPaths write_report(const StudyReport& r, const std::string& directory);

// ---------------------------------------------------------------------------
// Studies.  Each runner takes prepared initial data; run_study builds the
// datum named in cfg.study and dispatches on cfg.study.kind.
// ---------------------------------------------------------------------------

// Evolves the datum to the safe horizon and fits log-log decay slopes of the
// L^q norms against the dissipative predictions (with the L^1-improved rates
// when with_l1 is set).
StudyReport run_decay_study(const RunConfig& cfg, const ScalarField& datum,
                            const std::vector<double>& q_list, bool with_l1);

// Runs the datum and its lambda-dilated rescaling and compares the two
// trajectories under the exact scaling map; the gate is calibrated against
// the stepper's own self-convergence error.
StudyReport run_scaling_study(const RunConfig& cfg, const ScalarField& datum, int lambda);

// datum_kind in {odd, even, radial, nonradial}: checks whether the symmetry
// survives the evolution, with the expectation derived from the symbol's
// parity / the radiality of the symbol divergence.
StudyReport run_symmetry_study(const RunConfig& cfg, const ScalarField& datum,
                               const std::string& datum_kind);

// Picard iteration at several amplitudes: contraction ratios in the Kato
// norm, degradation with amplitude, and agreement of the last iterate with
// the time stepper at the smallest amplitude.
StudyReport run_picard_study(const RunConfig& cfg, const ScalarField& datum,
                             const std::vector<double>& amplitudes);

// Perturbs the datum at several sizes and checks that the response measured
// in the critical norm scales linearly (ratio spread below 3x).
StudyReport run_dependence_study(const RunConfig& cfg, const ScalarField& datum,
                                 const std::vector<double>& perturbation_sizes);

// Rough datum: finiteness and growth of the weighted norms t^{eta_q} |theta|
// toward t = 0, plus a per-dyadic-shell comparison of the measured spectral
// suppression against the semigroup factor.
StudyReport run_smoothing_study(const RunConfig& cfg, const ScalarField& rough);

// Pure semigroup L^p -> L^q decay probe for (p,q) in {(1,2),(1,inf),(2,inf)}
// with p-adapted extremal data; no advection involved.
StudyReport run_semigroup_probe(const RunConfig& cfg);

// Dispatch on cfg.study.kind ("simulate" is not a study; use run_simulation).
// seed = 0 picks a fixed per-kind default; the seed used is recorded in the
// report.
StudyReport run_study(const RunConfig& cfg, std::uint64_t seed = 0);

// Full evolution per cfg.solver with diagnostics CSV and snapshot files
// written under out_dir using cfg.output.prefix.
StudyReport run_simulation(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir);

}  // namespace ascal
