#include "ascal/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "ascal/csv_io.hpp"
#include "ascal/errors.hpp"
#include "ascal/evolve.hpp"
#include "ascal/snapshot.hpp"
#include "ascal/spectral_ops.hpp"

namespace ascal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQNaN = std::numeric_limits<double>::quiet_NaN();

std::string strf(const char* format, ...) {
    char buf[768];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::uint64_t default_seed(const std::string& kind) {
    if (kind == "decay") return 101;
    if (kind == "scaling") return 102;
    if (kind == "symmetry") return 103;
    if (kind == "picard") return 104;
    if (kind == "dependence") return 105;
    if (kind == "smoothing") return 106;
    if (kind == "probe") return 107;
    return 100;
}

CheckResult make_check(std::string name, double measured, double predicted, double tolerance,
                       bool pass, std::string note = "", bool expected_mismatch = false) {
    CheckResult c;
    c.name = std::move(name);
    c.measured = measured;
    c.predicted = predicted;
    c.tolerance = tolerance;
    c.pass = pass;
    c.expected_mismatch = expected_mismatch;
    c.note = std::move(note);
    return c;
}

StudyReport begin_report(const char* kind, const RunConfig& cfg) {
    StudyReport r;
    r.kind = kind;
    r.config_echo = echo_config(cfg);
    r.admissibility =
        check_admissibility(cfg.grid.n_dims, cfg.solver.gamma, declared_order(cfg.coupling));
    return r;
}

ScalarField scaled_field(const ScalarField& f, double s) {
    std::vector<double> v = f.values();
    for (double& x : v) x *= s;
    return ScalarField::from_values(f.grid(), std::move(v));
}

ScalarField linear_combo(const ScalarField& a, double ca, const ScalarField& b, double cb) {
    const auto& va = a.values();
    const auto& vb = b.values();
    std::vector<double> v(va.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = ca * va[i] + cb * vb[i];
    return ScalarField::from_values(a.grid(), std::move(v));
}

double sup_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

double rel_sup_diff(const ScalarField& a, const ScalarField& b) {
    const auto& va = a.values();
    const auto& vb = b.values();
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        diff = std::max(diff, std::abs(va[i] - vb[i]));
        scale = std::max({scale, std::abs(va[i]), std::abs(vb[i])});
    }
    return scale > 0.0 ? diff / scale : 0.0;
}

double rel_l2_diff(const ScalarField& a, const ScalarField& b) {
    const double gap = lq_norm(linear_combo(a, 1.0, b, -1.0), 2.0);
    const double scale = std::max(lq_norm(a, 2.0), lq_norm(b, 2.0));
    return scale > 0.0 ? gap / scale : 0.0;
}

// How far the endpoint moves when dt is halved. The advective guard may have
// already halved the base run internally, in which case the first rerun is
// bit-identical; keep halving until the comparison actually moves.
double stepper_self_convergence(const ScalarField& datum, const SolverConfig& base,
                                const CouplingSpec& spec, const ScalarField& base_final,
                                double (*dist)(const ScalarField&, const ScalarField&)) {
    SolverConfig s = base;
    s.snapshot_every = 0;
    s.diagnostics_every = 0;
    for (int k = 0; k < 6; ++k) {
        s.dt /= 2.0;
        const double d = dist(base_final, evolve(datum, s, spec).snapshots.back());
        if (d > 0.0) return d;
    }
    return 0.0;
}

constexpr std::size_t kNoMatch = static_cast<std::size_t>(-1);

std::size_t find_time(const std::vector<double>& times, double t) {
    for (std::size_t j = 0; j < times.size(); ++j)
        if (std::abs(times[j] - t) <= 1e-9 * std::max({std::abs(t), std::abs(times[j]), 1e-12}))
            return j;
    return kNoMatch;
}

std::vector<double> log_spaced(double a, double b, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

long estimated_steps(double t_end, double dt) {
    return std::max(1L, static_cast<long>(std::ceil(t_end / dt - 1e-12)));
}

// make_grid zeroes the points of unused axes; loops still need one pass.
std::size_t axis_points(const Grid& g, int axis) {
    return axis < g.n_dims ? g.points[static_cast<std::size_t>(axis)] : 1;
}

std::string q_label(double q) { return std::isinf(q) ? "inf" : strf("%g", q); }

// Lq norms of every snapshot in one trajectory.
std::vector<double> norm_series(const Trajectory& traj, double q) {
    std::vector<double> out;
    out.reserve(traj.snapshots.size());
    for (const auto& f : traj.snapshots) out.push_back(lq_norm(f, q));
    return out;
}

double critical_or(double fallback, int n, double gamma, double beta) {
    const double qc = critical_q(n, gamma, beta);
    return std::isfinite(qc) ? qc : fallback;
}

void require_positive_list(const std::vector<double>& xs, const char* what) {
    if (xs.empty()) throw ValidationError(strf("%s: list must not be empty", what));
    for (double x : xs)
        if (!(x > 0.0) || !std::isfinite(x))
            throw ValidationError(strf("%s: entries must be positive and finite", what));
}

}  // namespace

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

ScalarField bump_field(const Grid& g, const std::array<double, kMaxDims>& center, double radius,
                       double amplitude) {
    if (!(radius > 0.0)) throw ValidationError("bump_field: radius must be positive");
    std::vector<double> v(g.total_points(), 0.0);
    const std::size_t p0 = g.points[0], p1 = g.points[1], p2 = axis_points(g, 2);
    for (std::size_t i0 = 0; i0 < p0; ++i0)
        for (std::size_t i1 = 0; i1 < p1; ++i1)
            for (std::size_t i2 = 0; i2 < p2; ++i2) {
                const std::size_t idx[kMaxDims] = {i0, i1, i2};
                double r2 = 0.0;
                for (int a = 0; a < g.n_dims; ++a) {
                    double dx = g.coordinate(a, idx[a]) - center[static_cast<std::size_t>(a)];
                    dx -= g.side[a] * std::round(dx / g.side[a]);  // periodic image
                    r2 += dx * dx;
                }
                r2 /= radius * radius;
                if (r2 < 1.0)
                    v[flat_index(g, i0, i1, i2)] = amplitude * std::exp(1.0 - 1.0 / (1.0 - r2));
            }
    return ScalarField::from_values(g, std::move(v));
}

ScalarField radial_bump(const Grid& g) {
    return bump_field(g, {0.0, 0.0, 0.0}, g.min_side() / 8.0);
}

ScalarField offset_bump(const Grid& g) {
    std::array<double, kMaxDims> c{g.side[0] / 16.0, 0.0, 0.0};
    if (g.n_dims >= 2) c[1] = -g.side[1] / 24.0;
    if (g.n_dims >= 3) c[2] = g.side[2] / 32.0;
    return bump_field(g, c, g.min_side() / 8.0);
}

namespace {
ScalarField bump_pair(const Grid& g, double sign) {
    const std::array<double, kMaxDims> c{g.side[0] / 4.0, 0.0, 0.0};
    const std::array<double, kMaxDims> mc{-g.side[0] / 4.0, 0.0, 0.0};
    const double radius = g.min_side() / 8.0;
    return linear_combo(bump_field(g, c, radius), 1.0, bump_field(g, mc, radius), sign);
}
}  // namespace

ScalarField odd_pair(const Grid& g) { return bump_pair(g, -1.0); }

ScalarField even_pair(const Grid& g) { return bump_pair(g, 1.0); }

// Two unequal bumps inside the central quarter. A single bump is radial about
// its own center, so its self-induced velocity is tangential and transport is
// spectrally dead; this datum keeps the nonlinearity genuinely alive while
// still fitting the dilation support requirement.
ScalarField asymmetric_pair(const Grid& g) {
    std::array<double, kMaxDims> c1{g.side[0] / 16.0, 0.0, 0.0};
    std::array<double, kMaxDims> c2{-g.side[0] / 12.0, 0.0, 0.0};
    if (g.n_dims >= 2) {
        c1[1] = g.side[1] / 24.0;
        c2[1] = -g.side[1] / 20.0;
    }
    if (g.n_dims >= 3) {
        c1[2] = g.side[2] / 20.0;
        c2[2] = -g.side[2] / 24.0;
    }
    const double s = g.min_side();
    return linear_combo(bump_field(g, c1, s / 10.0), 1.0, bump_field(g, c2, s / 14.0), 0.6);
}

ScalarField power_spectrum_datum(const Grid& g, double spectral_decay, bool aligned_phases,
                                 std::uint64_t seed) {
    std::vector<std::complex<double>> c(g.total_points(), {0.0, 0.0});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const std::size_t p0 = g.points[0], p1 = g.points[1], p2 = axis_points(g, 2);
    for (std::size_t i0 = 0; i0 < p0; ++i0)
        for (std::size_t i1 = 0; i1 < p1; ++i1)
            for (std::size_t i2 = 0; i2 < p2; ++i2) {
                const std::size_t idx[kMaxDims] = {i0, i1, i2};
                bool in_band = true;
                bool zero = true;
                double k2 = 0.0;
                for (int a = 0; a < g.n_dims; ++a) {
                    const long m = g.signed_mode(a, idx[a]);
                    if (std::labs(m) > dealias_limit(g, a)) in_band = false;
                    if (m != 0) zero = false;
                    const double k = g.wavenumber(a, idx[a]);
                    k2 += k * k;
                }
                if (!in_band || zero) continue;  // mean-free, dealias-safe band only
                const std::size_t flat = flat_index(g, i0, i1, i2);
                const double mag = std::pow(k2, -spectral_decay / 2.0);
                if (aligned_phases) {
                    c[flat] = {mag, 0.0};
                    continue;
                }
                const std::size_t refl = reflected_index(g, flat);
                if (refl == flat) {
                    c[flat] = {mag, 0.0};
                } else if (flat < refl) {
                    const double ph = phase(rng);
                    c[flat] = std::polar(mag, ph);
                    c[refl] = std::conj(c[flat]);
                }
            }
    return ScalarField::from_coefficients(g, std::move(c));
}

ScalarField rough_datum(const Grid& g, std::uint64_t seed) {
    return power_spectrum_datum(g, g.n_dims / 2.0 + 0.1, false, seed);
}

ScalarField make_datum(const std::string& name, const Grid& g, std::uint64_t seed) {
    if (name == "bump" || name == "radial") return radial_bump(g);
    if (name == "offset_bump" || name == "nonradial") return offset_bump(g);
    if (name == "odd" || name == "odd_pair") return odd_pair(g);
    if (name == "even" || name == "even_pair") return even_pair(g);
    if (name == "pair" || name == "asymmetric") return asymmetric_pair(g);
    if (name == "rough") return rough_datum(g, seed);
    throw ValidationError(strf(
        "unknown datum '%s' (expected bump, offset_bump, odd, even, pair, or rough)",
        name.c_str()));
}

ScalarField normalized(const ScalarField& f, double q) {
    const double n = lq_norm(f, q);
    if (!(n > 0.0) || !std::isfinite(n))
        throw DomainError("normalized: field has zero or non-finite norm");
    return scaled_field(f, 1.0 / n);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

bool StudyReport::all_pass() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string report_text(const StudyReport& r) {
    std::ostringstream os;
    std::size_t passed = 0;
    for (const auto& c : r.checks) passed += c.pass ? 1 : 0;
    os << "# active scalar study report\n";
    os << "kind = " << r.kind << "\n";
    os << "seed = " << r.seed << "\n";
    os << strf("runtime_seconds = %.6g\n", r.runtime_seconds);
    os << "admissible = " << (r.admissibility.admissible ? "true" : "false") << "\n";
    os << strf("admissibility = 2b-1 = %.6g, 2g = %.6g, upper bound = %.6g; gamma window [%.6g, %.6g]",
               r.admissibility.order_lhs, r.admissibility.two_gamma, r.admissibility.upper_bound,
               r.admissibility.gamma_lower, r.admissibility.gamma_upper);
    if (!r.admissibility.notes.empty()) os << "; " << r.admissibility.notes;
    os << "\n";
    os << "checks = " << r.checks.size() << "\n";
    os << "passed = " << passed << "\n";
    os << "all_pass = " << (r.all_pass() ? "true" : "false") << "\n";
    for (const auto& c : r.checks) {
        os << "\n[check " << c.name << "]\n";
        os << strf("measured = %.17g\n", c.measured);
        os << strf("predicted = %.17g\n", c.predicted);
        os << strf("tolerance = %.17g\n", c.tolerance);
        os << "pass = " << (c.pass ? "true" : "false") << "\n";
        os << "expected_mismatch = " << (c.expected_mismatch ? "true" : "false") << "\n";
        if (!c.note.empty()) os << "note = " << c.note << "\n";
    }
    os << "\n[config]\n" << r.config_echo;
    if (!r.config_echo.empty() && r.config_echo.back() != '\n') os << "\n";
    os << "[end config]\n";
    return os.str();
}

ReportPaths write_report(const StudyReport& r, const std::string& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw Error("cannot create directory " + directory + ": " + ec.message());

    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d_%H%M%S", &tm);

    ReportPaths paths;
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::string base = r.kind + "_" + stamp;
        if (attempt > 0) base += strf("_%d", attempt);
        const fs::path report = fs::path(directory) / (base + ".report");
        if (fs::exists(report)) continue;
        paths.report_path = report.string();
        paths.csv_path = (fs::path(directory) / (base + ".csv")).string();
        break;
    }
    if (paths.report_path.empty())
        throw Error("cannot find a free report name under " + directory);

    std::ofstream out(paths.report_path);
    if (!out) throw Error("cannot write " + paths.report_path);
    out << report_text(r);
    out.close();
    if (!out) throw Error("write failed for " + paths.report_path);
    write_diagnostics_csv(r.series, paths.csv_path);
    return paths;
}

// ---------------------------------------------------------------------------
// Decay study
// ---------------------------------------------------------------------------

StudyReport run_decay_study(const RunConfig& cfg, const ScalarField& datum,
                            const std::vector<double>& q_list, bool with_l1) {
    Timer timer;
    StudyReport r = begin_report("decay", cfg);
    const CouplingSpec& spec = cfg.coupling;
    const Grid& g = datum.grid();
    const int n = g.n_dims;
    const double gamma = cfg.solver.gamma;
    const double beta = declared_order(spec);
    if (q_list.empty()) throw ValidationError("decay study: q_list must not be empty");
    for (double q : q_list)
        if (!(q >= 1.0)) throw ValidationError("decay study: q entries must be >= 1");

    const double t_box = safe_horizon(g, cfg.solver.kappa, gamma);
    SolverConfig s = cfg.solver;
    s.t_end = t_box;  // the study always runs to the wrap-around horizon
    const long steps = estimated_steps(s.t_end, s.dt);
    s.snapshot_every = std::max(1L, steps / 48);
    s.diagnostics_every = s.snapshot_every;

    const Trajectory traj = evolve(datum, s, spec);
    r.series = traj.diagnostics;

    // Fits live in a fixed fractional window of the horizon: late enough for
    // the self-similar regime, early enough that the conserved mean has not
    // flattened the norms into their box-average floor.
    const double t_min = 0.06 * t_box;
    const double t_max = 0.25 * t_box;

    const double denom = 2.0 * gamma - beta;
    const double qc = denom > 0.0 ? static_cast<double>(n) / denom : kInf;

    for (double q : q_list) {
        const std::vector<double> values = norm_series(traj, q);
        const KatoWeights w = kato_weights(n, gamma, beta, q);
        const std::string label = "decay_slope_q_" + q_label(q);

        if (!with_l1 && q < qc * (1.0 - 1e-9)) {
            // Below the critical exponent the theory only bounds the norm
            // (no decay rate); check non-increase instead of a slope.
            const auto viol = check_monotone(values, 1e-8);
            r.checks.push_back(make_check(
                label, static_cast<double>(viol.size()), 0.0, 0.0, viol.empty(),
                strf("q below critical %.6g: no predicted rate; checked non-increase over %zu samples",
                     qc, values.size())));
            continue;
        }

        // decay1 rate, upgraded by the extra L^1 control when requested.
        double predicted = -w.eta_tilde;
        if (with_l1) predicted -= (static_cast<double>(n) + beta) / (2.0 * gamma) - 1.0;

        try {
            const DecayFit fit = fit_decay(traj.times, values, t_min, t_max, predicted, 0.15);
            bool pass;
            double tolerance;
            if (std::abs(predicted) < 1e-12) {
                tolerance = 0.05;  // absolute gate at a zero predicted rate
                pass = std::abs(fit.slope) <= tolerance;
            } else {
                tolerance = 0.15 * std::abs(predicted);
                pass = std::abs(fit.slope - predicted) <= tolerance;
            }
            r.checks.push_back(make_check(
                label, fit.slope, predicted, tolerance, pass,
                strf("fit over [%.6g, %.6g], %d points, residual %.3g%s", fit.t_min, fit.t_max,
                     fit.points_used, fit.residual, with_l1 ? ", L1-improved rate" : "")));
        } catch (const WindowError& e) {
            r.checks.push_back(
                make_check(label, kQNaN, predicted, 0.15, false,
                           strf("window violation: %s", e.what())));
        }
    }

    // The maximum principle is free to check on the recorded sup norms.
    {
        std::vector<double> linf;
        linf.reserve(r.series.size());
        for (const auto& rec : r.series) linf.push_back(rec.linf);
        const auto viol = check_monotone(linf, 1e-8);
        r.checks.push_back(make_check("max_principle_linf", static_cast<double>(viol.size()), 0.0,
                                      0.0, viol.empty(),
                                      strf("%zu samples to t = %.6g", linf.size(), t_box)));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Scaling study
// ---------------------------------------------------------------------------

namespace {

// theta_B(x) = amp * theta(lambda x) on the same centered grid; exact because
// lambda * x_m is again a grid point.
// Dilation x -> lambda x about the box center, done on the band-limited
// interpolant: signed mode q moves to lambda q; source modes whose image the
// grid cannot hold are dropped rather than folded back in. For data whose
// spectrum already lives below N/(2 lambda) this is sampling theta(lambda x)
// exactly, and it commutes with every Fourier multiplier to rounding.
ScalarField dilate_field(const ScalarField& f, int lambda, double amp) {
    const Grid& g = f.grid();
    const auto& src = forward_transform(f);
    std::vector<std::complex<double>> dst(src.size(), {0.0, 0.0});
    const long lam = lambda;
    const std::size_t p0 = g.points[0], p1 = g.points[1], p2 = axis_points(g, 2);
    std::array<long, kMaxDims> q{};
    std::array<std::size_t, kMaxDims> to{};
    for (std::size_t i0 = 0; i0 < p0; ++i0)
        for (std::size_t i1 = 0; i1 < p1; ++i1)
            for (std::size_t i2 = 0; i2 < p2; ++i2) {
                const std::size_t idx[kMaxDims] = {i0, i1, i2};
                bool keep = true;
                long parity = 0;
                for (int a = 0; a < g.n_dims; ++a) {
                    q[a] = g.signed_mode(a, idx[a]);
                    const long nn = static_cast<long>(g.points[a]);
                    if (2 * lam * std::abs(q[a]) >= nn) { keep = false; break; }
                    long m = (lam * q[a]) % nn;
                    if (m < 0) m += nn;
                    to[a] = static_cast<std::size_t>(m);
                    parity += q[a];
                }
                if (!keep) continue;
                // Dilating about the center (index N/2, not 0) twists each
                // mode by e^{i pi q (1 - lambda)} = ±1 for integer lambda.
                const double sign = ((lam - 1) * parity) % 2 == 0 ? 1.0 : -1.0;
                dst[flat_index(g, to[0], to[1], g.n_dims == 3 ? to[2] : 0)] =
                    amp * sign * src[flat_index(g, i0, i1, i2)];
            }
    return ScalarField::from_coefficients(g, std::move(dst));
}

void require_central_support(const ScalarField& f, int lambda) {
    const Grid& g = f.grid();
    const auto& v = f.values();
    const double vmax = sup_abs(f);
    if (vmax == 0.0) return;
    const double thr = 1e-13 * vmax;
    const std::size_t p0 = g.points[0], p1 = g.points[1], p2 = axis_points(g, 2);
    for (std::size_t i0 = 0; i0 < p0; ++i0)
        for (std::size_t i1 = 0; i1 < p1; ++i1)
            for (std::size_t i2 = 0; i2 < p2; ++i2) {
                if (std::abs(v[flat_index(g, i0, i1, i2)]) <= thr) continue;
                const std::size_t idx[kMaxDims] = {i0, i1, i2};
                for (int a = 0; a < g.n_dims; ++a) {
                    const double x = g.coordinate(a, idx[a]);
                    const double limit = g.side[a] / (2.0 * lambda);
                    if (std::abs(x) >= limit)
                        throw ValidationError(strf(
                            "scaling: datum support reaches |x_%d| = %.6g >= side/(2 lambda) = %.6g; "
                            "dilation would wrap around the box",
                            a, std::abs(x), limit));
                }
            }
}

}  // namespace

StudyReport run_scaling_study(const RunConfig& cfg, const ScalarField& datum, int lambda) {
    Timer timer;
    StudyReport r = begin_report("scaling", cfg);
    const CouplingSpec& spec = cfg.coupling;
    const Grid& g = datum.grid();
    if (lambda < 2) throw ValidationError("scaling: lambda must be an integer >= 2");
    for (int a = 0; a < g.n_dims; ++a)
        if (std::abs(g.origin[a] - g.side[a] / 2.0) > 1e-12 * g.side[a])
            throw ValidationError("scaling: the box must be centered at the origin");
    require_central_support(datum, lambda);

    const double gamma = cfg.solver.gamma;
    const double beta = declared_order(spec);
    const double time_factor = std::pow(static_cast<double>(lambda), 2.0 * gamma);
    const double amp_factor = std::pow(static_cast<double>(lambda), 2.0 * gamma - beta);

    SolverConfig sA = cfg.solver;
    const long steps = estimated_steps(sA.t_end, sA.dt);
    sA.snapshot_every = std::max(1L, steps / 8);
    sA.diagnostics_every = sA.snapshot_every;
    SolverConfig sB = sA;
    sB.dt = sA.dt / time_factor;
    sB.t_end = sA.t_end / time_factor;

    const ScalarField datum_b = dilate_field(datum, lambda, amp_factor);

    const Trajectory trajA = evolve(datum, sA, spec);
    const Trajectory trajB = evolve(datum_b, sB, spec);
    r.series = trajA.diagnostics;

    double discrepancy = 0.0;
    std::size_t matched = 0;
    for (std::size_t jb = 1; jb < trajB.times.size(); ++jb) {
        const std::size_t ja = find_time(trajA.times, trajB.times[jb] * time_factor);
        if (ja == kNoMatch) continue;
        ++matched;
        const ScalarField mapped = dilate_field(trajA.snapshots[ja], lambda, amp_factor);
        discrepancy = std::max(discrepancy, rel_sup_diff(trajB.snapshots[jb], mapped));
    }

    // Calibrate against the stepper's own accuracy: halve dt in both runs and
    // measure how much the endpoints move.
    const double sc_a =
        stepper_self_convergence(datum, sA, spec, trajA.snapshots.back(), rel_sup_diff);
    const double sc_b =
        stepper_self_convergence(datum_b, sB, spec, trajB.snapshots.back(), rel_sup_diff);
    const double combined = sc_a + sc_b;
    const double tolerance = std::max(3.0 * combined, 1e-10);

    const bool log_family = spec.family == CouplingFamily::log_field ||
                            spec.family == CouplingFamily::log_power ||
                            spec.family == CouplingFamily::loglog_power;
    const bool expected_mismatch = log_family && spec.chi > 0.0;

    if (matched == 0) {
        r.checks.push_back(make_check("scaling_alignment", 0.0, 1.0, 0.0, false,
                                      "no common snapshot times between the two runs"));
    } else {
        const bool pass = expected_mismatch ? discrepancy > tolerance : discrepancy <= tolerance;
        std::string note = strf(
            "lambda = %d, amplitude factor %.6g, time factor %.6g; %zu matched snapshots; "
            "self-convergence %.3g + %.3g",
            lambda, amp_factor, time_factor, matched, sc_a, sc_b);
        if (expected_mismatch)
            note += "; inhomogeneous symbol: mismatch is the prediction";
        else if (!pass)
            note += "; a gap well above the stepper floor usually means the grid is too coarse "
                    "for the dilated comparison (the fine run resolves only half the band)";
        r.checks.push_back(
            make_check("scaling_discrepancy", discrepancy, 0.0, tolerance, pass, note,
                       expected_mismatch));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Symmetry study
// ---------------------------------------------------------------------------

namespace {

// +1 all slots even, -1 all slots odd, 0 mixed.
int classify_symbol_parity(const CouplingSpec& spec, int n) {
    const auto samples = dyadic_shell_samples(n, 0, 6, 8);
    bool all_even = true, all_odd = true;
    for (int i = 0; i < n; ++i)
        for (const auto& xi : samples) {
            std::array<double, kMaxDims> mxi{};
            for (int a = 0; a < n; ++a) mxi[static_cast<std::size_t>(a)] = -xi[static_cast<std::size_t>(a)];
            const std::complex<double> p = scalar_symbol(spec, i, xi, n);
            const std::complex<double> m = scalar_symbol(spec, i, mxi, n);
            const double scale = std::abs(p) + std::abs(m) + 1e-300;
            if (std::abs(p - m) > 1e-10 * scale) all_even = false;
            if (std::abs(p + m) > 1e-10 * scale) all_odd = false;
        }
    if (all_even && !all_odd) return 1;
    if (all_odd && !all_even) return -1;
    if (all_even && all_odd) return 1;  // zero symbols: even is the safe label
    return 0;
}

}  // namespace

StudyReport run_symmetry_study(const RunConfig& cfg, const ScalarField& datum,
                               const std::string& datum_kind) {
    Timer timer;
    StudyReport r = begin_report("symmetry", cfg);
    const CouplingSpec& spec = cfg.coupling;
    const Grid& g = datum.grid();
    const int n = g.n_dims;

    SymmetryKind measure;
    if (datum_kind == "odd") measure = SymmetryKind::odd;
    else if (datum_kind == "even") measure = SymmetryKind::even;
    else if (datum_kind == "radial" || datum_kind == "nonradial") measure = SymmetryKind::radial;
    else
        throw ValidationError(
            strf("symmetry study: datum kind '%s' not in {odd, even, radial, nonradial}",
                 datum_kind.c_str()));

    // Expectation from the symbol algebra: a parity is transported when the
    // slot symbols share it; radial profiles survive when div_xi P is radial.
    const int parity = classify_symbol_parity(spec, n);
    const double radiality =
        divergence_symbol_radiality(spec, n, dyadic_shell_samples(n, 0, 6, 12));
    bool expect_preserved;
    std::string reason;
    if (datum_kind == "odd") {
        expect_preserved = parity == -1;
        reason = strf("slot symbols are %s", parity == -1 ? "odd" : (parity == 1 ? "even" : "mixed"));
    } else if (datum_kind == "even") {
        expect_preserved = parity == 1;
        reason = strf("slot symbols are %s", parity == 1 ? "even" : (parity == -1 ? "odd" : "mixed"));
    } else if (datum_kind == "radial") {
        expect_preserved = radiality < 1e-6;
        reason = strf("divergence radiality defect %.3g", radiality);
    } else {  // nonradial datum: no mechanism restores radial symmetry
        expect_preserved = false;
        reason = "nonradial datum: radial symmetry is not produced by the flow";
    }

    const double defect0 = symmetry_defect(datum, measure);
    if (datum_kind == "nonradial" && defect0 <= 1e-3)
        throw ValidationError("symmetry study: 'nonradial' datum starts radially symmetric");

    SolverConfig s = cfg.solver;
    const long steps = estimated_steps(s.t_end, s.dt);
    s.snapshot_every = std::max(1L, steps / 32);
    s.diagnostics_every = s.snapshot_every;
    const Trajectory traj = evolve(datum, s, spec);
    r.series = traj.diagnostics;

    double max_defect = 0.0;
    std::ostringstream series_note;
    for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
        const double d = symmetry_defect(traj.snapshots[j], measure);
        max_defect = std::max(max_defect, d);
        if (j < 6 || j + 1 == traj.snapshots.size()) {
            if (series_note.tellp() > 0) series_note << ", ";
            series_note << strf("t=%.4g: %.3g", traj.times[j], d);
        }
    }
    const double defect_end = symmetry_defect(traj.snapshots.back(), measure);

    if (datum_kind == "radial") {
        r.checks.push_back(make_check("divergence_radiality", radiality, 0.0, 1e-6,
                                      radiality < 1e-6, "pre-check for radial transport"));
    }

    if (expect_preserved) {
        // Radial defects carry a shell-binning floor, so the gate is anchored
        // at the initial defect; exact parities start at machine zero.
        const double tolerance = measure == SymmetryKind::radial ? defect0 + 1e-3 : 1e-8;
        r.checks.push_back(make_check(strf("symmetry_preserved_%s", datum_kind.c_str()), max_defect,
                                      0.0, tolerance, max_defect < tolerance,
                                      reason + "; defects " + series_note.str()));
    } else {
        r.checks.push_back(make_check(strf("symmetry_broken_%s", datum_kind.c_str()), defect_end,
                                      0.0, 1e-3, defect_end > 1e-3,
                                      reason + "; growth above the gate is the prediction; defects " +
                                          series_note.str(),
                                      true));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Picard study
// ---------------------------------------------------------------------------

StudyReport run_picard_study(const RunConfig& cfg, const ScalarField& datum,
                             const std::vector<double>& amplitudes) {
    Timer timer;
    StudyReport r = begin_report("picard", cfg);
    const CouplingSpec& spec = cfg.coupling;
    const Grid& g = datum.grid();
    const int n = g.n_dims;
    require_positive_list(amplitudes, "picard study amplitudes");
    std::vector<double> amps = amplitudes;
    std::sort(amps.begin(), amps.end());

    const double beta = declared_order(spec);
    const QWindow window = picard_q_window(n, cfg.solver.gamma, beta);
    const double q = window.nonempty ? window.midpoint_q : 4.0;
    const double T = cfg.solver.t_end;
    const int M = 48;
    const int k_max = 6;

    r.checks.push_back(make_check(
        "picard_window", q, window.nonempty ? window.midpoint_q : kQNaN, 0.0, true,
        window.nonempty
            ? strf("q in (%.6g, %.6g), midpoint used; T = %.6g, M = %d, k_max = %d",
                   window.q_lower, window.q_upper, T, M, k_max)
            : strf("empty q window for these parameters; fell back to q = 4; T = %.6g", T)));

    std::vector<double> worst;                  // per amplitude, aligned with amps
    std::vector<bool> diverged(amps.size(), false);
    PicardRun smallest_run;
    bool have_smallest = false;

    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double amp = amps[i];
        PicardRun run;
        try {
            run = picard_iterate(scaled_field(datum, amp), T, k_max, M, q, cfg.solver, spec);
        } catch (const BlowupError& e) {
            diverged[i] = true;
            worst.push_back(kInf);
            r.checks.push_back(make_check(strf("picard_ratios_amp_%g", amp), kInf, 1.0, kInf, true,
                                          strf("iteration left the finite range: %s", e.what())));
            continue;
        }
        double w = 0.0;
        std::ostringstream note;
        note << "d_k:";
        for (double d : run.kato_diffs) note << strf(" %.3g", d);
        note << "; ratios:";
        for (double rr : run.ratios) {
            w = std::max(w, rr);
            note << strf(" %.3g", rr);
        }
        worst.push_back(w);
        r.checks.push_back(make_check(strf("picard_ratios_amp_%g", amp), w, 1.0, kInf, true,
                                      note.str() + strf("; evolve gap %.3g", run.evolve_discrepancy)));
        if (i == 0) {
            smallest_run = std::move(run);
            have_smallest = true;
        }
    }

    // Contraction at the smallest amplitude is the Picard-convergence claim.
    if (have_smallest) {
        double w = 0.0;
        for (double rr : smallest_run.ratios) w = std::max(w, rr);
        r.checks.push_back(make_check(
            "picard_contraction", w, 1.0, 0.7, w < 0.7,
            strf("worst Kato-norm ratio over iterates 2..%d at amplitude %g; eta = %.6g", k_max - 1,
                 amps[0], smallest_run.eta)));
    } else {
        r.checks.push_back(make_check("picard_contraction", kInf, 1.0, 0.7, false,
                                      "smallest amplitude already diverged"));
    }

    if (amps.size() >= 2) {
        double min_step = kInf;
        std::ostringstream note;
        for (std::size_t i = 0; i + 1 < amps.size(); ++i) {
            if (diverged[i + 1]) continue;  // inf after finite still degrades
            min_step = std::min(min_step, worst[i + 1] - worst[i]);
        }
        if (!std::isfinite(min_step)) min_step = 0.0;  // later amplitudes all diverged
        std::ostringstream all;
        for (std::size_t i = 0; i < amps.size(); ++i)
            all << strf("%s%g: %.3g", i ? ", " : "", amps[i], worst[i]);
        r.checks.push_back(make_check("picard_degradation", min_step, 0.0, 0.02,
                                      min_step >= -0.02,
                                      "worst ratio per amplitude: " + all.str()));
    }

    // Cross-validate the last iterate against the stepper, with both methods'
    // self-convergence errors as the yardstick.
    if (have_smallest) {
        const ScalarField theta0 = scaled_field(datum, amps[0]);
        SolverConfig se = cfg.solver;
        se.t_end = T;
        se.snapshot_every = 0;
        se.diagnostics_every = 0;
        const ScalarField end_a = evolve(theta0, se, spec).snapshots.back();
        const double sc_evolve = stepper_self_convergence(theta0, se, spec, end_a, rel_l2_diff);

        const PicardRun half =
            picard_iterate(theta0, T, k_max, M / 2, q, cfg.solver, spec);
        const double sc_picard =
            rel_l2_diff(smallest_run.iterates.back().back(), half.iterates.back().back());

        const double combined = 2.0 * (sc_evolve + sc_picard);
        const double tolerance = std::min(1e-4, combined);
        const double measured = smallest_run.evolve_discrepancy;
        r.checks.push_back(make_check(
            "picard_evolve_agreement", measured, 0.0, tolerance, measured < tolerance,
            strf("self-convergence: stepper %.3g, iteration %.3g (nodes %d vs %d); gate is the "
                 "smaller of 1e-4 and their doubled sum",
                 sc_evolve, sc_picard, M, M / 2)));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Dependence study
// ---------------------------------------------------------------------------

StudyReport run_dependence_study(const RunConfig& cfg, const ScalarField& datum,
                                 const std::vector<double>& perturbation_sizes) {
    Timer timer;
    StudyReport r = begin_report("dependence", cfg);
    const CouplingSpec& spec = cfg.coupling;
    const Grid& g = datum.grid();
    const int n = g.n_dims;
    require_positive_list(perturbation_sizes, "dependence study perturbation sizes");

    const double beta = declared_order(spec);
    const double qm = critical_or(2.0, n, cfg.solver.gamma, beta);

    // A fixed smooth direction away from the datum's own support pattern.
    std::array<double, kMaxDims> c{-g.side[0] / 16.0, 0.0, 0.0};
    if (n >= 2) c[1] = g.side[1] / 24.0;
    const ScalarField direction = normalized(bump_field(g, c, g.min_side() / 10.0), qm);

    SolverConfig s = cfg.solver;
    const long steps = estimated_steps(s.t_end, s.dt);
    s.snapshot_every = std::max(1L, steps / 8);
    s.diagnostics_every = s.snapshot_every;
    const Trajectory base = evolve(datum, s, spec);
    r.series = base.diagnostics;

    auto response_ratio = [&](const ScalarField& start, double denom) {
        const Trajectory pert = evolve(start, s, spec);
        double sup = 0.0;
        for (std::size_t j = 1; j < pert.times.size(); ++j) {
            const std::size_t jb = find_time(base.times, pert.times[j]);
            if (jb == kNoMatch) continue;
            sup = std::max(
                sup, lq_norm(linear_combo(base.snapshots[jb], 1.0, pert.snapshots[j], -1.0), qm) /
                         denom);
        }
        return sup;
    };

    std::vector<double> ratios;
    for (double eps : perturbation_sizes) {
        const double ratio = response_ratio(linear_combo(datum, 1.0, direction, eps), eps);
        ratios.push_back(ratio);
        r.checks.push_back(make_check(strf("dependence_ratio_eps_%g", eps), ratio, 1.0, kInf, true,
                                      strf("sup_t |theta - theta_pert|_q%.6g / size", qm)));
    }

    const double spread =
        *std::max_element(ratios.begin(), ratios.end()) /
        std::max(*std::min_element(ratios.begin(), ratios.end()), 1e-300);
    r.checks.push_back(make_check(
        "dependence_ratio_spread", spread, 1.0, 3.0, spread < 3.0,
        strf("max/min response ratio across %zu sizes; a bounded spread is the continuity claim",
             ratios.size())));

    // Stress case: flip the datum outright (perturbation 2 |theta_0|).
    {
        const double denom = 2.0 * lq_norm(datum, qm);
        const double ratio = response_ratio(scaled_field(datum, -1.0), denom);
        r.checks.push_back(make_check("dependence_negation_stress", ratio, 1.0, kInf, true,
                                      "O(1) negation of the datum: bounded quotient, reported only"));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Smoothing study
// ---------------------------------------------------------------------------

StudyReport run_smoothing_study(const RunConfig& cfg, const ScalarField& rough) {
    Timer timer;
    StudyReport r = begin_report("smoothing", cfg);
    const CouplingSpec& spec = cfg.coupling;
    const Grid& g = rough.grid();
    const int n = g.n_dims;
    const double gamma = cfg.solver.gamma;
    const double kappa = cfg.solver.kappa;
    const double beta = declared_order(spec);

    const double t3 = cfg.solver.t_end;
    const std::array<double, 3> sample_times{t3 / 100.0, t3 / 10.0, t3};

    std::array<ScalarField, 3> finals;
    for (std::size_t i = 0; i < 3; ++i) {
        SolverConfig s = cfg.solver;
        s.t_end = sample_times[i];
        // Short horizons need their own step: keep dt but never fewer than two steps.
        long steps = std::max(2L, estimated_steps(s.t_end, s.dt));
        s.dt = s.t_end / static_cast<double>(steps);
        s.snapshot_every = 0;
        s.diagnostics_every = i == 2 ? std::max(1L, estimated_steps(s.t_end, s.dt) / 48) : 0;
        Trajectory traj = evolve(rough, s, spec);
        if (i == 2) r.series = traj.diagnostics;
        finals[i] = std::move(traj.snapshots.back());
    }

    for (double q : cfg.study.q_list) {
        const KatoWeights w = kato_weights(n, gamma, beta, q);
        const std::string label = q_label(q);
        if (!(w.eta > 0.0)) {
            r.checks.push_back(make_check(
                "smoothing_weight_q_" + label, w.eta, 0.0, 0.0, true,
                "eta <= 0: the weighted vanishing statement does not apply at this q"));
            continue;
        }
        std::array<double, 3> wv{};
        bool finite = true;
        std::ostringstream note;
        for (std::size_t i = 0; i < 3; ++i) {
            wv[i] = std::pow(sample_times[i], w.eta) * sobolev_norm(finals[i], beta - 1.0, q);
            finite = finite && std::isfinite(wv[i]);
            note << strf("%st=%.4g: %.6g", i ? ", " : "", sample_times[i], wv[i]);
        }
        r.checks.push_back(make_check("smoothing_finite_q_" + label,
                                      *std::max_element(wv.begin(), wv.end()), 0.0, kInf, finite,
                                      strf("t^%.4g weighted norms: ", w.eta) + note.str()));
        const double growth = std::max(wv[0] / wv[1], wv[1] / wv[2]);
        r.checks.push_back(make_check("smoothing_vanishing_q_" + label, growth, 0.0, 1.0,
                                      growth < 1.0,
                                      "weighted norm must shrink toward t = 0; " + note.str()));
    }

    // Dyadic-shell suppression at the middle sample against the per-mode
    // semigroup factor applied to the initial coefficients (exact for zero
    // coupling; advection shows up as the deviation).
    {
        const double t = sample_times[1];
        const auto& c0 = rough.coefficients();
        const auto& ct = finals[1].coefficients();
        constexpr int kMaxShell = 32;
        std::array<double, kMaxShell> measured2{}, predicted2{}, baseline2{};
        const std::size_t p0 = g.points[0], p1 = g.points[1], p2 = axis_points(g, 2);
        for (std::size_t i0 = 0; i0 < p0; ++i0)
            for (std::size_t i1 = 0; i1 < p1; ++i1)
                for (std::size_t i2 = 0; i2 < p2; ++i2) {
                    const std::size_t idx[kMaxDims] = {i0, i1, i2};
                    double k2 = 0.0;
                    for (int a = 0; a < n; ++a) {
                        const double k = g.wavenumber(a, idx[a]);
                        k2 += k * k;
                    }
                    if (k2 < 1.0) continue;
                    const int shell = static_cast<int>(std::floor(std::log2(std::sqrt(k2))));
                    if (shell < 0 || shell >= kMaxShell) continue;
                    const std::size_t flat = flat_index(g, i0, i1, i2);
                    const double m2 = std::norm(ct[flat]);
                    const double b2 = std::norm(c0[flat]);
                    const double gma = std::exp(-kappa * t * std::pow(k2, gamma));
                    measured2[static_cast<std::size_t>(shell)] += m2;
                    predicted2[static_cast<std::size_t>(shell)] += b2 * gma * gma;
                    baseline2[static_cast<std::size_t>(shell)] += b2;
                }
        double worst = 1.0;
        std::ostringstream note;
        for (int j = 0; j < kMaxShell; ++j) {
            const auto js = static_cast<std::size_t>(j);
            if (baseline2[js] <= 0.0 || predicted2[js] <= 0.0) continue;
            const double suppression = std::sqrt(predicted2[js] / baseline2[js]);
            if (suppression < 1e-3) continue;  // below this the shell is numerically empty
            const double ratio = std::sqrt(measured2[js] / predicted2[js]);
            worst = std::max(worst, std::max(ratio, 1.0 / ratio));
            note << strf("%s|k| in [%g, %g): suppression %.3g, measured/semigroup %.4g",
                         note.tellp() > 0 ? "; " : "", std::exp2(j), std::exp2(j + 1), suppression,
                         ratio);
        }
        r.checks.push_back(make_check("smoothing_shell_tails", worst, 1.0, 2.0, worst <= 2.0,
                                      strf("t = %.4g; ", t) + note.str()));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Semigroup probe
// ---------------------------------------------------------------------------

StudyReport run_semigroup_probe(const RunConfig& cfg) {
    Timer timer;
    StudyReport r = begin_report("probe", cfg);
    const Grid& g = cfg.grid;
    const double gamma = cfg.solver.gamma;
    const double kappa = cfg.solver.kappa;
    const double t_box = safe_horizon(g, kappa, gamma);

    // Extremal data per source exponent: a near-delta bump saturates the L^1
    // rates; a phase-aligned |k|^{-n/2} spectrum saturates L^2 -> L^inf.
    double h_max = 0.0;
    for (int a = 0; a < g.n_dims; ++a) h_max = std::max(h_max, g.spacing(a));
    const ScalarField f1 = bump_field(g, {0.0, 0.0, 0.0}, 4.0 * h_max);
    const ScalarField f2 = power_spectrum_datum(g, g.n_dims / 2.0, true, 1);

    double k_nyq = kInf;
    for (int a = 0; a < g.n_dims; ++a)
        k_nyq = std::min(k_nyq, M_PI * static_cast<double>(g.points[a]) / g.side[a]);

    // Windows: mass data need the late self-similar regime; spectral data
    // saturate early, before the highest modes die.
    const double b1_lo = 0.06 * t_box, b1_hi = 0.24 * t_box;
    double b2_lo = 5.0 / (kappa * std::pow(k_nyq, 2.0 * gamma));
    double b2_hi = 6.0 * b2_lo;
    if (b2_hi > t_box) {
        b2_lo *= t_box / b2_hi;
        b2_hi = t_box;
    }

    const std::array<std::pair<double, double>, 3> pairs{
        std::pair<double, double>{1.0, 2.0}, {1.0, kInf}, {2.0, kInf}};
    for (const auto& [p, q] : pairs) {
        const ScalarField& f = p == 1.0 ? f1 : f2;
        const double lo = p == 1.0 ? b1_lo : b2_lo;
        const double hi = p == 1.0 ? b1_hi : b2_hi;
        const ProbeResult pr = probe_lp_lq_decay(f, p, q, kappa, gamma, log_spaced(lo, hi, 9));
        const double tolerance = 0.05 * std::abs(pr.predicted_slope);
        r.checks.push_back(make_check(
            strf("semigroup_slope_p%s_q%s", q_label(p).c_str(), q_label(q).c_str()), pr.slope,
            pr.predicted_slope, tolerance, std::abs(pr.slope - pr.predicted_slope) <= tolerance,
            strf("9 samples in [%.6g, %.6g], %s datum", lo, hi,
                 p == 1.0 ? "narrow bump" : "aligned |k|^{-n/2}")));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

ScalarField normalized_critical(const ScalarField& f, const RunConfig& cfg) {
    const double qc =
        critical_or(2.0, cfg.grid.n_dims, cfg.solver.gamma, declared_order(cfg.coupling));
    return normalized(f, qc);
}

}  // namespace

StudyReport run_study(const RunConfig& cfg, std::uint64_t seed) {
    const std::string& kind = cfg.study.kind;
    const std::uint64_t used = seed != 0 ? seed : default_seed(kind);
    StudyReport r;

    if (kind == "probe") {
        r = run_semigroup_probe(cfg);
    } else if (kind == "decay") {
        const ScalarField datum =
            normalized_critical(make_datum(cfg.study.datum, cfg.grid, used), cfg);
        r = run_decay_study(cfg, datum, cfg.study.q_list, cfg.study.with_l1);
    } else if (kind == "scaling") {
        const double lam = cfg.study.lambda;
        if (std::abs(lam - std::round(lam)) > 1e-9)
            throw ValidationError("scaling: lambda must be an integer for on-grid dilation");
        const ScalarField datum =
            normalized_critical(make_datum(cfg.study.datum, cfg.grid, used), cfg);
        r = run_scaling_study(cfg, datum, static_cast<int>(std::lround(lam)));
    } else if (kind == "symmetry") {
        std::string dk = cfg.study.datum;
        if (dk == "bump") dk = "radial";
        else if (dk == "offset_bump") dk = "nonradial";
        else if (dk == "odd_pair") dk = "odd";
        else if (dk == "even_pair") dk = "even";
        const ScalarField datum = normalized_critical(make_datum(dk, cfg.grid, used), cfg);
        r = run_symmetry_study(cfg, datum, dk);
    } else if (kind == "picard") {
        const ScalarField datum =
            normalized_critical(make_datum(cfg.study.datum, cfg.grid, used), cfg);
        r = run_picard_study(cfg, datum, cfg.study.amplitudes);
    } else if (kind == "dependence") {
        const ScalarField datum =
            normalized_critical(make_datum(cfg.study.datum, cfg.grid, used), cfg);
        r = run_dependence_study(cfg, datum, cfg.study.perturbations);
    } else if (kind == "smoothing") {
        const ScalarField datum = normalized_critical(rough_datum(cfg.grid, used), cfg);
        r = run_smoothing_study(cfg, datum);
    } else if (kind == "simulate") {
        throw ValidationError("'simulate' is a plain run, not a study; use run_simulation");
    } else {
        throw ValidationError(strf("unknown study kind '%s'", kind.c_str()));
    }

    r.seed = used;
    return r;
}

StudyReport run_simulation(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    Timer timer;
    StudyReport r = begin_report("simulate", cfg);
    r.seed = seed != 0 ? seed : default_seed("simulate");

    const ScalarField datum =
        normalized_critical(make_datum(cfg.study.datum, cfg.grid, r.seed), cfg);

    Trajectory traj;
    bool completed = true;
    std::string failure;
    try {
        traj = evolve(datum, cfg.solver, cfg.coupling);
    } catch (const EvolveBlowup& e) {
        completed = false;
        failure = e.what();
        if (e.partial) traj = *e.partial;
    }
    r.series = traj.diagnostics;

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create directory " + out_dir + ": " + ec.message());
    const std::string csv_path =
        (fs::path(out_dir) / (cfg.output.prefix + "_diagnostics.csv")).string();
    write_diagnostics_csv(traj.diagnostics, csv_path);
    for (std::size_t j = 0; j < traj.snapshots.size(); ++j)
        write_snapshot(traj.snapshots[j], traj.times[j],
                       (fs::path(out_dir) /
                        strf("%s_snapshot_%04zu.asf", cfg.output.prefix.c_str(), j))
                           .string());

    const double reached = traj.times.empty() ? 0.0 : traj.times.back();
    r.checks.push_back(make_check(
        "completed", reached, cfg.solver.t_end, 1e-9 * cfg.solver.t_end,
        completed && std::abs(reached - cfg.solver.t_end) <= 1e-9 * cfg.solver.t_end,
        completed ? strf("%zu snapshots, %zu diagnostics rows under %s", traj.snapshots.size(),
                         traj.diagnostics.size(), out_dir.c_str())
                  : "blow-up: " + failure));
    if (!traj.snapshots.empty()) {
        const double m0 = datum.mean();
        const double m1 = traj.snapshots.back().mean();
        r.checks.push_back(make_check("mean_conserved", std::abs(m1 - m0), 0.0,
                                      1e-12 * (1.0 + std::abs(m0)),
                                      std::abs(m1 - m0) <= 1e-12 * (1.0 + std::abs(m0)),
                                      strf("box average %.6g -> %.6g", m0, m1)));
    }

    r.runtime_seconds = timer.seconds();
    return r;
}

}  // namespace ascal
