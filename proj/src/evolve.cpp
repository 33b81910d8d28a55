#include "ascal/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ascal/spectral_ops.hpp"

namespace ascal {

namespace {

// Loops every mode, handing the callback the flat index and wavevector.
template <typename F>
void for_each_mode(const Grid& g, F&& body) {
    const size_t n0 = g.points[0];
    const size_t n1 = g.n_dims > 1 ? g.points[1] : 1;
    const size_t n2 = g.n_dims > 2 ? g.points[2] : 1;
    std::array<double, kMaxDims> k{};
    size_t idx = 0;
    for (size_t m0 = 0; m0 < n0; ++m0) {
        k[0] = g.wavenumber(0, m0);
        for (size_t m1 = 0; m1 < n1; ++m1) {
            if (g.n_dims > 1) k[1] = g.wavenumber(1, m1);
            for (size_t m2 = 0; m2 < n2; ++m2, ++idx) {
                if (g.n_dims > 2) k[2] = g.wavenumber(2, m2);
                body(idx, k);
            }
        }
    }
}

bool all_finite(const std::vector<std::complex<double>>& c) {
    for (const auto& z : c)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

// -div(P[theta] phi) in coefficient space; optionally reports max|u| for the
// stability guard. theta and phi coincide for the plain transport term.
ScalarField divergence_form_term(const ScalarField& theta, const ScalarField& phi,
                                 const VelocityOperator& vel, bool do_dealias, double t_now,
                                 double* velocity_max) {
    const Grid& g = vel.grid();
    const ScalarField* th = &theta;
    const ScalarField* ph = &phi;
    ScalarField th_cut;
    ScalarField ph_cut;
    if (do_dealias) {
        th_cut = dealias(theta);
        ph_cut = (&theta == &phi) ? th_cut : dealias(phi);
        th = &th_cut;
        ph = (&theta == &phi) ? &th_cut : &ph_cut;
    }

    const auto u = vel.apply(*th);
    const auto& pv = ph->values();
    std::vector<std::complex<double>> out(g.total_points(), {0.0, 0.0});
    double vmax = 0.0;
    for (int j = 0; j < g.n_dims; ++j) {
        const auto& uv = u[static_cast<size_t>(j)].values();
        std::vector<double> w(pv.size());
        for (size_t i = 0; i < pv.size(); ++i) {
            vmax = std::max(vmax, std::abs(uv[i]));
            w[i] = uv[i] * pv[i];
        }
        const ScalarField wf = ScalarField::from_values(g, std::move(w));
        const auto& wc = wf.coefficients();
        for_each_mode(g, [&](size_t idx, const std::array<double, kMaxDims>& k) {
            // -i k_j w^_j accumulated over j gives -div in spectral space.
            out[idx] += std::complex<double>(0.0, -k[j]) * wc[idx];
        });
    }
    out[0] = {0.0, 0.0};
    if (!all_finite(out)) throw BlowupError("non-finite transport term", t_now);
    ScalarField result = ScalarField::from_coefficients(g, std::move(out));
    if (do_dealias) result = dealias(result);
    if (velocity_max) *velocity_max = vmax;
    return result;
}

}  // namespace

const char* integrator_name(Integrator i) {
    return i == Integrator::etdrk1 ? "etdrk1" : "etdrk2";
}

Integrator integrator_from_name(const std::string& name) {
    if (name == "etdrk1") return Integrator::etdrk1;
    if (name == "etdrk2") return Integrator::etdrk2;
    throw ValidationError("unknown integrator '" + name + "' (expected etdrk1 or etdrk2)");
}

void validate_solver(const SolverConfig& cfg) {
    if (!std::isfinite(cfg.kappa) || cfg.kappa <= 0.0)
        throw ValidationError("solver: kappa must be positive");
    if (!std::isfinite(cfg.gamma) || cfg.gamma <= 0.0)
        throw ValidationError("solver: gamma must be positive");
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0) throw ValidationError("solver: dt must be positive");
    if (!std::isfinite(cfg.t_end) || cfg.t_end <= 0.0)
        throw ValidationError("solver: t_end must be positive");
    if (!(cfg.dt < cfg.t_end)) throw ValidationError("solver: dt must be smaller than t_end");
    if (cfg.snapshot_every < 0 || cfg.diagnostics_every < 0)
        throw ValidationError("solver: cadences must be >= 0");
    if (!std::isfinite(cfg.blowup_factor) || cfg.blowup_factor <= 1.0)
        throw ValidationError("solver: blowup_factor must exceed 1");
    if (!std::isfinite(cfg.stability_constant) || cfg.stability_constant <= 0.0)
        throw ValidationError("solver: stability_constant must be positive");
    if (cfg.diagnostics_q != 0.0 && !(cfg.diagnostics_q >= 1.0))
        throw ValidationError("solver: diagnostics_q must be 0 (auto) or >= 1");
}

double resolve_diagnostics_q(const SolverConfig& cfg, int n_dims, double beta) {
    if (cfg.diagnostics_q > 0.0) return cfg.diagnostics_q;
    const QWindow w = picard_q_window(n_dims, cfg.gamma, beta);
    if (w.nonempty) return w.midpoint_q;
    const double qc = critical_q(n_dims, cfg.gamma, beta);
    if (!std::isnan(qc)) return std::max(2.0, qc);
    return 4.0;
}

ScalarField nonlinear_term(const ScalarField& theta, const CouplingSpec& spec, bool dealias,
                           double t_now) {
    VelocityOperator vel(theta.grid(), spec);
    return divergence_form_term(theta, theta, vel, dealias, t_now, nullptr);
}

Stepper::Stepper(const Grid& g, const SolverConfig& cfg, const CouplingSpec& spec)
    : grid_(g), cfg_(cfg), spec_(spec), vel_(g, spec) {
    validate_solver(cfg);
    max_k_ = max_wavenumber(g, cfg.dealias);
}

const Stepper::Tables& Stepper::tables_for(double dt) const {
    auto it = cache_.find(dt);
    if (it != cache_.end()) return it->second;

    Tables tb;
    const size_t total = grid_.total_points();
    tb.propagator.resize(total);
    tb.phi1_dt.resize(total);
    tb.phi2_dt.resize(total);
    for_each_mode(grid_, [&](size_t idx, const std::array<double, kMaxDims>& k) {
        double k2 = 0.0;
        for (int a = 0; a < grid_.n_dims; ++a) k2 += k[a] * k[a];
        const double z = -cfg_.kappa * std::pow(k2, cfg_.gamma) * dt;
        tb.propagator[idx] = std::exp(z);
        tb.phi1_dt[idx] = dt * (z == 0.0 ? 1.0 : std::expm1(z) / z);
        // phi2 = (e^z - 1 - z)/z^2 loses digits near 0; switch to the series.
        double phi2;
        if (std::abs(z) < 1e-2) {
            phi2 = 1.0 / 2.0 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 +
                   z * z * z * z / 720.0 + z * z * z * z * z / 5040.0;
        } else {
            phi2 = (std::expm1(z) - z) / (z * z);
        }
        tb.phi2_dt[idx] = dt * phi2;
    });
    return cache_.emplace(dt, std::move(tb)).first->second;
}

ScalarField Stepper::advance(const ScalarField& state, double t, double dt) const {
    const Tables& tb = tables_for(dt);

    double vmax = 0.0;
    const ScalarField n1 = divergence_form_term(state, state, vel_, cfg_.dealias, t, &vmax);
    const double guard = dt * vmax * max_k_;
    if (guard > cfg_.stability_constant) {
        std::ostringstream os;
        os << "advective guard " << guard << " above " << cfg_.stability_constant << " at t = " << t;
        throw StepRejection(os.str(), guard);
    }

    const auto& sc = state.coefficients();
    const auto& n1c = n1.coefficients();
    std::vector<std::complex<double>> a1(sc.size());
    for (size_t i = 0; i < sc.size(); ++i) a1[i] = tb.propagator[i] * sc[i] + tb.phi1_dt[i] * n1c[i];
    ScalarField predictor = ScalarField::from_coefficients(grid_, std::move(a1));
    if (cfg_.integrator == Integrator::etdrk1) return predictor;

    const ScalarField n2 = divergence_form_term(predictor, predictor, vel_, cfg_.dealias, t + dt,
                                                nullptr);
    const auto& pc = predictor.coefficients();
    const auto& n2c = n2.coefficients();
    std::vector<std::complex<double>> out(pc.size());
    for (size_t i = 0; i < pc.size(); ++i) out[i] = pc[i] + tb.phi2_dt[i] * (n2c[i] - n1c[i]);
    return ScalarField::from_coefficients(grid_, std::move(out));
}

ScalarField step(const ScalarField& state, double t, const SolverConfig& cfg,
                 const CouplingSpec& spec) {
    return Stepper(state.grid(), cfg, spec).advance(state, t, cfg.dt);
}

Trajectory evolve(const ScalarField& theta0, const SolverConfig& cfg, const CouplingSpec& spec) {
    validate_solver(cfg);
    const Grid& g = theta0.grid();
    Stepper stepper(g, cfg, spec);
    const double q_used = resolve_diagnostics_q(cfg, g.n_dims, declared_order(spec));

    auto traj = std::make_shared<Trajectory>();
    auto record = [&](const ScalarField& f, double t, bool snapshot, bool diag) {
        if (snapshot) {
            traj->times.push_back(t);
            traj->snapshots.push_back(f);
        }
        if (diag)
            traj->diagnostics.push_back(
                compute_diagnostics(f, t, stepper.velocity_op(), spec, cfg.gamma, q_used));
    };

    ScalarField state = theta0;
    const double linf0 = lq_norm(theta0, std::numeric_limits<double>::infinity());
    record(state, 0.0, true, true);

    double t = 0.0;
    double dt = cfg.dt;
    long accepted = 0;
    const double t_close = cfg.t_end * (1.0 - 1e-12);
    while (t < t_close) {
        const double dt_eff = std::min(dt, cfg.t_end - t);
        ScalarField next;
        try {
            next = stepper.advance(state, t, dt_eff);
        } catch (const StepRejection&) {
            dt /= 2.0;
            if (dt < cfg.dt * 0x1p-40)
                throw EvolveBlowup("stability guard forced dt below dt0/2^40", t,
                                   std::move(traj));
            continue;
        } catch (const BlowupError& e) {
            throw EvolveBlowup(e.what(), e.time, std::move(traj));
        }
        state = std::move(next);
        t += dt_eff;
        ++accepted;

        const double linf = lq_norm(state, std::numeric_limits<double>::infinity());
        if (!std::isfinite(linf) || linf > cfg.blowup_factor * std::max(linf0, 1e-300)) {
            std::ostringstream os;
            os << "sup norm " << linf << " breached " << cfg.blowup_factor << " x initial";
            throw EvolveBlowup(os.str(), t, std::move(traj));
        }

        if (t < t_close) {
            const bool snap = cfg.snapshot_every > 0 && accepted % cfg.snapshot_every == 0;
            const bool diag = cfg.diagnostics_every > 0 && accepted % cfg.diagnostics_every == 0;
            if (snap || diag) record(state, t, snap, diag);
        }
    }
    record(state, cfg.t_end, true, true);
    return std::move(*traj);
}

namespace {

struct QuadratureTables {
    std::vector<double> decay;  // e^{-kappa |k|^{2 gamma} h}
    std::vector<double> c0;     // left-node weight
    std::vector<double> c1;     // right-node weight
};

// Exact integrals of e^{-a(1-tau)} {1-tau, tau} over one subinterval; the
// small-a branch avoids the a^{-2} cancellation.
QuadratureTables quadrature_tables(const Grid& g, double kappa, double gamma, double h) {
    QuadratureTables tb;
    const size_t total = g.total_points();
    tb.decay.resize(total);
    tb.c0.resize(total);
    tb.c1.resize(total);
    for_each_mode(g, [&](size_t idx, const std::array<double, kMaxDims>& k) {
        double k2 = 0.0;
        for (int a = 0; a < g.n_dims; ++a) k2 += k[a] * k[a];
        const double a = kappa * std::pow(k2, gamma) * h;
        tb.decay[idx] = std::exp(-a);
        if (a < 1e-2) {
            tb.c0[idx] = 0.5 - a / 3.0 + a * a / 8.0 - a * a * a / 30.0 +
                         a * a * a * a / 144.0;
            tb.c1[idx] = 0.5 - a / 6.0 + a * a / 24.0 - a * a * a / 120.0 +
                         a * a * a * a / 720.0;
        } else {
            tb.c0[idx] = (1.0 - (1.0 + a) * std::exp(-a)) / (a * a);
            tb.c1[idx] = (a - 1.0 + std::exp(-a)) / (a * a);
        }
    });
    return tb;
}

std::vector<ScalarField> duhamel_path_impl(const std::vector<ScalarField>& theta_path,
                                           const std::vector<ScalarField>& phi_path, double t,
                                           const SolverConfig& cfg, const CouplingSpec& spec,
                                           bool keep_prefixes) {
    if (theta_path.size() != phi_path.size())
        throw ConfigError("duhamel_bilinear: node sets of the two paths differ");
    const size_t M = theta_path.size();
    if (M < 8) throw ConfigError("duhamel_bilinear: need at least 8 uniform nodes");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("duhamel_bilinear: t must be positive");
    const Grid& g = theta_path[0].grid();
    for (const auto& f : theta_path)
        if (!(f.grid() == g)) throw ConfigError("duhamel_bilinear: theta path changes grid");
    for (const auto& f : phi_path)
        if (!(f.grid() == g)) throw ConfigError("duhamel_bilinear: phi path changes grid");

    VelocityOperator vel(g, spec);
    const double h = t / static_cast<double>(M - 1);
    const QuadratureTables tb = quadrature_tables(g, cfg.kappa, cfg.gamma, h);

    const size_t total = g.total_points();
    std::vector<ScalarField> prefixes;
    if (keep_prefixes) prefixes.reserve(M);
    std::vector<std::complex<double>> acc(total, {0.0, 0.0});
    if (keep_prefixes) prefixes.push_back(ScalarField::zeros(g));

    std::vector<std::complex<double>> w_prev =
        divergence_form_term(theta_path[0], phi_path[0], vel, cfg.dealias, 0.0, nullptr)
            .coefficients();
    for (size_t i = 1; i < M; ++i) {
        const double s_i = h * static_cast<double>(i);
        std::vector<std::complex<double>> w_cur =
            divergence_form_term(theta_path[i], phi_path[i], vel, cfg.dealias, s_i, nullptr)
                .coefficients();
        for (size_t idx = 0; idx < total; ++idx)
            acc[idx] = tb.decay[idx] * acc[idx] + h * (tb.c0[idx] * w_prev[idx] + tb.c1[idx] * w_cur[idx]);
        acc[0] = {0.0, 0.0};
        if (keep_prefixes) prefixes.push_back(ScalarField::from_coefficients(g, acc));
        w_prev = std::move(w_cur);
    }
    if (!keep_prefixes) prefixes.push_back(ScalarField::from_coefficients(g, std::move(acc)));
    return prefixes;
}

}  // namespace

ScalarField duhamel_bilinear(const std::vector<ScalarField>& theta_path,
                             const std::vector<ScalarField>& phi_path, double t,
                             const SolverConfig& cfg, const CouplingSpec& spec) {
    return duhamel_path_impl(theta_path, phi_path, t, cfg, spec, false).back();
}

std::vector<ScalarField> duhamel_bilinear_path(const std::vector<ScalarField>& theta_path,
                                               const std::vector<ScalarField>& phi_path, double t,
                                               const SolverConfig& cfg, const CouplingSpec& spec) {
    return duhamel_path_impl(theta_path, phi_path, t, cfg, spec, true);
}

PicardRun picard_iterate(const ScalarField& theta0, double T, int k_max, int M, double q,
                         const SolverConfig& cfg, const CouplingSpec& spec) {
    if (k_max < 3) throw ValidationError("picard_iterate: k_max must be at least 3");
    if (M < 8) throw ValidationError("picard_iterate: need at least 8 nodes");
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("picard_iterate: T must be positive");
    if (!(q >= 1.0)) throw DomainError("picard_iterate: q must be >= 1");
    const Grid& g = theta0.grid();
    validate_coupling(spec, g.n_dims);

    PicardRun run;
    run.q = q;
    run.beta = declared_order(spec);
    run.eta = kato_weights(g.n_dims, cfg.gamma, run.beta, q).eta;

    const double h = T / static_cast<double>(M - 1);
    run.node_times.resize(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i) run.node_times[static_cast<size_t>(i)] = h * i;

    std::vector<ScalarField> base;
    base.reserve(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i)
        base.push_back(apply_semigroup(theta0, cfg.kappa, cfg.gamma, run.node_times[static_cast<size_t>(i)]));
    run.iterates.push_back(base);

    for (int k = 1; k < k_max; ++k) {
        const auto& prev = run.iterates.back();
        const auto correction = duhamel_bilinear_path(prev, prev, T, cfg, spec);
        std::vector<ScalarField> next;
        next.reserve(static_cast<size_t>(M));
        for (int i = 0; i < M; ++i) {
            const auto& bc = base[static_cast<size_t>(i)].coefficients();
            const auto& cc = correction[static_cast<size_t>(i)].coefficients();
            std::vector<std::complex<double>> sum(bc.size());
            for (size_t idx = 0; idx < bc.size(); ++idx) sum[idx] = bc[idx] + cc[idx];
            if (!all_finite(sum))
                throw BlowupError("picard iterate became non-finite",
                                  run.node_times[static_cast<size_t>(i)]);
            next.push_back(ScalarField::from_coefficients(g, std::move(sum)));
        }
        run.iterates.push_back(std::move(next));
    }

    // sup over the positive nodes of t^eta ||theta_{k+1} - theta_k||; node 0
    // is skipped (both paths start at theta_0 exactly).
    for (size_t k = 0; k + 1 < run.iterates.size(); ++k) {
        double sup = 0.0;
        for (int i = 1; i < M; ++i) {
            const auto& ac = run.iterates[k][static_cast<size_t>(i)].coefficients();
            const auto& bc = run.iterates[k + 1][static_cast<size_t>(i)].coefficients();
            std::vector<std::complex<double>> dc(ac.size());
            for (size_t idx = 0; idx < ac.size(); ++idx) dc[idx] = bc[idx] - ac[idx];
            ScalarField diff = ScalarField::from_coefficients(g, std::move(dc));
            double norm;
            try {
                norm = sobolev_norm(diff, run.beta - 1.0, q);
            } catch (const DomainError&) {
                norm = std::numeric_limits<double>::quiet_NaN();
            }
            sup = std::max(sup, std::pow(run.node_times[static_cast<size_t>(i)], run.eta) * norm);
        }
        run.kato_diffs.push_back(sup);
    }
    for (size_t j = 0; j + 1 < run.kato_diffs.size(); ++j)
        run.ratios.push_back(run.kato_diffs[j + 1] / std::max(run.kato_diffs[j], 1e-300));

    SolverConfig ecfg = cfg;
    ecfg.t_end = T;
    ecfg.snapshot_every = 0;
    ecfg.diagnostics_every = 0;
    const Trajectory traj = evolve(theta0, ecfg, spec);
    const ScalarField& reference = traj.snapshots.back();
    const auto& rc = reference.coefficients();
    const auto& fc = run.iterates.back().back().coefficients();
    std::vector<std::complex<double>> dc(rc.size());
    for (size_t idx = 0; idx < rc.size(); ++idx) dc[idx] = fc[idx] - rc[idx];
    const double gap = lq_norm(ScalarField::from_coefficients(g, std::move(dc)), 2.0);
    run.evolve_discrepancy = gap / std::max(lq_norm(reference, 2.0), 1e-300);
    return run;
}

}  // namespace ascal
