#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ascal/coupling.hpp"
#include "ascal/diagnostics.hpp"
#include "ascal/errors.hpp"
#include "ascal/field.hpp"

namespace ascal {

enum class Integrator { etdrk1, etdrk2 };

const char* integrator_name(Integrator i);
Integrator integrator_from_name(const std::string& name);

struct SolverConfig {
    double kappa = 1.0;
    double gamma = 1.0;
    double dt = 1e-2;
    double t_end = 1.0;
    bool dealias = true;
    Integrator integrator = Integrator::etdrk2;
    long snapshot_every = 0;     // accepted steps between stored snapshots; 0 = ends only
    long diagnostics_every = 1;  // accepted steps between diagnostics rows; 0 = ends only
    double blowup_factor = 1e6;       // sup-norm growth that counts as blow-up
    double stability_constant = 0.5;  // bound on dt * max|u| * max|k|
    double diagnostics_q = 0.0;       // norm exponent for records; 0 = window midpoint
};

void validate_solver(const SolverConfig& cfg);

// The q actually used for diagnostics rows: the configured value, or the
// midpoint of the weighted-theory window (falling back to 2 q_critical, then
// to 4, when that window is empty).
double resolve_diagnostics_q(const SolverConfig& cfg, int n_dims, double beta);

struct Trajectory {
    std::vector<double> times;           // snapshot times; times[0] = 0
    std::vector<ScalarField> snapshots;  // aligned with times
    std::vector<DiagnosticsRecord> diagnostics;
};

// Blow-up during evolve(); keeps everything recorded up to the last healthy
// state so the caller can inspect how the run died.
struct EvolveBlowup : BlowupError {
    EvolveBlowup(const std::string& what, double t, std::shared_ptr<const Trajectory> partial_run)
        : BlowupError(what, t), partial(std::move(partial_run)) {}
    std::shared_ptr<const Trajectory> partial;
};

// -div(u theta) with u = P[theta]: velocity in spectral space, product on the
// grid, divergence back in spectral space, 2/3-dealiased on request. Mode 0
// of the result is exactly zero. t_now only labels a blow-up error.
ScalarField nonlinear_term(const ScalarField& theta, const CouplingSpec& spec, bool dealias,
                           double t_now = 0.0);

// Exponential integrator core shared by step(), evolve() and the studies.
// Holds the velocity tables and the per-dt phi-function tables.
class Stepper {
  public:
    Stepper(const Grid& g, const SolverConfig& cfg, const CouplingSpec& spec);

    // One step of size dt from time t. Throws StepRejection when the
    // advective guard trips and BlowupError on non-finite values.
    ScalarField advance(const ScalarField& state, double t, double dt) const;

    const VelocityOperator& velocity_op() const { return vel_; }

  private:
    struct Tables {
        std::vector<double> propagator;  // e^{-kappa |k|^{2 gamma} dt}
        std::vector<double> phi1_dt;     // dt phi1(z)
        std::vector<double> phi2_dt;     // dt phi2(z)
    };
    const Tables& tables_for(double dt) const;

    Grid grid_;
    SolverConfig cfg_;
    CouplingSpec spec_;
    VelocityOperator vel_;
    double max_k_ = 0.0;
    mutable std::map<double, Tables> cache_;
};

// Single exponential-integrator step (etdrk1: nonlinearity frozen at the left
// node under the exact phi1 weight; etdrk2: plus the standard second-order
// correction). The linear flow is exact.
ScalarField step(const ScalarField& state, double t, const SolverConfig& cfg,
                 const CouplingSpec& spec);

// March to t_end, halving dt whenever the stability guard rejects a step.
// The box mean is conserved exactly; snapshots and diagnostics follow the
// configured cadences, and both ends are always recorded.
Trajectory evolve(const ScalarField& theta0, const SolverConfig& cfg, const CouplingSpec& spec);

// B(theta, phi)(t) = -int_0^t G(t-s) div(P[theta(s)] phi(s)) ds by
// exponential quadrature: the nonlinear factor is linear on each subinterval
// and the semigroup weight is integrated exactly. Both paths must sit on the
// same uniform node set 0 = s_0 < ... < s_{M-1} = t with M >= 8.
ScalarField duhamel_bilinear(const std::vector<ScalarField>& theta_path,
                             const std::vector<ScalarField>& phi_path, double t,
                             const SolverConfig& cfg, const CouplingSpec& spec);

// Same quadrature evaluated at every node prefix: result[i] = B(...)(s_i).
std::vector<ScalarField> duhamel_bilinear_path(const std::vector<ScalarField>& theta_path,
                                               const std::vector<ScalarField>& phi_path, double t,
                                               const SolverConfig& cfg, const CouplingSpec& spec);

struct PicardRun {
    double q = 0.0;
    double eta = 0.0;          // weight exponent used in the contraction norm
    double beta = 0.0;         // declared coupling order (norm index beta - 1)
    std::vector<double> node_times;
    std::vector<std::vector<ScalarField>> iterates;  // iterates[k] = theta_{k+1} path
    std::vector<double> kato_diffs;  // sup_t t^eta ||theta_{k+2} - theta_{k+1}||_{H^{beta-1}_q}
    std::vector<double> ratios;      // successive quotients of kato_diffs
    double evolve_discrepancy = 0.0;  // relative L2 gap to evolve() at t = T
};

// The successive-approximation scheme of the mild formulation:
// theta_1 = G(t) theta_0, theta_{k+1} = theta_1 + B(theta_k, theta_k),
// sampled on M uniform nodes of [0, T]. Divergence shows up as ratios >= 1
// and is reported, not errored.
PicardRun picard_iterate(const ScalarField& theta0, double T, int k_max, int M, double q,
                         const SolverConfig& cfg, const CouplingSpec& spec);

}  // namespace ascal
