#pragma once

#include <vector>

#include "ascal/field.hpp"

namespace ascal {

// (-Delta)^{s/2}: multiplies mode k by |k|^s. Mode 0 maps to 0 for s > 0 and
// stays put for s = 0; s < 0 requires a mean-free field (relative mode-0
// magnitude below 1e-12), otherwise a DomainError is raised.
ScalarField fractional_power(const ScalarField& f, double s);

// Riesz transform along `axis`: multiplier -i k_axis / |k|, mode 0 -> 0.
ScalarField riesz_transform(const ScalarField& f, int axis);

// Partial derivative along `axis`: multiplier i k_axis.
ScalarField gradient_component(const ScalarField& f, int axis);
std::vector<ScalarField> gradient(const ScalarField& f);

// Dissipative semigroup: multiplier exp(-kappa t |k|^{2 gamma}). Negative t
// is rejected (DomainError); t = 0 is the identity.
ScalarField apply_semigroup(const ScalarField& f, double kappa, double gamma, double t);

// 2/3-rule truncation: zero every mode whose signed index exceeds 2/3 of the
// Nyquist index N/2 on any axis. Idempotent.
ScalarField dealias(const ScalarField& f);

// Largest time for which the periodic box still mimics free space: the
// diffusive length (kappa t)^{1/(2 gamma)} must stay below a quarter of the
// shortest box side.
double safe_horizon(const Grid& g, double kappa, double gamma);

struct ProbeResult {
    std::vector<double> times;
    std::vector<double> norms;
    double slope = 0.0;
    double intercept = 0.0;
    double predicted_slope = 0.0;  // -(n / 2 gamma)(1/p - 1/q)
};

// Evolves f with the pure semigroup, measures the L^q norm at the given
// times, and fits log-norm against log-time by least squares. Times must be
// positive, strictly increasing, and inside the safe horizon (WindowError
// otherwise; at least two times are required).
ProbeResult probe_lp_lq_decay(const ScalarField& f, double p, double q, double kappa,
                              double gamma, const std::vector<double>& times);

}  // namespace ascal
