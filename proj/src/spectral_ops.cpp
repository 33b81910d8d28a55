#include "ascal/spectral_ops.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "ascal/diagnostics.hpp"
#include "ascal/errors.hpp"

namespace ascal {

namespace {

// Applies a per-mode multiplier; the callback receives the wavenumber vector.
// On the Nyquist band (any axis index at points/2) the stored mode is its own
// conjugate partner in that axis, so only the real (even) part of a multiplier
// is representable on a real field; the odd part is dropped there.
ScalarField apply_multiplier(
    const ScalarField& f,
    const std::function<std::complex<double>(const std::array<double, kMaxDims>&)>& m) {
    const Grid& g = f.grid();
    std::vector<std::complex<double>> out = f.coefficients();
    const std::size_t n1 = g.points[1];
    const std::size_t n2 = g.n_dims == 3 ? g.points[2] : 1;
    std::array<double, kMaxDims> k{0.0, 0.0, 0.0};
    std::size_t idx = 0;
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0) {
        k[0] = g.wavenumber(0, i0);
        const bool ny0 = i0 == g.points[0] / 2;
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            k[1] = g.wavenumber(1, i1);
            const bool ny1 = g.n_dims >= 2 && i1 == g.points[1] / 2;
            for (std::size_t i2 = 0; i2 < n2; ++i2, ++idx) {
                if (g.n_dims == 3) k[2] = g.wavenumber(2, i2);
                std::complex<double> v = m(k);
                if (ny0 || ny1 || (g.n_dims == 3 && i2 == g.points[2] / 2)) v = v.real();
                out[idx] *= v;
            }
        }
    }
    return ScalarField::from_coefficients(g, std::move(out));
}

double mode_magnitude(const std::array<double, kMaxDims>& k, int n_dims) {
    double s = 0.0;
    for (int a = 0; a < n_dims; ++a) s += k[a] * k[a];
    return std::sqrt(s);
}

}  // namespace

ScalarField fractional_power(const ScalarField& f, double s) {
    const Grid& g = f.grid();
    if (s < 0.0) {
        const auto& c = f.coefficients();
        double max_coeff = 0.0;
        for (const auto& v : c) max_coeff = std::max(max_coeff, std::abs(v));
        if (std::abs(c[0]) > 1e-12 * std::max(1.0, max_coeff))
            throw DomainError("negative-order multiplier needs a mean-free field (mode-0 magnitude " +
                              std::to_string(std::abs(c[0])) + ")");
    }
    const int n = g.n_dims;
    return apply_multiplier(f, [s, n](const std::array<double, kMaxDims>& k) {
        const double mag = mode_magnitude(k, n);
        if (mag == 0.0) return std::complex<double>(s == 0.0 ? 1.0 : 0.0, 0.0);
        return std::complex<double>(std::pow(mag, s), 0.0);
    });
}

ScalarField riesz_transform(const ScalarField& f, int axis) {
    const Grid& g = f.grid();
    if (axis < 0 || axis >= g.n_dims)
        throw ValidationError("axis " + std::to_string(axis) + " out of range for " +
                              std::to_string(g.n_dims) + "-dimensional grid");
    const int n = g.n_dims;
    return apply_multiplier(f, [axis, n](const std::array<double, kMaxDims>& k) {
        const double mag = mode_magnitude(k, n);
        if (mag == 0.0) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(0.0, -k[axis] / mag);
    });
}

ScalarField gradient_component(const ScalarField& f, int axis) {
    const Grid& g = f.grid();
    if (axis < 0 || axis >= g.n_dims)
        throw ValidationError("axis " + std::to_string(axis) + " out of range for " +
                              std::to_string(g.n_dims) + "-dimensional grid");
    return apply_multiplier(f, [axis](const std::array<double, kMaxDims>& k) {
        return std::complex<double>(0.0, k[axis]);
    });
}

std::vector<ScalarField> gradient(const ScalarField& f) {
    std::vector<ScalarField> out;
    out.reserve(f.grid().n_dims);
    for (int a = 0; a < f.grid().n_dims; ++a) out.push_back(gradient_component(f, a));
    return out;
}

ScalarField apply_semigroup(const ScalarField& f, double kappa, double gamma, double t) {
    if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (t < 0.0) throw DomainError("semigroup time must be non-negative, got " + std::to_string(t));
    if (t == 0.0) return f;
    const int n = f.grid().n_dims;
    return apply_multiplier(f, [kappa, gamma, t, n](const std::array<double, kMaxDims>& k) {
        const double mag = mode_magnitude(k, n);
        return std::complex<double>(std::exp(-kappa * t * std::pow(mag, 2.0 * gamma)), 0.0);
    });
}

ScalarField dealias(const ScalarField& f) {
    const Grid& g = f.grid();
    std::vector<std::complex<double>> out = f.coefficients();
    const std::size_t n1 = g.points[1];
    const std::size_t n2 = g.n_dims == 3 ? g.points[2] : 1;
    std::array<long, kMaxDims> limit{};
    for (int a = 0; a < g.n_dims; ++a) limit[a] = dealias_limit(g, a);
    std::size_t idx = 0;
    for (std::size_t i0 = 0; i0 < g.points[0]; ++i0) {
        const bool cut0 = std::labs(g.signed_mode(0, i0)) > limit[0];
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            const bool cut01 = cut0 || std::labs(g.signed_mode(1, i1)) > limit[1];
            for (std::size_t i2 = 0; i2 < n2; ++i2, ++idx) {
                if (cut01 || (g.n_dims == 3 && std::labs(g.signed_mode(2, i2)) > limit[2]))
                    out[idx] = 0.0;
            }
        }
    }
    return ScalarField::from_coefficients(g, std::move(out));
}

double safe_horizon(const Grid& g, double kappa, double gamma) {
    if (!(kappa > 0.0) || !(gamma > 0.0))
        throw ValidationError("safe horizon needs kappa > 0 and gamma > 0");
    return std::pow(g.min_side() / 4.0, 2.0 * gamma) / kappa;
}

ProbeResult probe_lp_lq_decay(const ScalarField& f, double p, double q, double kappa,
                              double gamma, const std::vector<double>& times) {
    if (times.size() < 2) throw ValidationError("need at least two probe times");
    const double horizon = safe_horizon(f.grid(), kappa, gamma);
    double prev = 0.0;
    for (double t : times) {
        if (!(t > 0.0)) throw WindowError("probe times must be positive");
        if (t <= prev) throw WindowError("probe times must be strictly increasing");
        if (t > horizon)
            throw WindowError("probe time " + std::to_string(t) + " exceeds the box horizon " +
                              std::to_string(horizon));
        prev = t;
    }
    if (!(p >= 1.0)) throw DomainError("p must be at least 1");

    ProbeResult res;
    res.times = times;
    res.norms.reserve(times.size());
    for (double t : times) res.norms.push_back(lq_norm(apply_semigroup(f, kappa, gamma, t), q));

    std::vector<double> log_t, log_n;
    for (std::size_t i = 0; i < times.size(); ++i) {
        log_t.push_back(std::log(times[i]));
        log_n.push_back(std::log(res.norms[i]));
    }
    const auto fit = least_squares_line(log_t, log_n);
    res.slope = fit.first;
    res.intercept = fit.second;
    const double n = f.grid().n_dims;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    res.predicted_slope = -(n / (2.0 * gamma)) * (1.0 / p - inv_q);
    return res;
}

}  // namespace ascal
