#include "ascal/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace ascal::detail {

namespace {

struct PlanSet {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t total = 0;

    ~PlanSet() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void analyze(const Grid& g, const std::vector<double>& values,
                 std::vector<std::complex<double>>& coeffs) {
        std::lock_guard<std::mutex> lock(mutex_);
        PlanSet& p = plans_for(g);
        for (std::size_t i = 0; i < p.total; ++i) {
            p.in[i][0] = values[i];
            p.in[i][1] = 0.0;
        }
        fftw_execute(p.forward);
        coeffs.resize(p.total);
        const double scale = 1.0 / static_cast<double>(p.total);
        for (std::size_t i = 0; i < p.total; ++i)
            coeffs[i] = std::complex<double>(p.out[i][0] * scale, p.out[i][1] * scale);
    }

    void synthesize(const Grid& g, const std::vector<std::complex<double>>& coeffs,
                    std::vector<double>& values) {
        std::lock_guard<std::mutex> lock(mutex_);
        PlanSet& p = plans_for(g);
        for (std::size_t i = 0; i < p.total; ++i) {
            p.in[i][0] = coeffs[i].real();
            p.in[i][1] = coeffs[i].imag();
        }
        fftw_execute(p.backward);
        values.resize(p.total);
        // Hermitian inputs make the synthesis real; the imaginary residue is
        // rounding noise and the caller has already vetted the symmetry.
        for (std::size_t i = 0; i < p.total; ++i) values[i] = p.out[i][0];
    }

  private:
    PlanSet& plans_for(const Grid& g) {
        std::array<std::size_t, kMaxDims + 1> key{static_cast<std::size_t>(g.n_dims), g.points[0],
                                                  g.points[1], g.points[2]};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        PlanSet& p = cache_[key];
        p.total = g.total_points();
        p.in = fftw_alloc_complex(p.total);
        p.out = fftw_alloc_complex(p.total);
        int dims[kMaxDims] = {};
        for (int a = 0; a < g.n_dims; ++a) dims[a] = static_cast<int>(g.points[a]);
        p.forward = fftw_plan_dft(g.n_dims, dims, p.in, p.out, FFTW_FORWARD, FFTW_ESTIMATE);
        p.backward = fftw_plan_dft(g.n_dims, dims, p.in, p.out, FFTW_BACKWARD, FFTW_ESTIMATE);
        return p;
    }

    std::mutex mutex_;
    std::map<std::array<std::size_t, kMaxDims + 1>, PlanSet> cache_;
};

}  // namespace

void analyze(const Grid& g, const std::vector<double>& values,
             std::vector<std::complex<double>>& coeffs) {
    PlanCache::instance().analyze(g, values, coeffs);
}

void synthesize(const Grid& g, const std::vector<std::complex<double>>& coeffs,
                std::vector<double>& values) {
    PlanCache::instance().synthesize(g, coeffs, values);
}

}  // namespace ascal::detail
