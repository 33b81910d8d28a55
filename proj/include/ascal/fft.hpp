#pragma once

#include <complex>
#include <vector>

#include "ascal/grid.hpp"

namespace ascal::detail {

// Thin FFTW-backed transforms between real grid values and the full complex
// mode array (same row-major shape). Conventions:
//   analysis:  c_m = (1/Ntot) sum_j f_j e^{-i 2pi m.j/N}   (FFTW_FORWARD, then scaled)
//   synthesis: f_j = sum_m c_m e^{+i 2pi m.j/N}            (FFTW_BACKWARD, unscaled)
// so the stored coefficients multiply plane waves e^{i k.x} directly and a
// forward/backward round trip is the identity up to rounding.
//
// Plans are cached per grid shape behind a mutex; everything runs through the
// cache's own aligned buffers, so callers never deal with FFTW allocation.
void analyze(const Grid& g, const std::vector<double>& values,
             std::vector<std::complex<double>>& coeffs);
void synthesize(const Grid& g, const std::vector<std::complex<double>>& coeffs,
                std::vector<double>& values);

}  // namespace ascal::detail
