#pragma once

#include <complex>
#include <vector>

#include "solab/grid.hpp"

namespace solab {

/// Unnormalized forward DFT, in place, shaped per grid (rank = dim, M per axis).
void fft_forward(const Grid& g, std::vector<std::complex<double>>& data);

/// Unnormalized backward DFT, in place. fft_backward(fft_forward(u)) = M^N * u.
void fft_backward(const Grid& g, std::vector<std::complex<double>>& data);

}  // namespace solab
