#ifndef CGL_FFT_HPP
#define CGL_FFT_HPP

#include <complex>
#include <span>

namespace cgl::detail {

enum class FftDirection { forward, backward };

/// Unnormalized in-place d-dimensional DFT over an n^d cube. Forward uses
/// exp(-i k x), backward exp(+i k x). Plans are cached per (d, n, direction)
/// and created with estimate-only planning, so results are reproducible run to
/// run. Safe to call from several threads.
void fft_inplace(std::span<std::complex<double>> data, int d, int n,
                 FftDirection direction);

}  // namespace cgl::detail

#endif  // CGL_FFT_HPP
