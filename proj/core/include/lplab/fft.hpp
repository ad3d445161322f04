#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lplab {

using cplx = std::complex<double>;

// In-place radix-2 FFT of a contiguous line of length n (n a power of two).
// Forward is unnormalized; inverse divides by n, so ifft(fft(x)) == x.
void fft_line(cplx* data, std::size_t n, bool inverse);

// Transform along every grid axis of a row-major tensor whose trailing
// (fastest) dimension is a block of `inner` contiguous scalars per grid
// point.  All axis sizes must be powers of two.
void fft_nd(cplx* data, const std::vector<std::size_t>& shape,
            std::size_t inner, bool inverse);

// Transform along a single grid axis only.
void fft_axis(cplx* data, const std::vector<std::size_t>& shape,
              std::size_t inner, std::size_t axis, bool inverse);

// Signed integer frequency of DFT bin t for line length n:
// t for t < n/2, t - n otherwise.
inline long freq_of_bin(std::size_t t, std::size_t n) {
  return t < n / 2 ? static_cast<long>(t)
                   : static_cast<long>(t) - static_cast<long>(n);
}

inline std::size_t bin_of_freq(long xi, std::size_t n) {
  long m = static_cast<long>(n);
  long r = ((xi % m) + m) % m;
  return static_cast<std::size_t>(r);
}

bool is_pow2(std::size_t n);

}  // namespace lplab
