#include "lplab/fft.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace lplab {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {

// Twiddle table for size n: w[j] = exp(-2*pi*i*j/n), j < n/2.
const std::vector<cplx>& twiddles(std::size_t n) {
  static std::map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> w(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    double ang = -2.0 * std::numbers::pi * static_cast<double>(j) /
                 static_cast<double>(n);
    w[j] = cplx(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(n, std::move(w)).first->second;
}

void bit_reverse(cplx* a, std::size_t n) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

}  // namespace

void fft_line(cplx* a, std::size_t n, bool inverse) {
  if (!is_pow2(n)) throw std::invalid_argument("fft_line: n must be a power of two");
  if (n == 1) return;
  bit_reverse(a, n);
  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx tw = w[j * step];
        if (inverse) tw = std::conj(tw);
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * tw;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
  }
}

void fft_axis(cplx* data, const std::vector<std::size_t>& shape,
              std::size_t inner, std::size_t axis, bool inverse) {
  if (axis >= shape.size()) throw std::invalid_argument("fft_axis: axis out of range");
  std::size_t n = shape[axis];
  if (!is_pow2(n)) throw std::invalid_argument("fft_axis: axis size must be a power of two");
  std::size_t block = inner;
  for (std::size_t j = axis + 1; j < shape.size(); ++j) block *= shape[j];
  std::size_t outer = 1;
  for (std::size_t j = 0; j < axis; ++j) outer *= shape[j];

  std::vector<cplx> line(n);
  for (std::size_t o = 0; o < outer; ++o) {
    cplx* base = data + o * n * block;
    for (std::size_t b = 0; b < block; ++b) {
      for (std::size_t t = 0; t < n; ++t) line[t] = base[t * block + b];
      fft_line(line.data(), n, inverse);
      for (std::size_t t = 0; t < n; ++t) base[t * block + b] = line[t];
    }
  }
}

void fft_nd(cplx* data, const std::vector<std::size_t>& shape,
            std::size_t inner, bool inverse) {
  for (std::size_t a = 0; a < shape.size(); ++a)
    fft_axis(data, shape, inner, a, inverse);
}

}  // namespace lplab
