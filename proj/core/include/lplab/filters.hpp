#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lplab/grid.hpp"

namespace lplab {

// Raised-cosine ramp: 0 for t <= 1, 1 for t >= 2, smooth in between.
double ramp(double t);
// Closed-form alpha-th derivative of the ramp (alpha >= 1).
double ramp_derivative(double t, int alpha);

// Dyadic frequency decomposition of one factor of the grid: filters
// psi_k for k in [kmin, kmax], sampled on the factor's integer frequency
// lattice.  The top and bottom scales absorb the tails so that
// sum_k psi_k(xi) == 1 for every representable xi != 0, and
// psi_k(0) == 0 for all k.
struct FilterBank {
  GridSpec spec;
  int axis_begin = 0;
  int axis_end = 1;  // factor covers axes [axis_begin, axis_end)
  int kmin = 0;
  int kmax = 0;
  std::string profile;  // "smooth-bump" | "sharp-annulus"

  // prof[k - kmin][fidx]: profile value at factor frequency index fidx.
  std::vector<std::vector<double>> prof;
  // Factor axis sizes.  Because the grid layout is row-major over
  // power-of-two axes, the factor frequency index of grid index g is the
  // bit field (g >> fshift) & fmask.
  std::vector<std::size_t> fshape;
  int fshift = 0;
  std::uint64_t fmask = 0;

  // Measured constant of the decay bound
  //   |psi_k(xi)| <= C (1 + |xi|/2^k)^{-100 m},
  // reported as log(C) to survive large exponents.
  double log_decay_const = 0.0;

  int factor_dim() const { return axis_end - axis_begin; }
  int scales() const { return kmax - kmin + 1; }
  // Euclidean |xi| of a factor frequency index.
  double freq_norm(std::size_t f) const;
};

FilterBank build_filterbank(const GridSpec& spec, int axis_begin, int axis_end,
                            int kmin, int kmax, const std::string& profile);

// Closed-form alpha-th derivative of the scale-k profile at scalar
// frequency xi (1-dimensional factors, smooth-bump only).
double filter_derivative(const FilterBank& bank, int k, int alpha, double xi);
// Measured constant of |d^a psi_k| <= C 2^{-a k} (1+|xi|/2^k)^{-100},
// max over scales, sweeping a 4x refined frequency grid; log scale.
double filter_derivative_log_const(const FilterBank& bank, int alpha);

// Full tensor decomposition: one bank per factor, factors contiguous and
// covering every axis.
struct TensorFilterBank {
  std::vector<FilterBank> factors;
  int parameters() const { return static_cast<int>(factors.size()); }
  const GridSpec& spec() const { return factors.front().spec; }
};

TensorFilterBank build_tensor_filterbank(const GridSpec& spec,
                                         const std::vector<int>& factor_dims,
                                         const std::string& profile);
TensorFilterBank build_tensor_filterbank(const GridSpec& spec,
                                         const std::vector<int>& factor_dims,
                                         const std::vector<std::pair<int, int>>& kranges,
                                         const std::string& profile);

// All scale tuples of the tensor bank, odometer order (last factor fastest).
std::vector<std::vector<int>> scale_tuples(const TensorFilterBank& tb);

// Frequency-domain plumbing shared by the convolution paths.  Transforms
// run along grid axes [axis_begin, axis_end) for every vector index.
GridFunction to_frequency(const GridFunction& f, int axis_begin, int axis_end);
GridFunction from_frequency(const GridFunction& F, int axis_begin, int axis_end);
// out := F * psi_k on the factor axes of the bank (frequency side).
void multiply_band(const GridFunction& F, const FilterBank& bank, int k,
                   GridFunction& out);

// f * psi_k along the bank's factor axes (other axes untouched).
GridFunction band_convolve(const GridFunction& f, const FilterBank& bank, int k);
// All scales of a bank, sharing one forward transform.
std::vector<GridFunction> band_convolve_all(const GridFunction& f,
                                            const FilterBank& bank);
// f * Psi_k for a full scale tuple of the tensor bank.
GridFunction band_convolve(const GridFunction& f, const TensorFilterBank& tb,
                           const std::vector<int>& ks);

// Lacunary family: one mean-zero bump per cube, L^p-normalized, with
// decay and smoothness constants measured at build time.
struct LacunaryFamily {
  GridSpec spec;
  std::string kind;  // "haar" | "smooth-wavelet"
  double p = 2.0;
  double decay = 100.0;
  double mother_scale = 1.0;  // annulus scaling of the smooth mother
  Collection cubes;
  // values[i]: real samples of phi_I on the full grid, cube order matches
  // cubes.cubes.
  std::vector<std::vector<double>> values;
  // Cubes that cannot be built at this resolution (reported, not built).
  std::vector<DyadicCube> below_resolution;
  // Measured log-constants of |d^a phi_I| <= C |I|^{-1/p} side^{-a}
  // (1 + dist(x,I)/side)^{-decay}, index a = 0..alpha_max.
  std::vector<double> log_decay_consts;
  int alpha_max = 0;

  int index_of(const DyadicCube& c) const;  // -1 if absent
  const std::vector<double>& phi(const DyadicCube& c) const;
};

LacunaryFamily build_lacunary_family(const GridSpec& spec, const Collection& c,
                                     const std::string& kind, double p,
                                     double decay = 100.0,
                                     double mother_scale = 1.0);

// Spatial decomposition phi_I = sum_l 2^{-M l} phi_{I,l} with
// supp phi_{I,l} inside the dilate 2^l I (exactly, by windowing).
struct SpatialSplit {
  double M = 0.0;
  int lmax = 0;
  std::vector<std::vector<double>> pieces;
  double tail_sup = 0.0;  // sup of phi_I outside 2^lmax I
};

SpatialSplit spatial_split(const LacunaryFamily& fam, const DyadicCube& c,
                           double M, int lmax);

// True when the cell with sample point x lies in the dilate 2^l I.
bool in_dilate(const GridSpec& spec, const DyadicCube& c, int l,
               const std::vector<double>& x);

}  // namespace lplab
