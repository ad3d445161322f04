#pragma once

#include <map>
#include <vector>

#include "lplab/filters.hpp"
#include "lplab/square.hpp"

namespace lplab {

// Pairings <f, phi_I> = sum_x f(x) phi_I(x) cell, one per vector index.
CoefficientMap analyze(const GridFunction& f, const LacunaryFamily& fam);

// sum_I a_I phi_I.  Every cube referenced by the coefficients must be in
// the family.
GridFunction synthesize(const GridSpec& spec, const CoefficientMap& coeffs,
                        const LacunaryFamily& fam);

// For every band j of the bank with intervals of side 2^{-(j+N)}
// resolvable on the grid, the grid argmin of |f * psi_j| over each such
// interval; ties break to the smallest coordinate.  Per vector index.
struct SamplePoints {
  int N = 0;
  std::vector<int> bands;  // usable band indices j (intervals at j + N)
  // points[v][cube] = grid index of the minimizing sample
  std::vector<std::map<DyadicCube, std::size_t>> points;
};

SamplePoints choose_sample_points(const GridFunction& f, const FilterBank& bank,
                                  int N);

// Iterative reconstruction of one band from sampled values:
//   f*psi_j0 = sum_I c_I (phi^1_I + ... + phi^lmax_I) + Rest_lmax,
// with c_I = (f*psi_j0)(x_I), phi^1_I = plateau * 1_I and
// phi^{l+1}_I = T[phi^l_I] for the re-expansion operator
//   T[g] = g * plateau - sum_J g(x_J) phi^1_J.
struct FJResult {
  int band = 0;   // j0
  int N = 0;      // intervals at scale j0 + N
  int lmax = 0;
  bool converged = false;       // measured ratio <= 1/2
  double ratio = 0.0;           // max step ratio above the fp floor
  double floor = 0.0;           // fp floor used for the ratio measurement
  std::vector<double> residual_sup;  // ||Rest_l||_inf, l = 1..lmax
  double recon_error = 0.0;     // sup |f*psi_j0 - sum_I c_I psi_I|
  double first_residual_scale = 0.0;  // geometric extrapolation to l = 0
  std::map<DyadicCube, cplx> coeff;
  std::map<DyadicCube, std::vector<double>> psi;  // synthesized family
};

// band < 0 selects the bank's bottom scale.  1-d scalar functions only.
FJResult fj_reconstruct(const GridFunction& f, const FilterBank& bank, int N,
                        const SamplePoints& pts, int lmax, int band = -1);

// Runs the reconstruction on every usable band and compares the three
// quantities tied together by the discrete model:
// the norm of the re-expanded function, the norm of the discrete square
// function of the sampled coefficients, and the norm of the square
// function over the same bands.  pointwise_ok records the per-band
// infimum inequality sum_I |c_I|^2 1_I <= |f*psi_j|^2 at every sample.
struct FJPipelineReport {
  double p = 2.0;
  int bands_used = 0;
  double norm_expansion = 0.0;
  double norm_discrete = 0.0;
  double norm_square = 0.0;
  double recon_error = 0.0;  // sup over bands of per-band residuals
  bool pointwise_ok = false;
};

FJPipelineReport fj_pipeline_check(const GridFunction& f, const FilterBank& bank,
                                   int N, int lmax, double p);

}  // namespace lplab
