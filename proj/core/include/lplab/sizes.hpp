#pragma once

#include <utility>
#include <vector>

#include "lplab/norms.hpp"
#include "lplab/square.hpp"

namespace lplab {

// Mass of the decay kernel: sum over cells of chi_tilde_I * cell.
double chi_mass(const GridSpec& spec, const DyadicCube& I, double decay);
// Sum over cells of g * chi_tilde_I * cell (g scalar).
double weighted_chi_sum(const RealField& g, const DyadicCube& I, double decay);

struct SizeReport {
  double value = 0.0;
  DyadicCube attaining;
  double decay = 100.0;
};

// Size of a set: sup over the relevant closure of the kernel-normalized
// smoothed averages of 1_E,
//   size(E) = sup_I  ( integral 1_E chi_tilde_I ) / ( integral chi_tilde_I ).
// The kernel normalization (instead of 1/|I|) keeps the size of the full
// torus exactly 1; the two conventions differ by the fixed factor
// chi_mass/|I| in [1, 1 + 2/(decay-1)].
SizeReport size_indicator(const RealField& E, const Collection& c,
                          double decay = 100.0);

// Smoothed local average (1/|I0|) integral g chi_tilde_I0 dx.
double smoothed_average(const RealField& g, const DyadicCube& I0,
                        double decay = 100.0);

// |I0|^{-1/p} || localized discrete square function ||_{L^p(L^Q)}.
double local_sf_average(const GridSpec& spec, const CoefficientMap& coeffs,
                        const Collection& c, const DyadicCube& I0, double p,
                        const std::vector<double>& q = {});

struct BmoReport {
  double value = 0.0;
  DyadicCube attaining;
  double q = 1.0;
  std::vector<std::pair<DyadicCube, double>> table;
};

// John-Nirenberg style quantity: sup over closure cubes C0 of
// |C0|^{-1/q} || (sum_{C <= C0} |a_C|^2/|C| 1_C)^{1/2} ||_{L^q(L^Q)}.
BmoReport bmo_quantity(const GridSpec& spec, const CoefficientMap& coeffs,
                       const Collection& c, double q,
                       const std::vector<double>& qvec = {});

}  // namespace lplab
