#pragma once

#include <string>
#include <vector>

#include "lplab/grid.hpp"

namespace lplab {

// Positive weight sampled on the grid.  The recipe is retained so the
// same weight can be re-sampled at another resolution, which is what the
// stability probes compare against.
struct Weight {
  RealField w;
  std::string kind;            // "power" | "product" | "custom"
  double a = 0.0;              // power: |x - c|^a
  std::vector<double> axis_a;  // product: per-axis exponents
  std::vector<double> center;
  // The caller left the center to us; re-sampling then re-defaults it to
  // the target grid (half a cell off-lattice), so the distance from the
  // singularity to the nearest sample scales with the resolution instead
  // of staying frozen at the original grid's offset.
  bool default_center = false;

  double total() const;  // integral over the torus
};

// Power weight |x - c|^a (torus distance).  The default center sits half
// a cell off the lattice so a < 0 stays finite under sampling.
Weight make_power_weight(const GridSpec& spec, double a,
                         std::vector<double> center = {});
// Separable weight prod_j |x_j - c_j|^{a_j}.
Weight make_product_weight(const GridSpec& spec, std::vector<double> axis_a,
                           std::vector<double> center = {});
// Arbitrary positive samples.
Weight make_custom_weight(RealField w);

// The same weight on another grid.  Recipes re-evaluate; custom weights
// only coarsen, by cell averaging.
Weight resample_weight(const Weight& w, const GridSpec& spec);

// Uncentered maximal average over axis-aligned torus boxes whose side
// along axis j is 2^{-s_j} for some s_j in [0, L_j], at every position:
//   M f(x) = max over boxes containing x of the box mean of |f|.
// Scalar fields only.
RealField maximal_function(const RealField& f);

// Muckenhoupt characteristic over the same window family:
//   sup_B (mean_B w) (mean_B w^{1-p'})^{p-1}        for p > 1,
//   sup_x M w(x) / w(x)                             for p = 1.
// "cube" windows use equal physical side along every axis, "rect" lets
// the sides vary independently.
struct ApReport {
  double p = 2.0;
  double value = 0.0;
  std::string window = "cube";
  std::vector<int> attaining_scale;    // s_j of the attaining box
  std::vector<std::size_t> attaining_pos;
  // The characteristic of the re-sampled weight a few octaves coarser;
  // a genuine A_p weight gives nearly the same number, a boundary case
  // keeps growing with resolution.
  double coarse_value = 0.0;
  int octave_gap = 0;
  bool stable = false;  // |value - coarse_value| <= 10% of value
};

ApReport ap_characteristic(const Weight& w, double p,
                           const std::string& window = "cube");

// Smallest q (within tol) whose A_q characteristic is resolution-stable,
// found by bisection above 1.  Reports q = infinity as `found = false`.
struct AInfReport {
  bool found = false;
  double q = 0.0;
  double value = 0.0;  // [w]_{A_q} at the reported q
};

AInfReport a_infinity_probe(const Weight& w, double qmax = 64.0,
                            double tol = 1.0 / 32.0);

// Largest resolution-stable reverse Holder exponent, by doubling then
// bisection:  C(r) = sup_B (mean_B w^r)^{1/r} / mean_B w.
struct RhReport {
  double r = 1.0;
  double constant = 1.0;  // C(r) at the reported exponent
};

RhReport reverse_holder_exponent(const Weight& w, double rmax = 64.0,
                                 double tol = 1.0 / 16.0);

}  // namespace lplab
