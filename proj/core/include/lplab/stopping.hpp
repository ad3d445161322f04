#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lplab/square.hpp"

namespace lplab {

// Exceptional sets of a nonnegative scalar field.  With s = ||sf||_p,
//   Omega_k = { sf > C 2^{ek/p} s },   k = 0, 1, ...
// so Chebyshev gives |Omega_k| <= 2^{-ek} C^{-p} exactly.  Each level is
// enlarged through the maximal operator,
//   Omega~_k = { M 1_{Omega_k} > 2^{-k} },
// and Omega is the union of the enlargements.  C doubles from c0 until
// |Omega| < budget.
struct ExceptionalSets {
  double p = 2.0;
  double e = 10.0;
  double C = 1.0;
  double norm_p = 0.0;
  double budget = 0.1;
  int doublings = 0;
  std::vector<double> level_measure;  // |Omega_k|
  std::vector<double> level_bound;    // 2^{-ek} C^{-p}
  std::vector<double> tilde_measure;  // |Omega~_k|
  // max_k |Omega~_k| / (2^k |Omega_k|), the measured weak-type constant
  double tilde_constant = 0.0;
  RealField omega;  // indicator of the union
  double omega_measure = 0.0;
};

ExceptionalSets build_exceptional_sets(const RealField& sf, double p,
                                       double e = 10.0, double budget = 0.1,
                                       double c0 = 1.0);
// Vector-valued fields collapse through the pointwise Q-norm first.
ExceptionalSets build_exceptional_sets(const SquareFunctionResult& sf, double p,
                                       const std::vector<double>& qvec = {},
                                       double e = 10.0, double budget = 0.1,
                                       double c0 = 1.0);

// F~ = F \ Omega.  Throws when F~ loses half the mass of F (the cure is
// a larger C, i.e. a smaller budget).
struct MajorSubset {
  RealField indicator;
  double measure = 0.0;
  double parent_measure = 0.0;
};

MajorSubset major_subset(const RealField& F, const ExceptionalSets& ex);

// Local average functional evaluated on closure cubes by the stopping
// time.  Must be nonnegative.
using CubeFunctional = std::function<double(const DyadicCube&)>;

// avg(I) = |I|^{-1/p} || localized square function on I ||_p.
CubeFunctional sf_average_functional(const GridSpec& spec,
                                     const CoefficientMap& coeffs,
                                     const Collection& c, double p,
                                     const std::vector<double>& qvec = {});
// avg(I) = kernel-normalized smoothed average of g against chi~_I.
CubeFunctional size_average_functional(const RealField& g, double decay = 100.0);

// Stopping-time decomposition of a collection.  Thresholds ref/2^n; at
// level n the heads are the maximal closure cubes, outside all earlier
// heads, whose average strictly exceeds the threshold; every still
// unassigned member inside a head joins that head's bucket.  Members no
// positive-average closure cube ever catches (zero coefficients) land in
// the terminal bucket.
struct StoppingBucket {
  DyadicCube head;
  int level = 0;
  double threshold = 0.0;
  double average = 0.0;
  std::vector<DyadicCube> members;
};

struct StoppingDecomposition {
  std::string direction = "custom";  // "sf-average" | "size-average" | ...
  double reference = 0.0;
  double p = 2.0;
  int levels = 0;          // threshold indices actually visited
  bool complete = false;   // no positive-average cube sits over a leftover
  std::vector<StoppingBucket> buckets;
  std::vector<DyadicCube> zero_members;
  std::vector<double> level_mass;  // sum over level-n heads of |J| thr^p
};

StoppingDecomposition stopping_time(const Collection& members,
                                    const CubeFunctional& avg, double reference,
                                    double p, int max_levels = 64);

// Head that owns each member (terminal members map to themselves).
std::map<DyadicCube, DyadicCube> head_of(const StoppingDecomposition& d);

// sum over heads of |J| threshold(J)^p, divided by norm_p^p; the measured
// counting constant of the decomposition.
double counting_constant(const StoppingDecomposition& d, double norm_p);

// Joint buckets of two decompositions of the same collection: every
// member lands in exactly one (n1, n2) bucket and sits inside the
// intersection of its two heads.
struct PairBucket {
  DyadicCube head1, head2;
  int level1 = 0, level2 = 0;
  std::vector<DyadicCube> members;
};

std::vector<PairBucket> intersect_decompositions(const StoppingDecomposition& a,
                                                 const StoppingDecomposition& b);

}  // namespace lplab
