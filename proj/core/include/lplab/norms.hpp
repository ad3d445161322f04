#pragma once

#include <vector>

#include "lplab/grid.hpp"

namespace lplab {

// Deterministic tree summation; independent of how callers might chunk
// work, and more accurate than running sums.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

// Iterated quasi-norm specification.  p holds one exponent per grid
// axis, constant within each grouping block of the GridSpec; q holds one
// exponent per vector index dimension.  Evaluation applies the innermost
// exponent first: q_n, ..., q_1 over vector indices (counting measure),
// then the spatial blocks from the last to the first (Lebesgue measure).
struct MixedNormSpec {
  std::vector<double> p;
  std::vector<double> q;

  MixedNormSpec() = default;
  MixedNormSpec(std::vector<double> P, std::vector<double> Q = {})
      : p(std::move(P)), q(std::move(Q)) {}
  // Plain L^p over d axes, scalar values.
  static MixedNormSpec lebesgue(double p_, int d) {
    return MixedNormSpec(std::vector<double>(static_cast<std::size_t>(d), p_));
  }
};

void validate_norm_spec(const MixedNormSpec& ns, const GridSpec& spec,
                        const std::vector<std::size_t>& vshape);

double mixed_norm(const RealField& f, const MixedNormSpec& ns);
double mixed_norm(const GridFunction& f, const MixedNormSpec& ns);

// Weighted variant: the weight enters the innermost spatial block as
// measure w(x) dx (vector reductions are unweighted).
double mixed_norm_weighted(const RealField& f, const MixedNormSpec& ns,
                           const RealField& w);
double mixed_norm_weighted(const GridFunction& f, const MixedNormSpec& ns,
                           const RealField& w);

// Plain (quasi-)norms over the whole grid, scalar or vector treated as
// extra counting dimensions with the same exponent.
double lp_norm(const RealField& f, double p);
double lp_norm(const GridFunction& f, double p);
double lp_norm_weighted(const RealField& f, double p, const RealField& w);
double lp_norm_weighted(const GridFunction& f, double p, const RealField& w);

// Weak L^p quasi-norm on a finite grid:
//   max over attained values v > 0 of v * |{ |f| >= v }|^{1/p},
// which equals sup_{lambda>0} lambda |{|f| > lambda}|^{1/p}.
double weak_quasinorm(const RealField& f, double p);
double weak_quasinorm(const GridFunction& f, double p);

// Collapse the vector dimensions with exponents q (counting measure),
// leaving a scalar field; q must match the vector shape.
RealField pointwise_q_norm(const RealField& f, const std::vector<double>& q);

double sup_norm(const RealField& f);
double sup_norm(const GridFunction& f);

}  // namespace lplab
