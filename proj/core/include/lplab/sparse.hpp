#pragma once

#include <utility>
#include <vector>

#include "lplab/square.hpp"
#include "lplab/weights.hpp"

namespace lplab {

// One cube of the sparse tree.  The bad set B_Q collects the cells of Q
// where the localized square function exceeds C times its local average
// or M(w chi~_Q) exceeds C times the smoothed weight average; cover
// holds the maximal dyadic cubes inside B_Q, and E_Q = Q minus their
// union keeps at least half the measure of Q.  members are the input
// cubes that live in Q but in no cover cube.
struct SparseNode {
  DyadicCube cube;
  int parent = -1;
  int depth = 0;
  double C = 0.0;  // final constant after per-node doubling
  int doublings = 0;
  double avg_sf = 0.0;  // local_sf_average(Q, p1) over the members in play
  double avg_w = 0.0;   // smoothed average of w at Q
  double bad_measure = 0.0;
  double e_measure = 0.0;  // |Q| - sum of cover measures
  std::vector<DyadicCube> cover;  // all maximal bad cubes
  std::vector<int> children;      // nodes for cover cubes that got members
  std::vector<DyadicCube> members;
  std::size_t residual_cells = 0;  // bad cells no resolvable cube covers
};

struct SparseFamily {
  GridSpec spec;
  double p1 = 1.0;
  double c0 = 2.0;
  double decay = 100.0;
  std::vector<int> roots;
  std::vector<SparseNode> nodes;  // generation order, parents first
  int max_depth = 0;
  bool verified = false;
};

// Roots are the maximal cubes of the input collection; each node splits
// off the maximal bad cubes and recurses into the ones that captured
// members.  C starts at c0 for every node and doubles until
// |E_Q| >= |Q|/2, which holds exactly on the grid.
SparseFamily sparse_construct(const GridSpec& spec, const CoefficientMap& coeffs,
                              const Collection& c, const Weight& w, double p1,
                              double c0 = 2.0, double decay = 100.0,
                              const std::vector<double>& qvec = {});

// Re-checks every sparseness invariant (density, disjoint E sets, exact
// partition, square-function constancy on cover cubes); throws on the
// first violation.  sparse_construct runs this before returning.
void verify_sparse(const SparseFamily& fam, const CoefficientMap& coeffs,
                   const Collection& c);

// Integral of w over E_Q of one node.
double e_set_weight(const SparseFamily& fam, int node, const Weight& w);

// sum over the family of local_sf_average(Q, p1)^p times a weight
// factor: the kernel-normalized smoothed L^{1+eps_p} average of w at Q
// to the power 1/(1+eps_p), times |Q|; or w(E_Q) when use_e_sets is set.
double sparse_bound_rhs(const GridSpec& spec, const CoefficientMap& coeffs,
                        const Collection& c, const SparseFamily& fam,
                        const Weight& w, double p, double p1, double eps_p,
                        bool use_e_sets = false,
                        const std::vector<double>& qvec = {});

// I1 = members inside some maximal cube of { sf > alpha }, I2 the rest.
std::pair<Collection, Collection> interpolation_split(
    const SquareFunctionResult& sf, const Collection& c, double alpha,
    const std::vector<double>& qvec = {});

}  // namespace lplab
