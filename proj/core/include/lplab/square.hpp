#pragma once

#include <map>
#include <string>
#include <vector>

#include "lplab/filters.hpp"
#include "lplab/grid.hpp"

namespace lplab {

// Coefficients a_I indexed by dyadic cube, one complex value per vector
// index.  Cubes absent from the map carry zero coefficients.
struct CoefficientMap {
  std::vector<std::size_t> vshape;
  std::map<DyadicCube, std::vector<cplx>> a;

  std::size_t vcount() const {
    std::size_t v = 1;
    for (std::size_t s : vshape) v *= s;
    return v;
  }
  void set(const DyadicCube& c, std::vector<cplx> vals);
  // Zero vector when absent.
  std::vector<cplx> get(const DyadicCube& c) const;
};

// Nonnegative field produced by a square function, tagged with the
// operator that made it.
struct SquareFunctionResult {
  RealField field;
  std::string tag;
};

// One-parameter square function along the bank's factor axes:
// (sum_k |f * psi_k|^2)^{1/2}.
SquareFunctionResult square_function(const GridFunction& f, const FilterBank& bank);

// Full tensor square function over all scale tuples of the bank.
SquareFunctionResult tensor_square_function(const GridFunction& f,
                                            const TensorFilterBank& tb);

// Square function over the selected factors only (subset of factor
// indices); the other factors are left untouched.
SquareFunctionResult partial_square_function(const GridFunction& f,
                                             const TensorFilterBank& tb,
                                             const std::vector<int>& factor_subset);

// Discrete model square function
//   (sum_{I in c} |a_I|^2 / |I| 1_I(x))^{1/2}, per vector index.
SquareFunctionResult discrete_square_function(const GridSpec& spec,
                                              const CoefficientMap& coeffs,
                                              const Collection& c);

// Same, restricted to members contained in Q0.
SquareFunctionResult localized_square_function(const GridSpec& spec,
                                               const CoefficientMap& coeffs,
                                               const Collection& c,
                                               const DyadicCube& Q0);

}  // namespace lplab
