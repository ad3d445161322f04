#include "lplab/square.hpp"

#include <cmath>
#include <stdexcept>

namespace lplab {

void CoefficientMap::set(const DyadicCube& c, std::vector<cplx> vals) {
  if (vals.size() != vcount())
    throw std::invalid_argument("CoefficientMap: value count mismatch");
  a[c] = std::move(vals);
}

std::vector<cplx> CoefficientMap::get(const DyadicCube& c) const {
  auto it = a.find(c);
  if (it != a.end()) return it->second;
  return std::vector<cplx>(vcount(), cplx{0.0, 0.0});
}

namespace {

void accumulate_sq(RealField& acc, const GridFunction& g) {
  const auto& v = g.values();
  auto& a = acc.values();
  for (std::size_t i = 0; i < v.size(); ++i) a[i] += std::norm(v[i]);
}

void finish_sqrt(RealField& acc) {
  for (double& x : acc.values()) x = std::sqrt(x);
}

}  // namespace

SquareFunctionResult square_function(const GridFunction& f, const FilterBank& bank) {
  if (!(f.spec() == bank.spec))
    throw std::invalid_argument("square_function: grid mismatch");
  RealField acc(f.spec(), f.vshape());
  GridFunction F = to_frequency(f, bank.axis_begin, bank.axis_end);
  GridFunction G(f.spec(), f.vshape());
  for (int k = bank.kmin; k <= bank.kmax; ++k) {
    multiply_band(F, bank, k, G);
    accumulate_sq(acc, from_frequency(G, bank.axis_begin, bank.axis_end));
  }
  finish_sqrt(acc);
  return {std::move(acc), "square"};
}

SquareFunctionResult tensor_square_function(const GridFunction& f,
                                            const TensorFilterBank& tb) {
  if (!(f.spec() == tb.spec()))
    throw std::invalid_argument("tensor_square_function: grid mismatch");
  RealField acc(f.spec(), f.vshape());
  int d = f.spec().dim();
  GridFunction F = to_frequency(f, 0, d);
  GridFunction G(f.spec(), f.vshape());
  GridFunction H(f.spec(), f.vshape());
  for (const auto& ks : scale_tuples(tb)) {
    const GridFunction* cur = &F;
    for (std::size_t i = 0; i < tb.factors.size(); ++i) {
      GridFunction& dst = (i % 2 == 0) ? G : H;
      multiply_band(*cur, tb.factors[i], ks[i], dst);
      cur = &dst;
    }
    accumulate_sq(acc, from_frequency(*cur, 0, d));
  }
  finish_sqrt(acc);
  return {std::move(acc), "tensor-square"};
}

SquareFunctionResult partial_square_function(const GridFunction& f,
                                             const TensorFilterBank& tb,
                                             const std::vector<int>& factor_subset) {
  if (!(f.spec() == tb.spec()))
    throw std::invalid_argument("partial_square_function: grid mismatch");
  for (int i : factor_subset)
    if (i < 0 || i >= tb.parameters())
      throw std::invalid_argument("partial_square_function: factor index out of range");
  if (factor_subset.empty())
    throw std::invalid_argument("partial_square_function: empty factor subset");

  RealField acc(f.spec(), f.vshape());
  // Forward transform only along the selected factors' axes.
  GridFunction F = f;
  auto shp = f.spec().shape();
  for (int i : factor_subset) {
    const FilterBank& b = tb.factors[static_cast<std::size_t>(i)];
    for (int a = b.axis_begin; a < b.axis_end; ++a)
      fft_axis(F.values().data(), shp, f.vcount(), static_cast<std::size_t>(a), false);
  }
  // Odometer over the selected factors' scales, last selected fastest.
  std::vector<int> cur(factor_subset.size());
  for (std::size_t i = 0; i < factor_subset.size(); ++i)
    cur[i] = tb.factors[static_cast<std::size_t>(factor_subset[i])].kmin;
  GridFunction G(f.spec(), f.vshape());
  GridFunction H(f.spec(), f.vshape());
  while (true) {
    const GridFunction* src = &F;
    for (std::size_t i = 0; i < factor_subset.size(); ++i) {
      GridFunction& dst = (i % 2 == 0) ? G : H;
      multiply_band(*src, tb.factors[static_cast<std::size_t>(factor_subset[i])],
                    cur[i], dst);
      src = &dst;
    }
    GridFunction spatial = *src;
    for (int i : factor_subset) {
      const FilterBank& b = tb.factors[static_cast<std::size_t>(i)];
      for (int a = b.axis_begin; a < b.axis_end; ++a)
        fft_axis(spatial.values().data(), shp, f.vcount(),
                 static_cast<std::size_t>(a), true);
    }
    accumulate_sq(acc, spatial);
    int i = static_cast<int>(factor_subset.size()) - 1;
    while (i >= 0) {
      const FilterBank& b = tb.factors[static_cast<std::size_t>(factor_subset[static_cast<std::size_t>(i)])];
      if (++cur[static_cast<std::size_t>(i)] <= b.kmax) break;
      cur[static_cast<std::size_t>(i)] = b.kmin;
      --i;
    }
    if (i < 0) break;
  }
  finish_sqrt(acc);
  return {std::move(acc), "partial-square"};
}

SquareFunctionResult discrete_square_function(const GridSpec& spec,
                                              const CoefficientMap& coeffs,
                                              const Collection& c) {
  RealField acc(spec, coeffs.vshape);
  std::size_t V = coeffs.vcount();
  for (const auto& I : c.cubes) {
    auto it = coeffs.a.find(I);
    if (it == coeffs.a.end()) continue;
    const auto& a = it->second;
    double inv = 1.0 / I.measure();
    std::vector<double> add(V);
    bool any = false;
    for (std::size_t v = 0; v < V; ++v) {
      add[v] = std::norm(a[v]) * inv;
      if (add[v] != 0.0) any = true;
    }
    if (!any) continue;
    for_each_cell(spec, I, [&](std::size_t g) {
      for (std::size_t v = 0; v < V; ++v) acc.at(g, v) += add[v];
    });
  }
  finish_sqrt(acc);
  return {std::move(acc), "discrete-square"};
}

SquareFunctionResult localized_square_function(const GridSpec& spec,
                                               const CoefficientMap& coeffs,
                                               const Collection& c,
                                               const DyadicCube& Q0) {
  auto res = discrete_square_function(spec, coeffs, restrict_collection(c, Q0));
  res.tag = "localized-square";
  return res;
}

}  // namespace lplab
