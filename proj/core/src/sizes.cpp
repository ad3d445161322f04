#include "lplab/sizes.hpp"

#include <cmath>
#include <stdexcept>

namespace lplab {

namespace {

// Per-axis tables of squared distances from each coordinate to the cube's
// interval, so chi_tilde evaluations cost O(d) per cell.
std::vector<std::vector<double>> axis_dist2(const GridSpec& spec,
                                            const DyadicCube& I) {
  std::vector<std::vector<double>> t(static_cast<std::size_t>(spec.dim()));
  double s = I.side();
  for (int j = 0; j < spec.dim(); ++j) {
    std::size_t n = spec.axis_size(j);
    auto& row = t[static_cast<std::size_t>(j)];
    row.resize(n);
    double a = I.pos[j] * s;
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::ldexp(static_cast<double>(i), -spec.logres[j]);
      double rel = x - a - std::floor(x - a);
      double d = rel < s ? 0.0 : std::min(1.0 - rel, rel - s);
      row[i] = d * d;
    }
  }
  return t;
}

template <typename Fn>
void sweep_chi(const GridSpec& spec, const DyadicCube& I, double decay, Fn fn) {
  auto tables = axis_dist2(spec, I);
  double side = I.side();
  int d = spec.dim();
  std::size_t total = static_cast<std::size_t>(spec.points());
  for (std::size_t g = 0; g < total; ++g) {
    double acc = 0.0;
    std::size_t rest = g;
    for (int j = d - 1; j >= 0; --j) {
      std::size_t n = spec.axis_size(j);
      acc += tables[static_cast<std::size_t>(j)][rest & (n - 1)];
      rest >>= spec.logres[j];
    }
    double chi = std::pow(1.0 + std::sqrt(acc) / side, -decay);
    fn(g, chi);
  }
}

}  // namespace

double chi_mass(const GridSpec& spec, const DyadicCube& I, double decay) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(spec.points()));
  sweep_chi(spec, I, decay, [&](std::size_t, double chi) { terms.push_back(chi); });
  return pairwise_sum(terms) * spec.cell_measure();
}

double weighted_chi_sum(const RealField& g, const DyadicCube& I, double decay) {
  if (g.vcount() != 1)
    throw std::invalid_argument("weighted_chi_sum: scalar fields only");
  std::vector<double> terms;
  terms.reserve(g.gcount());
  sweep_chi(g.spec(), I, decay,
            [&](std::size_t gi, double chi) { terms.push_back(g.at(gi) * chi); });
  return pairwise_sum(terms) * g.spec().cell_measure();
}

SizeReport size_indicator(const RealField& E, const Collection& c, double decay) {
  if (!E.is_binary() || E.vcount() != 1)
    throw std::invalid_argument("size_indicator: scalar 0/1 field required");
  if (c.empty()) throw std::invalid_argument("size_indicator: empty collection");
  Collection closure = relevant_closure(c);
  SizeReport rep;
  rep.decay = decay;
  bool first = true;
  for (const auto& I : closure.cubes) {
    double num = weighted_chi_sum(E, I, decay);
    double den = chi_mass(E.spec(), I, decay);
    double val = den > 0.0 ? num / den : 0.0;
    if (first || val > rep.value) {
      rep.value = val;
      rep.attaining = I;
      first = false;
    }
  }
  return rep;
}

double smoothed_average(const RealField& g, const DyadicCube& I0, double decay) {
  return weighted_chi_sum(g, I0, decay) / I0.measure();
}

double local_sf_average(const GridSpec& spec, const CoefficientMap& coeffs,
                        const Collection& c, const DyadicCube& I0, double p,
                        const std::vector<double>& q) {
  auto sf = localized_square_function(spec, coeffs, c, I0);
  RealField collapsed = pointwise_q_norm(sf.field, q);
  double nrm = lp_norm(collapsed, p);
  return std::pow(I0.measure(), -1.0 / p) * nrm;
}

BmoReport bmo_quantity(const GridSpec& spec, const CoefficientMap& coeffs,
                       const Collection& c, double q,
                       const std::vector<double>& qvec) {
  if (c.empty()) throw std::invalid_argument("bmo_quantity: empty collection");
  if (!(q > 0.0)) throw std::invalid_argument("bmo_quantity: q > 0 required");
  BmoReport rep;
  rep.q = q;
  Collection closure = relevant_closure(c);
  bool first = true;
  for (const auto& C0 : closure.cubes) {
    double val = local_sf_average(spec, coeffs, c, C0, q, qvec);
    rep.table.emplace_back(C0, val);
    if (first || val > rep.value) {
      rep.value = val;
      rep.attaining = C0;
      first = false;
    }
  }
  return rep;
}

}  // namespace lplab
