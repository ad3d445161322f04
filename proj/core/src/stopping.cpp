#include "lplab/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lplab/norms.hpp"
#include "lplab/sizes.hpp"
#include "lplab/weights.hpp"

namespace lplab {

namespace {

// One pass of level sets for a fixed C.  Returns false when the union
// measure breaches the budget.
bool try_levels(const RealField& sf, ExceptionalSets& ex) {
  const GridSpec& spec = sf.spec();
  const std::size_t G = sf.gcount();
  const double cell = spec.cell_measure();
  double sup = 0.0;
  for (double v : sf.values()) sup = std::max(sup, v);

  ex.level_measure.clear();
  ex.level_bound.clear();
  ex.tilde_measure.clear();
  ex.tilde_constant = 0.0;
  ex.omega = RealField(spec);
  auto& ov = ex.omega.values();

  for (int k = 0;; ++k) {
    double lambda = ex.C * std::pow(2.0, ex.e * k / ex.p) * ex.norm_p;
    if (lambda >= sup) break;  // this and all later levels are empty
    RealField ind(spec);
    std::uint64_t cnt = 0;
    for (std::size_t g = 0; g < G; ++g)
      if (sf.at(g) > lambda) {
        ind.at(g) = 1.0;
        ++cnt;
      }
    if (cnt == 0) break;
    double meas = static_cast<double>(cnt) * cell;
    ex.level_measure.push_back(meas);
    ex.level_bound.push_back(std::pow(2.0, -ex.e * k) * std::pow(ex.C, -ex.p));

    RealField m = maximal_function(ind);
    double gate = std::ldexp(1.0, -k);
    std::uint64_t tcnt = 0;
    for (std::size_t g = 0; g < G; ++g)
      if (m.at(g) > gate) {
        ov[g] = 1.0;
        ++tcnt;
      }
    double tmeas = static_cast<double>(tcnt) * cell;
    ex.tilde_measure.push_back(tmeas);
    ex.tilde_constant =
        std::max(ex.tilde_constant, tmeas / (std::ldexp(1.0, k) * meas));
  }

  std::uint64_t ucnt = 0;
  for (double v : ov)
    if (v != 0.0) ++ucnt;
  ex.omega_measure = static_cast<double>(ucnt) * cell;
  return ex.omega_measure < ex.budget;
}

}  // namespace

ExceptionalSets build_exceptional_sets(const RealField& sf, double p, double e,
                                       double budget, double c0) {
  if (sf.vcount() != 1)
    throw std::invalid_argument("build_exceptional_sets: scalar fields only");
  if (p <= 0.0 || e <= 0.0 || budget <= 0.0 || c0 <= 0.0)
    throw std::invalid_argument("build_exceptional_sets: parameters must be positive");
  for (double v : sf.values())
    if (!(v >= 0.0))
      throw std::invalid_argument("build_exceptional_sets: field must be nonnegative");

  ExceptionalSets ex;
  ex.p = p;
  ex.e = e;
  ex.budget = budget;
  ex.C = c0;
  ex.norm_p = lp_norm(sf, p);
  if (ex.norm_p == 0.0) {
    ex.omega = RealField(sf.spec());
    return ex;
  }
  while (!try_levels(sf, ex)) {
    ex.C *= 2.0;
    if (++ex.doublings > 200)
      throw std::runtime_error("build_exceptional_sets: budget unreachable");
  }
  return ex;
}

ExceptionalSets build_exceptional_sets(const SquareFunctionResult& sf, double p,
                                       const std::vector<double>& qvec, double e,
                                       double budget, double c0) {
  RealField flat =
      sf.field.vcount() == 1 ? sf.field : pointwise_q_norm(sf.field, qvec);
  return build_exceptional_sets(flat, p, e, budget, c0);
}

MajorSubset major_subset(const RealField& F, const ExceptionalSets& ex) {
  if (!(F.spec() == ex.omega.spec()))
    throw std::invalid_argument("major_subset: grid mismatch");
  if (!F.is_binary())
    throw std::invalid_argument("major_subset: F must be an indicator");
  MajorSubset out;
  out.indicator = RealField(F.spec());
  const std::size_t G = F.gcount();
  for (std::size_t g = 0; g < G; ++g)
    out.indicator.at(g) = F.at(g) != 0.0 && ex.omega.at(g) == 0.0 ? 1.0 : 0.0;
  out.measure = out.indicator.indicator_measure();
  out.parent_measure = F.indicator_measure();
  if (out.measure < out.parent_measure / 2.0)
    throw std::runtime_error(
        "major_subset: exceptional set eats half of F, increase C (shrink the budget)");
  return out;
}

CubeFunctional sf_average_functional(const GridSpec& spec,
                                     const CoefficientMap& coeffs,
                                     const Collection& c, double p,
                                     const std::vector<double>& qvec) {
  return [spec, coeffs, c, p, qvec](const DyadicCube& I) {
    return local_sf_average(spec, coeffs, c, I, p, qvec);
  };
}

CubeFunctional size_average_functional(const RealField& g, double decay) {
  return [g, decay](const DyadicCube& I) {
    return weighted_chi_sum(g, I, decay) / chi_mass(g.spec(), I, decay);
  };
}

StoppingDecomposition stopping_time(const Collection& members,
                                    const CubeFunctional& avg, double reference,
                                    double p, int max_levels) {
  if (reference <= 0.0)
    throw std::invalid_argument("stopping_time: reference must be positive");
  if (max_levels < 1)
    throw std::invalid_argument("stopping_time: need at least one level");

  Collection closure = relevant_closure(members);
  std::vector<double> cavg(closure.size());
  for (std::size_t i = 0; i < closure.size(); ++i) {
    cavg[i] = avg(closure.cubes[i]);
    if (!(cavg[i] >= 0.0))
      throw std::invalid_argument("stopping_time: averages must be nonnegative");
  }

  StoppingDecomposition dec;
  dec.reference = reference;
  dec.p = p;

  std::vector<bool> taken(members.size(), false);
  std::size_t remaining = members.size();
  std::vector<DyadicCube> heads;

  auto inside_head = [&](const DyadicCube& c) {
    for (const DyadicCube& h : heads)
      if (h.contains(c)) return true;
    return false;
  };
  // True while some unassigned member still has a positive-average
  // closure cube over it; once false the leftovers are terminal.
  auto catchable = [&]() {
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      if (taken[mi]) continue;
      for (std::size_t ci = 0; ci < closure.size(); ++ci)
        if (cavg[ci] > 0.0 && closure.cubes[ci].contains(members.cubes[mi]))
          return true;
    }
    return false;
  };

  for (int n = 0; n < max_levels && remaining > 0 && catchable(); ++n) {
    dec.levels = n + 1;
    double thr = reference * std::ldexp(1.0, -n);
    double mass = 0.0;
    // closure is sorted coarse to fine, so a single pass picks maximal
    // cubes: anything under an already selected head is skipped
    for (std::size_t ci = 0; ci < closure.size(); ++ci) {
      const DyadicCube& J = closure.cubes[ci];
      if (!(cavg[ci] > thr) || inside_head(J)) continue;
      StoppingBucket b;
      b.head = J;
      b.level = n;
      b.threshold = thr;
      b.average = cavg[ci];
      for (std::size_t mi = 0; mi < members.size(); ++mi) {
        if (taken[mi] || !J.contains(members.cubes[mi])) continue;
        b.members.push_back(members.cubes[mi]);
        taken[mi] = true;
        --remaining;
      }
      mass += J.measure() * std::pow(thr, p);
      heads.push_back(J);
      dec.buckets.push_back(std::move(b));
    }
    dec.level_mass.push_back(mass);
  }

  for (std::size_t mi = 0; mi < members.size(); ++mi)
    if (!taken[mi]) dec.zero_members.push_back(members.cubes[mi]);
  dec.complete = !catchable();
  return dec;
}

std::map<DyadicCube, DyadicCube> head_of(const StoppingDecomposition& d) {
  std::map<DyadicCube, DyadicCube> out;
  for (const StoppingBucket& b : d.buckets)
    for (const DyadicCube& m : b.members) out.emplace(m, b.head);
  for (const DyadicCube& m : d.zero_members) out.emplace(m, m);
  return out;
}

double counting_constant(const StoppingDecomposition& d, double norm_p) {
  if (norm_p <= 0.0)
    throw std::invalid_argument("counting_constant: norm must be positive");
  double mass = 0.0;
  for (double m : d.level_mass) mass += m;
  return mass / std::pow(norm_p, d.p);
}

std::vector<PairBucket> intersect_decompositions(const StoppingDecomposition& a,
                                                 const StoppingDecomposition& b) {
  auto hb = head_of(b);
  std::map<DyadicCube, int> level_b;
  for (const StoppingBucket& s : b.buckets)
    for (const DyadicCube& m : s.members) level_b.emplace(m, s.level);
  for (const DyadicCube& m : b.zero_members) level_b.emplace(m, -1);

  // keyed by (head1, head2) in bucket order of a
  std::map<std::pair<DyadicCube, DyadicCube>, PairBucket> joint;
  auto feed = [&](const DyadicCube& m, const DyadicCube& h1, int l1) {
    auto it = hb.find(m);
    if (it == hb.end())
      throw std::invalid_argument("intersect_decompositions: member sets differ");
    const DyadicCube& h2 = it->second;
    if (!h1.contains(m) || !h2.contains(m))
      throw std::logic_error("intersect_decompositions: member escapes its heads");
    PairBucket& pb = joint[{h1, h2}];
    pb.head1 = h1;
    pb.head2 = h2;
    pb.level1 = l1;
    pb.level2 = level_b.at(m);
    pb.members.push_back(m);
  };
  for (const StoppingBucket& s : a.buckets)
    for (const DyadicCube& m : s.members) feed(m, s.head, s.level);
  for (const DyadicCube& m : a.zero_members) feed(m, m, -1);

  std::size_t total = 0;
  std::vector<PairBucket> out;
  out.reserve(joint.size());
  for (auto& [key, pb] : joint) {
    total += pb.members.size();
    out.push_back(std::move(pb));
  }
  std::size_t count_b = 0;
  for (const StoppingBucket& s : b.buckets) count_b += s.members.size();
  count_b += b.zero_members.size();
  if (total != count_b)
    throw std::invalid_argument("intersect_decompositions: member sets differ");
  return out;
}

}  // namespace lplab
