#include "lplab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "lplab/norms.hpp"
#include "lplab/sizes.hpp"

namespace lplab {

namespace {

// w * chi~_Q sampled on the whole torus.
RealField weighted_chi_field(const RealField& w, const DyadicCube& Q, double decay) {
  const GridSpec& spec = w.spec();
  RealField out(spec);
  const std::size_t G = w.gcount();
  for (std::size_t g = 0; g < G; ++g)
    out.at(g) = w.at(g) * chi_tilde(grid_point(spec, g), Q, decay);
  return out;
}

// Scalar collapse of a possibly vector-valued square function.
RealField flat_field(const RealField& f, const std::vector<double>& qvec) {
  return f.vcount() == 1 ? f : pointwise_q_norm(f, qvec);
}

// Cells of Q outside every cover cube, ascending grid order.
std::vector<std::size_t> e_set_cells(const GridSpec& spec, const SparseNode& node,
                                     std::vector<char>& scratch) {
  for (const DyadicCube& cc : node.cover)
    for_each_cell(spec, cc, [&](std::size_t g) { scratch[g] = 1; });
  std::vector<std::size_t> cells;
  for_each_cell(spec, node.cube, [&](std::size_t g) {
    if (!scratch[g]) cells.push_back(g);
  });
  for (const DyadicCube& cc : node.cover)
    for_each_cell(spec, cc, [&](std::size_t g) { scratch[g] = 0; });
  return cells;
}

}  // namespace

SparseFamily sparse_construct(const GridSpec& spec, const CoefficientMap& coeffs,
                              const Collection& c, const Weight& w, double p1,
                              double c0, double decay, const std::vector<double>& qvec) {
  if (c.empty()) throw std::invalid_argument("sparse_construct: empty collection");
  if (!(w.w.spec() == spec))
    throw std::invalid_argument("sparse_construct: weight lives on another grid");
  for (double v : w.w.values())
    if (!(v > 0.0))
      throw std::invalid_argument("sparse_construct: weight must be positive");
  if (p1 <= 0.0 || c0 < 1.0 || decay <= 1.0)
    throw std::invalid_argument("sparse_construct: bad parameters");
  for (const DyadicCube& m : c.cubes)
    if (!cube_on_grid(spec, m))
      throw std::invalid_argument("sparse_construct: member below grid resolution");

  SparseFamily fam;
  fam.spec = spec;
  fam.p1 = p1;
  fam.c0 = c0;
  fam.decay = decay;

  // Roots: maximal cubes of the collection (sorted coarse to fine, so
  // one pass suffices).
  std::vector<DyadicCube> roots;
  for (const DyadicCube& m : c.cubes) {
    bool covered = false;
    for (const DyadicCube& r : roots)
      if (r.contains(m)) {
        covered = true;
        break;
      }
    if (!covered) roots.push_back(m);
  }

  struct Pending {
    DyadicCube q;
    int parent;
    int depth;
    std::vector<DyadicCube> members;
  };
  std::deque<Pending> queue;
  for (const DyadicCube& r : roots) {
    Pending p{r, -1, 0, {}};
    for (const DyadicCube& m : c.cubes)
      if (r.contains(m)) p.members.push_back(m);
    queue.push_back(std::move(p));
  }

  const double cell = spec.cell_measure();
  while (!queue.empty()) {
    Pending pend = std::move(queue.front());
    queue.pop_front();

    SparseNode node;
    node.cube = pend.q;
    node.parent = pend.parent;
    node.depth = pend.depth;
    fam.max_depth = std::max(fam.max_depth, pend.depth);

    Collection local(c.dim, pend.members, c.cap_scale);
    node.avg_sf = local_sf_average(spec, coeffs, local, node.cube, p1, qvec);
    node.avg_w = smoothed_average(w.w, node.cube, decay);
    RealField sf =
        flat_field(localized_square_function(spec, coeffs, local, node.cube).field,
                   qvec);
    RealField mw = maximal_function(weighted_chi_field(w.w, node.cube, decay));

    node.C = c0;
    RealField bad(spec);
    while (true) {
      std::uint64_t bad_count = 0;
      for_each_cell(spec, node.cube, [&](std::size_t g) {
        bool b = sf.at(g) > node.C * node.avg_sf || mw.at(g) > node.C * node.avg_w;
        bad.at(g) = b ? 1.0 : 0.0;
        if (b) ++bad_count;
      });
      node.bad_measure = static_cast<double>(bad_count) * cell;
      CoverResult cov = maximal_cover(bad);
      double covered = 0.0;
      for (const DyadicCube& cc : cov.cubes) covered += cc.measure();
      node.e_measure = node.cube.measure() - covered;
      if (node.e_measure >= node.cube.measure() / 2.0) {
        node.cover = std::move(cov.cubes);
        node.residual_cells = cov.residual.size();
        break;
      }
      node.C *= 2.0;
      if (++node.doublings > 200)
        throw std::runtime_error("sparse_construct: density unreachable");
    }

    // Split the pending members: kept here, or deferred into the cover
    // cube that swallowed them.
    std::map<DyadicCube, std::vector<DyadicCube>> deferred;
    for (const DyadicCube& m : pend.members) {
      const DyadicCube* into = nullptr;
      for (const DyadicCube& cc : node.cover)
        if (cc.contains(m)) {
          into = &cc;
          break;
        }
      if (into)
        deferred[*into].push_back(m);
      else
        node.members.push_back(m);
    }

    int my_index = static_cast<int>(fam.nodes.size());
    if (pend.parent >= 0) fam.nodes[pend.parent].children.push_back(my_index);
    else fam.roots.push_back(my_index);
    fam.nodes.push_back(std::move(node));
    for (auto& [cc, ms] : deferred)
      queue.push_back(Pending{cc, my_index, pend.depth + 1, std::move(ms)});
  }

  verify_sparse(fam, coeffs, c);
  fam.verified = true;
  return fam;
}

void verify_sparse(const SparseFamily& fam, const CoefficientMap& coeffs,
                   const Collection& c) {
  const GridSpec& spec = fam.spec;
  const std::size_t G = static_cast<std::size_t>(spec.points());

  // exact partition of the input collection
  std::vector<DyadicCube> all;
  for (const SparseNode& n : fam.nodes)
    all.insert(all.end(), n.members.begin(), n.members.end());
  std::sort(all.begin(), all.end());
  if (all.size() != c.size() || !std::equal(all.begin(), all.end(), c.cubes.begin()))
    throw std::logic_error("verify_sparse: members do not partition the collection");

  std::vector<char> scratch(G, 0);
  std::vector<int> owner(G, -1);
  for (std::size_t ni = 0; ni < fam.nodes.size(); ++ni) {
    const SparseNode& n = fam.nodes[ni];

    double covered = 0.0;
    for (std::size_t i = 0; i < n.cover.size(); ++i) {
      const DyadicCube& cc = n.cover[i];
      if (!(cc.scale > n.cube.scale) || !n.cube.contains(cc))
        throw std::logic_error("verify_sparse: cover cube not strictly inside its node");
      for (std::size_t j = i + 1; j < n.cover.size(); ++j)
        if (cc.contains(n.cover[j]) || n.cover[j].contains(cc))
          throw std::logic_error("verify_sparse: cover cubes overlap");
      covered += cc.measure();
    }
    if (n.e_measure != n.cube.measure() - covered)
      throw std::logic_error("verify_sparse: stored |E_Q| is stale");
    if (!(n.e_measure >= n.cube.measure() / 2.0))
      throw std::logic_error("verify_sparse: |E_Q| < |Q|/2");

    for (const DyadicCube& m : n.members) {
      if (!n.cube.contains(m))
        throw std::logic_error("verify_sparse: member outside its node");
      for (const DyadicCube& cc : n.cover)
        if (cc.contains(m))
          throw std::logic_error("verify_sparse: member hides inside a cover cube");
    }

    // E sets must be pairwise disjoint across the whole family
    for (std::size_t g : e_set_cells(spec, n, scratch)) {
      if (owner[g] >= 0) throw std::logic_error("verify_sparse: E sets overlap");
      owner[g] = static_cast<int>(ni);
    }

    // the square function of the members kept here is constant on every
    // cover cube, exactly
    if (!n.members.empty() && !n.cover.empty()) {
      CoefficientMap sub;
      sub.vshape = coeffs.vshape;
      for (const DyadicCube& m : n.members) sub.a.emplace(m, coeffs.get(m));
      Collection mem(c.dim, n.members, c.cap_scale);
      RealField sf = discrete_square_function(spec, sub, mem).field;
      for (const DyadicCube& cc : n.cover) {
        bool have = false;
        std::vector<double> ref(sf.vcount());
        for_each_cell(spec, cc, [&](std::size_t g) {
          for (std::size_t v = 0; v < sf.vcount(); ++v) {
            if (!have) ref[v] = sf.at(g, v);
            else if (sf.at(g, v) != ref[v])
              throw std::logic_error(
                  "verify_sparse: square function varies on a cover cube");
          }
          have = true;
        });
      }
    }
  }
}

double e_set_weight(const SparseFamily& fam, int node, const Weight& w) {
  if (node < 0 || node >= static_cast<int>(fam.nodes.size()))
    throw std::invalid_argument("e_set_weight: no such node");
  const GridSpec& spec = fam.spec;
  std::vector<char> scratch(static_cast<std::size_t>(spec.points()), 0);
  double sum = 0.0;
  for (std::size_t g : e_set_cells(spec, fam.nodes[node], scratch))
    sum += w.w.at(g);
  return sum * spec.cell_measure();
}

double sparse_bound_rhs(const GridSpec& spec, const CoefficientMap& coeffs,
                        const Collection& c, const SparseFamily& fam,
                        const Weight& w, double p, double p1, double eps_p,
                        bool use_e_sets, const std::vector<double>& qvec) {
  if (!fam.verified)
    throw std::invalid_argument("sparse_bound_rhs: family not verified");
  if (p <= 0.0 || p1 <= 0.0 || eps_p < 0.0)
    throw std::invalid_argument("sparse_bound_rhs: bad exponents");
  if (!(w.w.spec() == spec))
    throw std::invalid_argument("sparse_bound_rhs: weight lives on another grid");

  RealField wpow(spec);
  if (!use_e_sets) {
    for (std::size_t g = 0; g < wpow.gcount(); ++g)
      wpow.at(g) = std::pow(w.w.at(g), 1.0 + eps_p);
  }

  double total = 0.0;
  for (std::size_t ni = 0; ni < fam.nodes.size(); ++ni) {
    const SparseNode& n = fam.nodes[ni];
    double avg =
        local_sf_average(spec, coeffs, restrict_collection(c, n.cube), n.cube, p1, qvec);
    if (avg == 0.0) continue;
    double factor;
    if (use_e_sets) {
      factor = e_set_weight(fam, static_cast<int>(ni), w);
    } else {
      double smoothed = weighted_chi_sum(wpow, n.cube, fam.decay) /
                        chi_mass(spec, n.cube, fam.decay);
      factor = std::pow(smoothed, 1.0 / (1.0 + eps_p)) * n.cube.measure();
    }
    total += std::pow(avg, p) * factor;
  }
  return total;
}

std::pair<Collection, Collection> interpolation_split(const SquareFunctionResult& sf,
                                                      const Collection& c,
                                                      double alpha,
                                                      const std::vector<double>& qvec) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("interpolation_split: alpha must be positive");
  RealField flat = flat_field(sf.field, qvec);
  RealField ind(flat.spec());
  for (std::size_t g = 0; g < flat.gcount(); ++g)
    ind.at(g) = flat.at(g) > alpha ? 1.0 : 0.0;
  CoverResult cov = maximal_cover(ind);

  Collection one(c.dim, {}, c.cap_scale);
  Collection two(c.dim, {}, c.cap_scale);
  for (const DyadicCube& m : c.cubes) {
    bool inside = false;
    for (const DyadicCube& cc : cov.cubes)
      if (cc.contains(m)) {
        inside = true;
        break;
      }
    (inside ? one : two).insert(m);
  }
  return {one, two};
}

}  // namespace lplab
