#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "lplab/corpus.hpp"
#include "lplab/decompose.hpp"
#include "lplab/norms.hpp"
#include "lplab/sizes.hpp"
#include "lplab/sparse.hpp"
#include "oracles.hpp"

using namespace lplab;

namespace {

Collection full_tree_1d(int max_scale) {
  Collection c(1);
  for (int k = 0; k <= max_scale; ++k)
    for (std::uint32_t p = 0; p < (1u << k); ++p) c.insert(DyadicCube(1, k, {p}));
  return c;
}

CoefficientMap corpus_coefficients(const GridSpec& s, const Collection& tree,
                                   std::uint64_t seed) {
  CorpusRecipe r = recipe_by_name("mix");
  r.count = 1;
  r.band_cap = 16;
  auto corpus = generate_corpus(s, r, seed);
  LacunaryFamily fam = build_lacunary_family(s, tree, "haar", 2.0);
  return analyze(corpus[0], fam);
}

}  // namespace

TEST_CASE("sparse family invariants hold and re-verify") {
  GridSpec s({8}, {1});
  Collection tree = full_tree_1d(3);
  Weight w = make_power_weight(s, 0.25);

  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    CoefficientMap m = corpus_coefficients(s, tree, seed);
    SparseFamily fam = sparse_construct(s, m, tree, w, 1.0);
    CHECK(fam.verified);
    CHECK_NOTHROW(verify_sparse(fam, m, tree));
    REQUIRE(!fam.nodes.empty());

    // Density: every node keeps at least half its cube.
    for (const auto& node : fam.nodes) {
      CHECK(node.e_measure >= node.cube.measure() / 2.0);
      double cover_mass = 0.0;
      for (const auto& c : node.cover) cover_mass += c.measure();
      CHECK(oracle::rel_diff(node.e_measure + cover_mass, node.cube.measure()) <=
            1e-12);
    }

    // E sets are pairwise disjoint: paint them and watch for overlap.
    RealField painted(s);
    for (const auto& node : fam.nodes) {
      RealField covered(s);
      for (const auto& c : node.cover)
        for_each_cell(s, c, [&](std::size_t g) { covered.at(g) = 1.0; });
      for_each_cell(s, node.cube, [&](std::size_t g) {
        if (covered.at(g) == 0.0) {
          CHECK(painted.at(g) == 0.0);
          painted.at(g) = 1.0;
        }
      });
    }

    // Members partition the input collection.
    std::map<DyadicCube, int> seen;
    for (const auto& node : fam.nodes)
      for (const auto& mem : node.members) seen[mem] += 1;
    for (const auto& cube : tree.cubes) CHECK(seen[cube] == 1);

    // Parent and child links are consistent.
    for (std::size_t i = 0; i < fam.nodes.size(); ++i) {
      const auto& node = fam.nodes[i];
      if (node.parent >= 0) {
        CHECK(fam.nodes[static_cast<std::size_t>(node.parent)].cube.contains(node.cube));
        CHECK(node.depth ==
              fam.nodes[static_cast<std::size_t>(node.parent)].depth + 1);
      }
      for (int ch : node.children)
        CHECK(fam.nodes[static_cast<std::size_t>(ch)].parent == static_cast<int>(i));
    }
  }
}

TEST_CASE("a concentrated coefficient forces a split") {
  GridSpec s({6}, {1});
  Collection tree = full_tree_1d(2);
  CoefficientMap m;
  for (const auto& cube : tree.cubes) m.set(cube, {cplx(0.01, 0.0)});
  m.set(DyadicCube(1, 2, {0}), {cplx(100.0, 0.0)});
  Weight w = make_power_weight(s, 0.0);

  SparseFamily fam = sparse_construct(s, m, tree, w, 1.0);
  REQUIRE(fam.nodes.size() >= 2);
  CHECK(fam.roots.size() == 1);
  const SparseNode& root = fam.nodes[0];
  CHECK(root.cube == root_cube(1));
  CHECK(!root.cover.empty());
  CHECK(fam.max_depth >= 1);

  // The loud cube lands in a deeper node, not the root's members.
  bool in_root = false;
  for (const auto& mem : root.members) in_root |= (mem == DyadicCube(1, 2, {0}));
  CHECK(!in_root);
}

TEST_CASE("e_set_weight of the unit weight is the e measure") {
  GridSpec s({7}, {1});
  Collection tree = full_tree_1d(3);
  CoefficientMap m = corpus_coefficients(s, tree, 9);
  Weight w = make_power_weight(s, 0.0);
  SparseFamily fam = sparse_construct(s, m, tree, w, 1.0);
  for (std::size_t i = 0; i < fam.nodes.size(); ++i)
    CHECK(oracle::rel_diff(e_set_weight(fam, static_cast<int>(i), w),
                           fam.nodes[i].e_measure) <= 1e-12);
  CHECK_THROWS(e_set_weight(fam, -1, w));
  CHECK_THROWS(e_set_weight(fam, static_cast<int>(fam.nodes.size()), w));
}

TEST_CASE("sparse rhs with unit weight reduces to measures") {
  GridSpec s({7}, {1});
  Collection tree = full_tree_1d(3);
  CoefficientMap m = corpus_coefficients(s, tree, 13);
  Weight w = make_power_weight(s, 0.0);
  SparseFamily fam = sparse_construct(s, m, tree, w, 1.0);

  double p = 1.0, p1 = 1.0;
  double rhs = sparse_bound_rhs(s, m, tree, fam, w, p, p1, 0.0);
  double want = 0.0;
  for (const auto& node : fam.nodes) {
    double avg = local_sf_average(s, m, restrict_collection(tree, node.cube),
                                  node.cube, p1);
    want += std::pow(avg, p) * node.cube.measure();
  }
  CHECK(oracle::rel_diff(rhs, want) <= 1e-12);

  double rhs_e = sparse_bound_rhs(s, m, tree, fam, w, p, p1, 0.0, true);
  double want_e = 0.0;
  for (std::size_t i = 0; i < fam.nodes.size(); ++i) {
    double avg = local_sf_average(s, m, restrict_collection(tree, fam.nodes[i].cube),
                                  fam.nodes[i].cube, p1);
    want_e += std::pow(avg, p) * fam.nodes[i].e_measure;
  }
  CHECK(oracle::rel_diff(rhs_e, want_e) <= 1e-12);

  // E sets never beat the full cubes.
  CHECK(rhs_e <= rhs * (1.0 + 1e-12));

  SparseFamily unverified = fam;
  unverified.verified = false;
  CHECK_THROWS(sparse_bound_rhs(s, m, tree, unverified, w, p, p1, 0.0));
}

TEST_CASE("sparse bound controls the weighted norm") {
  GridSpec s({8}, {1});
  Collection tree = full_tree_1d(3);
  LacunaryFamily lac = build_lacunary_family(s, tree, "haar", 2.0);
  CorpusRecipe r = recipe_by_name("mix");
  r.count = 2;
  r.band_cap = 16;
  auto corpus = generate_corpus(s, r, 31);
  Weight w = make_power_weight(s, 0.25);

  for (const auto& f : corpus) {
    CoefficientMap m = analyze(f, lac);
    GridFunction g = synthesize(s, m, lac);
    SparseFamily fam = sparse_construct(s, m, tree, w, 1.0);
    for (double p : {0.5, 1.0}) {
      double lhs = std::pow(lp_norm_weighted(g, p, w.w), p);
      double rhs = sparse_bound_rhs(s, m, tree, fam, w, p, 1.0, 0.0);
      CHECK(std::isfinite(rhs));
      if (rhs > 0.0) CHECK(std::isfinite(lhs / rhs));
    }
  }
}

TEST_CASE("interpolation_split partitions by the level set") {
  GridSpec s({4}, {1});
  Collection c(1, {root_cube(1), DyadicCube(1, 1, {0}), DyadicCube(1, 2, {3})});
  CoefficientMap m;
  m.set(root_cube(1), {cplx(1.0, 0.0)});
  m.set(DyadicCube(1, 1, {0}), {cplx(0.0, 2.0)});
  m.set(DyadicCube(1, 2, {3}), {cplx(3.0, 0.0)});
  SquareFunctionResult sf = discrete_square_function(s, m, c);
  // Field values: 3 on [0,1/2), 1 on [1/2,3/4), sqrt(37) on [3/4,1).

  auto [one, two] = interpolation_split(sf, c, 2.0);
  CHECK(one.member(DyadicCube(1, 1, {0})));
  CHECK(one.member(DyadicCube(1, 2, {3})));
  CHECK(!one.member(root_cube(1)));
  CHECK(two.member(root_cube(1)));
  CHECK(one.size() + two.size() == c.size());

  // Alpha above the sup leaves everything in the second class.
  auto [none, all] = interpolation_split(sf, c, 10.0);
  CHECK(none.empty());
  CHECK(all.size() == c.size());

  CHECK_THROWS(interpolation_split(sf, c, 0.0));
}
