#include <cmath>
#include <vector>

#include "doctest.h"
#include "lplab/corpus.hpp"
#include "lplab/decompose.hpp"
#include "oracles.hpp"

using namespace lplab;

namespace {

Collection full_tree_1d(int max_scale) {
  Collection c(1);
  for (int k = 0; k <= max_scale; ++k)
    for (std::uint32_t p = 0; p < (1u << k); ++p) c.insert(DyadicCube(1, k, {p}));
  return c;
}

GridFunction random_function(const GridSpec& s, std::uint64_t seed,
                             std::vector<std::size_t> vshape = {}) {
  GridFunction f(s, std::move(vshape));
  oracle::Rng rng(seed);
  for (auto& v : f.values()) v = {rng.centered(), rng.centered()};
  return f;
}

}  // namespace

TEST_CASE("analyze matches the brute pairing") {
  GridSpec s({5}, {1});
  Collection tree = full_tree_1d(3);
  LacunaryFamily fam = build_lacunary_family(s, tree, "haar", 2.0);
  GridFunction f = random_function(s, 41, {2});

  CoefficientMap m = analyze(f, fam);
  CHECK(m.vshape == f.vshape());
  for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
    auto want = oracle::brute_pairing(f, fam.values[i]);
    auto got = m.get(fam.cubes.cubes[i]);
    for (std::size_t v = 0; v < want.size(); ++v)
      CHECK(std::abs(got[v] - want[v]) <= 1e-12);
  }
}

TEST_CASE("synthesize matches the brute sum and round-trips haar coefficients") {
  GridSpec s({5}, {1});
  Collection tree = full_tree_1d(3);
  LacunaryFamily fam = build_lacunary_family(s, tree, "haar", 2.0);

  CoefficientMap m;
  oracle::Rng rng(43);
  for (const auto& cube : tree.cubes) m.set(cube, {cplx(rng.centered(), rng.centered())});

  GridFunction g = synthesize(s, m, fam);
  for (std::size_t gi = 0; gi < g.gcount(); ++gi) {
    cplx want = 0.0;
    for (std::size_t i = 0; i < fam.cubes.size(); ++i)
      want += m.get(fam.cubes.cubes[i])[0] * fam.values[i][gi];
    CHECK(std::abs(g.at(gi) - want) <= 1e-12);
  }

  // Orthonormality turns analyze into the exact inverse.
  CoefficientMap back = analyze(g, fam);
  for (const auto& cube : tree.cubes)
    CHECK(std::abs(back.get(cube)[0] - m.get(cube)[0]) <= 1e-12);
}

TEST_CASE("synthesize rejects coefficients outside the family") {
  GridSpec s({4}, {1});
  Collection tree(1, {root_cube(1)});
  LacunaryFamily fam = build_lacunary_family(s, tree, "haar", 2.0);
  CoefficientMap m;
  m.set(DyadicCube(1, 2, {1}), {cplx(1.0, 0.0)});
  CHECK_THROWS(synthesize(s, m, fam));
}

TEST_CASE("choose_sample_points is the per-interval argmin with low tie-break") {
  GridSpec s({6}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 0, 5, "smooth-bump");
  GridFunction f = random_function(s, 47);
  int N = 2;

  SamplePoints pts = choose_sample_points(f, bank, N);
  CHECK(pts.N == N);
  REQUIRE(!pts.bands.empty());
  for (int j : pts.bands) CHECK(j + N <= s.logres[0]);

  for (int j : pts.bands) {
    GridFunction band = band_convolve(f, bank, j);
    const auto& table = pts.points[0];
    int scale = j + N;
    for (std::uint32_t p = 0; p < (1u << scale); ++p) {
      DyadicCube cube(1, scale, {p});
      auto it = table.find(cube);
      if (it == table.end()) continue;
      double best = 1e300;
      for_each_cell(s, cube, [&](std::size_t g) {
        best = std::min(best, std::abs(band.at(g)));
      });
      CHECK(std::abs(band.at(it->second)) <= best + 1e-15);
    }
  }
}

TEST_CASE("sample points are the earliest argmin cell of each interval") {
  // A single frequency ties every cell up to fp rounding; the winner is
  // whichever cell first attains the exact minimum in ascending order.
  GridSpec s({5}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 0, 4, "smooth-bump");
  GridFunction f(s);
  for (std::size_t g = 0; g < f.gcount(); ++g) {
    double x = grid_point(s, g)[0];
    f.at(g) = cplx(std::cos(2.0 * M_PI * 4.0 * x), std::sin(2.0 * M_PI * 4.0 * x));
  }
  int N = 1;
  SamplePoints pts = choose_sample_points(f, bank, N);
  for (int j : pts.bands) {
    GridFunction band = band_convolve(f, bank, j);
    int scale = j + N;
    for (std::uint32_t p = 0; p < (1u << scale); ++p) {
      auto it = pts.points[0].find(DyadicCube(1, scale, {p}));
      REQUIRE(it != pts.points[0].end());
      std::size_t stride = s.points() >> scale;
      std::size_t base = static_cast<std::size_t>(p) * stride;
      std::size_t arg = base;
      for (std::size_t g = base; g < base + stride; ++g)
        if (std::abs(band.at(g)) < std::abs(band.at(arg))) arg = g;
      CHECK(it->second == arg);
    }
  }
}

TEST_CASE("fj_reconstruct contracts and reassembles the band") {
  GridSpec s({9}, {1});
  CorpusRecipe r = recipe_by_name("bumps");
  r.count = 2;
  r.band_cap = 16;
  auto corpus = generate_corpus(s, r, 7);
  FilterBank bank = build_filterbank(s, 0, 1, 0, 8, "smooth-bump");
  int lmax = 10;

  for (const auto& f : corpus) {
    FJResult res;
    for (int N = 2; N <= 16; N *= 2) {
      SamplePoints pts = choose_sample_points(f, bank, N);
      res = fj_reconstruct(f, bank, N, pts, lmax);
      if (res.converged) break;
    }
    REQUIRE(res.converged);
    CHECK(res.ratio <= 0.5);
    REQUIRE(static_cast<int>(res.residual_sup.size()) == lmax);
    for (std::size_t l = 0; l + 1 < res.residual_sup.size(); ++l) {
      if (res.residual_sup[l + 1] > res.floor)
        CHECK(res.residual_sup[l + 1] < res.residual_sup[l]);
    }
    CHECK(res.recon_error <=
          std::ldexp(1.0, -lmax) * res.first_residual_scale + 1e-14);
    CHECK(res.coeff.size() == std::size_t{1} << (res.band + res.N));
    CHECK(res.psi.size() == res.coeff.size());
  }
}

TEST_CASE("fj pipeline ties the three norms together") {
  GridSpec s({9}, {1});
  CorpusRecipe r = recipe_by_name("bumps");
  r.count = 1;
  r.band_cap = 16;
  auto corpus = generate_corpus(s, r, 11);
  FilterBank bank = build_filterbank(s, 0, 1, 0, 8, "smooth-bump");

  FJPipelineReport rep = fj_pipeline_check(corpus[0], bank, 4, 10, 2.0);
  CHECK(rep.bands_used > 0);
  CHECK(rep.pointwise_ok);
  CHECK(std::isfinite(rep.norm_expansion));
  CHECK(rep.norm_discrete > 0.0);
  CHECK(rep.norm_square > 0.0);
  CHECK(rep.recon_error <= 1e-2 * rep.norm_square);
}

TEST_CASE("fj machinery is one-dimensional scalar only") {
  GridSpec s2({4, 4}, {2});
  FilterBank bank2 = build_filterbank(s2, 0, 2, 0, 3, "smooth-bump");
  GridFunction f2 = random_function(s2, 3);
  SamplePoints pts2 = choose_sample_points(f2, bank2, 1);
  CHECK_THROWS(fj_reconstruct(f2, bank2, 1, pts2, 4));
  CHECK_THROWS(fj_pipeline_check(f2, bank2, 1, 4, 2.0));

  GridSpec s({5}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 0, 4, "smooth-bump");
  GridFunction fv = random_function(s, 5, {2});
  SamplePoints pts = choose_sample_points(fv, bank, 1);
  CHECK_THROWS(fj_reconstruct(fv, bank, 1, pts, 4));
}
