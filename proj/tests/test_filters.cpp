#include <cmath>
#include <vector>

#include "doctest.h"
#include "lplab/filters.hpp"
#include "lplab/norms.hpp"
#include "oracles.hpp"

using namespace lplab;

namespace {

GridFunction random_function(const GridSpec& s, std::uint64_t seed,
                             std::vector<std::size_t> vshape = {}) {
  GridFunction f(s, std::move(vshape));
  oracle::Rng rng(seed);
  for (auto& v : f.values()) v = {rng.centered(), rng.centered()};
  return f;
}

}  // namespace

TEST_CASE("ramp endpoints, midpoint, monotonicity") {
  CHECK(ramp(0.5) == 0.0);
  CHECK(ramp(1.0) == 0.0);
  CHECK(ramp(2.0) == 1.0);
  CHECK(ramp(5.0) == 1.0);
  CHECK(ramp(1.5) == doctest::Approx(0.5).epsilon(1e-14));
  double prev = 0.0;
  for (double t = 1.0; t <= 2.0; t += 1.0 / 64.0) {
    double v = ramp(t);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("ramp_derivative matches finite differences") {
  double h = 1e-6;
  for (double t : {1.1, 1.3, 1.5, 1.8, 1.95}) {
    double fd = (ramp(t + h) - ramp(t - h)) / (2.0 * h);
    CHECK(std::fabs(ramp_derivative(t, 1) - fd) <= 1e-7);
    double fd2 = (ramp_derivative(t + h, 1) - ramp_derivative(t - h, 1)) / (2.0 * h);
    CHECK(std::fabs(ramp_derivative(t, 2) - fd2) <= 1e-5);
  }
  CHECK(ramp_derivative(0.9, 1) == 0.0);
  CHECK(ramp_derivative(2.1, 1) == 0.0);
}

TEST_CASE("filter bank telescopes to one away from zero") {
  for (const char* profile : {"smooth-bump", "sharp-annulus"}) {
    GridSpec s({5, 3}, {1, 1});
    FilterBank bank = build_filterbank(s, 0, 1, 0, 4, profile);
    std::size_t n = bank.fshape[0];
    for (std::size_t fi = 0; fi < n; ++fi) {
      double sum = 0.0;
      for (int k = bank.kmin; k <= bank.kmax; ++k)
        sum += bank.prof[static_cast<std::size_t>(k - bank.kmin)][fi];
      if (fi == 0)
        CHECK(sum == 0.0);
      else
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
  }
  CHECK_THROWS(build_filterbank(GridSpec({4}, {1}), 0, 1, 0, 2, "triangle"));
}

TEST_CASE("band_convolve matches direct circular convolution") {
  GridSpec s({5}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 1, 3, "smooth-bump");
  GridFunction f = random_function(s, 17);

  for (int k = bank.kmin; k <= bank.kmax; ++k) {
    // Spatial kernel of psi_k: inverse DFT of the profile line.
    std::size_t n = s.axis_size(0);
    std::vector<cplx> prof(n);
    for (std::size_t i = 0; i < n; ++i)
      prof[i] = bank.prof[static_cast<std::size_t>(k - bank.kmin)][i];
    std::vector<cplx> kernel = oracle::dft(prof, true);
    std::vector<cplx> want = oracle::circular_convolve(f.values(), kernel);

    GridFunction got = band_convolve(f, bank, k);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(got.values()[i] - want[i]) <= 1e-12);
  }
}

TEST_CASE("band_convolve on a two-axis factor multiplies the 2-d profile") {
  GridSpec s({3, 3}, {2});
  FilterBank bank = build_filterbank(s, 0, 2, 0, 2, "smooth-bump");
  GridFunction f = random_function(s, 23);

  GridFunction F = to_frequency(f, 0, 2);
  for (int k = bank.kmin; k <= bank.kmax; ++k) {
    GridFunction wantF(s);
    for (std::size_t g = 0; g < F.gcount(); ++g) {
      std::size_t fi = (g >> bank.fshift) & bank.fmask;
      wantF.at(g) = F.at(g) * bank.prof[static_cast<std::size_t>(k - bank.kmin)][fi];
    }
    GridFunction want = from_frequency(wantF, 0, 2);
    GridFunction got = band_convolve(f, bank, k);
    for (std::size_t g = 0; g < f.gcount(); ++g)
      CHECK(std::abs(got.at(g) - want.at(g)) <= 1e-12);
  }
}

TEST_CASE("band_convolve_all shares one transform but changes nothing") {
  GridSpec s({6}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 0, 5, "smooth-bump");
  GridFunction f = random_function(s, 29, {2});
  auto all = band_convolve_all(f, bank);
  REQUIRE(static_cast<int>(all.size()) == bank.scales());
  for (int k = bank.kmin; k <= bank.kmax; ++k) {
    GridFunction one = band_convolve(f, bank, k);
    const GridFunction& many = all[static_cast<std::size_t>(k - bank.kmin)];
    for (std::size_t i = 0; i < one.values().size(); ++i)
      CHECK(std::abs(one.values()[i] - many.values()[i]) <= 1e-13);
  }
}

TEST_CASE("reproduction: bands sum back to the mean-zero input") {
  GridSpec s({6}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 0, 5, "smooth-bump");
  GridFunction f = random_function(s, 41);
  // Remove the DC bin.
  cplx mean = 0.0;
  for (auto& v : f.values()) mean += v;
  mean /= static_cast<double>(f.gcount());
  for (auto& v : f.values()) v -= mean;

  GridFunction sum(s);
  for (const auto& piece : band_convolve_all(f, bank))
    for (std::size_t i = 0; i < sum.values().size(); ++i)
      sum.values()[i] += piece.values()[i];
  double sup = 0.0, err = 0.0;
  for (std::size_t i = 0; i < sum.values().size(); ++i) {
    sup = std::max(sup, std::abs(f.values()[i]));
    err = std::max(err, std::abs(sum.values()[i] - f.values()[i]));
  }
  CHECK(err <= 1e-12 * sup);
}

TEST_CASE("tensor bank: factor layout and scale tuples") {
  GridSpec s({4, 3, 3}, {1, 2});
  TensorFilterBank tb = build_tensor_filterbank(s, {1, 2}, "smooth-bump");
  REQUIRE(tb.parameters() == 2);
  CHECK(tb.factors[0].axis_begin == 0);
  CHECK(tb.factors[0].axis_end == 1);
  CHECK(tb.factors[1].axis_begin == 1);
  CHECK(tb.factors[1].axis_end == 3);

  auto tuples = scale_tuples(tb);
  CHECK(tuples.size() == static_cast<std::size_t>(tb.factors[0].scales()) *
                             static_cast<std::size_t>(tb.factors[1].scales()));
  // Odometer order: the last factor moves fastest.
  CHECK(tuples[0][0] == tb.factors[0].kmin);
  CHECK(tuples[0][1] == tb.factors[1].kmin);
  CHECK(tuples[1][0] == tb.factors[0].kmin);
  CHECK(tuples[1][1] == tb.factors[1].kmin + 1);

  CHECK_THROWS(build_tensor_filterbank(s, {1, 1}, "smooth-bump"));  // axes uncovered
}

TEST_CASE("tensor band_convolve composes the per-factor convolutions") {
  GridSpec s({3, 3}, {1, 1});
  TensorFilterBank tb = build_tensor_filterbank(s, {1, 1}, "smooth-bump");
  GridFunction f = random_function(s, 57);
  std::vector<int> ks{tb.factors[0].kmin + 1, tb.factors[1].kmin};
  GridFunction got = band_convolve(f, tb, ks);
  GridFunction want = band_convolve(band_convolve(f, tb.factors[0], ks[0]),
                                    tb.factors[1], ks[1]);
  for (std::size_t i = 0; i < got.values().size(); ++i)
    CHECK(std::abs(got.values()[i] - want.values()[i]) <= 1e-12);
}

TEST_CASE("filter_derivative matches a finite difference of the profile") {
  GridSpec s({7}, {1});
  FilterBank bank = build_filterbank(s, 0, 1, 2, 5, "smooth-bump");
  // Interior scale: psi_k(r) = ramp(r/2^{k-1}) - ramp(r/2^k).
  auto interior = [&](int k, double r) {
    return ramp(r / std::pow(2.0, k - 1)) - ramp(r / std::pow(2.0, k));
  };
  int k = 3;
  double h = 1e-6;
  for (double xi : {5.0, 6.5, 9.0, 13.0}) {
    double fd = (interior(k, xi + h) - interior(k, xi - h)) / (2.0 * h);
    CHECK(std::fabs(filter_derivative(bank, k, 1, xi) - fd) <= 1e-7);
  }
  CHECK_THROWS(filter_derivative(bank, k, 0, 5.0));
  CHECK(std::isfinite(filter_derivative_log_const(bank, 1)));
  CHECK(std::isfinite(bank.log_decay_const));
}

TEST_CASE("haar family is orthonormal, mean zero, supported on its cube") {
  GridSpec s({4}, {1});
  Collection tree(1);
  for (int k = 0; k <= 2; ++k)
    for (std::uint32_t p = 0; p < (1u << k); ++p) tree.insert(DyadicCube(1, k, {p}));
  LacunaryFamily fam = build_lacunary_family(s, tree, "haar", 2.0);
  REQUIRE(fam.values.size() == tree.size());
  CHECK(fam.below_resolution.empty());

  double cell = s.cell_measure();
  for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
    const auto& phi_i = fam.values[i];
    double mean = 0.0;
    for (double v : phi_i) mean += v * cell;
    CHECK(std::fabs(mean) <= 1e-14);

    for (std::size_t g = 0; g < phi_i.size(); ++g)
      if (phi_i[g] != 0.0)
        CHECK(fam.cubes.cubes[i].contains_point(grid_point(s, g)));

    for (std::size_t j = 0; j < tree.size(); ++j) {
      double ip = 0.0;
      for (std::size_t g = 0; g < phi_i.size(); ++g)
        ip += phi_i[g] * fam.values[j][g] * cell;
      CHECK(std::fabs(ip - (i == j ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("lacunary families are L^p normalized") {
  GridSpec s({6}, {1});
  Collection tree(1, {DyadicCube(1, 1, {0}), DyadicCube(1, 3, {5})});
  for (const char* kind : {"haar", "smooth-wavelet"}) {
    for (double p : {1.0, 2.0, 3.0}) {
      LacunaryFamily fam = build_lacunary_family(s, tree, kind, p);
      for (const auto& phi : fam.values) {
        RealField f(s);
        f.values() = phi;
        CHECK(oracle::rel_diff(lp_norm(f, p), 1.0) <= 1e-12);
        double mean = 0.0;
        for (double v : phi) mean += v * s.cell_measure();
        CHECK(std::fabs(mean) <= 1e-12);
      }
    }
  }
  CHECK_THROWS(build_lacunary_family(s, tree, "spline", 2.0));
}

TEST_CASE("cubes below resolution are reported, not built") {
  GridSpec s({3}, {1});
  Collection tree(1, {DyadicCube(1, 1, {1}), DyadicCube(1, 3, {0})});
  LacunaryFamily fam = build_lacunary_family(s, tree, "haar", 2.0);
  CHECK(fam.values.size() == 1);
  REQUIRE(fam.below_resolution.size() == 1);
  CHECK(fam.below_resolution[0] == DyadicCube(1, 3, {0}));
  CHECK(fam.index_of(DyadicCube(1, 1, {1})) == 0);
  CHECK(fam.index_of(DyadicCube(1, 3, {0})) == -1);
  CHECK_THROWS(fam.phi(DyadicCube(1, 3, {0})));
}

TEST_CASE("smooth family measures derivative constants in one dimension") {
  GridSpec s({6}, {1});
  Collection tree(1, {DyadicCube(1, 2, {1})});
  LacunaryFamily fam = build_lacunary_family(s, tree, "smooth-wavelet", 2.0);
  CHECK(fam.alpha_max == 10);
  CHECK(fam.log_decay_consts.size() == 11);
  for (double c : fam.log_decay_consts) CHECK(std::isfinite(c));

  GridSpec s2({3, 3}, {2});
  Collection tree2(2, {DyadicCube(2, 1, {0, 1})});
  LacunaryFamily fam2 = build_lacunary_family(s2, tree2, "smooth-wavelet", 2.0);
  CHECK(fam2.alpha_max == 0);
}

TEST_CASE("spatial_split reassembles the bump and windows exactly") {
  GridSpec s({7}, {1});
  Collection tree(1, {DyadicCube(1, 3, {2})});
  LacunaryFamily fam = build_lacunary_family(s, tree, "smooth-wavelet", 2.0);
  DyadicCube c = tree.cubes[0];
  double M = 3.0;
  int lmax = 3;
  SpatialSplit sp = spatial_split(fam, c, M, lmax);
  REQUIRE(sp.pieces.size() == static_cast<std::size_t>(lmax) + 1);

  const auto& phi = fam.phi(c);
  for (std::size_t g = 0; g < phi.size(); ++g) {
    double recon = 0.0;
    for (int l = 0; l <= lmax; ++l)
      recon += std::pow(2.0, -M * l) * sp.pieces[static_cast<std::size_t>(l)][g];
    if (in_dilate(s, c, lmax, grid_point(s, g))) {
      CHECK(std::fabs(recon - phi[g]) <= 1e-12);
    } else {
      CHECK(recon == 0.0);
      CHECK(std::fabs(phi[g]) <= sp.tail_sup + 1e-15);
    }
    // Piece l lives inside the dilate 2^l I.
    for (int l = 0; l <= lmax; ++l)
      if (sp.pieces[static_cast<std::size_t>(l)][g] != 0.0)
        CHECK(in_dilate(s, c, l, grid_point(s, g)));
  }
}

TEST_CASE("in_dilate at l = 0 is closure membership") {
  GridSpec s({5}, {1});
  DyadicCube c(1, 2, {1});
  for (std::size_t g = 0; g < s.points(); ++g) {
    auto x = grid_point(s, g);
    CHECK(in_dilate(s, c, 0, x) == (dist_to_cube(x, c) == 0.0));
  }
}
