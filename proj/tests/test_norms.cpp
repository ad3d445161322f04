#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "lplab/norms.hpp"
#include "oracles.hpp"

using namespace lplab;

namespace {

RealField random_field(const GridSpec& s, const std::vector<std::size_t>& vshape,
                       std::uint64_t seed) {
  RealField f(s, vshape);
  oracle::Rng rng(seed);
  for (auto& v : f.values()) v = rng.centered() * 3.0;
  return f;
}

}  // namespace

TEST_CASE("pairwise_sum agrees with a running sum") {
  oracle::Rng rng(3);
  std::vector<double> x(1000);
  double run = 0.0;
  for (auto& v : x) {
    v = rng.centered();
    run += v;
  }
  CHECK(std::fabs(pairwise_sum(x) - run) <= 1e-12);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{4.0}) == 4.0);
}

TEST_CASE("mixed_norm matches the nested-sum oracle") {
  struct Case {
    GridSpec spec;
    std::vector<std::size_t> vshape;
    std::vector<double> p;
    std::vector<double> q;
  };
  std::vector<Case> cases = {
      {GridSpec({4}, {1}), {}, {2.0}, {}},
      {GridSpec({4}, {1}), {}, {0.5}, {}},
      {GridSpec({3, 3}, {2}), {}, {3.0, 3.0}, {}},
      {GridSpec({3, 3}, {1, 1}), {}, {1.0, 2.0}, {}},
      {GridSpec({3, 3}, {1, 1}), {}, {0.5, 3.0}, {}},
      {GridSpec({2, 2, 2}, {1, 2}), {2}, {2.0, 0.7, 0.7}, {1.5}},
      {GridSpec({3, 3}, {2}), {2, 3}, {1.0, 1.0}, {0.7, 2.0}},
      {GridSpec({2, 3}, {1, 1}), {4}, {3.0, 0.5}, {0.7}},
  };
  std::uint64_t seed = 100;
  for (const auto& cs : cases) {
    for (int rep = 0; rep < 4; ++rep) {
      RealField f = random_field(cs.spec, cs.vshape, ++seed);
      MixedNormSpec ns(cs.p, cs.q);
      double got = mixed_norm(f, ns);
      double want = oracle::nested_norm(f, ns);
      CHECK(oracle::rel_diff(got, want) <= 1e-12);
    }
  }
}

TEST_CASE("mixed_norm of a complex function uses the modulus") {
  GridSpec s({3, 3}, {1, 1});
  GridFunction f(s, {2});
  oracle::Rng rng(55);
  for (auto& v : f.values()) v = {rng.centered(), rng.centered()};
  MixedNormSpec ns({1.5, 0.5}, {2.0});
  CHECK(oracle::rel_diff(mixed_norm(f, ns), oracle::nested_norm(f, ns)) <= 1e-12);
}

TEST_CASE("mixed_norm_weighted matches the oracle and w == 1 is unweighted") {
  GridSpec s({3, 3}, {1, 1});
  RealField f = random_field(s, {2}, 7);
  RealField w(s);
  oracle::Rng rng(8);
  for (auto& v : w.values()) v = 0.1 + rng.uniform();
  MixedNormSpec ns({2.0, 0.5}, {1.0});

  CHECK(oracle::rel_diff(mixed_norm_weighted(f, ns, w),
                         oracle::nested_norm(f, ns, &w)) <= 1e-12);

  RealField ones(s);
  for (auto& v : ones.values()) v = 1.0;
  CHECK(oracle::rel_diff(mixed_norm_weighted(f, ns, ones), mixed_norm(f, ns)) <=
        1e-13);
}

TEST_CASE("mixed_norm is homogeneous and lebesgue-consistent") {
  GridSpec s({3, 3}, {2});
  RealField f = random_field(s, {}, 21);
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    MixedNormSpec ns = MixedNormSpec::lebesgue(p, 2);
    CHECK(oracle::rel_diff(mixed_norm(f, ns), lp_norm(f, p)) <= 1e-13);

    RealField g = f;
    for (auto& v : g.values()) v *= -2.5;
    CHECK(oracle::rel_diff(mixed_norm(g, ns), 2.5 * mixed_norm(f, ns)) <= 1e-12);
  }
}

TEST_CASE("mixed_norm is monotone in the integrand") {
  GridSpec s({3, 3}, {1, 1});
  RealField f = random_field(s, {}, 31);
  RealField g = f;
  oracle::Rng rng(32);
  for (auto& v : g.values()) v = std::fabs(v) + rng.uniform();
  MixedNormSpec ns({0.5, 2.0});
  CHECK(mixed_norm(f, ns) <= mixed_norm(g, ns) * (1.0 + 1e-12));
}

TEST_CASE("norm spec validation") {
  GridSpec s({3, 3}, {2});
  RealField f(s);
  CHECK_THROWS(mixed_norm(f, MixedNormSpec({2.0})));            // wrong arity
  CHECK_THROWS(mixed_norm(f, MixedNormSpec({2.0, 1.0})));       // nonconstant block
  CHECK_THROWS(mixed_norm(f, MixedNormSpec({2.0, 2.0}, {2.0})));  // q without vshape
  CHECK_THROWS(mixed_norm(f, MixedNormSpec({0.0, 0.0})));
  double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS(mixed_norm(f, MixedNormSpec({inf, inf})));

  GridSpec s2({3, 3}, {2});
  RealField w(GridSpec({2, 2}, {2}));
  CHECK_THROWS(mixed_norm_weighted(f, MixedNormSpec({2.0, 2.0}), w));
}

TEST_CASE("weak quasinorm of an indicator is exact") {
  GridSpec s({4}, {1});
  for (double p : {0.5, 1.0, 2.0}) {
    RealField f(s);
    for (std::size_t g = 0; g < 4; ++g) f.at(g) = 3.0;  // measure 1/4
    CHECK(oracle::rel_diff(weak_quasinorm(f, p), 3.0 * std::pow(0.25, 1.0 / p)) <=
          1e-14);

    // Two-level field: the sup is attained at one of the two levels.
    RealField h(s);
    for (std::size_t g = 0; g < 4; ++g) h.at(g) = 2.0;   // measure 1/4 at 2
    for (std::size_t g = 4; g < 12; ++g) h.at(g) = 1.0;  // measure 3/4 at >= 1
    double want = std::max(2.0 * std::pow(0.25, 1.0 / p),
                           1.0 * std::pow(0.75, 1.0 / p));
    CHECK(oracle::rel_diff(weak_quasinorm(h, p), want) <= 1e-14);

    // Chebyshev: weak norm never exceeds the strong norm.
    RealField r = random_field(s, {}, 40 + static_cast<std::uint64_t>(p * 10));
    CHECK(weak_quasinorm(r, p) <= lp_norm(r, p) * (1.0 + 1e-12));
  }
  CHECK(weak_quasinorm(RealField(s), 1.0) == 0.0);
}

TEST_CASE("pointwise q-norm collapse") {
  GridSpec s({2}, {1});
  RealField f(s, {2});
  f.at(0, 0) = 3.0;
  f.at(0, 1) = -4.0;
  f.at(1, 0) = 1.0;
  f.at(1, 1) = 1.0;
  RealField g = pointwise_q_norm(f, {2.0});
  CHECK(g.vcount() == 1);
  CHECK(g.at(0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(g.at(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS(pointwise_q_norm(f, {2.0, 2.0}));

  // Nested collapse q = (1, 2): rows of shape {2,2}.
  RealField h(s, {2, 2});
  for (std::size_t v = 0; v < 4; ++v) h.at(0, v) = static_cast<double>(v + 1);
  RealField hc = pointwise_q_norm(h, {1.0, 2.0});
  // inner l2 over pairs (1,2) and (3,4), then l1.
  double want = std::sqrt(5.0) + 5.0;
  CHECK(hc.at(0) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("sup norm") {
  GridSpec s({3}, {1});
  RealField f(s);
  f.at(2) = -7.5;
  f.at(5) = 7.0;
  CHECK(sup_norm(f) == 7.5);

  GridFunction g(s);
  g.at(1) = {3.0, 4.0};
  CHECK(sup_norm(g) == doctest::Approx(5.0).epsilon(1e-15));
}
