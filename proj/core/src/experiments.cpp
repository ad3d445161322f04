#include "lplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "lplab/decompose.hpp"
#include "lplab/filters.hpp"
#include "lplab/io.hpp"
#include "lplab/norms.hpp"
#include "lplab/sizes.hpp"
#include "lplab/sparse.hpp"
#include "lplab/square.hpp"
#include "lplab/stopping.hpp"
#include "lplab/weights.hpp"

namespace lplab {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_doubles(const std::vector<double>& v, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

std::string res_str(const GridSpec& spec) {
  std::string out;
  for (std::size_t i = 0; i < spec.logres.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(std::size_t{1} << spec.logres[i]);
  }
  return out;
}

GridSpec spec_of(const ExperimentConfig& cfg) {
  std::vector<int> grouping = cfg.grouping;
  if (grouping.empty())
    grouping.assign(cfg.logres.size(), 1);
  return GridSpec(cfg.logres, grouping);
}

std::vector<int> factors_of(const ExperimentConfig& cfg, const GridSpec& spec) {
  if (!cfg.factor_dims.empty()) return cfg.factor_dims;
  return std::vector<int>(static_cast<std::size_t>(spec.dim()), 1);
}

// Expand per-block exponents to the per-axis vector mixed_norm expects.
std::vector<double> expand_blocks(const std::vector<double>& p,
                                  const GridSpec& spec) {
  if (p.size() == static_cast<std::size_t>(spec.dim())) return p;
  if (p.size() != spec.grouping.size())
    throw std::invalid_argument(
        "norm exponent count matches neither axes nor grouping blocks");
  std::vector<double> out;
  for (std::size_t m = 0; m < spec.grouping.size(); ++m)
    out.insert(out.end(), static_cast<std::size_t>(spec.grouping[m]), p[m]);
  return out;
}

MixedNormSpec norm_spec_of(const NormChoice& nc, const GridSpec& spec) {
  return MixedNormSpec(expand_blocks(nc.p, spec), nc.q);
}

std::vector<double> effective_qvec(const std::vector<std::size_t>& vshape,
                                   const std::vector<double>& qvec) {
  if (!qvec.empty() || vshape.empty()) return qvec;
  return std::vector<double>(vshape.size(), 2.0);
}

RealField abs_field(const GridFunction& f) {
  RealField out(f.spec(), f.vshape());
  for (std::size_t i = 0; i < f.values().size(); ++i)
    out.values()[i] = std::abs(f.values()[i]);
  return out;
}

// |f| collapsed to a scalar field through the pointwise Q-norm.
RealField collapse_abs(const GridFunction& f, const std::vector<double>& qvec) {
  return pointwise_q_norm(abs_field(f), effective_qvec(f.vshape(), qvec));
}

RealField collapse_real(const RealField& f, const std::vector<double>& qvec) {
  return pointwise_q_norm(f, effective_qvec(f.vshape(), qvec));
}

RealField masked(const RealField& f, const RealField& mask) {
  RealField out = f;
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] *= mask.values()[i];
  return out;
}

Collection full_tree(int dim, int max_scale) {
  std::vector<DyadicCube> cubes;
  for (int s = 0; s <= max_scale; ++s) {
    std::vector<std::uint32_t> pos(static_cast<std::size_t>(dim), 0);
    std::uint32_t side = std::uint32_t{1} << s;
    while (true) {
      cubes.emplace_back(dim, s, pos);
      int j = dim - 1;
      while (j >= 0) {
        if (++pos[static_cast<std::size_t>(j)] < side) break;
        pos[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }
  return Collection(dim, std::move(cubes), 0);
}

// Indicator of density 4^{-m}: cells whose coordinate along axis j is
// divisible by 2^{e_j}, with the 2m halving steps dealt round-robin.
RealField stripe_set(const GridSpec& spec, int m) {
  std::vector<int> e(static_cast<std::size_t>(spec.dim()), 0);
  for (int i = 0; i < 2 * m; ++i) ++e[static_cast<std::size_t>(i % spec.dim())];
  for (int j = 0; j < spec.dim(); ++j)
    if (e[static_cast<std::size_t>(j)] > spec.logres[static_cast<std::size_t>(j)])
      throw std::invalid_argument("density stripe finer than the grid");
  RealField out(spec);
  for (std::size_t g = 0; g < out.gcount(); ++g) {
    std::vector<std::size_t> coords = grid_coords(spec, g);
    bool in = true;
    for (int j = 0; j < spec.dim(); ++j) {
      std::size_t stride = std::size_t{1} << e[static_cast<std::size_t>(j)];
      if (coords[static_cast<std::size_t>(j)] % stride != 0) in = false;
    }
    out.values()[g] = in ? 1.0 : 0.0;
  }
  return out;
}

int density_index(double density) {
  // densities are 4^{-m}; recover m
  double m = -std::log2(density) / 2.0;
  int mi = static_cast<int>(std::lround(m));
  if (std::abs(m - mi) > 1e-9 || mi < 0)
    throw std::invalid_argument("density must be a power of 1/4");
  return mi;
}

struct RatioTracker {
  double max_ratio = 0.0;
  double feed(double lhs, double rhs) {
    double r;
    if (rhs > 0.0)
      r = lhs / rhs;
    else
      r = lhs > 0.0 ? kInf : 0.0;
    if (r > max_ratio) max_ratio = r;
    return r;
  }
};

double growth_of(double base, double refined) {
  if (base == 0.0) return refined == 0.0 ? 0.0 : kInf;
  return (refined - base) / base;
}

bool stable_of(double base, double refined) {
  if (base == 0.0) return refined == 0.0;
  return refined <= 1.1 * base * (1.0 + 1e-12);
}

LacunaryFamily build_family(const GridSpec& spec, const Collection& tree,
                            const std::string& kind, double decay) {
  return build_lacunary_family(spec, tree, kind, 2.0, decay);
}

// --- configuration -------------------------------------------------------

const std::vector<NormChoice>& subbanach_sweep() {
  static const std::vector<NormChoice> sweep = {
      {{2.0, 2.0}, {}},  {{1.0, 2.0}, {}},  {{0.5, 2.0}, {}},
      {{2.0, 0.75}, {}}, {{1.0, 1.0}, {}},  {{0.5, 0.5}, {}},
  };
  return sweep;
}

}  // namespace

ExperimentConfig default_config(const std::string& kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.corpus = recipe_by_name("mix");
  if (kind == "main") {
    cfg.logres = {8, 8};
    cfg.norms = subbanach_sweep();
    cfg.corpus.count = 8;
  } else if (kind == "discrete") {
    cfg.logres = {12};
    cfg.corpus.count = 6;
  } else if (kind == "localization") {
    cfg.logres = {10};
    cfg.corpus.count = 4;
    cfg.p_list = {0.5, 1.0};
    cfg.refine = false;
  } else if (kind == "sparse") {
    cfg.logres = {10};
    cfg.corpus.count = 4;
  } else if (kind == "weighted") {
    cfg.logres = {7, 7};
    cfg.corpus.count = 4;
    cfg.corpus.band_cap = 16;
  } else if (kind == "kurtz-product") {
    cfg.logres = {7, 7};
    cfg.corpus.count = 4;
    cfg.corpus.band_cap = 16;
    cfg.norms = subbanach_sweep();
    cfg.weight_axis_a = {0.25, 0.25};
  } else {
    throw std::invalid_argument("unknown experiment kind: " + kind);
  }
  return cfg;
}

namespace {

std::vector<double> get_doubles(const json& j) {
  return j.get<std::vector<double>>();
}

void apply_corpus(CorpusRecipe& r, const json& j) {
  static const char* keys[] = {"name", "count", "vshape", "band_cap", "terms",
                               "real"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw std::invalid_argument("unknown corpus key: " + it.key());
  }
  if (j.contains("name")) r.name = j.at("name").get<std::string>();
  if (j.contains("count")) r.count = j.at("count").get<int>();
  if (j.contains("vshape"))
    r.vshape = j.at("vshape").get<std::vector<std::size_t>>();
  if (j.contains("band_cap")) r.band_cap = j.at("band_cap").get<int>();
  if (j.contains("terms")) r.terms = j.at("terms").get<int>();
  if (j.contains("real")) r.real = j.at("real").get<bool>();
}

std::vector<NormChoice> parse_norms(const json& j) {
  std::vector<NormChoice> out;
  for (const json& item : j) {
    NormChoice nc;
    for (auto it = item.begin(); it != item.end(); ++it)
      if (it.key() != "p" && it.key() != "q")
        throw std::invalid_argument("unknown norm key: " + it.key());
    nc.p = get_doubles(item.at("p"));
    if (item.contains("q")) nc.q = get_doubles(item.at("q"));
    out.push_back(std::move(nc));
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  std::string kind = j.value("kind", std::string("main"));
  ExperimentConfig cfg = default_config(kind);
  static const char* keys[] = {
      "kind",      "logres",   "grouping",  "factor_dims",
      "profile",   "corpus",   "norms",     "p_list",
      "qvec",      "family_kind", "family_kind2", "decay",
      "tree_scale", "eps",     "eps_p",     "densities",
      "p1",        "c0",       "budget",    "localization_scale",
      "weight_kind", "weight_a", "weight_axis_a", "a_list",
      "refine"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw std::invalid_argument("unknown config key: " + it.key());
  }
  if (j.contains("logres")) cfg.logres = j.at("logres").get<std::vector<int>>();
  if (j.contains("grouping"))
    cfg.grouping = j.at("grouping").get<std::vector<int>>();
  if (j.contains("factor_dims"))
    cfg.factor_dims = j.at("factor_dims").get<std::vector<int>>();
  if (j.contains("profile")) cfg.profile = j.at("profile").get<std::string>();
  if (j.contains("corpus")) apply_corpus(cfg.corpus, j.at("corpus"));
  if (j.contains("norms")) cfg.norms = parse_norms(j.at("norms"));
  if (j.contains("p_list")) cfg.p_list = get_doubles(j.at("p_list"));
  if (j.contains("qvec")) cfg.qvec = get_doubles(j.at("qvec"));
  if (j.contains("family_kind"))
    cfg.family_kind = j.at("family_kind").get<std::string>();
  if (j.contains("family_kind2"))
    cfg.family_kind2 = j.at("family_kind2").get<std::string>();
  if (j.contains("decay")) cfg.decay = j.at("decay").get<double>();
  if (j.contains("tree_scale")) cfg.tree_scale = j.at("tree_scale").get<int>();
  if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
  if (j.contains("eps_p")) cfg.eps_p = j.at("eps_p").get<double>();
  if (j.contains("densities")) cfg.densities = get_doubles(j.at("densities"));
  if (j.contains("p1")) cfg.p1 = j.at("p1").get<double>();
  if (j.contains("c0")) cfg.c0 = j.at("c0").get<double>();
  if (j.contains("budget")) cfg.budget = j.at("budget").get<double>();
  if (j.contains("localization_scale"))
    cfg.localization_scale = j.at("localization_scale").get<int>();
  if (j.contains("weight_kind"))
    cfg.weight_kind = j.at("weight_kind").get<std::string>();
  if (j.contains("weight_a")) cfg.weight_a = j.at("weight_a").get<double>();
  if (j.contains("weight_axis_a"))
    cfg.weight_axis_a = get_doubles(j.at("weight_axis_a"));
  if (j.contains("a_list")) cfg.a_list = get_doubles(j.at("a_list"));
  if (j.contains("refine")) cfg.refine = j.at("refine").get<bool>();
  return cfg;
}

namespace {

std::string jarr_d(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string jarr_i(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

std::string jarr_z(const std::vector<std::size_t>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  std::string out = "{";
  out += "\"kind\":\"" + json_escape(cfg.kind) + "\"";
  out += ",\"logres\":" + jarr_i(cfg.logres);
  out += ",\"grouping\":" + jarr_i(cfg.grouping);
  out += ",\"factor_dims\":" + jarr_i(cfg.factor_dims);
  out += ",\"profile\":\"" + json_escape(cfg.profile) + "\"";
  out += ",\"corpus\":{\"name\":\"" + json_escape(cfg.corpus.name) + "\"";
  out += ",\"count\":" + std::to_string(cfg.corpus.count);
  out += ",\"vshape\":" + jarr_z(cfg.corpus.vshape);
  out += ",\"band_cap\":" + std::to_string(cfg.corpus.band_cap);
  out += ",\"terms\":" + std::to_string(cfg.corpus.terms);
  out += std::string(",\"real\":") + (cfg.corpus.real ? "true" : "false") + "}";
  out += ",\"norms\":[";
  for (std::size_t i = 0; i < cfg.norms.size(); ++i) {
    if (i) out += ",";
    out += "{\"p\":" + jarr_d(cfg.norms[i].p) + ",\"q\":" +
           jarr_d(cfg.norms[i].q) + "}";
  }
  out += "]";
  out += ",\"p_list\":" + jarr_d(cfg.p_list);
  out += ",\"qvec\":" + jarr_d(cfg.qvec);
  out += ",\"family_kind\":\"" + json_escape(cfg.family_kind) + "\"";
  out += ",\"family_kind2\":\"" + json_escape(cfg.family_kind2) + "\"";
  out += ",\"decay\":" + format_double(cfg.decay);
  out += ",\"tree_scale\":" + std::to_string(cfg.tree_scale);
  out += ",\"eps\":" + format_double(cfg.eps);
  out += ",\"eps_p\":" + format_double(cfg.eps_p);
  out += ",\"densities\":" + jarr_d(cfg.densities);
  out += ",\"p1\":" + format_double(cfg.p1);
  out += ",\"c0\":" + format_double(cfg.c0);
  out += ",\"budget\":" + format_double(cfg.budget);
  out += ",\"localization_scale\":" + std::to_string(cfg.localization_scale);
  out += ",\"weight_kind\":\"" + json_escape(cfg.weight_kind) + "\"";
  out += ",\"weight_a\":" + format_double(cfg.weight_a);
  out += ",\"weight_axis_a\":" + jarr_d(cfg.weight_axis_a);
  out += ",\"a_list\":" + jarr_d(cfg.a_list);
  out += std::string(",\"refine\":") + (cfg.refine ? "true" : "false");
  out += "}";
  return out;
}

// --- invariant battery ----------------------------------------------------

namespace {

void expect(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

void fill_random(RealField& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (double& v : f.values())
    v = static_cast<double>(rng() >> 11) * 0x1p-53;
}

void check_partition_of_unity() {
  for (const char* profile : {"smooth-bump", "sharp-annulus"}) {
    GridSpec spec({6}, {1});
    TensorFilterBank tb = build_tensor_filterbank(spec, {1}, profile);
    const FilterBank& bank = tb.factors.front();
    for (std::size_t fidx = 0; fidx < bank.fshape[0]; ++fidx) {
      double sum = 0.0;
      for (int k = bank.kmin; k <= bank.kmax; ++k)
        sum += bank.prof[static_cast<std::size_t>(k - bank.kmin)][fidx];
      double want = fidx == 0 ? 0.0 : 1.0;
      expect(std::abs(sum - want) <= 1e-12,
             std::string(profile) + " profiles do not telescope to one");
    }
  }
}

void check_reproduction() {
  GridSpec spec({6}, {1});
  CorpusRecipe r = recipe_by_name("bumps");
  r.count = 1;
  r.band_cap = 8;
  GridFunction f = generate_corpus(spec, r, 7)[0];
  TensorFilterBank tb = build_tensor_filterbank(spec, {1}, "smooth-bump");
  std::vector<GridFunction> parts = band_convolve_all(f, tb.factors.front());
  GridFunction sum(spec);
  for (const GridFunction& g : parts)
    for (std::size_t i = 0; i < sum.values().size(); ++i)
      sum.values()[i] += g.values()[i];
  double dev = 0.0;
  for (std::size_t i = 0; i < sum.values().size(); ++i)
    dev = std::max(dev, std::abs(sum.values()[i] - f.values()[i]));
  expect(dev <= 1e-10 * std::max(1.0, sup_norm(f)),
         "band sum does not reproduce a mean-zero function");
}

void check_norm_consistency() {
  GridSpec spec({3, 3}, {1, 1});
  RealField f(spec);
  fill_random(f, 11);
  for (double p : {0.5, 1.0, 2.0}) {
    double a = mixed_norm(f, MixedNormSpec::lebesgue(p, 2));
    double b = lp_norm(f, p);
    expect(std::abs(a - b) <= 1e-12 * std::max(a, b),
           "iterated norm disagrees with the flat norm at p=" +
               format_double(p));
  }
  double one = lp_norm(f, 1.0);
  RealField g = f;
  for (double& v : g.values()) v *= 2.0;
  expect(std::abs(lp_norm(g, 1.0) - 2.0 * one) <= 1e-12 * one,
         "norm is not homogeneous");
}

void check_single_band() {
  GridSpec spec({6}, {1});
  CorpusRecipe r = recipe_by_name("single-band");
  r.count = 1;
  r.band_cap = 8;
  GridFunction f = generate_corpus(spec, r, 3)[0];
  TensorFilterBank tb = build_tensor_filterbank(spec, {1}, "smooth-bump");
  SquareFunctionResult s = square_function(f, tb.factors.front());
  double dev = 0.0;
  for (std::size_t i = 0; i < s.field.values().size(); ++i)
    dev = std::max(dev,
                   std::abs(s.field.values()[i] - std::abs(f.values()[i])));
  expect(dev <= 1e-10 * std::max(1.0, sup_norm(f)),
         "square function of a single band is not |f|");
}

void check_discrete_hand() {
  GridSpec spec({3}, {1});
  CoefficientMap coeffs;
  coeffs.set(DyadicCube(1, 1, {0u}), {cplx(1.0, 0.0)});
  coeffs.set(DyadicCube(1, 2, {0u}), {cplx(1.0, 0.0)});
  coeffs.set(DyadicCube(1, 1, {1u}), {cplx(2.0, 0.0)});
  Collection c(1, {DyadicCube(1, 1, {0u}), DyadicCube(1, 2, {0u}),
                   DyadicCube(1, 1, {1u})});
  SquareFunctionResult s = discrete_square_function(spec, coeffs, c);
  for (std::size_t g = 0; g < 8; ++g) {
    double want = g < 2 ? std::sqrt(6.0) : (g < 4 ? std::sqrt(2.0) : std::sqrt(8.0));
    expect(s.field.values()[g] == want,
           "hand-checked discrete square function value is off");
  }
}

void check_maximal_cover() {
  GridSpec spec({3}, {1});
  RealField ind(spec);
  for (std::size_t g : {0u, 1u, 2u, 3u, 6u}) ind.values()[g] = 1.0;
  CoverResult cover = maximal_cover(ind);
  expect(cover.residual.empty(), "cover left residual cells");
  expect(cover.cubes.size() == 2, "cover cube count is off");
  expect(cover.cubes[0] == DyadicCube(1, 1, {0u}) &&
             cover.cubes[1] == DyadicCube(1, 3, {6u}),
         "cover cubes are not the maximal ones");
}

void check_size_full_torus() {
  GridSpec spec({4}, {1});
  RealField ones(spec);
  for (double& v : ones.values()) v = 1.0;
  SizeReport sr = size_indicator(ones, full_tree(1, 2));
  expect(sr.value == 1.0, "size of the full torus is not exactly one");
}

void check_exceptional_sets() {
  GridSpec spec({5}, {1});
  CorpusRecipe r = recipe_by_name("bumps");
  r.count = 1;
  r.band_cap = 4;
  GridFunction f = generate_corpus(spec, r, 5)[0];
  RealField sf = collapse_abs(f, {});
  ExceptionalSets ex = build_exceptional_sets(sf, 2.0);
  for (std::size_t k = 0; k < ex.level_measure.size(); ++k)
    expect(ex.level_measure[k] <= ex.level_bound[k] * (1.0 + 1e-12),
           "Chebyshev bound violated at level " + std::to_string(k));
  expect(ex.omega_measure < ex.budget, "exceptional union exceeds the budget");
}

void check_sparse_single_cube() {
  GridSpec spec({4}, {1});
  CoefficientMap coeffs;
  coeffs.set(root_cube(1), {cplx(1.0, 0.0)});
  Collection c(1, {root_cube(1)});
  Weight w = make_power_weight(spec, 0.0);
  SparseFamily fam = sparse_construct(spec, coeffs, c, w, 1.0);
  expect(fam.nodes.size() == 1, "single-cube family has extra nodes");
  expect(fam.nodes[0].cover.empty(), "constant data produced a bad set");
  expect(fam.nodes[0].e_measure == 1.0, "E set of the root is not everything");
  expect(fam.verified, "family verification did not run");
}

void check_unit_ap() {
  GridSpec spec({4, 4}, {1, 1});
  Weight w = make_power_weight(spec, 0.0);
  for (double p : {1.0, 2.0})
    for (const char* win : {"cube", "rect"}) {
      ApReport rep = ap_characteristic(w, p, win);
      expect(rep.value == 1.0,
             "characteristic of the unit weight is not exactly one");
    }
}

void check_haar_roundtrip() {
  GridSpec spec({4}, {1});
  Collection tree = full_tree(1, 2);
  LacunaryFamily fam = build_lacunary_family(spec, tree, "haar", 2.0);
  CoefficientMap coeffs;
  double amp = 1.0;
  for (const DyadicCube& cube : tree.cubes) {
    coeffs.set(cube, {cplx(amp, 0.0)});
    amp = -0.5 * amp + 1.25;
  }
  GridFunction g = synthesize(spec, coeffs, fam);
  CoefficientMap back = analyze(g, fam);
  for (const DyadicCube& cube : tree.cubes) {
    double want = coeffs.get(cube)[0].real();
    double got = back.get(cube)[0].real();
    expect(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)),
           "orthonormal analysis does not invert synthesis");
  }
}

void check_report_stability() {
  Report rep;
  rep.kind = "battery";
  rep.columns = {"a", "b"};
  ReportRecord rec;
  rec.add("a", 0.1);
  rec.add("b", "x,\"y\"");
  rep.records.push_back(rec);
  expect(to_jsonl(rep) == to_jsonl(rep) && to_csv(rep) == to_csv(rep),
         "serialization is not stable");
  expect(to_jsonl(rep) == "{\"a\":0.1,\"b\":\"x,\\\"y\\\"\"}\n",
         "JSON line format drifted");
  expect(to_csv(rep) == "a,b\n0.1,\"x,\"\"y\"\"\"\n", "CSV format drifted");
}

}  // namespace

std::vector<std::string> verify_invariants() {
  static bool done = false;
  static std::vector<std::string> cache;
  if (done) return cache;
  struct Check {
    const char* name;
    void (*fn)();
  };
  const Check checks[] = {
      {"filters:partition-of-unity", check_partition_of_unity},
      {"filters:reproduction", check_reproduction},
      {"norms:lebesgue-consistency", check_norm_consistency},
      {"square:single-band", check_single_band},
      {"square:discrete-hand", check_discrete_hand},
      {"grid:maximal-cover", check_maximal_cover},
      {"sizes:full-torus", check_size_full_torus},
      {"stopping:chebyshev", check_exceptional_sets},
      {"sparse:single-cube", check_sparse_single_cube},
      {"weights:unit-ap", check_unit_ap},
      {"decompose:haar-roundtrip", check_haar_roundtrip},
      {"report:byte-stable", check_report_stability},
  };
  for (const Check& c : checks) {
    try {
      c.fn();
    } catch (const std::exception& e) {
      cache.push_back(std::string(c.name) + ": " + e.what());
    }
  }
  done = true;
  return cache;
}

// --- experiment runners ---------------------------------------------------

namespace {

struct PassOutcome {
  double max_ratio = 0.0;
};

void add_stability(Report& rep, const std::string& label, double base,
                   double refined, bool ran_refined) {
  rep.summary.add("max_" + label, base);
  if (ran_refined) {
    rep.summary.add("max_" + label + "_refined", refined);
    rep.summary.add(label + "_growth", growth_of(base, refined));
    rep.summary.add(label + "_stable", stable_of(base, refined));
  }
}

void run_main(const ExperimentConfig& cfg, std::uint64_t seed, Report& rep) {
  rep.columns = {"res",  "fixture", "P",   "Q",          "lhs",
                 "rhs",  "ratio",   "identity_dev"};
  GridSpec base = spec_of(cfg);
  std::vector<NormChoice> norms =
      cfg.norms.empty() ? subbanach_sweep() : cfg.norms;
  int passes = cfg.refine ? 2 : 1;
  std::vector<double> max_ratio(2, 0.0);
  double max_identity = 0.0;
  for (int pass = 0; pass < passes; ++pass) {
    GridSpec spec = pass ? base.refined() : base;
    std::vector<GridFunction> corpus = generate_corpus(spec, cfg.corpus, seed);
    TensorFilterBank tb =
        build_tensor_filterbank(spec, factors_of(cfg, spec), cfg.profile);
    RatioTracker tracker;
    for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
      const GridFunction& f = corpus[fi];
      SquareFunctionResult s = tensor_square_function(f, tb);
      double identity_dev = 0.0;
      if (tb.parameters() >= 2) {
        // Rebuild the square function by splitting off the last factor:
        // square-sum the partial square functions of each outer band.
        const FilterBank& outer = tb.factors.back();
        std::vector<int> inner_subset;
        for (int m = 0; m + 1 < tb.parameters(); ++m)
          inner_subset.push_back(m);
        RealField acc(spec, f.vshape());
        for (int k = outer.kmin; k <= outer.kmax; ++k) {
          GridFunction fk = band_convolve(f, outer, k);
          SquareFunctionResult part =
              partial_square_function(fk, tb, inner_subset);
          for (std::size_t i = 0; i < acc.values().size(); ++i)
            acc.values()[i] += part.field.values()[i] * part.field.values()[i];
        }
        for (std::size_t i = 0; i < acc.values().size(); ++i) {
          double dev =
              std::abs(std::sqrt(acc.values()[i]) - s.field.values()[i]);
          identity_dev = std::max(identity_dev, dev);
        }
        max_identity = std::max(max_identity, identity_dev);
      }
      for (const NormChoice& nc : norms) {
        MixedNormSpec ns = norm_spec_of(nc, spec);
        double lhs = mixed_norm(f, ns);
        double rhs = mixed_norm(s.field, ns);
        double ratio = tracker.feed(lhs, rhs);
        ReportRecord rec;
        rec.add("res", res_str(spec));
        rec.add("fixture", fi);
        rec.add("P", join_doubles(nc.p));
        rec.add("Q", join_doubles(nc.q));
        rec.add("lhs", lhs);
        rec.add("rhs", rhs);
        rec.add("ratio", ratio);
        rec.add("identity_dev", identity_dev);
        rep.records.push_back(std::move(rec));
      }
    }
    max_ratio[static_cast<std::size_t>(pass)] = tracker.max_ratio;
  }
  add_stability(rep, "ratio", max_ratio[0], max_ratio[1], passes == 2);
  rep.summary.add("max_identity_dev", max_identity);
}

void run_discrete(const ExperimentConfig& cfg, std::uint64_t seed,
                  Report& rep) {
  rep.columns = {"res",  "fixture", "p",        "density", "size",
                 "lhs",  "rhs",     "size_factor", "C",    "exact_full"};
  GridSpec base = spec_of(cfg);
  int passes = cfg.refine ? 2 : 1;
  std::vector<double> max_c(2, 0.0);
  bool all_exact_full = true;
  for (int pass = 0; pass < passes; ++pass) {
    GridSpec spec = pass ? base.refined() : base;
    std::vector<GridFunction> corpus = generate_corpus(spec, cfg.corpus, seed);
    Collection tree = full_tree(spec.dim(), cfg.tree_scale);
    LacunaryFamily fam1 =
        build_family(spec, tree, cfg.family_kind, cfg.decay);
    std::string kind2 =
        cfg.family_kind2.empty() ? cfg.family_kind : cfg.family_kind2;
    LacunaryFamily fam2_storage;
    const LacunaryFamily* fam2 = &fam1;
    if (kind2 != cfg.family_kind) {
      fam2_storage = build_family(spec, tree, kind2, cfg.decay);
      fam2 = &fam2_storage;
    }
    // Density masks and their sizes are fixture independent.
    struct Mask {
      double density;
      RealField set;
      double size;
    };
    std::vector<Mask> masks;
    for (double dens : cfg.densities) {
      Mask m;
      m.density = dens;
      m.set = stripe_set(spec, density_index(dens));
      m.size = size_indicator(m.set, tree, cfg.decay).value;
      masks.push_back(std::move(m));
    }
    RatioTracker tracker;
    for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
      CoefficientMap coeffs = analyze(corpus[fi], fam1);
      GridFunction g = synthesize(spec, coeffs, *fam2);
      RealField gq = collapse_abs(g, cfg.qvec);
      SquareFunctionResult s = discrete_square_function(spec, coeffs, tree);
      RealField sq = collapse_real(s.field, cfg.qvec);
      for (double p : cfg.p_list) {
        double rhs = lp_norm(sq, p);
        double lhs_full = lp_norm(gq, p);
        for (const Mask& m : masks) {
          double lhs = lp_norm(masked(gq, m.set), p);
          double size_factor = std::pow(m.size, 1.0 / p - cfg.eps);
          double c = tracker.feed(lhs, rhs * size_factor);
          bool exact_full = true;
          if (m.density == 1.0) {
            exact_full = m.size == 1.0 && lhs == lhs_full;
            all_exact_full = all_exact_full && exact_full;
          }
          ReportRecord rec;
          rec.add("res", res_str(spec));
          rec.add("fixture", fi);
          rec.add("p", p);
          rec.add("density", m.density);
          rec.add("size", m.size);
          rec.add("lhs", lhs);
          rec.add("rhs", rhs);
          rec.add("size_factor", size_factor);
          rec.add("C", c);
          rec.add("exact_full", m.density == 1.0 ? exact_full : true);
          rep.records.push_back(std::move(rec));
        }
      }
    }
    max_c[static_cast<std::size_t>(pass)] = tracker.max_ratio;
  }
  add_stability(rep, "C", max_c[0], max_c[1], passes == 2);
  rep.summary.add("full_torus_exact", all_exact_full);
}

void run_localization(const ExperimentConfig& cfg, std::uint64_t seed,
                      Report& rep) {
  rep.columns = {"depth", "fixture", "I0",  "p",  "lhs",
                 "sup_sf", "sup_w",  "rhs", "C"};
  GridSpec spec = spec_of(cfg);
  std::vector<GridFunction> corpus = generate_corpus(spec, cfg.corpus, seed);
  Weight w = cfg.weight_kind == "product"
                 ? make_product_weight(spec, cfg.weight_axis_a)
                 : make_power_weight(spec, cfg.weight_a);
  std::vector<double> plist;
  for (double p : cfg.p_list)
    if (p <= 1.0 + 1e-12) plist.push_back(p);
  if (plist.empty()) plist.push_back(1.0);
  int depth_min = std::min(2, cfg.tree_scale);
  std::vector<double> depth_max;
  double overall = 0.0;
  for (int depth = depth_min; depth <= cfg.tree_scale; ++depth) {
    Collection tree = full_tree(spec.dim(), depth);
    LacunaryFamily fam1 = build_family(spec, tree, cfg.family_kind, cfg.decay);
    std::string kind2 =
        cfg.family_kind2.empty() ? cfg.family_kind : cfg.family_kind2;
    LacunaryFamily fam2_storage;
    const LacunaryFamily* fam2 = &fam1;
    if (kind2 != cfg.family_kind) {
      fam2_storage = build_family(spec, tree, kind2, cfg.decay);
      fam2 = &fam2_storage;
    }
    RatioTracker tracker;
    for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
      CoefficientMap coeffs = analyze(corpus[fi], fam1);
      for (const DyadicCube& I0 : full_tree(spec.dim(), cfg.localization_scale).cubes) {
        if (I0.scale != cfg.localization_scale) continue;
        Collection cI0 = restrict_collection(tree, I0);
        if (cI0.empty()) continue;
        CoefficientMap local;
        local.vshape = coeffs.vshape;
        for (const DyadicCube& cube : cI0.cubes)
          local.set(cube, coeffs.get(cube));
        GridFunction g = synthesize(spec, local, *fam2);
        double sup_sf = 0.0;
        for (const DyadicCube& J1 : cI0.cubes)
          sup_sf = std::max(
              sup_sf, local_sf_average(spec, coeffs, cI0, J1, cfg.p1, cfg.qvec));
        Collection closure = relevant_closure(cI0, I0.scale);
        double sup_w = smoothed_average(w.w, I0, cfg.decay);
        for (const DyadicCube& J2 : closure.cubes)
          sup_w = std::max(sup_w, smoothed_average(w.w, J2, cfg.decay));
        for (double p : plist) {
          double lhs = std::pow(lp_norm_weighted(g, p, w.w), p);
          double rhs = std::pow(sup_sf, p) * sup_w * I0.measure();
          double c = tracker.feed(lhs, rhs);
          ReportRecord rec;
          rec.add("depth", depth);
          rec.add("fixture", fi);
          rec.add("I0", I0.str());
          rec.add("p", p);
          rec.add("lhs", lhs);
          rec.add("sup_sf", sup_sf);
          rec.add("sup_w", sup_w);
          rec.add("rhs", rhs);
          rec.add("C", c);
          rep.records.push_back(std::move(rec));
        }
      }
    }
    depth_max.push_back(tracker.max_ratio);
    overall = std::max(overall, tracker.max_ratio);
    rep.summary.add("max_C_depth" + std::to_string(depth), tracker.max_ratio);
  }
  rep.summary.add("max_C", overall);
  if (depth_max.size() >= 2) {
    double growth = growth_of(depth_max.front(), depth_max.back());
    rep.summary.add("C_depth_growth", growth);
    rep.summary.add("C_depth_stable",
                    stable_of(depth_max.front(), depth_max.back()));
  }
}

void run_sparse(const ExperimentConfig& cfg, std::uint64_t seed, Report& rep) {
  rep.columns = {"res",   "fixture", "p",         "lhs",     "rhs",
                 "rhs_w", "C",       "C_w",       "nodes",   "max_depth",
                 "min_e_ratio", "max_doublings"};
  GridSpec base = spec_of(cfg);
  int passes = cfg.refine ? 2 : 1;
  std::vector<double> max_c(2, 0.0);
  for (int pass = 0; pass < passes; ++pass) {
    GridSpec spec = pass ? base.refined() : base;
    std::vector<GridFunction> corpus = generate_corpus(spec, cfg.corpus, seed);
    Collection tree = full_tree(spec.dim(), cfg.tree_scale);
    LacunaryFamily fam1 = build_family(spec, tree, cfg.family_kind, cfg.decay);
    std::string kind2 =
        cfg.family_kind2.empty() ? cfg.family_kind : cfg.family_kind2;
    LacunaryFamily fam2_storage;
    const LacunaryFamily* fam2 = &fam1;
    if (kind2 != cfg.family_kind) {
      fam2_storage = build_family(spec, tree, kind2, cfg.decay);
      fam2 = &fam2_storage;
    }
    Weight w = cfg.weight_kind == "product"
                   ? make_product_weight(spec, cfg.weight_axis_a)
                   : make_power_weight(spec, cfg.weight_a);
    RatioTracker tracker;
    for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
      CoefficientMap coeffs = analyze(corpus[fi], fam1);
      SparseFamily fam = sparse_construct(spec, coeffs, tree, w, cfg.p1,
                                          cfg.c0, cfg.decay, cfg.qvec);
      GridFunction g = synthesize(spec, coeffs, *fam2);
      double min_e_ratio = 1.0;
      int max_doublings = 0;
      for (const SparseNode& node : fam.nodes) {
        min_e_ratio =
            std::min(min_e_ratio, node.e_measure / node.cube.measure());
        max_doublings = std::max(max_doublings, node.doublings);
      }
      for (double p : cfg.p_list) {
        double lhs = std::pow(lp_norm_weighted(g, p, w.w), p);
        double eps_p = p <= 1.0 ? 0.0 : cfg.eps_p;
        double rhs = sparse_bound_rhs(spec, coeffs, tree, fam, w, p, cfg.p1,
                                      eps_p, false, cfg.qvec);
        double rhs_w = sparse_bound_rhs(spec, coeffs, tree, fam, w, p, cfg.p1,
                                        eps_p, true, cfg.qvec);
        double c = tracker.feed(lhs, rhs);
        double cw = rhs_w > 0.0 ? lhs / rhs_w : (lhs > 0.0 ? kInf : 0.0);
        ReportRecord rec;
        rec.add("res", res_str(spec));
        rec.add("fixture", fi);
        rec.add("p", p);
        rec.add("lhs", lhs);
        rec.add("rhs", rhs);
        rec.add("rhs_w", rhs_w);
        rec.add("C", c);
        rec.add("C_w", cw);
        rec.add("nodes", fam.nodes.size());
        rec.add("max_depth", fam.max_depth);
        rec.add("min_e_ratio", min_e_ratio);
        rec.add("max_doublings", max_doublings);
        rep.records.push_back(std::move(rec));
      }
    }
    max_c[static_cast<std::size_t>(pass)] = tracker.max_ratio;
  }
  add_stability(rep, "C", max_c[0], max_c[1], passes == 2);
}

void run_weighted(const ExperimentConfig& cfg, std::uint64_t seed,
                  Report& rep) {
  rep.columns = {"res", "variant", "a",     "probe_found", "probe_q",
                 "fixture", "p",   "lhs",   "rhs",         "ratio"};
  GridSpec base = spec_of(cfg);
  int passes = cfg.refine ? 2 : 1;
  int dim = base.dim();
  std::vector<double> max_power(2, 0.0), max_product(2, 0.0);
  for (int pass = 0; pass < passes; ++pass) {
    GridSpec spec = pass ? base.refined() : base;
    std::vector<GridFunction> corpus = generate_corpus(spec, cfg.corpus, seed);
    TensorFilterBank one =
        build_tensor_filterbank(spec, {dim}, cfg.profile);
    TensorFilterBank tensor =
        dim >= 2 ? build_tensor_filterbank(
                       spec, std::vector<int>(static_cast<std::size_t>(dim), 1),
                       cfg.profile)
                 : one;
    RatioTracker track_power, track_product;
    for (double a : cfg.a_list) {
      struct Variant {
        const char* name;
        Weight w;
        const TensorFilterBank* tb;
        RatioTracker* tracker;
      };
      std::vector<Variant> variants;
      variants.push_back(
          {"power", make_power_weight(spec, a), &one, &track_power});
      if (dim >= 2)
        variants.push_back(
            {"product",
             make_product_weight(
                 spec, std::vector<double>(static_cast<std::size_t>(dim), a)),
             &tensor, &track_product});
      for (Variant& var : variants) {
        AInfReport probe = a_infinity_probe(var.w);
        for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
          SquareFunctionResult s = tensor_square_function(corpus[fi], *var.tb);
          RealField fq = collapse_abs(corpus[fi], cfg.qvec);
          RealField sq = collapse_real(s.field, cfg.qvec);
          for (double p : cfg.p_list) {
            double lhs = lp_norm_weighted(fq, p, var.w.w);
            double rhs = lp_norm_weighted(sq, p, var.w.w);
            double ratio = var.tracker->feed(lhs, rhs);
            ReportRecord rec;
            rec.add("res", res_str(spec));
            rec.add("variant", var.name);
            rec.add("a", a);
            rec.add("probe_found", probe.found);
            rec.add("probe_q", probe.q);
            rec.add("fixture", fi);
            rec.add("p", p);
            rec.add("lhs", lhs);
            rec.add("rhs", rhs);
            rec.add("ratio", ratio);
            rep.records.push_back(std::move(rec));
          }
        }
      }
    }
    max_power[static_cast<std::size_t>(pass)] = track_power.max_ratio;
    max_product[static_cast<std::size_t>(pass)] = track_product.max_ratio;
  }
  add_stability(rep, "ratio_power", max_power[0], max_power[1], passes == 2);
  if (dim >= 2)
    add_stability(rep, "ratio_product", max_product[0], max_product[1],
                  passes == 2);
}

void run_kurtz(const ExperimentConfig& cfg, std::uint64_t seed, Report& rep) {
  rep.columns = {"res", "fixture", "P", "Q", "lhs", "rhs", "ratio"};
  GridSpec base = spec_of(cfg);
  if (base.dim() < 2)
    throw std::invalid_argument("kurtz-product needs at least two axes");
  std::vector<double> axis_a = cfg.weight_axis_a;
  if (axis_a.empty())
    axis_a.assign(static_cast<std::size_t>(base.dim()), cfg.weight_a);
  if (axis_a.size() != static_cast<std::size_t>(base.dim()))
    throw std::invalid_argument("weight_axis_a must give one exponent per axis");
  std::vector<NormChoice> norms =
      cfg.norms.empty() ? subbanach_sweep() : cfg.norms;
  int passes = cfg.refine ? 2 : 1;
  std::vector<double> max_ratio(2, 0.0);
  for (int pass = 0; pass < passes; ++pass) {
    GridSpec spec = pass ? base.refined() : base;
    std::vector<GridFunction> corpus = generate_corpus(spec, cfg.corpus, seed);
    Weight w = make_product_weight(spec, axis_a);
    AInfReport probe = a_infinity_probe(w);
    rep.summary.add("probe_found_" + res_str(spec), probe.found);
    rep.summary.add("probe_q_" + res_str(spec), probe.q);
    TensorFilterBank tb = build_tensor_filterbank(
        spec, std::vector<int>(static_cast<std::size_t>(spec.dim()), 1),
        cfg.profile);
    RatioTracker tracker;
    for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
      SquareFunctionResult s = tensor_square_function(corpus[fi], tb);
      RealField fq = collapse_abs(corpus[fi], cfg.qvec);
      RealField sq = collapse_real(s.field, cfg.qvec);
      for (const NormChoice& nc : norms) {
        MixedNormSpec ns = norm_spec_of(nc, spec);
        double lhs = mixed_norm_weighted(fq, ns, w.w);
        double rhs = mixed_norm_weighted(sq, ns, w.w);
        double ratio = tracker.feed(lhs, rhs);
        ReportRecord rec;
        rec.add("res", res_str(spec));
        rec.add("fixture", fi);
        rec.add("P", join_doubles(nc.p));
        rec.add("Q", join_doubles(nc.q));
        rec.add("lhs", lhs);
        rec.add("rhs", rhs);
        rec.add("ratio", ratio);
        rep.records.push_back(std::move(rec));
      }
    }
    max_ratio[static_cast<std::size_t>(pass)] = tracker.max_ratio;
  }
  add_stability(rep, "ratio", max_ratio[0], max_ratio[1], passes == 2);
}

std::string environment_digest() {
  std::string env = std::string("lp-lab ") + kLpLabVersion;
#if defined(__VERSION__)
  env += std::string(" gcc ") + __VERSION__;
#endif
  env += " double" + std::to_string(sizeof(double) * 8);
  const std::uint16_t probe = 1;
  env += (*reinterpret_cast<const unsigned char*>(&probe) == 1) ? " le" : " be";
  return digest_hex(env);
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<std::string> failures = verify_invariants();
  if (!failures.empty()) {
    std::string msg = "invariant preflight failed: " + failures.front();
    if (failures.size() > 1)
      msg += " (+" + std::to_string(failures.size() - 1) + " more)";
    throw std::runtime_error(msg);
  }
  if (cfg.logres.empty())
    throw std::invalid_argument("config needs at least one axis");

  Report rep;
  rep.kind = cfg.kind;
  if (cfg.kind == "main")
    run_main(cfg, seed, rep);
  else if (cfg.kind == "discrete")
    run_discrete(cfg, seed, rep);
  else if (cfg.kind == "localization")
    run_localization(cfg, seed, rep);
  else if (cfg.kind == "sparse")
    run_sparse(cfg, seed, rep);
  else if (cfg.kind == "weighted")
    run_weighted(cfg, seed, rep);
  else if (cfg.kind == "kurtz-product")
    run_kurtz(cfg, seed, rep);
  else
    throw std::invalid_argument("unknown experiment kind: " + cfg.kind);

  rep.summary.add("seed", seed);
  rep.summary.add("res", res_str(spec_of(cfg)));
  rep.summary.add("fixtures", cfg.corpus.count);
  rep.summary.add("records", rep.records.size());
  rep.summary.add("config_digest", digest_hex(config_to_json(cfg)));
  rep.summary.add("env_digest", environment_digest());
  return rep;
}

std::vector<std::pair<std::string, std::string>> emit_report(
    const Report& rep, const ExperimentConfig& cfg, std::uint64_t seed,
    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::pair<std::string, std::string>> files;
  auto emit = [&](const std::string& name, const std::string& bytes) {
    write_file((fs::path(out_dir) / name).string(), bytes);
    files.emplace_back(name, digest_hex(bytes));
  };
  emit("report.jsonl", to_jsonl(rep));
  emit("report.csv", to_csv(rep));
  emit("summary.json", to_summary_json(rep));
  emit("config.json", config_to_json(cfg) + "\n");
  std::string manifest = "{\"kind\":\"" + json_escape(rep.kind) + "\"";
  manifest += ",\"seed\":" + std::to_string(seed);
  manifest += ",\"version\":\"" + std::string(kLpLabVersion) + "\"";
  manifest += ",\"files\":[";
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i) manifest += ",";
    manifest += "{\"name\":\"" + json_escape(files[i].first) + "\",\"digest\":\"" +
                files[i].second + "\"}";
  }
  manifest += "]}\n";
  emit("manifest.json", manifest);
  return files;
}

}  // namespace lplab
