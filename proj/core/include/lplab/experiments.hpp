#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lplab/corpus.hpp"
#include "lplab/grid.hpp"
#include "lplab/report.hpp"

namespace lplab {

// One iterated-norm choice: p has one exponent per grouping block of the
// grid, q one exponent per vector index dimension.
struct NormChoice {
  std::vector<double> p;
  std::vector<double> q;
};

// Flat description of one experiment run.  Every field has a usable
// default; `default_config(kind)` fills kind-appropriate grids, sweeps
// and corpora, and a JSON document overrides individual fields.
struct ExperimentConfig {
  std::string kind = "main";  // main|discrete|localization|sparse|weighted|kurtz-product
  std::vector<int> logres = {8, 8};
  std::vector<int> grouping;       // empty: every axis its own block
  std::vector<int> factor_dims;    // empty: one factor per axis
  std::string profile = "smooth-bump";

  CorpusRecipe corpus;

  std::vector<NormChoice> norms;   // mixed-norm sweep (main, kurtz-product)
  std::vector<double> p_list = {0.5, 1.0, 2.0};
  std::vector<double> qvec;        // vector exponents for L^p(l^q) kinds

  std::string family_kind = "haar";
  std::string family_kind2;        // synthesis family; empty: same kind
  double decay = 100.0;
  int tree_scale = 4;              // collections are full trees to this scale

  double eps = 0.1;                // size exponent in the masked estimate
  double eps_p = 0.5;              // weight bump exponent for p > 1
  std::vector<double> densities = {1.0, 0.25, 0.0625, 0.015625};

  double p1 = 1.0;                 // local square-function average exponent
  double c0 = 2.0;                 // sparse threshold seed
  double budget = 0.1;             // exceptional-set measure budget
  int localization_scale = 1;

  std::string weight_kind = "power";  // power|product
  double weight_a = 0.25;
  std::vector<double> weight_axis_a;
  std::vector<double> a_list = {0.0, 0.25, 0.5};

  bool refine = true;              // rerun at doubled resolution
};

ExperimentConfig default_config(const std::string& kind);
// Parse a JSON document over default_config(kind found in the document,
// else "main").  Unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

// Cheap property battery over the producing modules; returns failure
// descriptions, empty when everything holds.  Results are cached per
// process.
std::vector<std::string> verify_invariants();

// Runs the configured experiment.  Throws if the invariant battery fails
// (naming the failing invariant) or the configuration is unusable.
Report run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

// Write report.jsonl / report.csv / summary.json / config.json and a
// manifest.json with digests under out_dir; returns (file, digest) pairs
// in emission order.
std::vector<std::pair<std::string, std::string>> emit_report(
    const Report& rep, const ExperimentConfig& cfg, std::uint64_t seed,
    const std::string& out_dir);

}  // namespace lplab
