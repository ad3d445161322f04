#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lplab/corpus.hpp"
#include "lplab/experiments.hpp"
#include "lplab/io.hpp"
#include "lplab/report.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& kind, const std::string& config_path,
            std::uint64_t seed, const std::string& out_dir) {
  lplab::ExperimentConfig cfg;
  if (config_path.empty()) {
    cfg = lplab::default_config(kind);
  } else {
    cfg = lplab::config_from_json(lplab::read_file(config_path));
    if (!kind.empty()) cfg.kind = kind;
  }
  lplab::Report rep = lplab::run_experiment(cfg, seed);
  auto files = lplab::emit_report(rep, cfg, seed, out_dir);
  std::cout << "kind " << rep.kind << ", " << rep.records.size()
            << " records\n";
  for (const auto& [name, digest] : files)
    std::cout << "  " << name << "  " << digest << "\n";
  for (const auto& f : rep.summary.fields)
    std::cout << "  " << f.key << " = " << f.csv << "\n";
  return 0;
}

int cmd_verify() {
  std::vector<std::string> failures = lplab::verify_invariants();
  if (failures.empty()) {
    std::cout << "all invariants hold\n";
    return 0;
  }
  for (const std::string& f : failures) std::cout << "FAIL " << f << "\n";
  return 1;
}

int cmd_corpus(const std::string& recipe_name, const std::vector<int>& logres,
               int count, int band_cap, std::uint64_t seed,
               const std::string& out_dir) {
  lplab::CorpusRecipe recipe = lplab::recipe_by_name(recipe_name);
  if (count > 0) recipe.count = count;
  if (band_cap > 0) recipe.band_cap = band_cap;
  std::vector<int> lr = logres.empty() ? std::vector<int>{8} : logres;
  lplab::GridSpec spec(lr, std::vector<int>(lr.size(), 1));
  std::vector<lplab::GridFunction> fixtures =
      lplab::generate_corpus(spec, recipe, seed);
  fs::create_directories(out_dir);
  std::string listing;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "fixture_%03zu.gf", i);
    lplab::save_gridfunction((fs::path(out_dir) / name).string(), fixtures[i]);
    listing += std::string(name) + " " + lplab::hex64(lplab::digest_of(fixtures[i])) + "\n";
    std::cout << name << "  " << lplab::hex64(lplab::digest_of(fixtures[i]))
              << "\n";
  }
  lplab::write_file((fs::path(out_dir) / "corpus.txt").string(), listing);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale square function experiments on the torus"};
  app.require_subcommand(1);

  std::string kind, config_path, out_dir = "out";
  std::uint64_t seed = 1;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--kind", kind,
                  "main|discrete|localization|sparse|weighted|kurtz-product")
      ->required();
  run->add_option("--config", config_path, "JSON config document");
  run->add_option("--seed", seed, "corpus seed");
  run->add_option("--out", out_dir, "output directory");

  CLI::App* verify =
      app.add_subcommand("verify-invariants", "run the property battery");

  std::string recipe_name = "mix";
  std::vector<int> logres;
  int count = 0;
  int band_cap = 0;
  std::string corpus_out = "corpus";
  std::uint64_t corpus_seed = 1;
  CLI::App* corpus = app.add_subcommand("corpus", "write corpus fixtures");
  corpus->add_option("--recipe", recipe_name,
                     "zero|single-band|bumps|chirps|wavelet-sparse|mix")
      ->required();
  corpus->add_option("--logres", logres, "log2 points per axis");
  corpus->add_option("--count", count, "fixture count override");
  corpus->add_option("--band-cap", band_cap,
                     "largest per-axis |frequency| override");
  corpus->add_option("--seed", corpus_seed, "corpus seed");
  corpus->add_option("--out", corpus_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(kind, config_path, seed, out_dir);
    if (verify->parsed()) return cmd_verify();
    if (corpus->parsed())
      return cmd_corpus(recipe_name, logres, count, band_cap, corpus_seed,
                        corpus_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
