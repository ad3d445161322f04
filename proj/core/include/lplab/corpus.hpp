#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lplab/grid.hpp"

namespace lplab {

// Corpus recipes are defined spectrally on a fixed physical frequency
// box, so the same (recipe, seed) pair names the same function at every
// resolution that can represent the band cap.  All spectra vanish on the
// coordinate planes (mean zero along every axis); "chirps" fixtures are
// genuinely complex, the others are real unless `real` is cleared.
struct CorpusRecipe {
  std::string name = "mix";  // zero|single-band|bumps|chirps|wavelet-sparse|mix
  int count = 8;
  std::vector<std::size_t> vshape;
  int band_cap = 32;  // largest per-axis |frequency| used
  int terms = 6;      // bumps / chirp factors / wavelet terms per fixture
  bool real = true;
};

CorpusRecipe recipe_by_name(const std::string& name);

std::vector<GridFunction> generate_corpus(const GridSpec& spec,
                                          const CorpusRecipe& recipe,
                                          std::uint64_t seed);

}  // namespace lplab
