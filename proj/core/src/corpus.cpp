#include "lplab/corpus.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "lplab/fft.hpp"

namespace lplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform [0,1) built from the raw 64-bit stream so the value sequence is
// pinned by the standard, not by a library's distribution internals.
double urand(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

double nrand(std::mt19937_64& rng) {
  double u1 = 1.0 - urand(rng);  // (0, 1]
  double u2 = urand(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

cplx crand(std::mt19937_64& rng) {
  double re = nrand(rng);
  double im = nrand(rng);
  return cplx(re, im);
}

int cap_exponent(int cap) {
  int k = 0;
  while ((1 << (k + 1)) <= cap) ++k;
  return k;  // largest k with 2^k <= cap
}

void check_cap(const GridSpec& spec, int cap) {
  if (cap < 2) throw std::invalid_argument("band cap must be at least 2");
  for (int j = 0; j < spec.dim(); ++j) {
    long limit = static_cast<long>(spec.axis_size(j)) / 2 - 1;
    if (cap > limit)
      throw std::runtime_error("band cap " + std::to_string(cap) +
                               " exceeds axis " + std::to_string(j) +
                               " frequency range; lower band_cap or refine");
  }
}

// Add amp * e^{2 pi i <xi, x>} to slot v.  The inverse transform divides
// by the point count, so bins carry amp * points; this keeps the sampled
// values independent of the resolution.
void place(GridFunction& bins, const std::vector<long>& xi, std::size_t v,
           cplx amp) {
  const GridSpec& spec = bins.spec();
  std::vector<std::size_t> coords(spec.dim());
  for (int j = 0; j < spec.dim(); ++j)
    coords[j] = bin_of_freq(xi[j], spec.axis_size(j));
  bins.at(grid_index(spec, coords), v) +=
      amp * static_cast<double>(spec.points());
}

// Visit every integer frequency box point with all coordinates nonzero
// and |xi_j| <= cap.
void for_each_box_freq(int dim, int cap,
                       const std::function<void(const std::vector<long>&)>& fn) {
  std::vector<long> xi(dim, -cap);
  while (true) {
    bool live = true;
    for (int j = 0; j < dim; ++j)
      if (xi[j] == 0) live = false;
    if (live) fn(xi);
    int j = dim - 1;
    while (j >= 0) {
      if (++xi[j] <= cap) break;
      xi[j] = -cap;
      --j;
    }
    if (j < 0) break;
  }
}

void fill_single_band(GridFunction& bins, std::size_t v, std::mt19937_64& rng,
                      const CorpusRecipe& r, bool real) {
  int kmax = cap_exponent(r.band_cap);
  std::vector<long> xi(bins.spec().dim());
  for (int j = 0; j < bins.spec().dim(); ++j) {
    int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(kmax));
    long sign = (rng() & 1) ? 1 : -1;
    xi[j] = sign * (1L << k);
  }
  double a = 0.5 + urand(rng);
  double theta = 2.0 * kPi * urand(rng);
  cplx amp = a * cplx(std::cos(theta), std::sin(theta));
  if (real) {
    place(bins, xi, v, 0.5 * amp);
    std::vector<long> mxi(xi);
    for (long& u : mxi) u = -u;
    place(bins, mxi, v, 0.5 * std::conj(amp));
  } else {
    place(bins, xi, v, amp);
  }
}

void fill_bumps(GridFunction& bins, std::size_t v, std::mt19937_64& rng,
                const CorpusRecipe& r) {
  int dim = bins.spec().dim();
  int cap = r.band_cap;
  for (int t = 0; t < r.terms; ++t) {
    std::vector<double> center(dim);
    for (int j = 0; j < dim; ++j) {
      long c = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(cap));
      center[j] = (rng() & 1) ? double(c) : double(-c);
    }
    double width = std::max(0.5, 0.25 * cap * (0.25 + 0.75 * urand(rng)));
    cplx amp = crand(rng);
    for_each_box_freq(dim, cap, [&](const std::vector<long>& xi) {
      double q = 0.0;
      for (int j = 0; j < dim; ++j) {
        double d = static_cast<double>(xi[j]) - center[j];
        q += d * d;
      }
      cplx val = amp * std::exp(-q / (2.0 * width * width));
      place(bins, xi, v, val);
    });
  }
}

void fill_chirps(GridFunction& bins, std::size_t v, std::mt19937_64& rng,
                 const CorpusRecipe& r) {
  int dim = bins.spec().dim();
  int cap = r.band_cap;
  for (int t = 0; t < r.terms; ++t) {
    std::vector<double> alpha(dim), beta(dim);
    for (int j = 0; j < dim; ++j) {
      alpha[j] = urand(rng);
      beta[j] = urand(rng);
    }
    cplx amp = crand(rng);
    for_each_box_freq(dim, cap, [&](const std::vector<long>& xi) {
      cplx val = amp;
      for (int j = 0; j < dim; ++j) {
        double u = static_cast<double>(xi[j]);
        double win = std::sin(kPi * std::abs(u) / (cap + 1.0));
        double phase = 2.0 * kPi * (alpha[j] * u * u + beta[j] * u);
        val *= win * cplx(std::cos(phase), std::sin(phase));
      }
      place(bins, xi, v, val);
    });
  }
}

// Symmetrize bins so the synthesized samples are exactly real.  The band
// cap keeps Nyquist bins empty, so every filled bin has a mirror.
void hermitize(GridFunction& bins) {
  const GridSpec& spec = bins.spec();
  GridFunction out(spec, bins.vshape());
  std::vector<std::size_t> mirror(spec.dim());
  for (std::size_t g = 0; g < bins.gcount(); ++g) {
    std::vector<std::size_t> coords = grid_coords(spec, g);
    for (int j = 0; j < spec.dim(); ++j) {
      long xi = freq_of_bin(coords[j], spec.axis_size(j));
      mirror[j] = bin_of_freq(-xi, spec.axis_size(j));
    }
    std::size_t m = grid_index(spec, mirror);
    for (std::size_t v = 0; v < bins.vcount(); ++v)
      out.at(g, v) = 0.5 * (bins.at(g, v) + std::conj(bins.at(m, v)));
  }
  bins = std::move(out);
}

// L^2-normalized tensor Haar bump on a dyadic cube, summed in space.
// Piecewise constant at scale s+1, so any grid with min L >= s+1 samples
// the same physical function.
void add_haar(GridFunction& f, const DyadicCube& cube, std::size_t v,
              cplx coeff) {
  const GridSpec& spec = f.spec();
  double norm = std::pow(cube.measure(), -0.5);
  for_each_cell(spec, cube, [&](std::size_t g) {
    std::vector<std::size_t> coords = grid_coords(spec, g);
    double sign = 1.0;
    for (int j = 0; j < spec.dim(); ++j) {
      // Which half of the cube does this cell sit in along axis j?
      std::size_t local = coords[j] - (static_cast<std::size_t>(cube.pos[j])
                                       << (spec.logres[j] - cube.scale));
      std::size_t half = std::size_t{1} << (spec.logres[j] - cube.scale - 1);
      if (local >= half) sign = -sign;
    }
    f.at(g, v) += coeff * (sign * norm);
  });
}

void fill_wavelets(GridFunction& f, std::size_t v, std::mt19937_64& rng,
                   const CorpusRecipe& r, bool real) {
  const GridSpec& spec = f.spec();
  int smax = cap_exponent(r.band_cap);
  if (smax + 1 > spec.min_logres()) smax = spec.min_logres() - 1;
  for (int t = 0; t < r.terms; ++t) {
    int s = static_cast<int>(rng() % static_cast<std::uint64_t>(smax + 1));
    std::vector<std::uint32_t> pos(spec.dim());
    for (int j = 0; j < spec.dim(); ++j)
      pos[j] = static_cast<std::uint32_t>(rng() %
                                          (std::uint64_t{1} << s));
    cplx coeff = real ? cplx(nrand(rng), 0.0) : crand(rng);
    add_haar(f, DyadicCube(spec.dim(), s, pos), v, coeff);
  }
}

void zero_imag(GridFunction& f) {
  for (cplx& z : f.values()) z = cplx(z.real(), 0.0);
}

GridFunction build_fixture(const GridSpec& spec, const CorpusRecipe& r,
                           const std::string& name, std::mt19937_64& rng) {
  GridFunction f(spec, r.vshape);
  if (name == "zero") return f;
  if (name == "wavelet-sparse") {
    for (std::size_t v = 0; v < f.vcount(); ++v)
      fill_wavelets(f, v, rng, r, r.real);
    return f;
  }
  // Spectral recipes assemble frequency bins, then transform once.
  for (std::size_t v = 0; v < f.vcount(); ++v) {
    if (name == "single-band")
      fill_single_band(f, v, rng, r, r.real);
    else if (name == "bumps")
      fill_bumps(f, v, rng, r);
    else if (name == "chirps")
      fill_chirps(f, v, rng, r);
    else
      throw std::invalid_argument("unknown corpus recipe: " + name);
  }
  if (r.real && name == "bumps") hermitize(f);
  fft_nd(f.values().data(), spec.shape(), f.vcount(), true);
  if (r.real && name != "chirps") zero_imag(f);
  return f;
}

}  // namespace

CorpusRecipe recipe_by_name(const std::string& name) {
  CorpusRecipe r;
  r.name = name;
  if (name == "zero") {
    r.count = 4;
  } else if (name == "single-band") {
    r.terms = 1;
  } else if (name == "bumps" || name == "chirps" ||
             name == "wavelet-sparse" || name == "mix") {
    // defaults stand
  } else {
    throw std::invalid_argument("unknown corpus recipe: " + name);
  }
  return r;
}

std::vector<GridFunction> generate_corpus(const GridSpec& spec,
                                          const CorpusRecipe& recipe,
                                          std::uint64_t seed) {
  if (recipe.count < 0)
    throw std::invalid_argument("corpus count must be nonnegative");
  static const char* known[] = {"zero",   "single-band",    "bumps",
                                "chirps", "wavelet-sparse", "mix"};
  bool ok = false;
  for (const char* k : known) ok = ok || recipe.name == k;
  if (!ok) throw std::invalid_argument("unknown corpus recipe: " + recipe.name);
  if (recipe.name != "zero") check_cap(spec, recipe.band_cap);

  std::mt19937_64 rng(seed);
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(recipe.count));
  static const char* cycle[] = {"bumps", "chirps", "wavelet-sparse"};
  for (int i = 0; i < recipe.count; ++i) {
    std::string name = recipe.name == "mix" ? cycle[i % 3] : recipe.name;
    out.push_back(build_fixture(spec, recipe, name, rng));
  }
  return out;
}

}  // namespace lplab
