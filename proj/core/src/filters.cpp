#include "lplab/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lplab {

double ramp(double t) {
  if (t <= 1.0) return 0.0;
  if (t >= 2.0) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * (t - 1.0)));
}

double ramp_derivative(double t, int alpha) {
  if (alpha < 1) throw std::invalid_argument("ramp_derivative: alpha >= 1");
  if (t <= 1.0 || t >= 2.0) return 0.0;
  // d^a/dt^a [-cos(pi(t-1))/2] = pi^a/2 * cos(pi(t-1) + (a-1) pi/2) ... via
  // successive quarter-phase shifts of sin.
  double phase = std::numbers::pi * (t - 1.0) +
                 (alpha - 1) * std::numbers::pi / 2.0;
  return 0.5 * std::pow(std::numbers::pi, alpha) * std::sin(phase);
}

namespace {

double pow2(int k) { return std::ldexp(1.0, k); }

// rho_k(r) = ramp(r / 2^{k-1}): 0 below 2^{k-1}, 1 above 2^k.
double rho(int k, double r) { return ramp(r / pow2(k - 1)); }

double profile_value(const std::string& profile, int kmin, int kmax, int k,
                     double r) {
  if (r == 0.0) return 0.0;
  if (profile == "smooth-bump") {
    if (kmin == kmax) return 1.0;
    if (k == kmin) return 1.0 - rho(kmin + 1, r);
    if (k == kmax) return rho(kmax, r);
    return rho(k, r) - rho(k + 1, r);
  }
  if (profile == "sharp-annulus") {
    if (kmin == kmax) return 1.0;
    if (k == kmin) return r <= pow2(kmin) ? 1.0 : 0.0;
    if (k == kmax) return r > pow2(kmax - 1) ? 1.0 : 0.0;
    return (r > pow2(k - 1) && r <= pow2(k)) ? 1.0 : 0.0;
  }
  throw std::invalid_argument("unknown filter profile: " + profile);
}

}  // namespace

double FilterBank::freq_norm(std::size_t f) const {
  double acc = 0.0;
  for (int j = factor_dim() - 1; j >= 0; --j) {
    std::size_t n = fshape[static_cast<std::size_t>(j)];
    long xi = freq_of_bin(f % n, n);
    acc += static_cast<double>(xi) * static_cast<double>(xi);
    f /= n;
  }
  return std::sqrt(acc);
}

FilterBank build_filterbank(const GridSpec& spec, int axis_begin, int axis_end,
                            int kmin, int kmax, const std::string& profile) {
  if (axis_begin < 0 || axis_end > spec.dim() || axis_begin >= axis_end)
    throw std::invalid_argument("build_filterbank: bad axis range");
  if (profile != "smooth-bump" && profile != "sharp-annulus")
    throw std::invalid_argument("build_filterbank: unknown profile " + profile);
  int minL = spec.logres[axis_begin];
  for (int j = axis_begin; j < axis_end; ++j) minL = std::min(minL, spec.logres[j]);
  if (kmin < 0 || kmin > kmax || kmax > minL - 1)
    throw std::invalid_argument(
        "build_filterbank: scale range must satisfy 0 <= kmin <= kmax <= min(L)-1");

  FilterBank b;
  b.spec = spec;
  b.axis_begin = axis_begin;
  b.axis_end = axis_end;
  b.kmin = kmin;
  b.kmax = kmax;
  b.profile = profile;

  int fbits = 0;
  for (int j = axis_begin; j < axis_end; ++j) {
    b.fshape.push_back(spec.axis_size(j));
    fbits += spec.logres[j];
  }
  int after = 0;
  for (int j = axis_end; j < spec.dim(); ++j) after += spec.logres[j];
  b.fshift = after;
  b.fmask = (std::uint64_t{1} << fbits) - 1;

  std::size_t fcount = std::size_t{1} << fbits;
  int m = b.factor_dim();
  double logc = -1e300;
  b.prof.assign(static_cast<std::size_t>(b.scales()), std::vector<double>(fcount));
  for (int k = kmin; k <= kmax; ++k) {
    auto& row = b.prof[static_cast<std::size_t>(k - kmin)];
    for (std::size_t f = 0; f < fcount; ++f) {
      double r = b.freq_norm(f);
      double v = profile_value(profile, kmin, kmax, k, r);
      row[f] = v;
      if (v != 0.0)
        logc = std::max(logc, std::log(std::fabs(v)) +
                                  100.0 * m * std::log1p(r / pow2(k)));
    }
  }
  b.log_decay_const = logc;
  return b;
}

double filter_derivative(const FilterBank& bank, int k, int alpha, double xi) {
  if (bank.factor_dim() != 1)
    throw std::invalid_argument("filter_derivative: 1-d factors only");
  if (bank.profile != "smooth-bump")
    throw std::invalid_argument("filter_derivative: smooth-bump only");
  if (alpha < 1) throw std::invalid_argument("filter_derivative: alpha >= 1");
  double r = std::fabs(xi);
  auto drho = [&](int kk) {
    double h = pow2(kk - 1);
    return ramp_derivative(r / h, alpha) / std::pow(h, alpha);
  };
  if (bank.kmin == bank.kmax) return 0.0;
  if (k == bank.kmin) return -drho(bank.kmin + 1);
  if (k == bank.kmax) return drho(bank.kmax);
  return drho(k) - drho(k + 1);
}

double filter_derivative_log_const(const FilterBank& bank, int alpha) {
  if (alpha == 0) return bank.log_decay_const;
  double nyq = pow2(bank.spec.logres[bank.axis_begin] - 1);
  double logc = -1e300;
  for (int k = bank.kmin; k <= bank.kmax; ++k) {
    // Sweep a 4x refined frequency grid; the bound is a statement about
    // the continuum profile.
    for (double r = 0.25; r <= nyq; r += 0.25) {
      double d = std::fabs(filter_derivative(bank, k, alpha, r));
      if (d == 0.0) continue;
      logc = std::max(logc, std::log(d) + alpha * k * std::numbers::ln2 +
                                100.0 * std::log1p(r / pow2(k)));
    }
  }
  return logc;
}

TensorFilterBank build_tensor_filterbank(const GridSpec& spec,
                                         const std::vector<int>& factor_dims,
                                         const std::string& profile) {
  std::vector<std::pair<int, int>> kr;
  int a = 0;
  for (int dj : factor_dims) {
    int minL = spec.logres[a];
    for (int j = a; j < a + dj; ++j) minL = std::min(minL, spec.logres[j]);
    kr.emplace_back(0, minL - 1);
    a += dj;
  }
  return build_tensor_filterbank(spec, factor_dims, kr, profile);
}

TensorFilterBank build_tensor_filterbank(const GridSpec& spec,
                                         const std::vector<int>& factor_dims,
                                         const std::vector<std::pair<int, int>>& kranges,
                                         const std::string& profile) {
  int s = 0;
  for (int dj : factor_dims) s += dj;
  if (s != spec.dim())
    throw std::invalid_argument("build_tensor_filterbank: factors must cover all axes");
  if (kranges.size() != factor_dims.size())
    throw std::invalid_argument("build_tensor_filterbank: one k-range per factor");
  TensorFilterBank tb;
  int a = 0;
  for (std::size_t i = 0; i < factor_dims.size(); ++i) {
    tb.factors.push_back(build_filterbank(spec, a, a + factor_dims[i],
                                          kranges[i].first, kranges[i].second,
                                          profile));
    a += factor_dims[i];
  }
  return tb;
}

std::vector<std::vector<int>> scale_tuples(const TensorFilterBank& tb) {
  std::vector<std::vector<int>> out;
  int n = tb.parameters();
  std::vector<int> cur(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cur[static_cast<std::size_t>(i)] = tb.factors[static_cast<std::size_t>(i)].kmin;
  while (true) {
    out.push_back(cur);
    int i = n - 1;
    while (i >= 0) {
      if (++cur[static_cast<std::size_t>(i)] <= tb.factors[static_cast<std::size_t>(i)].kmax) break;
      cur[static_cast<std::size_t>(i)] = tb.factors[static_cast<std::size_t>(i)].kmin;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

GridFunction to_frequency(const GridFunction& f, int axis_begin, int axis_end) {
  GridFunction F = f;
  auto shp = f.spec().shape();
  for (int a = axis_begin; a < axis_end; ++a)
    fft_axis(F.values().data(), shp, f.vcount(), static_cast<std::size_t>(a), false);
  return F;
}

GridFunction from_frequency(const GridFunction& F, int axis_begin, int axis_end) {
  GridFunction f = F;
  auto shp = F.spec().shape();
  for (int a = axis_begin; a < axis_end; ++a)
    fft_axis(f.values().data(), shp, F.vcount(), static_cast<std::size_t>(a), true);
  return f;
}

void multiply_band(const GridFunction& F, const FilterBank& bank, int k,
                   GridFunction& out) {
  if (k < bank.kmin || k > bank.kmax)
    throw std::invalid_argument("multiply_band: scale out of range");
  if (!out.same_shape(F)) out = GridFunction(F.spec(), F.vshape());
  const auto& row = bank.prof[static_cast<std::size_t>(k - bank.kmin)];
  std::size_t V = F.vcount();
  for (std::size_t g = 0; g < F.gcount(); ++g) {
    double m = row[(g >> bank.fshift) & bank.fmask];
    for (std::size_t v = 0; v < V; ++v)
      out.at(g, v) = F.at(g, v) * m;
  }
}

GridFunction band_convolve(const GridFunction& f, const FilterBank& bank, int k) {
  GridFunction F = to_frequency(f, bank.axis_begin, bank.axis_end);
  GridFunction G(f.spec(), f.vshape());
  multiply_band(F, bank, k, G);
  return from_frequency(G, bank.axis_begin, bank.axis_end);
}

std::vector<GridFunction> band_convolve_all(const GridFunction& f,
                                            const FilterBank& bank) {
  GridFunction F = to_frequency(f, bank.axis_begin, bank.axis_end);
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(bank.scales()));
  GridFunction G(f.spec(), f.vshape());
  for (int k = bank.kmin; k <= bank.kmax; ++k) {
    multiply_band(F, bank, k, G);
    out.push_back(from_frequency(G, bank.axis_begin, bank.axis_end));
  }
  return out;
}

GridFunction band_convolve(const GridFunction& f, const TensorFilterBank& tb,
                           const std::vector<int>& ks) {
  if (ks.size() != tb.factors.size())
    throw std::invalid_argument("band_convolve: one scale per factor");
  GridFunction F = to_frequency(f, 0, f.spec().dim());
  GridFunction G = F;
  for (std::size_t i = 0; i < tb.factors.size(); ++i) {
    GridFunction H(F.spec(), F.vshape());
    multiply_band(G, tb.factors[i], ks[i], H);
    G = std::move(H);
  }
  return from_frequency(G, 0, f.spec().dim());
}

int LacunaryFamily::index_of(const DyadicCube& c) const {
  auto it = std::lower_bound(cubes.cubes.begin(), cubes.cubes.end(), c);
  if (it == cubes.cubes.end() || !(*it == c)) return -1;
  return static_cast<int>(it - cubes.cubes.begin());
}

const std::vector<double>& LacunaryFamily::phi(const DyadicCube& c) const {
  int i = index_of(c);
  if (i < 0) throw std::invalid_argument("LacunaryFamily: cube not in family");
  return values[static_cast<std::size_t>(i)];
}

namespace {

// Smooth annular mother profile: supported on (s, 4s), peak 1 at 2s.
double mother_bump(double u, double s) {
  return ramp(u / s) - ramp(u / (2.0 * s));
}

std::vector<double> build_haar(const GridSpec& spec, const DyadicCube& c, double p) {
  std::vector<double> v(static_cast<std::size_t>(spec.points()), 0.0);
  // measure^{-1/p} overall; the sign is the product of per-axis halves.
  double amp = std::pow(c.measure(), -1.0 / p);
  int d = spec.dim();
  for_each_cell(spec, c, [&](std::size_t g) {
    auto coords = grid_coords(spec, g);
    double sign = 1.0;
    for (int j = 0; j < d; ++j) {
      std::size_t rel = coords[static_cast<std::size_t>(j)] -
                        (static_cast<std::size_t>(c.pos[j]) << (spec.logres[j] - c.scale));
      std::size_t half = std::size_t{1} << (spec.logres[j] - c.scale - 1);
      if (rel >= half) sign = -sign;
    }
    v[g] = sign * amp;
  });
  return v;
}

std::vector<double> build_smooth(const GridSpec& spec, const DyadicCube& c,
                                 double p, double s,
                                 std::vector<cplx>* spectrum_out) {
  int d = spec.dim();
  std::size_t total = static_cast<std::size_t>(spec.points());
  std::vector<cplx> F(total);
  double scale = pow2(c.scale);
  auto shp = spec.shape();
  // Product of per-axis annular bumps centered at the cube, assembled in
  // frequency so the wavelet is exactly band limited and mean zero.
  std::vector<std::vector<cplx>> axis_prof(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    std::size_t n = shp[static_cast<std::size_t>(j)];
    double cj = (static_cast<double>(c.pos[j]) + 0.5) * c.side();
    axis_prof[static_cast<std::size_t>(j)].resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      double xi = static_cast<double>(freq_of_bin(t, n));
      double mag = mother_bump(std::fabs(xi) / scale, s);
      double ang = -2.0 * std::numbers::pi * xi * cj;
      axis_prof[static_cast<std::size_t>(j)][t] =
          mag * cplx(std::cos(ang), std::sin(ang));
    }
  }
  for (std::size_t g = 0; g < total; ++g) {
    cplx acc{1.0, 0.0};
    std::size_t rest = g;
    for (int j = d - 1; j >= 0; --j) {
      std::size_t n = shp[static_cast<std::size_t>(j)];
      acc *= axis_prof[static_cast<std::size_t>(j)][rest & (n - 1)];
      rest >>= spec.logres[j];
    }
    F[g] = acc;
  }
  std::vector<cplx> spatial = F;
  fft_nd(spatial.data(), shp, 1, true);
  std::vector<double> v(total);
  for (std::size_t g = 0; g < total; ++g) v[g] = spatial[g].real();
  double norm = 0.0;
  double cell = spec.cell_measure();
  for (double x : v) norm += std::pow(std::fabs(x), p) * cell;
  norm = std::pow(norm, 1.0 / p);
  if (norm == 0.0) throw std::logic_error("build_smooth: empty spectrum");
  for (double& x : v) x /= norm;
  if (spectrum_out) {
    spectrum_out->resize(total);
    for (std::size_t g = 0; g < total; ++g) (*spectrum_out)[g] = F[g] / norm;
  }
  return v;
}

double decay_log_const(const GridSpec& spec, const DyadicCube& c,
                       const std::vector<double>& v, double p, double decay,
                       int alpha) {
  double best = -1e300;
  double lm = std::log(c.measure());
  double ls = std::log(c.side());
  for (std::size_t g = 0; g < v.size(); ++g) {
    double a = std::fabs(v[g]);
    if (a == 0.0) continue;
    double dist = dist_to_cube(grid_point(spec, g), c);
    double lc = std::log(a) + lm / p + alpha * ls +
                decay * std::log1p(dist / c.side());
    best = std::max(best, lc);
  }
  return best;
}

}  // namespace

LacunaryFamily build_lacunary_family(const GridSpec& spec, const Collection& c,
                                     const std::string& kind, double p,
                                     double decay, double mother_scale) {
  if (kind != "haar" && kind != "smooth-wavelet")
    throw std::invalid_argument("build_lacunary_family: unknown kind " + kind);
  if (!(p > 0.0)) throw std::invalid_argument("build_lacunary_family: p > 0 required");
  if (c.dim != spec.dim())
    throw std::invalid_argument("build_lacunary_family: dimension mismatch");

  LacunaryFamily fam;
  fam.spec = spec;
  fam.kind = kind;
  fam.p = p;
  fam.decay = decay;
  fam.mother_scale = mother_scale;
  fam.cubes = Collection(c.dim, c.cap_scale);
  fam.alpha_max = (kind == "smooth-wavelet" && spec.dim() == 1) ? 10 : 0;
  fam.log_decay_consts.assign(static_cast<std::size_t>(fam.alpha_max) + 1, -1e300);

  std::vector<std::vector<cplx>> spectra;
  for (const auto& cube : c.cubes) {
    bool ok = cube_on_grid(spec, cube);
    if (ok && kind == "haar") {
      for (int j = 0; j < spec.dim(); ++j)
        if (cube.scale > spec.logres[j] - 1) ok = false;
    }
    if (ok && kind == "smooth-wavelet") {
      for (int j = 0; j < spec.dim(); ++j)
        if (4.0 * mother_scale * pow2(cube.scale) > pow2(spec.logres[j] - 1)) ok = false;
    }
    if (!ok) {
      fam.below_resolution.push_back(cube);
      continue;
    }
    fam.cubes.cubes.push_back(cube);
    if (kind == "haar") {
      fam.values.push_back(build_haar(spec, cube, p));
      spectra.emplace_back();
    } else {
      std::vector<cplx> spec_out;
      fam.values.push_back(build_smooth(spec, cube, p, mother_scale, &spec_out));
      spectra.push_back(std::move(spec_out));
    }
  }

  auto shp = spec.shape();
  for (std::size_t i = 0; i < fam.values.size(); ++i) {
    const auto& cube = fam.cubes.cubes[i];
    fam.log_decay_consts[0] = std::max(
        fam.log_decay_consts[0],
        decay_log_const(spec, cube, fam.values[i], p, decay, 0));
    for (int a = 1; a <= fam.alpha_max; ++a) {
      // Spectral differentiation: exact for band-limited wavelets.
      std::vector<cplx> D = spectra[i];
      std::size_t n = shp[0];
      for (std::size_t t = 0; t < n; ++t) {
        double xi = static_cast<double>(freq_of_bin(t, n));
        D[t] *= std::pow(cplx(0.0, 2.0 * std::numbers::pi * xi), a);
      }
      fft_nd(D.data(), shp, 1, true);
      std::vector<double> dv(D.size());
      for (std::size_t g = 0; g < D.size(); ++g) dv[g] = D[g].real();
      fam.log_decay_consts[static_cast<std::size_t>(a)] = std::max(
          fam.log_decay_consts[static_cast<std::size_t>(a)],
          decay_log_const(spec, cube, dv, p, decay, a));
    }
  }
  return fam;
}

bool in_dilate(const GridSpec& spec, const DyadicCube& c, int l,
               const std::vector<double>& x) {
  (void)spec;
  double s = c.side();
  double margin = (pow2(l) - 1.0) * s / 2.0;
  for (int j = 0; j < c.dim; ++j) {
    double rel = x[static_cast<std::size_t>(j)] - c.pos[j] * s;
    rel -= std::floor(rel);
    if (rel < s) continue;
    double d = std::min(1.0 - rel, rel - s);
    if (d > margin) return false;
  }
  return true;
}

SpatialSplit spatial_split(const LacunaryFamily& fam, const DyadicCube& c,
                           double M, int lmax) {
  const auto& phi = fam.phi(c);
  const GridSpec& spec = fam.spec;
  SpatialSplit sp;
  sp.M = M;
  sp.lmax = lmax;
  sp.pieces.assign(static_cast<std::size_t>(lmax) + 1,
                   std::vector<double>(phi.size(), 0.0));
  std::vector<char> claimed(phi.size(), 0);
  for (int l = 0; l <= lmax; ++l) {
    double amp = std::pow(2.0, M * l);
    for (std::size_t g = 0; g < phi.size(); ++g) {
      if (claimed[g]) continue;
      if (in_dilate(spec, c, l, grid_point(spec, g))) {
        sp.pieces[static_cast<std::size_t>(l)][g] = amp * phi[g];
        claimed[g] = 1;
      }
    }
  }
  double tail = 0.0;
  for (std::size_t g = 0; g < phi.size(); ++g)
    if (!claimed[g]) tail = std::max(tail, std::fabs(phi[g]));
  sp.tail_sup = tail;
  return sp;
}

}  // namespace lplab
