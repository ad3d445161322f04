#include "lplab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lplab/fft.hpp"
#include "lplab/norms.hpp"

namespace lplab {

namespace {

double pow2(int e) { return std::ldexp(1.0, e); }

// All cubes of the given scale, ascending (scale, pos lex) order.
std::vector<DyadicCube> cubes_at_scale(int dim, int scale) {
  std::vector<DyadicCube> out;
  std::uint64_t count = std::uint64_t{1} << (scale * dim);
  out.reserve(count);
  std::vector<std::uint32_t> pos(dim, 0);
  std::uint32_t side = std::uint32_t{1} << scale;
  for (std::uint64_t i = 0; i < count; ++i) {
    out.emplace_back(dim, scale, pos);
    for (int j = dim - 1; j >= 0; --j) {
      if (++pos[j] < side) break;
      pos[j] = 0;
    }
  }
  return out;
}

double sup_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

CoefficientMap analyze(const GridFunction& f, const LacunaryFamily& fam) {
  if (!(f.spec() == fam.spec))
    throw std::invalid_argument("analyze: function and family live on different grids");
  const double cell = f.spec().cell_measure();
  const std::size_t V = f.vcount();
  const std::size_t G = f.gcount();
  CoefficientMap out;
  out.vshape = f.vshape();
  std::vector<double> re(G), im(G);
  for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
    const std::vector<double>& phi = fam.values[i];
    std::vector<cplx> a(V);
    for (std::size_t v = 0; v < V; ++v) {
      // phi is real, so the pairing needs no conjugation
      for (std::size_t g = 0; g < G; ++g) {
        cplx z = f.at(g, v) * phi[g];
        re[g] = z.real();
        im[g] = z.imag();
      }
      a[v] = cplx(pairwise_sum(re.data(), G), pairwise_sum(im.data(), G)) * cell;
    }
    out.a.emplace(fam.cubes.cubes[i], std::move(a));
  }
  return out;
}

GridFunction synthesize(const GridSpec& spec, const CoefficientMap& coeffs,
                        const LacunaryFamily& fam) {
  if (!(spec == fam.spec))
    throw std::invalid_argument("synthesize: grid mismatch with the family");
  GridFunction out(spec, coeffs.vshape);
  const std::size_t V = out.vcount();
  const std::size_t G = out.gcount();
  for (const auto& [c, a] : coeffs.a) {
    int idx = fam.index_of(c);
    if (idx < 0)
      throw std::invalid_argument("synthesize: no family member for cube " + c.str());
    const std::vector<double>& phi = fam.values[idx];
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t v = 0; v < V; ++v) out.at(g, v) += a[v] * phi[g];
  }
  return out;
}

SamplePoints choose_sample_points(const GridFunction& f, const FilterBank& bank,
                                  int N) {
  if (N < 0) throw std::invalid_argument("choose_sample_points: N must be >= 0");
  const GridSpec& spec = f.spec();
  if (bank.axis_begin != 0 || bank.axis_end != spec.dim())
    throw std::invalid_argument("choose_sample_points: bank must cover every axis");
  SamplePoints out;
  out.N = N;
  out.points.assign(f.vcount(), {});
  const std::size_t V = f.vcount();
  for (int j = bank.kmin; j <= bank.kmax; ++j) {
    if (j + N > spec.min_logres()) continue;
    out.bands.push_back(j);
    GridFunction g = band_convolve(f, bank, j);
    for (const DyadicCube& c : cubes_at_scale(spec.dim(), j + N)) {
      std::vector<std::size_t> arg(V, 0);
      std::vector<double> best(V, std::numeric_limits<double>::infinity());
      // cells arrive in ascending grid order, so strict < keeps the
      // smallest coordinate on ties
      for_each_cell(spec, c, [&](std::size_t cg) {
        for (std::size_t v = 0; v < V; ++v) {
          double mag = std::abs(g.at(cg, v));
          if (mag < best[v]) {
            best[v] = mag;
            arg[v] = cg;
          }
        }
      });
      for (std::size_t v = 0; v < V; ++v) out.points[v].emplace(c, arg[v]);
    }
  }
  return out;
}

namespace {

// One band's re-expansion machinery on a 1-d grid: the plateau
// multiplier (1 on the band's support), the base interval profile
// phi^1_{J0} in frequency, and the sampling lattice.
struct BandMachine {
  std::size_t n = 0;
  int j0 = 0;
  int k = 0;                // interval scale j0 + N
  std::size_t stride = 0;   // cells per interval
  std::vector<double> plateau;
  std::vector<cplx> phi1_hat;
  std::vector<DyadicCube> cubes;
  std::vector<std::size_t> sample;  // x_I per cube, same order
};

BandMachine make_band_machine(const GridSpec& spec, const FilterBank& bank,
                              int j0, int N, const SamplePoints& pts) {
  if (spec.dim() != 1)
    throw std::invalid_argument("fj_reconstruct: one-dimensional grids only");
  if (j0 < bank.kmin || j0 > bank.kmax)
    throw std::invalid_argument("fj_reconstruct: band outside the bank");
  if (pts.N != N)
    throw std::invalid_argument("fj_reconstruct: sample points built for a different N");
  if (std::find(pts.bands.begin(), pts.bands.end(), j0) == pts.bands.end())
    throw std::invalid_argument("fj_reconstruct: no sample points for this band");
  BandMachine m;
  m.n = spec.axis_size(0);
  m.j0 = j0;
  m.k = j0 + N;
  m.stride = m.n >> m.k;

  // Plateau: 1 on the support of psi_{j0}, vanishing at 0, compactly
  // supported one octave beyond the band on each side.
  m.plateau.resize(m.n);
  for (std::size_t t = 0; t < m.n; ++t) {
    double u = std::abs(static_cast<double>(freq_of_bin(t, m.n)));
    double p;
    if (bank.kmin == bank.kmax) {
      p = u == 0.0 ? 0.0 : 1.0;
    } else if (j0 == bank.kmin) {
      p = u == 0.0 ? 0.0 : 1.0 - ramp(u / pow2(j0 + 1));
    } else if (j0 == bank.kmax) {
      p = ramp(u / pow2(j0 - 2));
    } else {
      p = ramp(u / pow2(j0 - 2)) - ramp(u / pow2(j0 + 1));
    }
    m.plateau[t] = p;
  }

  // phi^1 of the corner interval [0, 2^-k); translates come from combs.
  std::vector<cplx> ind(m.n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < m.stride; ++i) ind[i] = 1.0;
  fft_line(ind.data(), m.n, false);
  m.phi1_hat.resize(m.n);
  for (std::size_t t = 0; t < m.n; ++t) m.phi1_hat[t] = ind[t] * m.plateau[t];

  m.cubes = cubes_at_scale(1, m.k);
  m.sample.reserve(m.cubes.size());
  const auto& pmap = pts.points.at(0);
  for (const DyadicCube& c : m.cubes) m.sample.push_back(pmap.at(c));
  return m;
}

// sum_J v_J phi^1_J for values attached to the intervals, via one comb.
std::vector<cplx> comb_synth(const BandMachine& m, const std::vector<cplx>& v) {
  std::vector<cplx> comb(m.n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < m.cubes.size(); ++i)
    comb[static_cast<std::size_t>(m.cubes[i].pos[0]) * m.stride] = v[i];
  fft_line(comb.data(), m.n, false);
  for (std::size_t t = 0; t < m.n; ++t) comb[t] *= m.phi1_hat[t];
  fft_line(comb.data(), m.n, true);
  return comb;
}

// T[g] = g * plateau - sum_J g(x_J) phi^1_J, three transforms total.
std::vector<cplx> apply_T(const BandMachine& m, const std::vector<cplx>& g) {
  std::vector<cplx> comb(m.n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < m.cubes.size(); ++i)
    comb[static_cast<std::size_t>(m.cubes[i].pos[0]) * m.stride] = g[m.sample[i]];
  std::vector<cplx> G = g;
  fft_line(G.data(), m.n, false);
  fft_line(comb.data(), m.n, false);
  for (std::size_t t = 0; t < m.n; ++t)
    G[t] = G[t] * m.plateau[t] - comb[t] * m.phi1_hat[t];
  fft_line(G.data(), m.n, true);
  return G;
}

}  // namespace

FJResult fj_reconstruct(const GridFunction& f, const FilterBank& bank, int N,
                        const SamplePoints& pts, int lmax, int band) {
  if (f.vcount() != 1)
    throw std::invalid_argument("fj_reconstruct: scalar functions only");
  if (lmax < 1) throw std::invalid_argument("fj_reconstruct: lmax must be >= 1");
  int j0 = band < 0 ? bank.kmin : band;
  BandMachine m = make_band_machine(f.spec(), bank, j0, N, pts);

  std::vector<cplx> g0 = band_convolve(f, bank, j0).values();

  FJResult res;
  res.band = j0;
  res.N = N;
  res.lmax = lmax;

  std::vector<cplx> cvals(m.cubes.size());
  for (std::size_t i = 0; i < m.cubes.size(); ++i) {
    cvals[i] = g0[m.sample[i]];
    res.coeff.emplace(m.cubes[i], cvals[i]);
  }

  std::vector<cplx> rest = apply_T(m, g0);
  res.residual_sup.push_back(sup_abs(rest));
  for (int l = 2; l <= lmax; ++l) {
    rest = apply_T(m, rest);
    res.residual_sup.push_back(sup_abs(rest));
  }

  // psi_I = phi^1_I + ... + phi^lmax_I, iterated per interval.
  std::vector<std::vector<cplx>> psis;
  psis.reserve(m.cubes.size());
  for (std::size_t i = 0; i < m.cubes.size(); ++i) {
    std::vector<cplx> one(m.cubes.size(), cplx(0.0, 0.0));
    one[i] = 1.0;
    std::vector<cplx> phi = comb_synth(m, one);
    std::vector<cplx> acc = phi;
    for (int l = 2; l <= lmax; ++l) {
      phi = apply_T(m, phi);
      for (std::size_t x = 0; x < m.n; ++x) acc[x] += phi[x];
    }
    psis.push_back(std::move(acc));
  }
  for (std::size_t i = 0; i < m.cubes.size(); ++i) {
    std::vector<double> real_psi(m.n);
    for (std::size_t x = 0; x < m.n; ++x) real_psi[x] = psis[i][x].real();
    res.psi.emplace(m.cubes[i], std::move(real_psi));
  }

  std::vector<cplx> recon(m.n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < m.cubes.size(); ++i)
    for (std::size_t x = 0; x < m.n; ++x) recon[x] += cvals[i] * psis[i][x];
  double err = 0.0;
  for (std::size_t x = 0; x < m.n; ++x)
    err = std::max(err, std::abs(g0[x] - recon[x]));
  res.recon_error = err;

  // Step ratios count only while the residual sits above the fp floor;
  // below it, rounding noise dominates and the geometry is gone.
  res.floor = 1e-13 * sup_abs(g0);
  double ratio = 0.0;
  for (std::size_t i = 0; i + 1 < res.residual_sup.size(); ++i)
    if (res.residual_sup[i] > res.floor)
      ratio = std::max(ratio, res.residual_sup[i + 1] / res.residual_sup[i]);
  res.ratio = ratio;
  res.converged = ratio <= 0.5;
  res.first_residual_scale =
      ratio > 0.0 ? res.residual_sup.front() / ratio : res.residual_sup.front();
  return res;
}

FJPipelineReport fj_pipeline_check(const GridFunction& f, const FilterBank& bank,
                                   int N, int lmax, double p) {
  if (f.spec().dim() != 1 || f.vcount() != 1)
    throw std::invalid_argument("fj_pipeline_check: 1-d scalar functions only");
  if (lmax < 1) throw std::invalid_argument("fj_pipeline_check: lmax must be >= 1");
  const GridSpec& spec = f.spec();
  const std::size_t n = spec.axis_size(0);
  SamplePoints pts = choose_sample_points(f, bank, N);

  FJPipelineReport rep;
  rep.p = p;
  rep.bands_used = static_cast<int>(pts.bands.size());
  rep.pointwise_ok = true;

  std::vector<cplx> expansion(n, cplx(0.0, 0.0));
  std::vector<double> sq(n, 0.0);
  CoefficientMap coeffs;
  Collection used(1);
  used.cap_scale = 0;

  for (int j : pts.bands) {
    BandMachine m = make_band_machine(spec, bank, j, N, pts);
    std::vector<cplx> g0 = band_convolve(f, bank, j).values();
    double tol = 1e-12 * sup_abs(g0);

    std::vector<cplx> cvals(m.cubes.size());
    for (std::size_t i = 0; i < m.cubes.size(); ++i) {
      cvals[i] = g0[m.sample[i]];
      coeffs.a.emplace(m.cubes[i], std::vector<cplx>{cvals[i]});
      used.insert(m.cubes[i]);
    }

    // |c_I| = inf_I |f * psi_j| must hold sample by sample
    for (std::size_t i = 0; i < m.cubes.size(); ++i) {
      double lo = std::numeric_limits<double>::infinity();
      for_each_cell(spec, m.cubes[i],
                    [&](std::size_t cg) { lo = std::min(lo, std::abs(g0[cg])); });
      if (std::abs(cvals[i]) > lo + tol) rep.pointwise_ok = false;
    }

    // aggregate re-expansion: sum_I c_I psi_I = sum_l T^{l-1}[A_1]
    std::vector<cplx> a = comb_synth(m, cvals);
    std::vector<cplx> acc = a;
    for (int l = 2; l <= lmax; ++l) {
      a = apply_T(m, a);
      for (std::size_t x = 0; x < n; ++x) acc[x] += a[x];
    }
    for (std::size_t x = 0; x < n; ++x) {
      expansion[x] += acc[x];
      sq[x] += std::norm(g0[x]);
      rep.recon_error = std::max(rep.recon_error, std::abs(g0[x] - acc[x]));
    }
  }

  GridFunction exp_f(spec);
  exp_f.values() = expansion;
  rep.norm_expansion = lp_norm(exp_f, p);

  if (!coeffs.a.empty())
    rep.norm_discrete =
        lp_norm(discrete_square_function(spec, coeffs, used).field, p);

  RealField sff(spec);
  for (std::size_t x = 0; x < n; ++x) sff.at(x) = std::sqrt(sq[x]);
  rep.norm_square = lp_norm(sff, p);
  return rep;
}

}  // namespace lplab
