#include "lplab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lplab {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

void validate_norm_spec(const MixedNormSpec& ns, const GridSpec& spec,
                        const std::vector<std::size_t>& vshape) {
  if (static_cast<int>(ns.p.size()) != spec.dim())
    throw std::invalid_argument("MixedNormSpec: one exponent per axis required");
  for (double e : ns.p)
    if (!(e > 0.0) || !std::isfinite(e))
      throw std::invalid_argument("MixedNormSpec: exponents must lie in (0,inf)");
  for (double e : ns.q)
    if (!(e > 0.0) || !std::isfinite(e))
      throw std::invalid_argument("MixedNormSpec: exponents must lie in (0,inf)");
  if (ns.q.size() != vshape.size())
    throw std::invalid_argument("MixedNormSpec: one exponent per vector dimension");
  std::size_t a = 0;
  for (int nb : spec.grouping) {
    for (int j = 1; j < nb; ++j)
      if (ns.p[a + static_cast<std::size_t>(j)] != ns.p[a])
        throw std::invalid_argument(
            "MixedNormSpec: exponents must be constant on grouping blocks");
    a += static_cast<std::size_t>(nb);
  }
}

namespace {

// One reduction step: collapse the trailing `t` elements of each row with
// exponent e.  weights has size t (or empty for weight 1); wfield, when
// non-null, supplies a per-element extra weight aligned with the input.
std::vector<double> reduce_tail(const std::vector<double>& in, std::size_t t,
                                double e, double wconst,
                                const std::vector<double>* wfield) {
  std::size_t rows = in.size() / t;
  std::vector<double> out(rows);
  std::vector<double> terms(t);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * t;
    for (std::size_t i = 0; i < t; ++i) {
      double w = wconst;
      if (wfield) w *= (*wfield)[r * t + i];
      terms[i] = std::pow(std::fabs(src[i]), e) * w;
    }
    out[r] = std::pow(pairwise_sum(terms.data(), t), 1.0 / e);
  }
  return out;
}

double mixed_norm_impl(const GridSpec& spec,
                       const std::vector<std::size_t>& vshape,
                       std::vector<double> work, const MixedNormSpec& ns,
                       const RealField* w) {
  validate_norm_spec(ns, spec, vshape);
  if (w) {
    if (!(w->spec() == spec) || w->vcount() != 1)
      throw std::invalid_argument("mixed_norm: weight must be scalar on the same grid");
  }
  // Vector dimensions, innermost exponent first (counting measure).
  for (std::size_t j = vshape.size(); j-- > 0;)
    work = reduce_tail(work, vshape[j], ns.q[j], 1.0, nullptr);
  // Spatial blocks, last block first.  The innermost block carries the
  // pointwise weight when present.
  int M = static_cast<int>(spec.grouping.size());
  int axis_end = spec.dim();
  for (int b = M - 1; b >= 0; --b) {
    int axis_begin = axis_end - spec.grouping[static_cast<std::size_t>(b)];
    std::size_t t = 1;
    for (int j = axis_begin; j < axis_end; ++j) t *= spec.axis_size(j);
    double cell = spec.cell_measure_axes(axis_begin, axis_end);
    double e = ns.p[static_cast<std::size_t>(axis_begin)];
    const std::vector<double>* wf =
        (w && b == M - 1) ? &w->values() : nullptr;
    work = reduce_tail(work, t, e, cell, wf);
    axis_end = axis_begin;
  }
  return work[0];
}

std::vector<double> abs_values(const RealField& f) {
  std::vector<double> v(f.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::fabs(f.values()[i]);
  return v;
}

std::vector<double> abs_values(const GridFunction& f) {
  std::vector<double> v(f.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f.values()[i]);
  return v;
}

double weak_impl(std::vector<double> mags, double p, double cell) {
  if (!(p > 0.0)) throw std::invalid_argument("weak_quasinorm: p > 0 required");
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double best = 0.0;
  std::size_t i = 0;
  while (i < mags.size() && mags[i] > 0.0) {
    std::size_t j = i;
    while (j + 1 < mags.size() && mags[j + 1] == mags[i]) ++j;
    double measure = static_cast<double>(j + 1) * cell;
    best = std::max(best, mags[i] * std::pow(measure, 1.0 / p));
    i = j + 1;
  }
  return best;
}

}  // namespace

double mixed_norm(const RealField& f, const MixedNormSpec& ns) {
  return mixed_norm_impl(f.spec(), f.vshape(), abs_values(f), ns, nullptr);
}

double mixed_norm(const GridFunction& f, const MixedNormSpec& ns) {
  return mixed_norm_impl(f.spec(), f.vshape(), abs_values(f), ns, nullptr);
}

double mixed_norm_weighted(const RealField& f, const MixedNormSpec& ns,
                           const RealField& w) {
  return mixed_norm_impl(f.spec(), f.vshape(), abs_values(f), ns, &w);
}

double mixed_norm_weighted(const GridFunction& f, const MixedNormSpec& ns,
                           const RealField& w) {
  return mixed_norm_impl(f.spec(), f.vshape(), abs_values(f), ns, &w);
}

namespace {

double lp_impl(std::vector<double> v, double p, double cell,
               const RealField* w, std::size_t vcount) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("lp_norm: p in (0,inf) required");
  for (std::size_t i = 0; i < v.size(); ++i) {
    double ww = w ? w->values()[i / vcount] : 1.0;
    v[i] = std::pow(v[i], p) * cell * ww;
  }
  return std::pow(pairwise_sum(v), 1.0 / p);
}

}  // namespace

double lp_norm(const RealField& f, double p) {
  return lp_impl(abs_values(f), p, f.spec().cell_measure(), nullptr, f.vcount());
}

double lp_norm(const GridFunction& f, double p) {
  return lp_impl(abs_values(f), p, f.spec().cell_measure(), nullptr, f.vcount());
}

double lp_norm_weighted(const RealField& f, double p, const RealField& w) {
  if (!(w.spec() == f.spec()) || w.vcount() != 1)
    throw std::invalid_argument("lp_norm_weighted: weight shape mismatch");
  return lp_impl(abs_values(f), p, f.spec().cell_measure(), &w, f.vcount());
}

double lp_norm_weighted(const GridFunction& f, double p, const RealField& w) {
  if (!(w.spec() == f.spec()) || w.vcount() != 1)
    throw std::invalid_argument("lp_norm_weighted: weight shape mismatch");
  return lp_impl(abs_values(f), p, f.spec().cell_measure(), &w, f.vcount());
}

double weak_quasinorm(const RealField& f, double p) {
  if (f.vcount() != 1)
    throw std::invalid_argument("weak_quasinorm: scalar fields only");
  return weak_impl(abs_values(f), p, f.spec().cell_measure());
}

double weak_quasinorm(const GridFunction& f, double p) {
  if (f.vcount() != 1)
    throw std::invalid_argument("weak_quasinorm: scalar fields only");
  return weak_impl(abs_values(f), p, f.spec().cell_measure());
}

RealField pointwise_q_norm(const RealField& f, const std::vector<double>& q) {
  if (q.size() != f.vshape().size())
    throw std::invalid_argument("pointwise_q_norm: one exponent per vector dimension");
  RealField out(f.spec());
  if (f.vshape().empty()) {
    for (std::size_t g = 0; g < f.gcount(); ++g) out.at(g) = std::fabs(f.at(g));
    return out;
  }
  std::vector<double> work(f.vcount());
  auto vshape = f.vshape();
  for (std::size_t g = 0; g < f.gcount(); ++g) {
    std::size_t n = f.vcount();
    for (std::size_t v = 0; v < n; ++v) work[v] = std::fabs(f.at(g, v));
    std::vector<double> cur(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t j = vshape.size(); j-- > 0;) {
      std::size_t t = vshape[j];
      std::size_t rows = cur.size() / t;
      std::vector<double> nxt(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < t; ++i)
          s += std::pow(cur[r * t + i], q[j]);
        nxt[r] = std::pow(s, 1.0 / q[j]);
      }
      cur = std::move(nxt);
    }
    out.at(g) = cur[0];
  }
  return out;
}

double sup_norm(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v));
  return m;
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace lplab
