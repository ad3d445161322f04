#include "lplab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "lplab/norms.hpp"

namespace lplab {

namespace {

// Per-axis torus offset wrapped to [-1/2, 1/2).
double torus_diff(double x, double c) {
  double r = x - c;
  r -= std::floor(r + 0.5);
  return r;
}

std::vector<double> default_center(const GridSpec& spec) {
  std::vector<double> c(spec.dim());
  for (int j = 0; j < spec.dim(); ++j)
    c[j] = 0.5 + std::ldexp(1.0, -spec.logres[j] - 1);
  return c;
}

void check_center(const GridSpec& spec, std::vector<double>& center) {
  if (center.empty()) center = default_center(spec);
  if (static_cast<int>(center.size()) != spec.dim())
    throw std::invalid_argument("weight center has the wrong dimension");
}

// --- line plumbing over one axis of a scalar field ------------------

struct LineWalk {
  std::size_t outer, n, inner;
};

LineWalk line_walk(const std::vector<std::size_t>& shape, int axis) {
  LineWalk w{1, shape[axis], 1};
  for (int j = 0; j < axis; ++j) w.outer *= shape[j];
  for (int j = axis + 1; j < static_cast<int>(shape.size()); ++j)
    w.inner *= shape[j];
  return w;
}

// Circular window sum of length m, indexed by window start.
void win_sum(std::vector<double>& line, std::size_t m, std::vector<double>& prefix) {
  const std::size_t n = line.size();
  prefix.assign(2 * n + 1, 0.0);
  for (std::size_t i = 0; i < 2 * n; ++i)
    prefix[i + 1] = prefix[i] + line[i % n];
  for (std::size_t t = 0; t < n; ++t) line[t] = prefix[t + m] - prefix[t];
}

// Circular window min of length m, indexed by window start.
void win_min(std::vector<double>& line, std::size_t m, std::deque<std::size_t>& dq) {
  const std::size_t n = line.size();
  std::vector<double> out(n);
  dq.clear();
  for (std::size_t i = 0; i < n + m - 1; ++i) {
    double v = line[i % n];
    while (!dq.empty() && line[dq.back() % n] >= v) dq.pop_back();
    dq.push_back(i);
    if (i + 1 >= m) {
      std::size_t start = i + 1 - m;
      while (dq.front() < start) dq.pop_front();
      out[start % n] = line[dq.front() % n];
    }
  }
  line = std::move(out);
}

// From start-indexed window values to point-indexed cover maxima:
// out[x] = max over starts y with x in [y, y+m).
void cover_max(std::vector<double>& line, std::size_t m, std::deque<std::size_t>& dq) {
  const std::size_t n = line.size();
  std::vector<double> out(n);
  dq.clear();
  // window of starts [x-m+1, x], swept over the doubled index range
  for (std::size_t i = 0; i < 2 * n; ++i) {
    double v = line[i % n];
    while (!dq.empty() && line[dq.back() % n] <= v) dq.pop_back();
    dq.push_back(i);
    if (i + 1 >= m) {
      while (dq.front() + m <= i) dq.pop_front();
      if (i >= n) out[i - n] = line[dq.front() % n];
    }
  }
  line = std::move(out);
}

enum class LineOp { Sum, Min, CoverMax };

void apply_axis(std::vector<double>& v, const std::vector<std::size_t>& shape,
                int axis, std::size_t m, LineOp op) {
  LineWalk w = line_walk(shape, axis);
  std::vector<double> line(w.n), prefix;
  std::deque<std::size_t> dq;
  for (std::size_t o = 0; o < w.outer; ++o)
    for (std::size_t i = 0; i < w.inner; ++i) {
      std::size_t base = o * w.n * w.inner + i;
      for (std::size_t t = 0; t < w.n; ++t) line[t] = v[base + t * w.inner];
      switch (op) {
        case LineOp::Sum: win_sum(line, m, prefix); break;
        case LineOp::Min: win_min(line, m, dq); break;
        case LineOp::CoverMax: cover_max(line, m, dq); break;
      }
      for (std::size_t t = 0; t < w.n; ++t) v[base + t * w.inner] = line[t];
    }
}

// Odometer over the window shapes of one family: cells[j] = 2^{t_j}.
// "cube" walks equal physical side 2^-s, "rect" walks every combination.
struct ShapeSet {
  std::vector<std::vector<std::size_t>> cells;   // per shape, per axis
  std::vector<std::vector<int>> octaves;         // physical s_j
};

ShapeSet window_shapes(const GridSpec& spec, const std::string& window) {
  ShapeSet out;
  int d = spec.dim();
  if (window == "cube") {
    for (int s = 0; s <= spec.min_logres(); ++s) {
      std::vector<std::size_t> m(d);
      for (int j = 0; j < d; ++j) m[j] = std::size_t{1} << (spec.logres[j] - s);
      out.cells.push_back(std::move(m));
      out.octaves.push_back(std::vector<int>(d, s));
    }
  } else if (window == "rect") {
    std::vector<int> t(d, 0);
    while (true) {
      std::vector<std::size_t> m(d);
      std::vector<int> s(d);
      for (int j = 0; j < d; ++j) {
        m[j] = std::size_t{1} << t[j];
        s[j] = spec.logres[j] - t[j];
      }
      out.cells.push_back(std::move(m));
      out.octaves.push_back(std::move(s));
      int j = d - 1;
      while (j >= 0) {
        if (++t[j] <= spec.logres[j]) break;
        t[j] = 0;
        --j;
      }
      if (j < 0) break;
    }
  } else {
    throw std::invalid_argument("unknown window family: " + window);
  }
  return out;
}

double ap_value_impl(const RealField& w, double p, const std::string& window,
                     std::vector<int>* arg_scale, std::vector<std::size_t>* arg_pos) {
  const GridSpec& spec = w.spec();
  const auto shape = spec.shape();
  const std::size_t G = w.gcount();
  ShapeSet shapes = window_shapes(spec, window);

  std::vector<double> sigma;
  if (p > 1.0) {
    sigma.resize(G);
    double ex = -1.0 / (p - 1.0);
    for (std::size_t g = 0; g < G; ++g) sigma[g] = std::pow(w.at(g), ex);
  }

  double best = 0.0;
  for (std::size_t si = 0; si < shapes.cells.size(); ++si) {
    const auto& m = shapes.cells[si];
    double count = 1.0;
    for (std::size_t mj : m) count *= static_cast<double>(mj);

    std::vector<double> sw = w.values();
    for (int j = 0; j < spec.dim(); ++j) apply_axis(sw, shape, j, m[j], LineOp::Sum);
    std::vector<double> sother;
    if (p > 1.0) {
      sother = sigma;
      for (int j = 0; j < spec.dim(); ++j)
        apply_axis(sother, shape, j, m[j], LineOp::Sum);
    } else {
      sother = w.values();
      for (int j = 0; j < spec.dim(); ++j)
        apply_axis(sother, shape, j, m[j], LineOp::Min);
    }

    for (std::size_t g = 0; g < G; ++g) {
      double val = p > 1.0
                       ? (sw[g] / count) * std::pow(sother[g] / count, p - 1.0)
                       : (sw[g] / count) / sother[g];
      if (val > best) {
        best = val;
        if (arg_scale) *arg_scale = shapes.octaves[si];
        if (arg_pos) {
          arg_pos->assign(spec.dim(), 0);
          std::size_t rem = g;
          for (int j = spec.dim() - 1; j >= 0; --j) {
            (*arg_pos)[j] = rem % spec.axis_size(j);
            rem /= spec.axis_size(j);
          }
        }
      }
    }
  }
  return best;
}

double rh_value_impl(const RealField& w, double r, const std::string& window) {
  const GridSpec& spec = w.spec();
  const auto shape = spec.shape();
  const std::size_t G = w.gcount();
  ShapeSet shapes = window_shapes(spec, window);

  std::vector<double> wr(G);
  for (std::size_t g = 0; g < G; ++g) wr[g] = std::pow(w.at(g), r);

  double best = 0.0;
  for (const auto& m : shapes.cells) {
    double count = 1.0;
    for (std::size_t mj : m) count *= static_cast<double>(mj);
    std::vector<double> sw = w.values();
    std::vector<double> sr = wr;
    for (int j = 0; j < spec.dim(); ++j) {
      apply_axis(sw, shape, j, m[j], LineOp::Sum);
      apply_axis(sr, shape, j, m[j], LineOp::Sum);
    }
    for (std::size_t g = 0; g < G; ++g) {
      double val = std::pow(sr[g] / count, 1.0 / r) / (sw[g] / count);
      best = std::max(best, val);
    }
  }
  return best;
}

// Coarsening gap for the stability comparison: enough octaves to expose
// boundary-case growth, but never below the minimum resolution.
int stability_gap(const GridSpec& spec) {
  return std::min(3, spec.min_logres() - 2);
}

}  // namespace

double Weight::total() const {
  std::vector<double> v = w.values();
  return pairwise_sum(v) * w.spec().cell_measure();
}

Weight make_power_weight(const GridSpec& spec, double a, std::vector<double> center) {
  bool defaulted = center.empty();
  check_center(spec, center);
  Weight out;
  out.kind = "power";
  out.a = a;
  out.center = center;
  out.default_center = defaulted;
  out.w = RealField(spec);
  const std::size_t G = out.w.gcount();
  for (std::size_t g = 0; g < G; ++g) {
    std::vector<double> x = grid_point(spec, g);
    double r2 = 0.0;
    for (int j = 0; j < spec.dim(); ++j) {
      double d = torus_diff(x[j], center[j]);
      r2 += d * d;
    }
    out.w.at(g) = std::pow(std::sqrt(r2), a);
  }
  if (!out.w.all_finite())
    throw std::invalid_argument("make_power_weight: singular sample, move the center");
  return out;
}

Weight make_product_weight(const GridSpec& spec, std::vector<double> axis_a,
                           std::vector<double> center) {
  if (static_cast<int>(axis_a.size()) != spec.dim())
    throw std::invalid_argument("make_product_weight: one exponent per axis");
  bool defaulted = center.empty();
  check_center(spec, center);
  Weight out;
  out.kind = "product";
  out.axis_a = axis_a;
  out.center = center;
  out.default_center = defaulted;
  out.w = RealField(spec);
  const std::size_t G = out.w.gcount();
  for (std::size_t g = 0; g < G; ++g) {
    std::vector<double> x = grid_point(spec, g);
    double v = 1.0;
    for (int j = 0; j < spec.dim(); ++j)
      v *= std::pow(std::abs(torus_diff(x[j], center[j])), axis_a[j]);
    out.w.at(g) = v;
  }
  if (!out.w.all_finite())
    throw std::invalid_argument("make_product_weight: singular sample, move the center");
  return out;
}

Weight make_custom_weight(RealField w) {
  if (w.vcount() != 1)
    throw std::invalid_argument("make_custom_weight: scalar fields only");
  for (double v : w.values())
    if (!(v > 0.0))
      throw std::invalid_argument("make_custom_weight: weight must be positive");
  Weight out;
  out.kind = "custom";
  out.w = std::move(w);
  return out;
}

Weight resample_weight(const Weight& w, const GridSpec& spec) {
  if (spec.dim() != w.w.spec().dim())
    throw std::invalid_argument("resample_weight: dimension mismatch");
  std::vector<double> center = w.default_center ? std::vector<double>{} : w.center;
  if (w.kind == "power") return make_power_weight(spec, w.a, center);
  if (w.kind == "product") return make_product_weight(spec, w.axis_a, center);
  // custom: block average onto a coarser grid
  const GridSpec& fine = w.w.spec();
  std::vector<int> shift(fine.dim());
  for (int j = 0; j < fine.dim(); ++j) {
    shift[j] = fine.logres[j] - spec.logres[j];
    if (shift[j] < 0)
      throw std::invalid_argument("resample_weight: custom weights only coarsen");
  }
  RealField coarse(spec);
  const std::size_t G = w.w.gcount();
  for (std::size_t g = 0; g < G; ++g) {
    std::size_t rem = g, cg = 0;
    for (int j = fine.dim() - 1, mul = 1; j >= 0; --j) {
      std::size_t coord = rem % fine.axis_size(j);
      rem /= fine.axis_size(j);
      cg += (coord >> shift[j]) * mul;
      mul *= static_cast<int>(spec.axis_size(j));
    }
    coarse.at(cg) += w.w.at(g);
  }
  double block = static_cast<double>(fine.points()) / static_cast<double>(spec.points());
  for (double& v : coarse.values()) v /= block;
  return make_custom_weight(std::move(coarse));
}

RealField maximal_function(const RealField& f) {
  if (f.vcount() != 1)
    throw std::invalid_argument("maximal_function: scalar fields only");
  const GridSpec& spec = f.spec();
  const auto shape = spec.shape();
  const std::size_t G = f.gcount();

  std::vector<double> absf(G);
  for (std::size_t g = 0; g < G; ++g) absf[g] = std::abs(f.at(g));

  RealField out(spec);
  ShapeSet shapes = window_shapes(spec, "rect");
  for (const auto& m : shapes.cells) {
    double count = 1.0;
    for (std::size_t mj : m) count *= static_cast<double>(mj);
    std::vector<double> v = absf;
    for (int j = 0; j < spec.dim(); ++j) apply_axis(v, shape, j, m[j], LineOp::Sum);
    for (int j = 0; j < spec.dim(); ++j)
      apply_axis(v, shape, j, m[j], LineOp::CoverMax);
    for (std::size_t g = 0; g < G; ++g)
      out.at(g) = std::max(out.at(g), v[g] / count);
  }
  return out;
}

ApReport ap_characteristic(const Weight& w, double p, const std::string& window) {
  if (p < 1.0)
    throw std::invalid_argument("ap_characteristic: p must be at least 1");
  ApReport rep;
  rep.p = p;
  rep.window = window;
  rep.value = ap_value_impl(w.w, p, window, &rep.attaining_scale, &rep.attaining_pos);

  rep.octave_gap = stability_gap(w.w.spec());
  if (rep.octave_gap <= 0) {
    rep.octave_gap = 0;
    rep.coarse_value = rep.value;
    rep.stable = true;
    return rep;
  }
  GridSpec coarse_spec = w.w.spec();
  for (int i = 0; i < rep.octave_gap; ++i) coarse_spec = coarse_spec.coarsened();
  Weight coarse = resample_weight(w, coarse_spec);
  rep.coarse_value = ap_value_impl(coarse.w, p, window, nullptr, nullptr);
  rep.stable = std::abs(rep.value - rep.coarse_value) <= 0.1 * rep.value;
  return rep;
}

AInfReport a_infinity_probe(const Weight& w, double qmax, double tol) {
  if (qmax <= 1.0 || tol <= 0.0)
    throw std::invalid_argument("a_infinity_probe: bad search range");
  auto stable_at = [&](double q) { return ap_characteristic(w, q).stable; };

  AInfReport rep;
  if (!stable_at(qmax)) return rep;  // not A_infinity at this resolution
  rep.found = true;
  if (stable_at(1.0)) {
    rep.q = 1.0;
    rep.value = ap_characteristic(w, 1.0).value;
    return rep;
  }
  double lo = 1.0, hi = qmax;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (stable_at(mid)) hi = mid;
    else lo = mid;
  }
  rep.q = hi;
  rep.value = ap_characteristic(w, hi).value;
  return rep;
}

RhReport reverse_holder_exponent(const Weight& w, double rmax, double tol) {
  if (rmax < 2.0 || tol <= 0.0)
    throw std::invalid_argument("reverse_holder_exponent: bad search range");
  int gap = stability_gap(w.w.spec());
  GridSpec coarse_spec = w.w.spec();
  for (int i = 0; i < std::max(gap, 0); ++i) coarse_spec = coarse_spec.coarsened();
  Weight coarse = gap > 0 ? resample_weight(w, coarse_spec) : w;

  auto stable_at = [&](double r) {
    double fine = rh_value_impl(w.w, r, "rect");
    if (gap <= 0) return true;
    double cv = rh_value_impl(coarse.w, r, "rect");
    return std::abs(fine - cv) <= 0.1 * fine;
  };

  double lo = 1.0;  // r = 1 gives C(r) = 1 identically
  double hi = 0.0;
  for (double r = 2.0; r <= rmax; r *= 2.0) {
    if (stable_at(r)) lo = r;
    else {
      hi = r;
      break;
    }
  }
  if (hi == 0.0) {
    return RhReport{lo, rh_value_impl(w.w, lo, "rect")};
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (stable_at(mid)) lo = mid;
    else hi = mid;
  }
  return RhReport{lo, rh_value_impl(w.w, lo, "rect")};
}

}  // namespace lplab
