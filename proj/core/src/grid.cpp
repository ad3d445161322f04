#include "lplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lplab {

GridSpec::GridSpec(std::vector<int> lr, std::vector<int> grp, std::uint64_t bud)
    : logres(std::move(lr)), grouping(std::move(grp)), budget(bud) {
  if (logres.empty()) throw std::invalid_argument("GridSpec: dimension must be >= 1");
  if (dim() > kMaxDim) throw std::invalid_argument("GridSpec: dimension too large");
  for (int L : logres)
    if (L < 2 || L > 30) throw std::invalid_argument("GridSpec: logres out of range [2,30]");
  if (grouping.empty()) grouping.assign(1, dim());
  int s = 0;
  for (int n : grouping) {
    if (n <= 0) throw std::invalid_argument("GridSpec: grouping entries must be positive");
    s += n;
  }
  if (s != dim()) throw std::invalid_argument("GridSpec: grouping must sum to dimension");
  if (points() > budget) throw std::invalid_argument("GridSpec: sample budget exceeded");
}

std::uint64_t GridSpec::points() const {
  std::uint64_t p = 1;
  for (int L : logres) p <<= L;
  return p;
}

double GridSpec::cell_measure() const {
  int s = std::accumulate(logres.begin(), logres.end(), 0);
  return std::ldexp(1.0, -s);
}

double GridSpec::cell_measure_axes(int a, int b) const {
  int s = 0;
  for (int j = a; j < b; ++j) s += logres[j];
  return std::ldexp(1.0, -s);
}

int GridSpec::min_logres() const {
  return *std::min_element(logres.begin(), logres.end());
}

std::vector<std::size_t> GridSpec::shape() const {
  std::vector<std::size_t> s(logres.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = axis_size(static_cast<int>(j));
  return s;
}

GridSpec GridSpec::coarsened() const {
  std::vector<int> lr = logres;
  for (int& L : lr) --L;
  return GridSpec(lr, grouping, budget);
}

GridSpec GridSpec::refined() const {
  std::vector<int> lr = logres;
  for (int& L : lr) ++L;
  return GridSpec(lr, grouping, budget);
}

DyadicCube::DyadicCube(int d, int k, std::initializer_list<std::uint32_t> p)
    : dim(d), scale(k) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("DyadicCube: bad dimension");
  if (k < 0 || k > 30) throw std::invalid_argument("DyadicCube: bad scale");
  if (static_cast<int>(p.size()) != d) throw std::invalid_argument("DyadicCube: position size");
  int j = 0;
  for (std::uint32_t v : p) {
    if (v >= (std::uint32_t{1} << k)) throw std::invalid_argument("DyadicCube: position out of range");
    pos[j++] = v;
  }
}

DyadicCube::DyadicCube(int d, int k, const std::vector<std::uint32_t>& p)
    : dim(d), scale(k) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("DyadicCube: bad dimension");
  if (k < 0 || k > 30) throw std::invalid_argument("DyadicCube: bad scale");
  if (static_cast<int>(p.size()) != d) throw std::invalid_argument("DyadicCube: position size");
  for (int j = 0; j < d; ++j) {
    if (p[j] >= (std::uint32_t{1} << k)) throw std::invalid_argument("DyadicCube: position out of range");
    pos[j] = p[j];
  }
}

DyadicCube DyadicCube::parent() const {
  if (scale == 0) throw std::logic_error("DyadicCube: root has no parent");
  DyadicCube p;
  p.dim = dim;
  p.scale = scale - 1;
  for (int j = 0; j < dim; ++j) p.pos[j] = pos[j] >> 1;
  return p;
}

std::vector<DyadicCube> DyadicCube::children() const {
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << dim);
  // Lexicographic position order: axis 0 varies slowest.
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << dim); ++m) {
    DyadicCube c;
    c.dim = dim;
    c.scale = scale + 1;
    for (int j = 0; j < dim; ++j)
      c.pos[j] = 2 * pos[j] + ((m >> (dim - 1 - j)) & 1u);
    out.push_back(c);
  }
  return out;
}

bool DyadicCube::contains(const DyadicCube& inner) const {
  if (dim != inner.dim || scale > inner.scale) return false;
  int shift = inner.scale - scale;
  for (int j = 0; j < dim; ++j)
    if ((inner.pos[j] >> shift) != pos[j]) return false;
  return true;
}

bool DyadicCube::contains_point(const std::vector<double>& x) const {
  double s = side();
  for (int j = 0; j < dim; ++j) {
    double a = pos[j] * s;
    if (x[j] < a || x[j] >= a + s) return false;
  }
  return true;
}

bool DyadicCube::operator==(const DyadicCube& o) const {
  if (dim != o.dim || scale != o.scale) return false;
  for (int j = 0; j < dim; ++j)
    if (pos[j] != o.pos[j]) return false;
  return true;
}

bool DyadicCube::operator<(const DyadicCube& o) const {
  if (scale != o.scale) return scale < o.scale;
  for (int j = 0; j < std::min(dim, o.dim); ++j)
    if (pos[j] != o.pos[j]) return pos[j] < o.pos[j];
  return dim < o.dim;
}

std::string DyadicCube::str() const {
  std::ostringstream os;
  os << scale;
  for (int j = 0; j < dim; ++j) os << ' ' << pos[j];
  return os.str();
}

DyadicCube root_cube(int dim) {
  DyadicCube c;
  c.dim = dim;
  c.scale = 0;
  return c;
}

namespace {

double torus_dist_1d(double u, double v) {
  double d = std::fabs(u - v);
  return std::min(d, 1.0 - d);
}

// Torus distance from coordinate x to the arc [a, a+s).
double dist_to_interval(double x, double a, double s) {
  if (s >= 1.0) return 0.0;
  double rel = x - a - std::floor(x - a);  // in [0,1)
  if (rel < s) return 0.0;
  return std::min(1.0 - rel, rel - s);
}

}  // namespace

double dist_to_cube(const std::vector<double>& x, const DyadicCube& c) {
  double s = c.side();
  double acc = 0.0;
  for (int j = 0; j < c.dim; ++j) {
    double dj = dist_to_interval(x[j], c.pos[j] * s, s);
    acc += dj * dj;
  }
  return std::sqrt(acc);
}

double chi_tilde(const std::vector<double>& x, const DyadicCube& c, double decay) {
  return std::pow(1.0 + dist_to_cube(x, c) / c.side(), -decay);
}

Collection::Collection(int d, std::vector<DyadicCube> cs, int cap)
    : dim(d), cap_scale(cap), cubes(std::move(cs)) {
  for (const auto& c : cubes)
    if (c.dim != dim) throw std::invalid_argument("Collection: mixed dimensions");
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
}

bool Collection::member(const DyadicCube& c) const {
  return std::binary_search(cubes.begin(), cubes.end(), c);
}

void Collection::insert(const DyadicCube& c) {
  if (c.dim != dim) throw std::invalid_argument("Collection: mixed dimensions");
  auto it = std::lower_bound(cubes.begin(), cubes.end(), c);
  if (it == cubes.end() || !(*it == c)) cubes.insert(it, c);
}

int Collection::max_scale() const {
  int m = 0;
  for (const auto& c : cubes) m = std::max(m, c.scale);
  return m;
}

GridFunction::GridFunction(GridSpec spec, std::vector<std::size_t> vshape)
    : spec_(std::move(spec)), vshape_(std::move(vshape)) {
  vcount_ = 1;
  for (std::size_t s : vshape_) {
    if (s == 0) throw std::invalid_argument("GridFunction: empty vector index set");
    vcount_ *= s;
  }
  gcount_ = static_cast<std::size_t>(spec_.points());
  if (spec_.points() * vcount_ > spec_.budget)
    throw std::invalid_argument("GridFunction: sample budget exceeded");
  values_.assign(gcount_ * vcount_, cplx{0.0, 0.0});
}

bool GridFunction::all_finite() const {
  for (const cplx& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool GridFunction::same_shape(const GridFunction& o) const {
  return spec_ == o.spec_ && vshape_ == o.vshape_;
}

RealField::RealField(GridSpec spec, std::vector<std::size_t> vshape)
    : spec_(std::move(spec)), vshape_(std::move(vshape)) {
  vcount_ = 1;
  for (std::size_t s : vshape_) {
    if (s == 0) throw std::invalid_argument("RealField: empty vector index set");
    vcount_ *= s;
  }
  gcount_ = static_cast<std::size_t>(spec_.points());
  if (spec_.points() * vcount_ > spec_.budget)
    throw std::invalid_argument("RealField: sample budget exceeded");
  values_.assign(gcount_ * vcount_, 0.0);
}

bool RealField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool RealField::is_binary() const {
  for (double v : values_)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

double RealField::indicator_measure() const {
  if (vcount_ != 1) throw std::invalid_argument("indicator_measure: scalar fields only");
  double s = 0.0;
  for (double v : values_) s += v;
  return s * spec_.cell_measure();
}

std::size_t grid_index(const GridSpec& spec, const std::vector<std::size_t>& coords) {
  std::size_t g = 0;
  for (int j = 0; j < spec.dim(); ++j) g = (g << spec.logres[j]) | coords[j];
  return g;
}

std::vector<std::size_t> grid_coords(const GridSpec& spec, std::size_t g) {
  std::vector<std::size_t> c(spec.dim());
  for (int j = spec.dim() - 1; j >= 0; --j) {
    c[j] = g & (spec.axis_size(j) - 1);
    g >>= spec.logres[j];
  }
  return c;
}

std::vector<double> grid_point(const GridSpec& spec, std::size_t g) {
  auto c = grid_coords(spec, g);
  std::vector<double> x(spec.dim());
  for (int j = 0; j < spec.dim(); ++j)
    x[j] = std::ldexp(static_cast<double>(c[j]), -spec.logres[j]);
  return x;
}

bool cube_on_grid(const GridSpec& spec, const DyadicCube& c) {
  return c.dim == spec.dim() && c.scale <= spec.min_logres();
}

void for_each_cell(const GridSpec& spec, const DyadicCube& c,
                   const std::function<void(std::size_t)>& fn) {
  if (!cube_on_grid(spec, c))
    throw std::invalid_argument("for_each_cell: cube not resolvable on grid");
  int d = spec.dim();
  std::vector<std::size_t> lo(d), n(d), cur(d);
  for (int j = 0; j < d; ++j) {
    int shift = spec.logres[j] - c.scale;
    lo[j] = static_cast<std::size_t>(c.pos[j]) << shift;
    n[j] = std::size_t{1} << shift;
    cur[j] = 0;
  }
  std::vector<std::size_t> coords(d);
  while (true) {
    for (int j = 0; j < d; ++j) coords[j] = lo[j] + cur[j];
    fn(grid_index(spec, coords));
    int j = d - 1;
    while (j >= 0) {
      if (++cur[j] < n[j]) break;
      cur[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
}

std::uint64_t cell_count(const GridSpec& spec, const DyadicCube& c) {
  std::uint64_t n = 1;
  for (int j = 0; j < spec.dim(); ++j) n <<= (spec.logres[j] - c.scale);
  return n;
}

RealField indicator_of(const GridSpec& spec, const std::vector<DyadicCube>& cubes) {
  RealField f(spec);
  for (const auto& c : cubes)
    for_each_cell(spec, c, [&](std::size_t g) { f.at(g) = 1.0; });
  return f;
}

namespace {

// d-dimensional inclusive prefix sums of the 0/1 field, for O(2^d) box
// counts via inclusion-exclusion.
struct BoxCounter {
  const GridSpec& spec;
  std::vector<std::uint64_t> P;

  explicit BoxCounter(const RealField& ind) : spec(ind.spec()) {
    std::size_t total = ind.gcount();
    P.resize(total);
    for (std::size_t g = 0; g < total; ++g)
      P[g] = ind.at(g) != 0.0 ? 1u : 0u;
    auto shp = spec.shape();
    int d = spec.dim();
    for (int a = 0; a < d; ++a) {
      std::size_t block = 1;
      for (int j = a + 1; j < d; ++j) block *= shp[j];
      std::size_t n = shp[a];
      std::size_t outer = total / (n * block);
      for (std::size_t o = 0; o < outer; ++o) {
        std::uint64_t* base = P.data() + o * n * block;
        for (std::size_t t = 1; t < n; ++t)
          for (std::size_t b = 0; b < block; ++b)
            base[t * block + b] += base[(t - 1) * block + b];
      }
    }
  }

  // Count of set cells with lo[j] <= coord[j] < hi[j].
  std::uint64_t count(const std::vector<std::size_t>& lo,
                      const std::vector<std::size_t>& hi) const {
    int d = spec.dim();
    std::uint64_t acc = 0;
    std::vector<std::size_t> idx(d);
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << d); ++m) {
      bool zero = false;
      int bits = 0;
      for (int j = 0; j < d; ++j) {
        if ((m >> j) & 1u) {
          ++bits;
          if (lo[j] == 0) { zero = true; break; }
          idx[j] = lo[j] - 1;
        } else {
          idx[j] = hi[j] - 1;
        }
      }
      if (zero) continue;
      std::uint64_t term = P[grid_index(spec, idx)];
      acc += (bits % 2 == 0) ? term : static_cast<std::uint64_t>(-static_cast<std::int64_t>(term));
    }
    return acc;
  }

  std::uint64_t count_cube(const DyadicCube& c) const {
    int d = spec.dim();
    std::vector<std::size_t> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
      int shift = spec.logres[j] - c.scale;
      lo[j] = static_cast<std::size_t>(c.pos[j]) << shift;
      hi[j] = lo[j] + (std::size_t{1} << shift);
    }
    return count(lo, hi);
  }
};

void cover_rec(const RealField& ind, const BoxCounter& bc, const DyadicCube& c,
               CoverResult& out) {
  std::uint64_t cnt = bc.count_cube(c);
  if (cnt == 0) return;
  std::uint64_t cells = cell_count(ind.spec(), c);
  if (cnt == cells) {
    out.cubes.push_back(c);
    return;
  }
  if (c.scale == ind.spec().min_logres()) {
    // Partially filled finest cube: the set is not dyadic aligned here.
    for_each_cell(ind.spec(), c, [&](std::size_t g) {
      if (ind.at(g) != 0.0) out.residual.push_back(g);
    });
    return;
  }
  for (const auto& ch : c.children()) cover_rec(ind, bc, ch, out);
}

}  // namespace

CoverResult maximal_cover(const RealField& indicator) {
  if (!indicator.is_binary() || indicator.vcount() != 1)
    throw std::invalid_argument("maximal_cover: scalar 0/1 field required");
  CoverResult out;
  BoxCounter bc(indicator);
  cover_rec(indicator, bc, root_cube(indicator.spec().dim()), out);
  std::sort(out.cubes.begin(), out.cubes.end());
  std::sort(out.residual.begin(), out.residual.end());
  return out;
}

CoverResult maximal_cover(const GridSpec& spec, const std::vector<DyadicCube>& cubes) {
  return maximal_cover(indicator_of(spec, cubes));
}

Collection relevant_closure(const Collection& c) {
  return relevant_closure(c, c.cap_scale);
}

Collection relevant_closure(const Collection& c, int cap_scale) {
  std::set<DyadicCube> acc;
  for (const auto& I : c.cubes) {
    DyadicCube J = I;
    while (true) {
      if (J.scale >= cap_scale) acc.insert(J);
      if (J.scale == 0 || J.scale <= cap_scale) break;
      J = J.parent();
    }
  }
  Collection out(c.dim, std::vector<DyadicCube>(acc.begin(), acc.end()), cap_scale);
  return out;
}

Collection restrict_collection(const Collection& c, const DyadicCube& I0) {
  Collection out(c.dim, c.cap_scale);
  for (const auto& I : c.cubes)
    if (I0.contains(I)) out.cubes.push_back(I);
  return out;
}

}  // namespace lplab
