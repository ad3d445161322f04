#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lplab/fft.hpp"

namespace lplab {

// Periodic grid on the torus [0,1)^d with 2^{L_j} samples along axis j.
// Sample i on axis j sits at x = i * 2^{-L_j} and represents the cell
// [i*2^{-L_j}, (i+1)*2^{-L_j}).  The axis grouping (n_1..n_M) partitions
// the axes into contiguous blocks used by iterated norms.
struct GridSpec {
  std::vector<int> logres;    // L_j >= 2
  std::vector<int> grouping;  // n_1..n_M, sum == dim()
  std::uint64_t budget = std::uint64_t{1} << 26;

  GridSpec() = default;
  GridSpec(std::vector<int> lr, std::vector<int> grp,
           std::uint64_t bud = std::uint64_t{1} << 26);

  int dim() const { return static_cast<int>(logres.size()); }
  std::size_t axis_size(int j) const { return std::size_t{1} << logres[j]; }
  std::uint64_t points() const;
  // Lebesgue measure of one grid cell: 2^{-sum L_j}.
  double cell_measure() const;
  // Measure of the slab of axes in [a,b): product of per-axis cells.
  double cell_measure_axes(int a, int b) const;
  int min_logres() const;
  std::vector<std::size_t> shape() const;
  bool operator==(const GridSpec&) const = default;

  // Same axes at half the resolution (every L_j reduced by one).
  GridSpec coarsened() const;
  GridSpec refined() const;
};

static constexpr int kMaxDim = 8;

// Dyadic cube of side 2^{-scale} with corner at pos * 2^{-scale}.
struct DyadicCube {
  int dim = 1;
  int scale = 0;                       // side = 2^-scale, scale >= 0
  std::array<std::uint32_t, kMaxDim> pos{};  // pos[j] in [0, 2^scale)

  DyadicCube() = default;
  DyadicCube(int d, int k, std::initializer_list<std::uint32_t> p);
  DyadicCube(int d, int k, const std::vector<std::uint32_t>& p);

  double side() const { return std::ldexp(1.0, -scale); }
  double measure() const { return std::ldexp(1.0, -scale * dim); }
  DyadicCube parent() const;
  std::vector<DyadicCube> children() const;
  bool contains(const DyadicCube& inner) const;
  bool contains_point(const std::vector<double>& x) const;

  bool operator==(const DyadicCube& o) const;
  bool operator<(const DyadicCube& o) const;  // (scale, pos lex)
  std::string str() const;
};

DyadicCube root_cube(int dim);

// Euclidean torus distance from point x to the cube (0 inside).
double dist_to_cube(const std::vector<double>& x, const DyadicCube& c);
// (1 + dist(x, c)/side(c))^{-decay}
double chi_tilde(const std::vector<double>& x, const DyadicCube& c, double decay);

// Finite family of dyadic cubes, sorted by (scale, position).
struct Collection {
  int dim = 1;
  int cap_scale = 0;  // closure may not use cubes of side > 2^-cap_scale
  std::vector<DyadicCube> cubes;

  Collection() = default;
  explicit Collection(int d, int cap = 0) : dim(d), cap_scale(cap) {}
  Collection(int d, std::vector<DyadicCube> cs, int cap = 0);

  std::size_t size() const { return cubes.size(); }
  bool empty() const { return cubes.empty(); }
  bool member(const DyadicCube& c) const;
  void insert(const DyadicCube& c);
  int max_scale() const;
};

// Complex-valued function sampled on the grid, optionally vector valued
// with index shape vshape (S_1..S_n).  Storage is grid row-major with the
// flattened vector index fastest, i.e. values[g * vcount + v].
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridSpec spec, std::vector<std::size_t> vshape = {});

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::size_t>& vshape() const { return vshape_; }
  std::size_t vcount() const { return vcount_; }
  std::size_t gcount() const { return gcount_; }

  cplx& at(std::size_t g, std::size_t v = 0) { return values_[g * vcount_ + v]; }
  const cplx& at(std::size_t g, std::size_t v = 0) const { return values_[g * vcount_ + v]; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  bool all_finite() const;
  bool same_shape(const GridFunction& o) const;

 private:
  GridSpec spec_;
  std::vector<std::size_t> vshape_;
  std::size_t vcount_ = 1;
  std::size_t gcount_ = 0;
  std::vector<cplx> values_;
};

// Real-valued companion of GridFunction (square functions, weights,
// indicators).  Same layout.
class RealField {
 public:
  RealField() = default;
  RealField(GridSpec spec, std::vector<std::size_t> vshape = {});

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::size_t>& vshape() const { return vshape_; }
  std::size_t vcount() const { return vcount_; }
  std::size_t gcount() const { return gcount_; }

  double& at(std::size_t g, std::size_t v = 0) { return values_[g * vcount_ + v]; }
  const double& at(std::size_t g, std::size_t v = 0) const { return values_[g * vcount_ + v]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;
  bool is_binary() const;  // every value 0 or 1
  // Lebesgue measure of the support of a binary field (scalar only).
  double indicator_measure() const;

 private:
  GridSpec spec_;
  std::vector<std::size_t> vshape_;
  std::size_t vcount_ = 1;
  std::size_t gcount_ = 0;
  std::vector<double> values_;
};

// Index helpers.
std::size_t grid_index(const GridSpec& spec, const std::vector<std::size_t>& coords);
std::vector<std::size_t> grid_coords(const GridSpec& spec, std::size_t g);
std::vector<double> grid_point(const GridSpec& spec, std::size_t g);

// True when the cube is resolvable on the grid (scale <= every L_j).
bool cube_on_grid(const GridSpec& spec, const DyadicCube& c);
// Invoke fn for every grid index whose cell lies in the cube.
void for_each_cell(const GridSpec& spec, const DyadicCube& c,
                   const std::function<void(std::size_t)>& fn);
std::uint64_t cell_count(const GridSpec& spec, const DyadicCube& c);

// Paint the union of cubes as a 0/1 field.
RealField indicator_of(const GridSpec& spec, const std::vector<DyadicCube>& cubes);

// Maximal dyadic cubes contained in a binary set.  Cells that belong to
// the set but cannot be covered by any grid-resolvable dyadic cube (only
// possible on anisotropic grids) are reported, not dropped silently.
struct CoverResult {
  std::vector<DyadicCube> cubes;        // pairwise disjoint, maximal
  std::vector<std::size_t> residual;    // uncovered set cells (grid indices)
};
CoverResult maximal_cover(const RealField& indicator);
CoverResult maximal_cover(const GridSpec& spec, const std::vector<DyadicCube>& cubes);

// All dyadic ancestors J >= I of members, J no larger than the cap.
Collection relevant_closure(const Collection& c);
Collection relevant_closure(const Collection& c, int cap_scale);

// Members of c contained in I0.
Collection restrict_collection(const Collection& c, const DyadicCube& I0);

}  // namespace lplab
