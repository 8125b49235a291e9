#pragma once

#include <memory>

#include "field.hpp"
#include "kernel.hpp"
#include "nonlocal.hpp"
#include "util.hpp"

// helpers shared across the test suites
namespace fraclab::testing {

inline GridSpec square_grid(int dim, int cells, double halfwidth) {
  std::array<int, kMaxDim> extent{};
  for (int a = 0; a < dim; ++a) extent[a] = cells;
  return GridSpec(dim, 2.0 * halfwidth / cells, extent);
}

inline std::shared_ptr<const WeightTable> make_table(const GridSpec& grid, double s,
                                                     double radius = 0.0) {
  KernelParams params{grid.dim, s, 0.0};
  double r = radius > 0.0 ? radius : default_truncation_radius(grid);
  return std::make_shared<const WeightTable>(build_weight_table(grid, params, r));
}

inline Field random_field(const RegionMask& support, Rng& rng) {
  Field f(support);
  for (auto flat : support.cells()) f.set(flat, rng.uniform(-1.0, 1.0));
  return f;
}

/// Random field supported in `support`, exactly odd about r.
inline Field random_odd_field(const RegionMask& support, const Reflection& r, Rng& rng) {
  const GridSpec& g = support.grid;
  RegionMask upper(g);
  for (auto flat : support.cells())
    if (g.coord(r.axis, g.unflatten(flat)[r.axis]) > r.level)
      upper.mask[static_cast<std::size_t>(flat)] = 1;
  Field gen = random_field(upper, rng);
  return odd_extension(gen, r);
}

/// Random field exactly doubly odd about r1 and r2, generated on the open
/// quadrant cells of `support`.
inline Field random_doubly_odd_field(const RegionMask& support, const Reflection& r1,
                                     const Reflection& r2, Rng& rng) {
  const GridSpec& g = support.grid;
  RegionMask quadrant(g);
  for (auto flat : support.cells()) {
    auto idx = g.unflatten(flat);
    if (g.coord(r1.axis, idx[r1.axis]) > r1.level &&
        g.coord(r2.axis, idx[r2.axis]) > r2.level)
      quadrant.mask[static_cast<std::size_t>(flat)] = 1;
  }
  Field gen = random_field(quadrant, rng);
  return doubly_odd_extension(gen, r1, r2);
}

inline RegionMask full_mask(const GridSpec& g) {
  RegionMask m(g);
  std::fill(m.mask.begin(), m.mask.end(), 1);
  return m;
}

}  // namespace fraclab::testing
