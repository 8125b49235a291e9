#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "grid.hpp"

namespace fraclab {

/// Parameters of the kernel c |z|^(-dim-2s). `dim` is the kernel order; the
/// scalar evaluators below accept points of any geometric dimension, which
/// lets the order be swept independently of the sampling space.
struct KernelParams {
  int dim = 1;
  double s = 0.5;
  double c = 0.0;  // normalization constant; 0 requests the default

  double exponent() const { return dim + 2.0 * s; }
};

/// Constant making the operator's Fourier symbol equal |xi|^(2s):
/// s 4^s Gamma(dim/2 + s) / (pi^(dim/2) Gamma(1 - s)).
double normalization_constant(int dim, double s);

/// Fills in the default constant when params.c == 0 and validates ranges.
KernelParams resolve_kernel_params(KernelParams params);

/// Surface measure of the unit sphere in R^dim.
double unit_sphere_measure(int dim);

double kernel_value(const KernelParams& params, std::span<const double> z);

/// K(x - y) - K(x - r(y)); zero when y lies on the reflection hyperplane,
/// positive when x and y both lie strictly inside the halfspace.
double kernel_difference(const KernelParams& params, std::span<const double> x,
                         std::span<const double> y, const Reflection& r);

/// K(x-y) - K(r2(x)-y) - K(r1(x)-y) + K(r12(x)-y) for perpendicular
/// reflections; nonnegative on H1 ∩ H2.
double four_point_deficit(const KernelParams& params, std::span<const double> x,
                          std::span<const double> y, const Reflection& r1,
                          const Reflection& r2);

/// Scalar surrogate of the four-point inequality:
/// 1 + (M/(a+b+M))^q - (M/(a+M))^q - (M/(b+M))^q with q = dim/2 + s.
double f_surrogate(double a, double b, double M, int dim, double s);

/// Translation-invariant discrete kernel weights. W(k) is the integral of
/// c |z|^(-dim-2s) over the cell centered at offset k*h, computed with one
/// fixed 8-point tensor Gauss rule per axis for every cell. Using the same
/// symmetric rule everywhere keeps the four-point inequality exact at the
/// weight level, which the antisymmetric energy estimates rely on.
struct WeightTable {
  KernelParams params;
  double h = 0.0;
  int dim = 0;
  double truncation_radius = 0.0;  // R
  double tail = 0.0;               // c * omega_{dim-1}/(2s) * R^(-2s)
  double stored_mass = 0.0;        // sum of W(k) over all stored offsets
  double row_mass = 0.0;           // stored_mass + tail

  // canonical orbit representative (abs components sorted descending) -> W
  std::map<std::array<int, kMaxDim>, double> weights;

  // dense lookup over the grid-reachable offset box, built per grid
  std::array<int, kMaxDim> box_half{};
  std::array<int, kMaxDim> box_size{};
  std::vector<double> box;

  double weight(std::array<int, kMaxDim> k) const;  // 0 beyond R or at k = 0
  bool has_offset(std::array<int, kMaxDim> k) const;

  /// Dense lookup; k must be within the reachable box.
  double box_weight(const std::array<int, kMaxDim>& k) const {
    std::int64_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * box_size[a] + (k[a] + box_half[a]);
    return box[static_cast<std::size_t>(flat)];
  }
};

/// Builds the table for the given grid. R must be at least 3h; for exact
/// far-field bookkeeping R should exceed the diameter of any field support
/// that will be paired under the energy.
WeightTable build_weight_table(const GridSpec& grid, const KernelParams& params,
                               double truncation_radius);

/// Cache round-trip. Files carry a params header, the canonical
/// offset/weight rows, and a checksum; the dense box is rebuilt on load.
void save_weight_table(const WeightTable& table, const std::string& path);
std::optional<WeightTable> load_weight_table(const std::string& path,
                                             const GridSpec& grid,
                                             const KernelParams& params,
                                             double truncation_radius);
std::string weight_table_cache_name(const KernelParams& params, double h,
                                    double truncation_radius);

/// Default truncation: grid bounding-box diagonal plus one cell layer, which
/// keeps every in-grid pair explicit.
double default_truncation_radius(const GridSpec& grid);

}  // namespace fraclab
