#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fraclab {

constexpr int kMaxDim = 3;

/// Uniform cell-centered lattice, symmetric about every coordinate
/// hyperplane x_a = 0. Cell centers sit at half-integer multiples of the
/// spacing, so no center ever lies on a symmetry hyperplane and reflections
/// about lattice-aligned levels act as exact cell permutations.
struct GridSpec {
  int dim = 0;
  double h = 0.0;
  std::array<int, kMaxDim> extent{};  // cells per axis, even, >= 2
  std::array<double, kMaxDim> origin{};  // coordinate of cell (0,...,0)

  GridSpec() = default;
  GridSpec(int dim_, double h_, std::array<int, kMaxDim> extent_);

  std::int64_t cell_count() const;
  /// Center coordinate; (index - (extent-1)/2) * h so mirrored indices get
  /// exactly negated coordinates.
  double coord(int axis, int index) const {
    return (index - 0.5 * (extent[axis] - 1)) * h;
  }
  std::array<double, kMaxDim> center(std::int64_t flat) const;
  std::array<int, kMaxDim> unflatten(std::int64_t flat) const;
  std::int64_t flatten(const std::array<int, kMaxDim>& idx) const;
  bool in_bounds(const std::array<int, kMaxDim>& idx) const;

  bool operator==(const GridSpec& other) const;
  bool operator!=(const GridSpec& other) const { return !(*this == other); }
};

/// Validates the GridSpec invariants; returns a list of human-readable
/// violations (empty when valid).
std::vector<std::string> validate_grid(const GridSpec& grid);

/// Hyperplane reflection r_{axis,level}(x) = x + 2(level - x_axis) e_axis.
/// Levels are restricted to multiples of h/2 so the reflection permutes
/// cell centers.
struct Reflection {
  int axis = 0;       // 0-based
  double level = 0.0;

  bool lattice_aligned(const GridSpec& grid) const;
};

std::array<double, kMaxDim> reflect_point(const std::array<double, kMaxDim>& x,
                                          const Reflection& r);

/// Reflected cell index, or -1 when the image falls outside the grid.
/// Throws std::invalid_argument if the level is not lattice aligned.
std::int64_t reflect_index(const GridSpec& grid, std::int64_t flat,
                           const Reflection& r);

/// Plain cell subset of a grid.
struct RegionMask {
  GridSpec grid;
  std::vector<std::uint8_t> mask;

  RegionMask() = default;
  explicit RegionMask(const GridSpec& g)
      : grid(g), mask(static_cast<std::size_t>(g.cell_count()), 0) {}

  bool contains(std::int64_t flat) const { return mask[static_cast<std::size_t>(flat)] != 0; }
  std::int64_t count() const;
  double measure() const;  // count * h^dim
  std::vector<std::int64_t> cells() const;
};

enum class DomainLabel { kBall, kEllipse, kRectangle, kStadium, kCustom };

std::string to_string(DomainLabel label);

/// Bounded domain satisfying the double-symmetry/axis-convexity condition:
/// mask symmetric under r_{1,0} and r_{N,0}, and filled toward both
/// hyperplanes along the first and last axes.
struct Domain {
  GridSpec grid;
  std::vector<std::uint8_t> mask;
  DomainLabel label = DomainLabel::kCustom;

  RegionMask region() const;
  std::int64_t cell_count_inside() const;
};

struct DomainParams {
  double radius = 0.0;                          // ball
  std::array<double, kMaxDim> semi_axes{};      // ellipse
  std::array<double, kMaxDim> half_widths{};    // rectangle
  double stadium_half_length = 0.0;             // stadium straight segment (axis 0)
  double stadium_cap_radius = 0.0;
  std::vector<std::uint8_t> custom_mask;        // custom
};

/// Builds the cell-indicator of the labeled shape. Throws
/// std::invalid_argument when parameters are invalid, the grid is too
/// coarse (fewer than 4 cells across the shape), the shape touches the
/// outermost cell layer, or a custom mask violates the symmetry/convexity
/// condition.
Domain build_domain(DomainLabel label, const DomainParams& params,
                    const GridSpec& grid);

/// Cells with x_axis > level.
RegionMask halfspace_mask(const GridSpec& grid, int axis, double level);

/// Four-fold union U ∪ r1(U) ∪ r2(U) ∪ r1(r2(U)).
RegionMask symmetrized_set(const RegionMask& region, const Reflection& r1,
                           const Reflection& r2);

struct ConditionDReport {
  std::vector<std::int64_t> symmetry_violations;   // cells whose mirror is missing
  std::vector<std::int64_t> convexity_violations;  // cells whose axis fill is missing
  bool holds() const {
    return symmetry_violations.empty() && convexity_violations.empty();
  }
};

/// Report-only check of the discrete symmetry and axis-convexity conditions.
ConditionDReport check_condition_D(const Domain& domain);
ConditionDReport check_condition_D(const GridSpec& grid,
                                   const std::vector<std::uint8_t>& mask);

/// Writes the mask as CSV: 2D as a 0/1 matrix with coordinate header row
/// and column, 1D as a single row, 3D+ as long-form coordinate rows.
std::string mask_to_csv(const RegionMask& region);

}  // namespace fraclab
