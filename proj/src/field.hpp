#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grid.hpp"

namespace fraclab {

struct SymmetryTag {
  int axis = 0;
  int parity = 1;  // +1 symmetric, -1 antisymmetric, about level 0
};

/// Real grid function that is identically zero outside its support mask.
/// Values are stored densely on the ambient grid; constructors and the
/// arithmetic helpers keep the off-mask cells at exact zero.
class Field {
 public:
  Field() = default;
  explicit Field(const RegionMask& support);
  Field(const RegionMask& support, std::vector<double> full_grid_values);

  static Field build(const RegionMask& support,
                     const std::function<double(const std::array<double, kMaxDim>&)>& fn);

  const GridSpec& grid() const { return support_.grid; }
  const RegionMask& support() const { return support_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::int64_t flat) const {
    return values_[static_cast<std::size_t>(flat)];
  }
  /// Assigns a value; cells outside the support stay pinned at zero.
  void set(std::int64_t flat, double v);
  std::vector<double>& raw() { return values_; }
  void clamp_to_support();

  const std::vector<SymmetryTag>& tags() const { return tags_; }
  void set_tag(SymmetryTag tag);
  bool has_tag(int axis, int parity) const;

  double sup_norm() const;
  double lp_norm(double p) const;  // (sum |u|^p h^dim)^(1/p)
  double l2_dot(const Field& other) const;

 private:
  RegionMask support_;
  std::vector<double> values_;
  std::vector<SymmetryTag> tags_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double c, const Field& a);

/// u composed with the reflection; exact cell permutation for aligned levels.
Field compose_reflection(const Field& u, const Reflection& r);

/// Largest |u(r(x)) - parity * u(x)| over the grid.
double symmetry_defect(const Field& u, const Reflection& r, int parity);

/// (u - u∘r)/2 resp. (u + u∘r)/2; the result carries the matching tag when
/// the level is 0.
Field antisymmetrize(const Field& u, const Reflection& r);
Field symmetrize_even(const Field& u, const Reflection& r);

Field positive_part(const Field& u);
Field negative_part(const Field& u);
Field abs_field(const Field& u);

/// Zeroes the field outside the region (support shrinks to the intersection).
Field restrict_to(const Field& u, const RegionMask& region);

/// Polarization about r: |u| on the positive side, -|u| on the other.
/// Requires u antisymmetric about r up to 1e-12 * sup|u|.
Field polarize(const Field& u, const Reflection& r);

/// Lemma-style test function v = w^- 1_{H1} 1_{H2} - w^+ 1_{H1^c} 1_{H2} for
/// doubly antisymmetric w (verified up to 1e-12 * sup|w|).
Field test_function_v(const Field& w, const Reflection& r1, const Reflection& r2);

/// Odd reflection of a field supported on the positive side of r.
Field odd_extension(const Field& upper, const Reflection& r);

/// Doubly odd extension of a field supported in H1 ∩ H2.
Field doubly_odd_extension(const Field& quadrant, const Reflection& r1,
                           const Reflection& r2);

/// CSV: one "x1,...,xN,value" row per support cell.
std::string field_to_csv(const Field& u);

/// Compact binary dump (see README for the exact layout) and its reader.
void save_field_binary(const Field& u, const std::string& path);
Field load_field_binary(const std::string& path);

}  // namespace fraclab
