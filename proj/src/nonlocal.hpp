#pragma once

#include <memory>
#include <span>
#include <vector>

#include "field.hpp"
#include "kernel.hpp"

namespace fraclab {

enum class ApplyPath { kAuto, kDirect, kFft };

/// Discrete fractional Laplacian with exterior-zero convention:
///   (Lu)(x) = sum_k W(k) (u(x) - u(x+k)) + T u(x),
/// off-grid neighbors reading zero. Symmetric and strictly positive definite
/// on fields supported in any bounded mask (the tail T is positive).
///
/// apply() offers an exact direct path and an FFT fast path (identical up to
/// roundoff); energies always use the direct double sum with compensated,
/// fixed-order accumulation so that equality cases are meaningful.
class NonlocalOperator {
 public:
  NonlocalOperator(const GridSpec& grid, std::shared_ptr<const WeightTable> table,
                   int threads = 1);
  ~NonlocalOperator();
  NonlocalOperator(const NonlocalOperator&) = delete;
  NonlocalOperator& operator=(const NonlocalOperator&) = delete;

  const GridSpec& grid() const { return grid_; }
  const WeightTable& table() const { return *table_; }
  double row_mass() const { return table_->row_mass; }
  int threads() const { return threads_; }
  void set_threads(int threads) { threads_ = threads <= 0 ? 1 : threads; }

  /// Full-grid application. Not reentrant on the FFT path (scratch buffers);
  /// solvers call it from one thread and parallelize inside rows instead.
  void apply_values(std::span<const double> u, std::span<double> out,
                    ApplyPath path = ApplyPath::kAuto) const;
  Field apply(const Field& u, ApplyPath path = ApplyPath::kAuto) const;

  /// Bilinear form; consistent with apply: energy(u,v) = sum (Lu) v h^dim.
  double energy(const Field& u, const Field& v) const;

  /// rho seminorm: outer sum over U, inner over the whole lattice plus the
  /// analytic tail, without the kernel constant.
  double seminorm_rho(const Field& w, const RegionMask& U) const;

 private:
  struct FftPlan;
  void apply_direct(std::span<const double> u, std::span<double> out) const;
  void apply_fft(std::span<const double> u, std::span<double> out) const;
  void ensure_fft() const;

  GridSpec grid_;
  std::shared_ptr<const WeightTable> table_;
  int threads_ = 1;
  mutable std::unique_ptr<FftPlan> fft_;
};

/// Matrix-free symmetric map on a list of active cells; the interface the
/// iterative solvers run against.
struct LinearMap {
  virtual ~LinearMap() = default;
  virtual std::int64_t size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

/// L restricted to the cells of a mask (Dirichlet exterior condition).
class MaskedOperator final : public LinearMap {
 public:
  MaskedOperator(const NonlocalOperator& op, const RegionMask& region,
                 ApplyPath path = ApplyPath::kAuto);
  std::int64_t size() const override { return static_cast<std::int64_t>(cells_.size()); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  const std::vector<std::int64_t>& cells() const { return cells_; }
  const NonlocalOperator& base() const { return op_; }

  Field to_field(std::span<const double> x) const;
  std::vector<double> from_field(const Field& u) const;
  const RegionMask& region() const { return region_; }

 private:
  const NonlocalOperator& op_;
  RegionMask region_;
  std::vector<std::int64_t> cells_;
  ApplyPath path_;
  mutable std::vector<double> full_in_, full_out_;
};

/// Halfspace reduction of L to the antisymmetric sector of a reflection:
/// applying it on cells strictly inside H equals applying L to the odd
/// extension and restricting back. Equivalent to a kernel-difference
/// operator on the halfspace.
class OddReducedOperator final : public LinearMap {
 public:
  /// cells must lie strictly on the positive side of r.
  OddReducedOperator(const NonlocalOperator& op, const Reflection& r,
                     const RegionMask& region, ApplyPath path = ApplyPath::kAuto);
  std::int64_t size() const override { return static_cast<std::int64_t>(cells_.size()); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  const std::vector<std::int64_t>& cells() const { return cells_; }
  const Reflection& reflection() const { return r_; }
  const RegionMask& region() const { return region_; }

  Field to_field(std::span<const double> x) const;         // field on the half cells
  Field to_full_field(std::span<const double> x) const;    // odd extension

 private:
  const NonlocalOperator& op_;
  Reflection r_;
  RegionMask region_;
  std::vector<std::int64_t> cells_;
  ApplyPath path_;
  mutable std::vector<double> full_in_, full_out_;
};

OddReducedOperator antisymmetric_reduce(const NonlocalOperator& op,
                                        const Reflection& r,
                                        const RegionMask& region,
                                        ApplyPath path = ApplyPath::kAuto);

/// Quadrant reduction to the doubly antisymmetric sector of two
/// perpendicular reflections.
class DoublyOddReducedOperator final : public LinearMap {
 public:
  DoublyOddReducedOperator(const NonlocalOperator& op, const Reflection& r1,
                           const Reflection& r2, const RegionMask& region,
                           ApplyPath path = ApplyPath::kAuto);
  std::int64_t size() const override { return static_cast<std::int64_t>(cells_.size()); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  const std::vector<std::int64_t>& cells() const { return cells_; }

  Field to_full_field(std::span<const double> x) const;  // doubly odd extension

 private:
  const NonlocalOperator& op_;
  Reflection r1_, r2_;
  RegionMask region_;
  std::vector<std::int64_t> cells_;
  ApplyPath path_;
  mutable std::vector<double> full_in_, full_out_;
};

/// y = A x - shift .* x, used for linearized problems (L - c) w = rhs.
class DiagShiftedMap final : public LinearMap {
 public:
  DiagShiftedMap(const LinearMap& base, std::vector<double> shift);
  std::int64_t size() const override { return base_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  const LinearMap& base_;
  std::vector<double> shift_;
};

}  // namespace fraclab
