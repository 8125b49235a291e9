#include "nonlocal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>

#include "util.hpp"

namespace fraclab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr std::int64_t kFftThresholdCells = 2048;

}  // namespace

struct NonlocalOperator::FftPlan {
  std::array<int, kMaxDim> pad{};      // padded size per axis
  std::int64_t real_cells = 0;
  std::int64_t complex_cells = 0;
  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_complex* kernel_spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~FftPlan() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    if (real_buf) fftw_free(real_buf);
    if (spec_buf) fftw_free(spec_buf);
    if (kernel_spec) fftw_free(kernel_spec);
  }
};

NonlocalOperator::NonlocalOperator(const GridSpec& grid,
                                   std::shared_ptr<const WeightTable> table,
                                   int threads)
    : grid_(grid), table_(std::move(table)), threads_(threads <= 0 ? 1 : threads) {
  require(table_ != nullptr, "operator needs a weight table");
  require(table_->dim == grid_.dim && table_->h == grid_.h,
          "weight table does not match the grid");
  for (int a = 0; a < grid_.dim; ++a)
    require(table_->box_half[a] >= grid_.extent[a] - 1,
            "weight table box does not reach across the grid");
}

NonlocalOperator::~NonlocalOperator() = default;

void NonlocalOperator::ensure_fft() const {
  if (fft_) return;
  auto plan = std::make_unique<FftPlan>();
  std::int64_t real_cells = 1;
  for (int a = 0; a < grid_.dim; ++a) {
    plan->pad[a] = 2 * grid_.extent[a];
    real_cells *= plan->pad[a];
  }
  plan->real_cells = real_cells;
  plan->complex_cells = real_cells / plan->pad[grid_.dim - 1] *
                        (plan->pad[grid_.dim - 1] / 2 + 1);
  plan->real_buf = fftw_alloc_real(static_cast<std::size_t>(plan->real_cells));
  plan->spec_buf = fftw_alloc_complex(static_cast<std::size_t>(plan->complex_cells));
  plan->kernel_spec = fftw_alloc_complex(static_cast<std::size_t>(plan->complex_cells));
  require(plan->real_buf && plan->spec_buf && plan->kernel_spec,
          "fft buffer allocation failed");

  int rank = grid_.dim;
  int n[kMaxDim];
  for (int a = 0; a < rank; ++a) n[a] = plan->pad[a];
  plan->forward = fftw_plan_dft_r2c(rank, n, plan->real_buf, plan->spec_buf,
                                    FFTW_ESTIMATE);
  plan->inverse = fftw_plan_dft_c2r(rank, n, plan->spec_buf, plan->real_buf,
                                    FFTW_ESTIMATE);
  require(plan->forward && plan->inverse, "fftw planning failed");

  // embed the weight box circularly (W(k) at index k mod pad) and transform
  std::memset(plan->real_buf, 0, sizeof(double) * static_cast<std::size_t>(plan->real_cells));
  const WeightTable& wt = *table_;
  std::array<int, kMaxDim> k{};
  std::function<void(int)> fill = [&](int axis) {
    if (axis == grid_.dim) {
      std::int64_t flat = 0;
      for (int a = 0; a < grid_.dim; ++a) {
        int idx = k[a] >= 0 ? k[a] : k[a] + plan->pad[a];
        flat = flat * plan->pad[a] + idx;
      }
      plan->real_buf[flat] = wt.box_weight(k);
      return;
    }
    for (k[axis] = -(grid_.extent[axis] - 1); k[axis] <= grid_.extent[axis] - 1; ++k[axis])
      fill(axis + 1);
  };
  fill(0);
  fftw_execute(plan->forward);
  std::memcpy(plan->kernel_spec, plan->spec_buf,
              sizeof(fftw_complex) * static_cast<std::size_t>(plan->complex_cells));
  fft_ = std::move(plan);
}

void NonlocalOperator::apply_fft(std::span<const double> u, std::span<double> out) const {
  ensure_fft();
  FftPlan& plan = *fft_;
  std::memset(plan.real_buf, 0, sizeof(double) * static_cast<std::size_t>(plan.real_cells));
  // scatter u into the padded buffer
  const std::int64_t cells = grid_.cell_count();
  if (grid_.dim == 1) {
    for (std::int64_t i = 0; i < cells; ++i) plan.real_buf[i] = u[static_cast<std::size_t>(i)];
  } else if (grid_.dim == 2) {
    const int n1 = grid_.extent[1], p1 = plan.pad[1];
    for (int i = 0; i < grid_.extent[0]; ++i)
      std::memcpy(plan.real_buf + static_cast<std::int64_t>(i) * p1,
                  u.data() + static_cast<std::int64_t>(i) * n1,
                  sizeof(double) * static_cast<std::size_t>(n1));
  } else {
    const int n1 = grid_.extent[1], n2 = grid_.extent[2];
    const int p1 = plan.pad[1], p2 = plan.pad[2];
    for (int i = 0; i < grid_.extent[0]; ++i)
      for (int j = 0; j < n1; ++j)
        std::memcpy(plan.real_buf + (static_cast<std::int64_t>(i) * p1 + j) * p2,
                    u.data() + (static_cast<std::int64_t>(i) * n1 + j) * n2,
                    sizeof(double) * static_cast<std::size_t>(n2));
  }
  fftw_execute(plan.forward);
  const double scale = 1.0 / static_cast<double>(plan.real_cells);
  for (std::int64_t i = 0; i < plan.complex_cells; ++i) {
    double ar = plan.spec_buf[i][0], ai = plan.spec_buf[i][1];
    double br = plan.kernel_spec[i][0], bi = plan.kernel_spec[i][1];
    plan.spec_buf[i][0] = (ar * br - ai * bi) * scale;
    plan.spec_buf[i][1] = (ar * bi + ai * br) * scale;
  }
  fftw_execute(plan.inverse);
  // gather: out = row_mass * u - conv
  const double mass = table_->row_mass;
  if (grid_.dim == 1) {
    for (std::int64_t i = 0; i < cells; ++i)
      out[static_cast<std::size_t>(i)] = mass * u[static_cast<std::size_t>(i)] - plan.real_buf[i];
  } else if (grid_.dim == 2) {
    const int n1 = grid_.extent[1], p1 = plan.pad[1];
    for (int i = 0; i < grid_.extent[0]; ++i)
      for (int j = 0; j < n1; ++j) {
        std::int64_t g = static_cast<std::int64_t>(i) * n1 + j;
        out[static_cast<std::size_t>(g)] =
            mass * u[static_cast<std::size_t>(g)] -
            plan.real_buf[static_cast<std::int64_t>(i) * p1 + j];
      }
  } else {
    const int n1 = grid_.extent[1], n2 = grid_.extent[2];
    const int p1 = plan.pad[1], p2 = plan.pad[2];
    for (int i = 0; i < grid_.extent[0]; ++i)
      for (int j = 0; j < n1; ++j)
        for (int l = 0; l < n2; ++l) {
          std::int64_t g = (static_cast<std::int64_t>(i) * n1 + j) * n2 + l;
          out[static_cast<std::size_t>(g)] =
              mass * u[static_cast<std::size_t>(g)] -
              plan.real_buf[(static_cast<std::int64_t>(i) * p1 + j) * p2 + l];
        }
  }
}

void NonlocalOperator::apply_direct(std::span<const double> u, std::span<double> out) const {
  const WeightTable& wt = *table_;
  const double mass = wt.row_mass;
  if (grid_.dim == 1) {
    const int n0 = grid_.extent[0];
    parallel_for(n0, threads_, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t x0 = begin; x0 < end; ++x0) {
        double conv = 0.0;
        const std::int64_t klo = -x0, khi = n0 - 1 - x0;
        const double* urow = u.data() + x0;
        const double* wrow = wt.box.data() + wt.box_half[0];
        for (std::int64_t k = klo; k <= khi; ++k) conv += wrow[k] * urow[k];
        out[static_cast<std::size_t>(x0)] = mass * u[static_cast<std::size_t>(x0)] - conv;
      }
    });
  } else if (grid_.dim == 2) {
    const int n0 = grid_.extent[0], n1 = grid_.extent[1];
    const int bs1 = wt.box_size[1];
    parallel_for(n0, threads_, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t x0 = begin; x0 < end; ++x0) {
        for (std::int64_t x1 = 0; x1 < n1; ++x1) {
          double conv = 0.0;
          for (std::int64_t k0 = -x0; k0 <= n0 - 1 - x0; ++k0) {
            const double* urow = u.data() + (x0 + k0) * n1 + x1;
            const double* wrow = wt.box.data() +
                                 (k0 + wt.box_half[0]) * bs1 + wt.box_half[1];
            double row = 0.0;
            for (std::int64_t k1 = -x1; k1 <= n1 - 1 - x1; ++k1)
              row += wrow[k1] * urow[k1];
            conv += row;
          }
          std::int64_t g = x0 * n1 + x1;
          out[static_cast<std::size_t>(g)] = mass * u[static_cast<std::size_t>(g)] - conv;
        }
      }
    });
  } else {
    const int n0 = grid_.extent[0], n1 = grid_.extent[1], n2 = grid_.extent[2];
    const int bs1 = wt.box_size[1], bs2 = wt.box_size[2];
    parallel_for(n0, threads_, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t x0 = begin; x0 < end; ++x0)
        for (std::int64_t x1 = 0; x1 < n1; ++x1)
          for (std::int64_t x2 = 0; x2 < n2; ++x2) {
            double conv = 0.0;
            for (std::int64_t k0 = -x0; k0 <= n0 - 1 - x0; ++k0)
              for (std::int64_t k1 = -x1; k1 <= n1 - 1 - x1; ++k1) {
                const double* urow = u.data() + ((x0 + k0) * n1 + (x1 + k1)) * n2 + x2;
                const double* wrow = wt.box.data() +
                                     ((k0 + wt.box_half[0]) * bs1 + k1 + wt.box_half[1]) * bs2 +
                                     wt.box_half[2];
                double row = 0.0;
                for (std::int64_t k2 = -x2; k2 <= n2 - 1 - x2; ++k2)
                  row += wrow[k2] * urow[k2];
                conv += row;
              }
            std::int64_t g = (x0 * n1 + x1) * n2 + x2;
            out[static_cast<std::size_t>(g)] = mass * u[static_cast<std::size_t>(g)] - conv;
          }
    });
  }
}

void NonlocalOperator::apply_values(std::span<const double> u, std::span<double> out,
                                    ApplyPath path) const {
  require(u.size() == static_cast<std::size_t>(grid_.cell_count()) &&
              out.size() == u.size(),
          "apply: value array size does not match the grid");
  if (path == ApplyPath::kAuto)
    path = grid_.cell_count() >= kFftThresholdCells ? ApplyPath::kFft : ApplyPath::kDirect;
  if (path == ApplyPath::kFft)
    apply_fft(u, out);
  else
    apply_direct(u, out);
}

Field NonlocalOperator::apply(const Field& u, ApplyPath path) const {
  require(u.grid() == grid_, "apply: grid mismatch between operator and field");
  RegionMask everywhere(grid_);
  std::fill(everywhere.mask.begin(), everywhere.mask.end(), 1);
  std::vector<double> out(static_cast<std::size_t>(grid_.cell_count()), 0.0);
  apply_values(u.values(), out, path);
  return Field(everywhere, std::move(out));
}

double NonlocalOperator::energy(const Field& u, const Field& v) const {
  require(u.grid() == grid_ && v.grid() == grid_, "energy: grid mismatch");
  const WeightTable& wt = *table_;
  const double mass = wt.row_mass;
  const std::int64_t cells = grid_.cell_count();
  auto uv = u.values();
  auto vv = v.values();

  const int chunks = threads_;
  std::vector<double> pair_part(static_cast<std::size_t>(std::max(chunks, 1)), 0.0);
  std::vector<double> diag_part(pair_part.size(), 0.0);
  std::int64_t chunk = (cells + chunks - 1) / chunks;

  auto work = [&](int w) {
    std::int64_t begin = w * chunk, end = std::min<std::int64_t>(cells, begin + chunk);
    KahanSum pair, diag;
    for (std::int64_t x = begin; x < end; ++x) {
      auto xi = grid_.unflatten(x);
      double ux = uv[static_cast<std::size_t>(x)];
      double vx = vv[static_cast<std::size_t>(x)];
      KahanSum row, wsum;
      if (grid_.dim == 1) {
        const std::int64_t x0 = xi[0];
        const double* wrow = wt.box.data() + wt.box_half[0];
        for (std::int64_t k = -x0; k <= grid_.extent[0] - 1 - x0; ++k) {
          double w0 = wrow[k];
          if (w0 == 0.0) continue;
          double du = ux - uv[static_cast<std::size_t>(x + k)];
          double dv = vx - vv[static_cast<std::size_t>(x + k)];
          row.add(w0 * (du * dv));
          wsum.add(w0);
        }
      } else if (grid_.dim == 2) {
        const int n1 = grid_.extent[1];
        const std::int64_t x0 = xi[0], x1 = xi[1];
        for (std::int64_t k0 = -x0; k0 <= grid_.extent[0] - 1 - x0; ++k0) {
          const double* wrow = wt.box.data() +
                               (k0 + wt.box_half[0]) * wt.box_size[1] + wt.box_half[1];
          const std::int64_t base = x + k0 * n1;
          for (std::int64_t k1 = -x1; k1 <= n1 - 1 - x1; ++k1) {
            double w0 = wrow[k1];
            if (w0 == 0.0) continue;
            double du = ux - uv[static_cast<std::size_t>(base + k1)];
            double dv = vx - vv[static_cast<std::size_t>(base + k1)];
            row.add(w0 * (du * dv));
            wsum.add(w0);
          }
        }
      } else {
        const int n1 = grid_.extent[1], n2 = grid_.extent[2];
        const std::int64_t x0 = xi[0], x1 = xi[1], x2 = xi[2];
        for (std::int64_t k0 = -x0; k0 <= grid_.extent[0] - 1 - x0; ++k0)
          for (std::int64_t k1 = -x1; k1 <= n1 - 1 - x1; ++k1) {
            const double* wrow = wt.box.data() +
                                 ((k0 + wt.box_half[0]) * wt.box_size[1] + k1 + wt.box_half[1]) *
                                     wt.box_size[2] +
                                 wt.box_half[2];
            const std::int64_t base = x + (k0 * n1 + k1) * n2;
            for (std::int64_t k2 = -x2; k2 <= n2 - 1 - x2; ++k2) {
              double w0 = wrow[k2];
              if (w0 == 0.0) continue;
              double du = ux - uv[static_cast<std::size_t>(base + k2)];
              double dv = vx - vv[static_cast<std::size_t>(base + k2)];
              row.add(w0 * (du * dv));
              wsum.add(w0);
            }
          }
      }
      pair.add(row.value());
      // exterior mass at x couples u(x)v(x) (neighbors there read zero)
      diag.add((mass - wsum.value()) * (ux * vx));
    }
    pair_part[static_cast<std::size_t>(w)] = pair.value();
    diag_part[static_cast<std::size_t>(w)] = diag.value();
  };

  if (chunks <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < chunks; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  KahanSum total;
  for (std::size_t w = 0; w < pair_part.size(); ++w) {
    total.add(0.5 * pair_part[w]);
    total.add(diag_part[w]);
  }
  return total.value() * std::pow(grid_.h, grid_.dim);
}

double NonlocalOperator::seminorm_rho(const Field& w, const RegionMask& U) const {
  require(w.grid() == grid_ && U.grid == grid_, "seminorm: grid mismatch");
  const WeightTable& wt = *table_;
  auto wv = w.values();
  KahanSum total;
  for (std::int64_t x = 0; x < grid_.cell_count(); ++x) {
    if (!U.contains(x)) continue;
    auto xi = grid_.unflatten(x);
    double wx = wv[static_cast<std::size_t>(x)];
    KahanSum row, wsum;
    if (grid_.dim == 1) {
      const std::int64_t x0 = xi[0];
      const double* wrow = wt.box.data() + wt.box_half[0];
      for (std::int64_t k = -x0; k <= grid_.extent[0] - 1 - x0; ++k) {
        double w0 = wrow[k];
        if (w0 == 0.0) continue;
        double d = wx - wv[static_cast<std::size_t>(x + k)];
        row.add(w0 * d * d);
        wsum.add(w0);
      }
    } else if (grid_.dim == 2) {
      const int n1 = grid_.extent[1];
      const std::int64_t x0 = xi[0], x1 = xi[1];
      for (std::int64_t k0 = -x0; k0 <= grid_.extent[0] - 1 - x0; ++k0) {
        const double* wrow = wt.box.data() +
                             (k0 + wt.box_half[0]) * wt.box_size[1] + wt.box_half[1];
        const std::int64_t base = x + k0 * n1;
        for (std::int64_t k1 = -x1; k1 <= n1 - 1 - x1; ++k1) {
          double w0 = wrow[k1];
          if (w0 == 0.0) continue;
          double d = wx - wv[static_cast<std::size_t>(base + k1)];
          row.add(w0 * d * d);
          wsum.add(w0);
        }
      }
    } else {
      const int n1 = grid_.extent[1], n2 = grid_.extent[2];
      const std::int64_t x0 = xi[0], x1 = xi[1], x2 = xi[2];
      for (std::int64_t k0 = -x0; k0 <= grid_.extent[0] - 1 - x0; ++k0)
        for (std::int64_t k1 = -x1; k1 <= n1 - 1 - x1; ++k1) {
          const double* wrow = wt.box.data() +
                               ((k0 + wt.box_half[0]) * wt.box_size[1] + k1 + wt.box_half[1]) *
                                   wt.box_size[2] +
                               wt.box_half[2];
          const std::int64_t base = x + (k0 * n1 + k1) * n2;
          for (std::int64_t k2 = -x2; k2 <= n2 - 1 - x2; ++k2) {
            double w0 = wrow[k2];
            if (w0 == 0.0) continue;
            double d = wx - wv[static_cast<std::size_t>(base + k2)];
            row.add(w0 * d * d);
            wsum.add(w0);
          }
        }
    }
    total.add(row.value());
    total.add((wt.row_mass - wsum.value()) * wx * wx);
  }
  return total.value() * std::pow(grid_.h, grid_.dim) / wt.params.c;
}

MaskedOperator::MaskedOperator(const NonlocalOperator& op, const RegionMask& region,
                               ApplyPath path)
    : op_(op), region_(region), cells_(region.cells()), path_(path) {
  require(region.grid == op.grid(), "masked operator: grid mismatch");
  require(!cells_.empty(), "masked operator: empty region");
  full_in_.assign(static_cast<std::size_t>(op.grid().cell_count()), 0.0);
  full_out_.assign(full_in_.size(), 0.0);
}

void MaskedOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::fill(full_in_.begin(), full_in_.end(), 0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i)
    full_in_[static_cast<std::size_t>(cells_[i])] = x[i];
  op_.apply_values(full_in_, full_out_, path_);
  for (std::size_t i = 0; i < cells_.size(); ++i)
    y[i] = full_out_[static_cast<std::size_t>(cells_[i])];
}

Field MaskedOperator::to_field(std::span<const double> x) const {
  Field f(region_);
  for (std::size_t i = 0; i < cells_.size(); ++i) f.set(cells_[i], x[i]);
  return f;
}

std::vector<double> MaskedOperator::from_field(const Field& u) const {
  std::vector<double> x(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) x[i] = u[cells_[i]];
  return x;
}

OddReducedOperator::OddReducedOperator(const NonlocalOperator& op, const Reflection& r,
                                       const RegionMask& region, ApplyPath path)
    : op_(op), r_(r), region_(region), cells_(region.cells()), path_(path) {
  require(region.grid == op.grid(), "reduced operator: grid mismatch");
  require(r.lattice_aligned(op.grid()), "reduced operator: reflection not lattice aligned");
  require(!cells_.empty(), "reduced operator: empty region");
  const GridSpec& g = op.grid();
  for (auto flat : cells_)
    require(g.coord(r.axis, g.unflatten(flat)[r.axis]) > r.level,
            "reduced operator: region must lie strictly inside the halfspace");
  full_in_.assign(static_cast<std::size_t>(g.cell_count()), 0.0);
  full_out_.assign(full_in_.size(), 0.0);
}

void OddReducedOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::fill(full_in_.begin(), full_in_.end(), 0.0);
  const GridSpec& g = op_.grid();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    full_in_[static_cast<std::size_t>(cells_[i])] = x[i];
    std::int64_t j = reflect_index(g, cells_[i], r_);
    if (j >= 0) full_in_[static_cast<std::size_t>(j)] = -x[i];
  }
  op_.apply_values(full_in_, full_out_, path_);
  for (std::size_t i = 0; i < cells_.size(); ++i)
    y[i] = full_out_[static_cast<std::size_t>(cells_[i])];
}

Field OddReducedOperator::to_field(std::span<const double> x) const {
  Field f(region_);
  for (std::size_t i = 0; i < cells_.size(); ++i) f.set(cells_[i], x[i]);
  return f;
}

Field OddReducedOperator::to_full_field(std::span<const double> x) const {
  return odd_extension(to_field(x), r_);
}

OddReducedOperator antisymmetric_reduce(const NonlocalOperator& op, const Reflection& r,
                                        const RegionMask& region, ApplyPath path) {
  return OddReducedOperator(op, r, region, path);
}

DoublyOddReducedOperator::DoublyOddReducedOperator(const NonlocalOperator& op,
                                                   const Reflection& r1,
                                                   const Reflection& r2,
                                                   const RegionMask& region,
                                                   ApplyPath path)
    : op_(op), r1_(r1), r2_(r2), region_(region), cells_(region.cells()), path_(path) {
  require(region.grid == op.grid(), "reduced operator: grid mismatch");
  require(r1.axis != r2.axis, "doubly reduced operator needs perpendicular reflections");
  require(r1.lattice_aligned(op.grid()) && r2.lattice_aligned(op.grid()),
          "reduced operator: reflections not lattice aligned");
  require(!cells_.empty(), "reduced operator: empty region");
  const GridSpec& g = op.grid();
  for (auto flat : cells_) {
    auto idx = g.unflatten(flat);
    require(g.coord(r1.axis, idx[r1.axis]) > r1.level &&
                g.coord(r2.axis, idx[r2.axis]) > r2.level,
            "reduced operator: region must lie strictly inside H1 ∩ H2");
  }
  full_in_.assign(static_cast<std::size_t>(g.cell_count()), 0.0);
  full_out_.assign(full_in_.size(), 0.0);
}

void DoublyOddReducedOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::fill(full_in_.begin(), full_in_.end(), 0.0);
  const GridSpec& g = op_.grid();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    std::int64_t flat = cells_[i];
    std::int64_t j1 = reflect_index(g, flat, r1_);
    std::int64_t j2 = reflect_index(g, flat, r2_);
    std::int64_t j12 = j1 >= 0 ? reflect_index(g, j1, r2_) : -1;
    full_in_[static_cast<std::size_t>(flat)] = x[i];
    if (j1 >= 0) full_in_[static_cast<std::size_t>(j1)] = -x[i];
    if (j2 >= 0) full_in_[static_cast<std::size_t>(j2)] = -x[i];
    if (j12 >= 0) full_in_[static_cast<std::size_t>(j12)] = x[i];
  }
  op_.apply_values(full_in_, full_out_, path_);
  for (std::size_t i = 0; i < cells_.size(); ++i)
    y[i] = full_out_[static_cast<std::size_t>(cells_[i])];
}

Field DoublyOddReducedOperator::to_full_field(std::span<const double> x) const {
  Field quadrant(region_);
  for (std::size_t i = 0; i < cells_.size(); ++i) quadrant.set(cells_[i], x[i]);
  return doubly_odd_extension(quadrant, r1_, r2_);
}

DiagShiftedMap::DiagShiftedMap(const LinearMap& base, std::vector<double> shift)
    : base_(base), shift_(std::move(shift)) {
  if (shift_.size() != static_cast<std::size_t>(base.size()))
    throw std::invalid_argument("diagonal shift size mismatch");
}

void DiagShiftedMap::apply(std::span<const double> x, std::span<double> y) const {
  base_.apply(x, y);
  for (std::size_t i = 0; i < shift_.size(); ++i) y[i] -= shift_[i] * x[i];
}

}  // namespace fraclab
