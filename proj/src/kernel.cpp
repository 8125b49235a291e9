#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace fraclab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// 8-point Gauss-Legendre rule on [-1/2, 1/2]
constexpr int kQuadOrder = 8;
constexpr double kNodes[kQuadOrder] = {
    -0.48014492824876815, -0.39833323870681336, -0.26276620495816450,
    -0.09171732124782490, 0.09171732124782490,  0.26276620495816450,
    0.39833323870681336,  0.48014492824876815};
constexpr double kWeights[kQuadOrder] = {
    0.050614268145188129, 0.111190517226687235, 0.156853322938943643,
    0.181341891689180991, 0.181341891689180991, 0.156853322938943643,
    0.111190517226687235, 0.050614268145188129};

std::array<int, kMaxDim> canonical_offset(std::array<int, kMaxDim> k, int dim) {
  for (int a = 0; a < dim; ++a) k[a] = std::abs(k[a]);
  std::sort(k.begin(), k.begin() + dim, std::greater<int>());
  for (int a = dim; a < kMaxDim; ++a) k[a] = 0;
  return k;
}

// dimensionless cell integral: int_{[-1/2,1/2]^dim} |k + t|^(-(dim+2s)) dt
double cell_integral(const std::array<int, kMaxDim>& k, int dim, double expo) {
  double total = 0.0;
  if (dim == 1) {
    for (int i = 0; i < kQuadOrder; ++i) {
      double z = k[0] + kNodes[i];
      total += kWeights[i] * std::pow(z * z, -0.5 * expo);
    }
  } else if (dim == 2) {
    for (int i = 0; i < kQuadOrder; ++i) {
      double zi = k[0] + kNodes[i];
      double row = 0.0;
      for (int j = 0; j < kQuadOrder; ++j) {
        double zj = k[1] + kNodes[j];
        row += kWeights[j] * std::pow(zi * zi + zj * zj, -0.5 * expo);
      }
      total += kWeights[i] * row;
    }
  } else {
    for (int i = 0; i < kQuadOrder; ++i) {
      double zi = k[0] + kNodes[i];
      double plane = 0.0;
      for (int j = 0; j < kQuadOrder; ++j) {
        double zj = k[1] + kNodes[j];
        double row = 0.0;
        for (int l = 0; l < kQuadOrder; ++l) {
          double zl = k[2] + kNodes[l];
          row += kWeights[l] * std::pow(zi * zi + zj * zj + zl * zl, -0.5 * expo);
        }
        plane += kWeights[j] * row;
      }
      total += kWeights[i] * plane;
    }
  }
  return total;
}

// visits the box [lo, hi]^dim in lexicographic order
void for_each_offset(int dim, const std::array<int, kMaxDim>& lo,
                     const std::array<int, kMaxDim>& hi,
                     const std::function<void(const std::array<int, kMaxDim>&)>& fn) {
  std::array<int, kMaxDim> k{};
  std::function<void(int)> rec = [&](int axis) {
    if (axis == dim) {
      fn(k);
      return;
    }
    for (k[axis] = lo[axis]; k[axis] <= hi[axis]; ++k[axis]) rec(axis + 1);
  };
  rec(0);
}

// fills mass totals and the dense reachable-box lookup from table.weights
void finalize_table(WeightTable& table, const GridSpec& grid) {
  const double rmax = table.truncation_radius / table.h;
  const double rmax2 = rmax * rmax;
  const int cube = static_cast<int>(std::floor(rmax)) + 1;

  std::array<int, kMaxDim> lo{}, hi{};
  for (int a = 0; a < grid.dim; ++a) {
    lo[a] = -cube;
    hi[a] = cube;
  }
  double sum = 0.0, comp = 0.0;
  for_each_offset(grid.dim, lo, hi, [&](const std::array<int, kMaxDim>& k) {
    double n2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) n2 += static_cast<double>(k[a]) * k[a];
    if (n2 == 0.0 || n2 > rmax2) return;
    double w = table.weights.at(canonical_offset(k, grid.dim));
    double y = w - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  });
  table.stored_mass = sum;
  table.row_mass = table.stored_mass + table.tail;

  std::int64_t box_cells = 1;
  for (int a = 0; a < grid.dim; ++a) {
    table.box_half[a] = grid.extent[a] - 1;
    table.box_size[a] = 2 * table.box_half[a] + 1;
    box_cells *= table.box_size[a];
    lo[a] = -table.box_half[a];
    hi[a] = table.box_half[a];
  }
  table.box.assign(static_cast<std::size_t>(box_cells), 0.0);
  std::int64_t flat = 0;
  for_each_offset(grid.dim, lo, hi, [&](const std::array<int, kMaxDim>& k) {
    double n2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) n2 += static_cast<double>(k[a]) * k[a];
    if (n2 != 0.0 && n2 <= rmax2) {
      auto it = table.weights.find(canonical_offset(k, grid.dim));
      if (it != table.weights.end()) table.box[static_cast<std::size_t>(flat)] = it->second;
    }
    ++flat;
  });
}

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

double normalization_constant(int dim, double s) {
  require(dim >= 1, "kernel dimension must be >= 1");
  require(s > 0.0 && s < 1.0, "fractional order s must lie in (0,1)");
  return s * std::pow(4.0, s) * std::tgamma(0.5 * dim + s) /
         (std::pow(M_PI, 0.5 * dim) * std::tgamma(1.0 - s));
}

KernelParams resolve_kernel_params(KernelParams params) {
  require(params.dim >= 1, "kernel dimension must be >= 1");
  require(params.s > 0.0 && params.s < 1.0, "fractional order s must lie in (0,1)");
  if (params.c == 0.0) params.c = normalization_constant(params.dim, params.s);
  require(params.c > 0.0, "kernel constant must be positive");
  return params;
}

double unit_sphere_measure(int dim) {
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double kernel_value(const KernelParams& params, std::span<const double> z) {
  double n2 = 0.0;
  for (double v : z) n2 += v * v;
  require(n2 > 0.0, "kernel is singular at z = 0");
  return params.c * std::pow(n2, -0.5 * params.exponent());
}

double kernel_difference(const KernelParams& params, std::span<const double> x,
                         std::span<const double> y, const Reflection& r) {
  require(x.size() == y.size(), "point dimensions differ");
  double near2 = 0.0, far2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    double dy = x[a] - y[a];
    double ry = static_cast<int>(a) == r.axis ? x[a] - (2.0 * r.level - y[a]) : dy;
    near2 += dy * dy;
    far2 += ry * ry;
  }
  require(near2 > 0.0, "kernel difference is singular at x = y");
  double q = 0.5 * params.exponent();
  return params.c * (std::pow(near2, -q) - std::pow(far2, -q));
}

double four_point_deficit(const KernelParams& params, std::span<const double> x,
                          std::span<const double> y, const Reflection& r1,
                          const Reflection& r2) {
  require(x.size() == y.size(), "point dimensions differ");
  require(r1.axis != r2.axis, "four-point deficit needs perpendicular hyperplanes");
  double d2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    double dy = x[a] - y[a];
    d2 += dy * dy;
  }
  require(d2 > 0.0, "four-point deficit is singular at x = y");
  // |r_i(x)-y|^2 = 4 (x_i - level)(y_i - level) + |x-y|^2
  double a1 = 4.0 * (x[static_cast<std::size_t>(r1.axis)] - r1.level) *
              (y[static_cast<std::size_t>(r1.axis)] - r1.level);
  double a2 = 4.0 * (x[static_cast<std::size_t>(r2.axis)] - r2.level) *
              (y[static_cast<std::size_t>(r2.axis)] - r2.level);
  double q = 0.5 * params.exponent();
  // paired brackets so a vanishing a1 or a2 cancels exactly
  double near_pair = std::pow(d2, -q) - std::pow(d2 + a2, -q);
  double far_pair = std::pow(d2 + a1, -q) - std::pow(d2 + a1 + a2, -q);
  return params.c * (near_pair - far_pair);
}

double f_surrogate(double a, double b, double M, int dim, double s) {
  require(M > 0.0, "f_surrogate needs M > 0");
  require(a >= 0.0 && b >= 0.0, "f_surrogate needs a, b >= 0");
  double q = 0.5 * dim + s;
  return 1.0 + std::pow(M / (a + b + M), q) - std::pow(M / (a + M), q) -
         std::pow(M / (b + M), q);
}

double WeightTable::weight(std::array<int, kMaxDim> k) const {
  auto canon = canonical_offset(k, dim);
  auto it = weights.find(canon);
  return it == weights.end() ? 0.0 : it->second;
}

bool WeightTable::has_offset(std::array<int, kMaxDim> k) const {
  return weights.count(canonical_offset(k, dim)) != 0;
}

double default_truncation_radius(const GridSpec& grid) {
  double diag2 = 0.0;
  for (int a = 0; a < grid.dim; ++a) {
    double span = (grid.extent[a] - 1) * grid.h;
    diag2 += span * span;
  }
  return std::sqrt(diag2) + 2.0 * grid.h;
}

WeightTable build_weight_table(const GridSpec& grid, const KernelParams& params_in,
                               double truncation_radius) {
  KernelParams params = resolve_kernel_params(params_in);
  require(params.dim == grid.dim, "kernel dimension must match the grid");
  require(truncation_radius >= 3.0 * grid.h,
          "truncation radius must be at least 3h (tail formula inaccurate below)");

  WeightTable table;
  table.params = params;
  table.h = grid.h;
  table.dim = grid.dim;
  table.truncation_radius = truncation_radius;
  table.tail = params.c * unit_sphere_measure(grid.dim) / (2.0 * params.s) *
               std::pow(truncation_radius, -2.0 * params.s);

  const double expo = params.exponent();
  const double scale = params.c * std::pow(grid.h, -2.0 * params.s);
  const double rmax = truncation_radius / grid.h;
  const int cube = static_cast<int>(std::floor(rmax)) + 1;
  const double rmax2 = rmax * rmax;

  // one representative per orbit: 0 <= k_dim <= ... <= k_1
  std::array<int, kMaxDim> k{};
  auto visit = [&](const std::array<int, kMaxDim>& kk) {
    double n2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) n2 += static_cast<double>(kk[a]) * kk[a];
    if (n2 == 0.0 || n2 > rmax2) return;
    table.weights[kk] = scale * cell_integral(kk, grid.dim, expo);
  };
  if (grid.dim == 1) {
    for (k[0] = 0; k[0] <= cube; ++k[0]) visit(k);
  } else if (grid.dim == 2) {
    for (k[0] = 0; k[0] <= cube; ++k[0])
      for (k[1] = 0; k[1] <= k[0]; ++k[1]) visit(k);
  } else {
    for (k[0] = 0; k[0] <= cube; ++k[0])
      for (k[1] = 0; k[1] <= k[0]; ++k[1])
        for (k[2] = 0; k[2] <= k[1]; ++k[2]) visit(k);
  }

  finalize_table(table, grid);
  return table;
}

namespace {

constexpr char kCacheMagic[4] = {'F', 'L', 'W', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

struct CacheHeader {
  char magic[4];
  std::uint32_t version;
  std::int32_t dim;
  std::int32_t pad;
  double s;
  double c;
  double h;
  double radius;
  std::uint64_t rows;
  std::uint64_t checksum;
};

}  // namespace

void save_weight_table(const WeightTable& table, const std::string& path) {
  std::vector<unsigned char> payload;
  payload.reserve(table.weights.size() * (sizeof(std::int32_t) * kMaxDim + sizeof(double)));
  auto put = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    payload.insert(payload.end(), b, b + n);
  };
  for (const auto& [k, w] : table.weights) {
    for (int a = 0; a < kMaxDim; ++a) {
      std::int32_t v = k[a];
      put(&v, sizeof v);
    }
    put(&w, sizeof w);
  }

  CacheHeader header{};
  std::memcpy(header.magic, kCacheMagic, 4);
  header.version = kCacheVersion;
  header.dim = table.dim;
  header.s = table.params.s;
  header.c = table.params.c;
  header.h = table.h;
  header.radius = table.truncation_radius;
  header.rows = table.weights.size();
  header.checksum = fnv1a(payload.data(), payload.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write weight table cache: " + path);
  out.write(reinterpret_cast<const char*>(&header), sizeof header);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("short write on weight table cache: " + path);
}

std::optional<WeightTable> load_weight_table(const std::string& path,
                                             const GridSpec& grid,
                                             const KernelParams& params_in,
                                             double truncation_radius) {
  KernelParams params = resolve_kernel_params(params_in);
  if (params.dim != grid.dim) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  CacheHeader header{};
  in.read(reinterpret_cast<char*>(&header), sizeof header);
  if (!in || std::memcmp(header.magic, kCacheMagic, 4) != 0 ||
      header.version != kCacheVersion)
    return std::nullopt;
  if (header.dim != grid.dim || header.s != params.s || header.c != params.c ||
      header.h != grid.h || header.radius != truncation_radius)
    return std::nullopt;

  std::size_t row_bytes = sizeof(std::int32_t) * kMaxDim + sizeof(double);
  std::vector<unsigned char> payload(header.rows * row_bytes);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (!in || fnv1a(payload.data(), payload.size()) != header.checksum)
    return std::nullopt;

  WeightTable table;
  table.params = params;
  table.h = grid.h;
  table.dim = grid.dim;
  table.truncation_radius = truncation_radius;
  table.tail = params.c * unit_sphere_measure(grid.dim) / (2.0 * params.s) *
               std::pow(truncation_radius, -2.0 * params.s);
  const unsigned char* p = payload.data();
  for (std::uint64_t r = 0; r < header.rows; ++r) {
    std::array<int, kMaxDim> k{};
    for (int a = 0; a < kMaxDim; ++a) {
      std::int32_t v;
      std::memcpy(&v, p, sizeof v);
      p += sizeof v;
      k[a] = v;
    }
    double w;
    std::memcpy(&w, p, sizeof w);
    p += sizeof w;
    if (w <= 0.0) return std::nullopt;
    table.weights[k] = w;
  }
  try {
    finalize_table(table, grid);
  } catch (const std::exception&) {
    return std::nullopt;  // stored rows do not cover the requested ball
  }
  return table;
}

std::string weight_table_cache_name(const KernelParams& params, double h,
                                    double truncation_radius) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "wt_d%d_s%.17g_c%.17g_h%.17g_R%.17g.bin",
                params.dim, params.s, params.c, h, truncation_radius);
  return buf;
}

}  // namespace fraclab
