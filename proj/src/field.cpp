#include "field.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraclab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t hash) {
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

Field::Field(const RegionMask& support)
    : support_(support),
      values_(static_cast<std::size_t>(support.grid.cell_count()), 0.0) {
  require(support_.mask.size() == values_.size(), "mask size does not match grid");
}

Field::Field(const RegionMask& support, std::vector<double> full_grid_values)
    : support_(support), values_(std::move(full_grid_values)) {
  require(support_.mask.size() == values_.size() &&
              values_.size() == static_cast<std::size_t>(support.grid.cell_count()),
          "value array size does not match grid");
  clamp_to_support();
  for (double v : values_)
    require(std::isfinite(v), "field values must be finite");
}

Field Field::build(const RegionMask& support,
                   const std::function<double(const std::array<double, kMaxDim>&)>& fn) {
  Field f(support);
  for (std::int64_t i = 0; i < support.grid.cell_count(); ++i)
    if (support.contains(i)) f.values_[static_cast<std::size_t>(i)] = fn(support.grid.center(i));
  return f;
}

void Field::set(std::int64_t flat, double v) {
  if (!support_.contains(flat)) {
    require(v == 0.0, "cannot assign a nonzero value outside the support mask");
    return;
  }
  values_[static_cast<std::size_t>(flat)] = v;
}

void Field::clamp_to_support() {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!support_.mask[i]) values_[i] = 0.0;
}

void Field::set_tag(SymmetryTag tag) {
  for (auto& t : tags_)
    if (t.axis == tag.axis) {
      t = tag;
      return;
    }
  tags_.push_back(tag);
}

bool Field::has_tag(int axis, int parity) const {
  for (const auto& t : tags_)
    if (t.axis == axis && t.parity == parity) return true;
  return false;
}

double Field::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::lp_norm(double p) const {
  double cell = std::pow(grid().h, grid().dim);
  double sum = 0.0;
  for (double v : values_) sum += std::pow(std::abs(v), p);
  return std::pow(sum * cell, 1.0 / p);
}

double Field::l2_dot(const Field& other) const {
  require(grid() == other.grid(), "grid mismatch");
  double cell = std::pow(grid().h, grid().dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) sum += values_[i] * other.values_[i];
  return sum * cell;
}

namespace {

RegionMask union_mask(const RegionMask& a, const RegionMask& b) {
  require(a.grid == b.grid, "grid mismatch");
  RegionMask out(a.grid);
  for (std::size_t i = 0; i < out.mask.size(); ++i)
    out.mask[i] = (a.mask[i] || b.mask[i]) ? 1 : 0;
  return out;
}

}  // namespace

Field operator+(const Field& a, const Field& b) {
  Field out(union_mask(a.support(), b.support()));
  for (std::int64_t i = 0; i < a.grid().cell_count(); ++i)
    out.set(i, a[i] + b[i]);
  return out;
}

Field operator-(const Field& a, const Field& b) {
  Field out(union_mask(a.support(), b.support()));
  for (std::int64_t i = 0; i < a.grid().cell_count(); ++i)
    out.set(i, a[i] - b[i]);
  return out;
}

Field operator*(double c, const Field& a) {
  Field out = a;
  for (double& v : out.raw()) v *= c;
  return out;
}

Field compose_reflection(const Field& u, const Reflection& r) {
  const GridSpec& g = u.grid();
  RegionMask support(g);
  std::vector<double> values(static_cast<std::size_t>(g.cell_count()), 0.0);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    std::int64_t j = reflect_index(g, i, r);
    if (j < 0) continue;  // image of an off-grid cell reads zero
    values[static_cast<std::size_t>(i)] = u[j];
    support.mask[static_cast<std::size_t>(i)] = u.support().mask[static_cast<std::size_t>(j)];
  }
  return Field(support, std::move(values));
}

double symmetry_defect(const Field& u, const Reflection& r, int parity) {
  const GridSpec& g = u.grid();
  double worst = 0.0;
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    std::int64_t j = reflect_index(g, i, r);
    double mirrored = j < 0 ? 0.0 : u[j];
    worst = std::max(worst, std::abs(mirrored - parity * u[i]));
  }
  return worst;
}

Field antisymmetrize(const Field& u, const Reflection& r) {
  Field refl = compose_reflection(u, r);
  Field out = 0.5 * (u - refl);
  if (r.level == 0.0) out.set_tag({r.axis, -1});
  return out;
}

Field symmetrize_even(const Field& u, const Reflection& r) {
  Field refl = compose_reflection(u, r);
  Field out = 0.5 * (u + refl);
  if (r.level == 0.0) out.set_tag({r.axis, +1});
  return out;
}

Field positive_part(const Field& u) {
  Field out = u;
  for (double& v : out.raw()) v = v > 0.0 ? v : 0.0;
  return out;
}

Field negative_part(const Field& u) {
  Field out = u;
  for (double& v : out.raw()) v = v < 0.0 ? -v : 0.0;
  return out;
}

Field abs_field(const Field& u) {
  Field out = u;
  for (double& v : out.raw()) v = std::abs(v);
  return out;
}

Field restrict_to(const Field& u, const RegionMask& region) {
  require(u.grid() == region.grid, "grid mismatch");
  RegionMask support(u.grid());
  for (std::size_t i = 0; i < support.mask.size(); ++i)
    support.mask[i] = (u.support().mask[i] && region.mask[i]) ? 1 : 0;
  Field out(support);
  for (std::int64_t i = 0; i < u.grid().cell_count(); ++i)
    if (support.contains(i)) out.set(i, u[i]);
  return out;
}

Field polarize(const Field& u, const Reflection& r) {
  double defect = symmetry_defect(u, r, -1);
  require(defect <= 1e-12 * std::max(u.sup_norm(), 1e-300),
          "polarize needs a field antisymmetric about the reflection");
  const GridSpec& g = u.grid();
  Field out(u.support());
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    if (!u.support().contains(i)) continue;
    double coordinate = g.coord(r.axis, g.unflatten(i)[r.axis]);
    out.set(i, coordinate > r.level ? std::abs(u[i]) : -std::abs(u[i]));
  }
  if (r.level == 0.0) out.set_tag({r.axis, -1});
  return out;
}

Field test_function_v(const Field& w, const Reflection& r1, const Reflection& r2) {
  double scale = std::max(w.sup_norm(), 1e-300);
  require(symmetry_defect(w, r1, -1) <= 1e-12 * scale &&
              symmetry_defect(w, r2, -1) <= 1e-12 * scale,
          "test_function_v needs a doubly antisymmetric field");
  const GridSpec& g = w.grid();
  RegionMask support(g);
  std::vector<double> values(static_cast<std::size_t>(g.cell_count()), 0.0);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    auto idx = g.unflatten(i);
    bool in_h1 = g.coord(r1.axis, idx[r1.axis]) > r1.level;
    bool in_h2 = g.coord(r2.axis, idx[r2.axis]) > r2.level;
    if (!in_h2) continue;
    double wv = w[i];
    double v = in_h1 ? (wv < 0.0 ? -wv : 0.0) : (wv > 0.0 ? -wv : 0.0);
    if (v != 0.0) {
      values[static_cast<std::size_t>(i)] = v;
      support.mask[static_cast<std::size_t>(i)] = 1;
    }
  }
  return Field(support, std::move(values));
}

Field odd_extension(const Field& upper, const Reflection& r) {
  const GridSpec& g = upper.grid();
  RegionMask support(g);
  std::vector<double> values(static_cast<std::size_t>(g.cell_count()), 0.0);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    if (!upper.support().contains(i)) continue;
    double coordinate = g.coord(r.axis, g.unflatten(i)[r.axis]);
    require(coordinate > r.level, "odd_extension input must live on the positive side");
    std::int64_t j = reflect_index(g, i, r);
    values[static_cast<std::size_t>(i)] = upper[i];
    support.mask[static_cast<std::size_t>(i)] = 1;
    if (j >= 0) {
      values[static_cast<std::size_t>(j)] = -upper[i];
      support.mask[static_cast<std::size_t>(j)] = 1;
    }
  }
  Field out(support, std::move(values));
  if (r.level == 0.0) out.set_tag({r.axis, -1});
  return out;
}

Field doubly_odd_extension(const Field& quadrant, const Reflection& r1,
                           const Reflection& r2) {
  const GridSpec& g = quadrant.grid();
  RegionMask support(g);
  std::vector<double> values(static_cast<std::size_t>(g.cell_count()), 0.0);
  auto place = [&](std::int64_t j, double v) {
    if (j < 0) return;
    values[static_cast<std::size_t>(j)] = v;
    support.mask[static_cast<std::size_t>(j)] = 1;
  };
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    if (!quadrant.support().contains(i)) continue;
    auto idx = g.unflatten(i);
    require(g.coord(r1.axis, idx[r1.axis]) > r1.level &&
                g.coord(r2.axis, idx[r2.axis]) > r2.level,
            "doubly_odd_extension input must live in H1 ∩ H2");
    double v = quadrant[i];
    std::int64_t j1 = reflect_index(g, i, r1);
    std::int64_t j2 = reflect_index(g, i, r2);
    std::int64_t j12 = j1 >= 0 ? reflect_index(g, j1, r2) : -1;
    place(i, v);
    place(j1, -v);
    place(j2, -v);
    place(j12, v);
  }
  Field out(support, std::move(values));
  if (r1.level == 0.0) out.set_tag({r1.axis, -1});
  if (r2.level == 0.0) out.set_tag({r2.axis, -1});
  return out;
}

std::string field_to_csv(const Field& u) {
  const GridSpec& g = u.grid();
  std::ostringstream out;
  for (int a = 0; a < g.dim; ++a) out << (a ? "," : "") << "x" << (a + 1);
  out << ",value\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    if (!u.support().contains(i)) continue;
    auto x = g.center(i);
    for (int a = 0; a < g.dim; ++a) out << (a ? "," : "") << fmt(x[a]);
    out << "," << fmt(u[i]) << "\n";
  }
  return out.str();
}

namespace {

constexpr char kFieldMagic[4] = {'F', 'R', 'F', 'D'};
constexpr std::uint32_t kFieldVersion = 1;

}  // namespace

void save_field_binary(const Field& u, const std::string& path) {
  const GridSpec& g = u.grid();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write field dump: " + path);
  auto put = [&](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put(kFieldMagic, 4);
  put(&kFieldVersion, sizeof kFieldVersion);
  std::int32_t dim = g.dim;
  put(&dim, sizeof dim);
  for (int a = 0; a < g.dim; ++a) {
    std::int32_t e = g.extent[a];
    put(&e, sizeof e);
  }
  put(&g.h, sizeof g.h);
  for (int a = 0; a < g.dim; ++a) put(&g.origin[a], sizeof(double));
  std::size_t cells = static_cast<std::size_t>(g.cell_count());
  put(u.support().mask.data(), cells);
  put(u.values().data(), cells * sizeof(double));
  std::uint64_t checksum = fnv1a(u.support().mask.data(), cells, 1469598103934665603ull);
  checksum = fnv1a(reinterpret_cast<const unsigned char*>(u.values().data()),
                   cells * sizeof(double), checksum);
  put(&checksum, sizeof checksum);
  if (!out) throw std::runtime_error("short write on field dump: " + path);
}

Field load_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open field dump: " + path);
  auto get = [&](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("truncated field dump: " + path);
  };
  char magic[4];
  get(magic, 4);
  std::uint32_t version;
  get(&version, sizeof version);
  if (std::memcmp(magic, kFieldMagic, 4) != 0 || version != kFieldVersion)
    throw std::runtime_error("not a field dump: " + path);
  std::int32_t dim;
  get(&dim, sizeof dim);
  if (dim < 1 || dim > kMaxDim) throw std::runtime_error("bad dimension in field dump");
  std::array<int, kMaxDim> extent{};
  for (int a = 0; a < dim; ++a) {
    std::int32_t e;
    get(&e, sizeof e);
    extent[a] = e;
  }
  double h;
  get(&h, sizeof h);
  GridSpec grid(dim, h, extent);
  for (int a = 0; a < dim; ++a) {
    double o;
    get(&o, sizeof o);
    if (o != grid.origin[a]) throw std::runtime_error("unexpected origin in field dump");
  }
  std::size_t cells = static_cast<std::size_t>(grid.cell_count());
  RegionMask support(grid);
  get(support.mask.data(), cells);
  std::vector<double> values(cells);
  get(values.data(), cells * sizeof(double));
  std::uint64_t stored;
  get(&stored, sizeof stored);
  std::uint64_t checksum = fnv1a(support.mask.data(), cells, 1469598103934665603ull);
  checksum = fnv1a(reinterpret_cast<const unsigned char*>(values.data()),
                   cells * sizeof(double), checksum);
  if (stored != checksum) throw std::runtime_error("field dump checksum mismatch: " + path);
  return Field(support, std::move(values));
}

}  // namespace fraclab
