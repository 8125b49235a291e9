#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fraclab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double sq(double v) { return v * v; }

}  // namespace

GridSpec::GridSpec(int dim_, double h_, std::array<int, kMaxDim> extent_)
    : dim(dim_), h(h_), extent(extent_) {
  auto errs = [&] {
    GridSpec tmp;
    tmp.dim = dim_;
    tmp.h = h_;
    tmp.extent = extent_;
    for (int a = 0; a < dim_; ++a) tmp.origin[a] = -0.5 * (extent_[a] - 1) * h_;
    return std::make_pair(tmp, validate_grid(tmp));
  }();
  if (!errs.second.empty()) throw std::invalid_argument(errs.second.front());
  origin = errs.first.origin;
}

std::vector<std::string> validate_grid(const GridSpec& grid) {
  std::vector<std::string> errors;
  if (grid.dim < 1 || grid.dim > kMaxDim)
    errors.push_back("grid dimension must be in [1," + std::to_string(kMaxDim) + "]");
  if (!(grid.h > 0.0)) errors.push_back("grid spacing h must be positive");
  for (int a = 0; a < grid.dim && a < kMaxDim; ++a) {
    if (grid.extent[a] < 2)
      errors.push_back("grid extent on axis " + std::to_string(a + 1) + " must be >= 2");
    if (grid.extent[a] % 2 != 0)
      errors.push_back("grid extent on axis " + std::to_string(a + 1) +
                       " must be even so the lattice is symmetric about the axis hyperplane");
    double centered = -0.5 * (grid.extent[a] - 1) * grid.h;
    if (grid.h > 0.0 && std::abs(grid.origin[a] - centered) > 1e-12 * grid.h)
      errors.push_back("grid origin on axis " + std::to_string(a + 1) +
                       " must center the lattice on the coordinate hyperplane");
  }
  return errors;
}

std::int64_t GridSpec::cell_count() const {
  std::int64_t n = 1;
  for (int a = 0; a < dim; ++a) n *= extent[a];
  return n;
}

std::array<int, kMaxDim> GridSpec::unflatten(std::int64_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % extent[a]);
    flat /= extent[a];
  }
  return idx;
}

std::int64_t GridSpec::flatten(const std::array<int, kMaxDim>& idx) const {
  std::int64_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = flat * extent[a] + idx[a];
  return flat;
}

bool GridSpec::in_bounds(const std::array<int, kMaxDim>& idx) const {
  for (int a = 0; a < dim; ++a)
    if (idx[a] < 0 || idx[a] >= extent[a]) return false;
  return true;
}

std::array<double, kMaxDim> GridSpec::center(std::int64_t flat) const {
  auto idx = unflatten(flat);
  std::array<double, kMaxDim> x{};
  for (int a = 0; a < dim; ++a) x[a] = coord(a, idx[a]);
  return x;
}

bool GridSpec::operator==(const GridSpec& other) const {
  if (dim != other.dim || h != other.h) return false;
  for (int a = 0; a < dim; ++a)
    if (extent[a] != other.extent[a] || origin[a] != other.origin[a]) return false;
  return true;
}

bool Reflection::lattice_aligned(const GridSpec& grid) const {
  if (axis < 0 || axis >= grid.dim) return false;
  double two_level = 2.0 * level / grid.h;
  return std::abs(two_level - std::round(two_level)) < 1e-9;
}

std::array<double, kMaxDim> reflect_point(const std::array<double, kMaxDim>& x,
                                          const Reflection& r) {
  auto y = x;
  y[r.axis] = 2.0 * r.level - x[r.axis];
  return y;
}

std::int64_t reflect_index(const GridSpec& grid, std::int64_t flat,
                           const Reflection& r) {
  if (!r.lattice_aligned(grid))
    throw std::invalid_argument(
        "reflection level is not lattice aligned (must be a multiple of h/2)");
  auto idx = grid.unflatten(flat);
  // index image of x -> 2*level - x on axis r.axis
  double j = 2.0 * (r.level - grid.origin[r.axis]) / grid.h - idx[r.axis];
  int ji = static_cast<int>(std::llround(j));
  idx[r.axis] = ji;
  if (!grid.in_bounds(idx)) return -1;
  return grid.flatten(idx);
}

std::int64_t RegionMask::count() const {
  std::int64_t n = 0;
  for (auto m : mask) n += m != 0;
  return n;
}

double RegionMask::measure() const {
  return static_cast<double>(count()) * std::pow(grid.h, grid.dim);
}

std::vector<std::int64_t> RegionMask::cells() const {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(mask.size()); ++i)
    if (mask[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

std::string to_string(DomainLabel label) {
  switch (label) {
    case DomainLabel::kBall: return "ball";
    case DomainLabel::kEllipse: return "ellipse";
    case DomainLabel::kRectangle: return "rectangle";
    case DomainLabel::kStadium: return "stadium";
    case DomainLabel::kCustom: return "custom";
  }
  return "?";
}

RegionMask Domain::region() const {
  RegionMask rm(grid);
  rm.mask = mask;
  return rm;
}

std::int64_t Domain::cell_count_inside() const {
  std::int64_t n = 0;
  for (auto m : mask) n += m != 0;
  return n;
}

namespace {

bool point_in_shape(DomainLabel label, const DomainParams& p,
                    const std::array<double, kMaxDim>& x, int dim) {
  switch (label) {
    case DomainLabel::kBall: {
      double r2 = 0;
      for (int a = 0; a < dim; ++a) r2 += sq(x[a]);
      return r2 < sq(p.radius);
    }
    case DomainLabel::kEllipse: {
      double q = 0;
      for (int a = 0; a < dim; ++a) q += sq(x[a] / p.semi_axes[a]);
      return q < 1.0;
    }
    case DomainLabel::kRectangle: {
      for (int a = 0; a < dim; ++a)
        if (std::abs(x[a]) >= p.half_widths[a]) return false;
      return true;
    }
    case DomainLabel::kStadium: {
      // distance from x to the segment [-a, a] x {0}^(dim-1) below cap radius
      double t = std::clamp(x[0], -p.stadium_half_length, p.stadium_half_length);
      double d2 = sq(x[0] - t);
      for (int a = 1; a < dim; ++a) d2 += sq(x[a]);
      return d2 < sq(p.stadium_cap_radius);
    }
    case DomainLabel::kCustom: return false;  // handled by caller
  }
  return false;
}

}  // namespace

Domain build_domain(DomainLabel label, const DomainParams& params,
                    const GridSpec& grid) {
  {
    auto errs = validate_grid(grid);
    require(errs.empty(), errs.empty() ? "" : errs.front());
  }
  switch (label) {
    case DomainLabel::kBall:
      require(params.radius > 0.0, "ball radius must be positive");
      break;
    case DomainLabel::kEllipse:
      for (int a = 0; a < grid.dim; ++a)
        require(params.semi_axes[a] > 0.0, "ellipse semi-axes must be positive");
      break;
    case DomainLabel::kRectangle:
      for (int a = 0; a < grid.dim; ++a)
        require(params.half_widths[a] > 0.0, "rectangle half-widths must be positive");
      break;
    case DomainLabel::kStadium:
      require(grid.dim == 2, "stadium domains are two-dimensional");
      require(params.stadium_half_length >= 0.0 && params.stadium_cap_radius > 0.0,
              "stadium needs half_length >= 0 and cap_radius > 0");
      break;
    case DomainLabel::kCustom:
      require(params.custom_mask.size() == static_cast<std::size_t>(grid.cell_count()),
              "custom mask size does not match the grid");
      break;
  }

  Domain dom;
  dom.grid = grid;
  dom.label = label;
  dom.mask.assign(static_cast<std::size_t>(grid.cell_count()), 0);
  if (label == DomainLabel::kCustom) {
    dom.mask = params.custom_mask;
  } else {
    for (std::int64_t i = 0; i < grid.cell_count(); ++i)
      dom.mask[static_cast<std::size_t>(i)] =
          point_in_shape(label, params, grid.center(i), grid.dim) ? 1 : 0;
  }

  std::int64_t inside = dom.cell_count_inside();
  require(inside > 0, "domain mask is empty on this grid");

  // at least 4 cells across in every axis
  for (int a = 0; a < grid.dim; ++a) {
    int lo = grid.extent[a], hi = -1;
    for (auto flat : dom.region().cells()) {
      int ia = grid.unflatten(flat)[a];
      lo = std::min(lo, ia);
      hi = std::max(hi, ia);
    }
    require(hi - lo + 1 >= 4, "grid too coarse: fewer than 4 cells across the domain on axis " +
                                  std::to_string(a + 1));
    require(lo >= 1 && hi <= grid.extent[a] - 2,
            "domain touches the outermost grid layer on axis " + std::to_string(a + 1) +
                "; enlarge the grid");
  }

  auto report = check_condition_D(grid, dom.mask);
  if (!report.holds()) {
    std::ostringstream msg;
    msg << "domain violates the symmetry/convexity condition: "
        << report.symmetry_violations.size() << " symmetry and "
        << report.convexity_violations.size() << " axis-convexity violations";
    if (!report.symmetry_violations.empty()) {
      auto x = grid.center(report.symmetry_violations.front());
      msg << "; first symmetry violation at (";
      for (int a = 0; a < grid.dim; ++a) msg << (a ? "," : "") << x[a];
      msg << ")";
    }
    throw std::invalid_argument(msg.str());
  }
  return dom;
}

RegionMask halfspace_mask(const GridSpec& grid, int axis, double level) {
  require(axis >= 0 && axis < grid.dim, "halfspace axis out of range");
  RegionMask rm(grid);
  for (std::int64_t i = 0; i < grid.cell_count(); ++i) {
    int ia = grid.unflatten(i)[axis];
    rm.mask[static_cast<std::size_t>(i)] = grid.coord(axis, ia) > level ? 1 : 0;
  }
  return rm;
}

RegionMask symmetrized_set(const RegionMask& region, const Reflection& r1,
                           const Reflection& r2) {
  require(r1.lattice_aligned(region.grid) && r2.lattice_aligned(region.grid),
          "symmetrized_set needs lattice-aligned reflections");
  RegionMask out(region.grid);
  for (auto flat : region.cells()) {
    std::int64_t a = reflect_index(region.grid, flat, r1);
    std::int64_t b = reflect_index(region.grid, flat, r2);
    std::int64_t c = a >= 0 ? reflect_index(region.grid, a, r2) : -1;
    out.mask[static_cast<std::size_t>(flat)] = 1;
    if (a >= 0) out.mask[static_cast<std::size_t>(a)] = 1;
    if (b >= 0) out.mask[static_cast<std::size_t>(b)] = 1;
    if (c >= 0) out.mask[static_cast<std::size_t>(c)] = 1;
  }
  return out;
}

ConditionDReport check_condition_D(const Domain& domain) {
  return check_condition_D(domain.grid, domain.mask);
}

ConditionDReport check_condition_D(const GridSpec& grid,
                                   const std::vector<std::uint8_t>& mask) {
  ConditionDReport report;
  const int first = 0, last = grid.dim - 1;
  Reflection rfirst{first, 0.0}, rlast{last, 0.0};
  for (std::int64_t flat = 0; flat < grid.cell_count(); ++flat) {
    if (!mask[static_cast<std::size_t>(flat)]) continue;
    std::int64_t m1 = reflect_index(grid, flat, rfirst);
    std::int64_t m2 = reflect_index(grid, flat, rlast);
    bool symmetric = m1 >= 0 && mask[static_cast<std::size_t>(m1)] &&
                     m2 >= 0 && mask[static_cast<std::size_t>(m2)];
    if (!symmetric) {
      report.symmetry_violations.push_back(flat);
      continue;
    }
    // axis-convexity: every grid-representable scaling (t x_1, ..., tau x_N)
    // with |t|,|tau| <= 1 must stay inside the mask
    auto idx = grid.unflatten(flat);
    int n1 = grid.extent[first], nn = grid.extent[last];
    int i1 = idx[first], in = idx[last];
    // indices on the segment between i and its mirror (inclusive)
    int lo1 = std::min(i1, n1 - 1 - i1), hi1 = std::max(i1, n1 - 1 - i1);
    int lon = std::min(in, nn - 1 - in), hin = std::max(in, nn - 1 - in);
    bool filled = true;
    for (int j1 = lo1; j1 <= hi1 && filled; ++j1) {
      for (int jn = lon; jn <= hin && filled; ++jn) {
        auto probe = idx;
        probe[first] = j1;
        probe[last] = jn;
        if (!mask[static_cast<std::size_t>(grid.flatten(probe))]) filled = false;
      }
    }
    if (!filled) report.convexity_violations.push_back(flat);
  }
  return report;
}

std::string mask_to_csv(const RegionMask& region) {
  const GridSpec& g = region.grid;
  std::ostringstream out;
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  if (g.dim == 1) {
    for (int i = 0; i < g.extent[0]; ++i) out << (i ? "," : "") << fmt(g.coord(0, i));
    out << "\n";
    for (int i = 0; i < g.extent[0]; ++i)
      out << (i ? "," : "") << (region.mask[static_cast<std::size_t>(i)] ? 1 : 0);
    out << "\n";
  } else if (g.dim == 2) {
    // header row: x1 coordinates; each data row starts with its x2 coordinate
    out << "x2\\x1";
    for (int i = 0; i < g.extent[0]; ++i) out << "," << fmt(g.coord(0, i));
    out << "\n";
    for (int j = g.extent[1] - 1; j >= 0; --j) {
      out << fmt(g.coord(1, j));
      for (int i = 0; i < g.extent[0]; ++i) {
        std::array<int, kMaxDim> idx{};
        idx[0] = i;
        idx[1] = j;
        out << "," << (region.mask[static_cast<std::size_t>(g.flatten(idx))] ? 1 : 0);
      }
      out << "\n";
    }
  } else {
    out << "x1,x2,x3,inside\n";
    for (std::int64_t flat = 0; flat < g.cell_count(); ++flat) {
      auto x = g.center(flat);
      out << fmt(x[0]) << "," << fmt(x[1]) << "," << fmt(x[2]) << ","
          << (region.mask[static_cast<std::size_t>(flat)] ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

}  // namespace fraclab
