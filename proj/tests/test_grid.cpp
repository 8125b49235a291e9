#include <catch2/catch_amalgamated.hpp>

#include "grid.hpp"
#include "test_support.hpp"

using namespace fraclab;
using fraclab::testing::square_grid;

TEST_CASE("grid centers are symmetric about the coordinate hyperplanes") {
  GridSpec g = square_grid(2, 16, 1.0);
  REQUIRE(validate_grid(g).empty());
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    for (int axis : {0, 1}) {
      std::int64_t j = reflect_index(g, i, Reflection{axis, 0.0});
      REQUIRE(j >= 0);
      auto x = g.center(i);
      auto y = g.center(j);
      REQUIRE(y[axis] == -x[axis]);
      REQUIRE(y[1 - axis] == x[1 - axis]);
    }
    // no cell center sits on a symmetry hyperplane
    auto x = g.center(i);
    REQUIRE(std::abs(x[0]) >= 0.49 * g.h);
    REQUIRE(std::abs(x[1]) >= 0.49 * g.h);
  }
}

TEST_CASE("grid validation rejects odd extents and bad spacing") {
  GridSpec g;
  g.dim = 2;
  g.h = 0.1;
  g.extent = {15, 16, 0};
  g.origin = {-0.7, -0.75, 0.0};
  REQUIRE_FALSE(validate_grid(g).empty());
  g.h = -1.0;
  REQUIRE(validate_grid(g).size() >= 2);
}

TEST_CASE("reflect is an involution and a lattice isometry") {
  GridSpec g = square_grid(2, 20, 1.0);
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    Reflection r{static_cast<int>(rng.below(2)),
                 0.5 * g.h * static_cast<double>(static_cast<int>(rng.below(9)) - 4)};
    std::int64_t i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(g.cell_count())));
    std::int64_t j = reflect_index(g, i, r);
    if (j < 0) continue;  // image may exit the grid for off-center levels
    std::int64_t back = reflect_index(g, j, r);
    REQUIRE(back == i);

    std::int64_t k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(g.cell_count())));
    std::int64_t l = reflect_index(g, k, r);
    if (l < 0) continue;
    auto xi = g.center(i), xj = g.center(j), xk = g.center(k), xl = g.center(l);
    double before = 0.0, after = 0.0;
    for (int a = 0; a < 2; ++a) {
      before += (xi[a] - xk[a]) * (xi[a] - xk[a]);
      after += (xj[a] - xl[a]) * (xj[a] - xl[a]);
    }
    REQUIRE(after == Catch::Approx(before).epsilon(1e-13));
  }
}

TEST_CASE("reflect points and misaligned levels") {
  GridSpec g = square_grid(2, 8, 1.0);
  std::array<double, kMaxDim> x{0.3, 0.5, 0.0};
  auto y = reflect_point(x, Reflection{0, 0.0});
  REQUIRE(y[0] == -0.3);
  REQUIRE(y[1] == 0.5);
  auto z = reflect_point({0.2, 0.7, 0.0}, Reflection{1, 1.0});
  REQUIRE(z[1] == Catch::Approx(1.3));
  REQUIRE_THROWS_AS(reflect_index(g, 0, Reflection{0, 0.1 * g.h}), std::invalid_argument);
}

TEST_CASE("halfspace masks partition the grid with their mirror") {
  GridSpec g = square_grid(2, 12, 1.0);
  RegionMask h = halfspace_mask(g, 0, 0.0);
  REQUIRE(h.count() == g.cell_count() / 2);
  Reflection r{0, 0.0};
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    std::int64_t j = reflect_index(g, i, r);
    bool in_h = h.contains(i);
    bool mirror_in_h = h.contains(j);
    REQUIRE(in_h != mirror_in_h);  // disjoint and jointly covering
  }
}

TEST_CASE("symmetrized set unions the four reflections") {
  GridSpec g = square_grid(2, 16, 1.0);
  Reflection r1{0, 0.0}, r2{1, 0.0};

  SECTION("singleton deep in the quadrant blows up to 4 cells") {
    RegionMask u(g);
    std::array<int, kMaxDim> idx{12, 13, 0};
    u.mask[static_cast<std::size_t>(g.flatten(idx))] = 1;
    RegionMask out = symmetrized_set(u, r1, r2);
    REQUIRE(out.count() == 4);
  }

  SECTION("subset of the open quadrant quadruples its measure") {
    RegionMask u(g);
    for (auto flat : halfspace_mask(g, 0, 0.25).cells()) {
      auto idx = g.unflatten(flat);
      if (g.coord(1, idx[1]) > 0.25) u.mask[static_cast<std::size_t>(flat)] = 1;
    }
    RegionMask out = symmetrized_set(u, r1, r2);
    REQUIRE(out.count() == 4 * u.count());
  }

  SECTION("doubly symmetric set is a fixed point") {
    DomainParams params;
    params.radius = 0.8;
    Domain disk = build_domain(DomainLabel::kBall, params, g);
    RegionMask out = symmetrized_set(disk.region(), r1, r2);
    REQUIRE(out.mask == disk.mask);
  }
}

TEST_CASE("build_domain produces symmetric masks and validates inputs") {
  GridSpec g = square_grid(2, 32, 1.2);

  SECTION("ball mask equals the centered indicator") {
    DomainParams params;
    params.radius = 1.0;
    Domain dom = build_domain(DomainLabel::kBall, params, g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      auto x = g.center(i);
      bool inside = x[0] * x[0] + x[1] * x[1] < 1.0;
      REQUIRE(static_cast<bool>(dom.mask[static_cast<std::size_t>(i)]) == inside);
    }
    REQUIRE(check_condition_D(dom).holds());
  }

  SECTION("rectangle is symmetric under both axis reflections") {
    DomainParams params;
    params.half_widths = {1.0, 0.5, 0.0};
    Domain dom = build_domain(DomainLabel::kRectangle, params, g);
    for (int axis : {0, 1}) {
      for (auto flat : dom.region().cells()) {
        std::int64_t j = reflect_index(g, flat, Reflection{axis, 0.0});
        REQUIRE(dom.mask[static_cast<std::size_t>(j)] == 1);
      }
    }
  }

  SECTION("stadium and ellipse satisfy the symmetry/convexity condition") {
    DomainParams stadium;
    stadium.stadium_half_length = 0.5;
    stadium.stadium_cap_radius = 0.45;
    REQUIRE(check_condition_D(build_domain(DomainLabel::kStadium, stadium, g)).holds());
    DomainParams ellipse;
    ellipse.semi_axes = {1.0, 0.6, 0.0};
    REQUIRE(check_condition_D(build_domain(DomainLabel::kEllipse, ellipse, g)).holds());
  }

  SECTION("asymmetric custom blob is rejected") {
    DomainParams params;
    params.custom_mask.assign(static_cast<std::size_t>(g.cell_count()), 0);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      auto x = g.center(i);
      double dx = x[0] - 3.0 * g.h;  // shifted off center
      if (dx * dx + x[1] * x[1] < 0.64) params.custom_mask[static_cast<std::size_t>(i)] = 1;
    }
    REQUIRE_THROWS_WITH(build_domain(DomainLabel::kCustom, params, g),
                        Catch::Matchers::ContainsSubstring("symmetry"));
  }

  SECTION("too coarse grids are rejected") {
    GridSpec coarse = square_grid(2, 6, 1.2);
    DomainParams params;
    params.radius = 0.55;  // under 4 cells across
    REQUIRE_THROWS_WITH(build_domain(DomainLabel::kBall, params, coarse),
                        Catch::Matchers::ContainsSubstring("coarse"));
  }

  SECTION("domains touching the grid edge are rejected") {
    DomainParams params;
    params.radius = 1.25;
    REQUIRE_THROWS_WITH(build_domain(DomainLabel::kBall, params, g),
                        Catch::Matchers::ContainsSubstring("outermost"));
  }
}

TEST_CASE("check_condition_D reports the documented failure modes") {
  GridSpec g = square_grid(2, 24, 1.2);

  SECTION("shifted ball fails the symmetry lists") {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.cell_count()), 0);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      auto x = g.center(i);
      double dx = x[0] - g.h;
      if (dx * dx + x[1] * x[1] < 0.8) mask[static_cast<std::size_t>(i)] = 1;
    }
    auto report = check_condition_D(g, mask);
    REQUIRE_FALSE(report.symmetry_violations.empty());
  }

  SECTION("annulus fails the convexity lists") {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.cell_count()), 0);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      auto x = g.center(i);
      double r2 = x[0] * x[0] + x[1] * x[1];
      if (r2 < 1.0 && r2 > 0.25) mask[static_cast<std::size_t>(i)] = 1;
    }
    auto report = check_condition_D(g, mask);
    REQUIRE(report.symmetry_violations.empty());
    REQUIRE_FALSE(report.convexity_violations.empty());
  }
}

TEST_CASE("mask CSV export carries the coordinate header") {
  GridSpec g = square_grid(2, 8, 1.0);
  DomainParams params;
  params.radius = 0.6;
  Domain dom = build_domain(DomainLabel::kBall, params, g);
  std::string csv = mask_to_csv(dom.region());
  REQUIRE(csv.rfind("x2\\x1,", 0) == 0);
  // 1 header row + one row per x2 value
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 1 + g.extent[1]);
}
