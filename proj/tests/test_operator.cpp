#include <catch2/catch_amalgamated.hpp>

#include "nonlocal.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fraclab;
using namespace fraclab::testing;

namespace {

Domain unit_disk(const GridSpec& g, double radius = 1.0) {
  DomainParams params;
  params.radius = radius;
  return build_domain(DomainLabel::kBall, params, g);
}

}  // namespace

TEST_CASE("apply on the domain indicator is strictly positive inside") {
  GridSpec g = square_grid(2, 24, 1.2);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table);
  Domain disk = unit_disk(g);
  Field ind(disk.region());
  for (auto flat : disk.region().cells()) ind.set(flat, 1.0);
  Field out = op.apply(ind, ApplyPath::kDirect);
  for (auto flat : disk.region().cells()) REQUIRE(out[flat] > 0.0);
}

TEST_CASE("1d apply reproduces the closed-form torsion identity") {
  // u(x) = sqrt(1 - x^2) on (-1, 1) maps to the constant 1 for s = 1/2
  GridSpec g = square_grid(1, 272, 272.0 / 256.0);  // h = 1/128
  REQUIRE(g.h == Catch::Approx(1.0 / 128.0).epsilon(1e-14));
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table);
  DomainParams params;
  params.radius = 1.0;
  Domain interval = build_domain(DomainLabel::kBall, params, g);
  Field u = Field::build(interval.region(), [](const std::array<double, kMaxDim>& x) {
    return std::sqrt(1.0 - x[0] * x[0]);
  });
  auto closed_form = [](double t) { return std::sqrt(1.0 - t * t); };

  Field out = op.apply(u, ApplyPath::kDirect);
  for (double point : {0.0, 0.25, -0.5}) {
    // independent quadrature of the defining integral confirms the constant
    double oracle = oracles::second_difference_1d(closed_form, point, 0.5, 1.0, 1.0 / M_PI);
    REQUIRE(oracle == Catch::Approx(1.0).epsilon(2e-4));
    std::array<int, kMaxDim> idx{};
    idx[0] = static_cast<int>(std::llround((point - g.origin[0]) / g.h));
    double discrete = out[g.flatten(idx)];
    REQUIRE(discrete == Catch::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("apply preserves antisymmetry and reflection equivariance") {
  GridSpec g = square_grid(2, 20, 1.0);
  auto table = make_table(g, 0.4);
  NonlocalOperator op(g, table);
  Rng rng(21);
  Reflection r{1, 0.0};

  Field odd = random_odd_field(full_mask(g), r, rng);
  Field Lodd = op.apply(odd, ApplyPath::kDirect);
  REQUIRE(symmetry_defect(Lodd, r, -1) <= 1e-12 * Lodd.sup_norm());

  Field u = random_field(full_mask(g), rng);
  Field lhs = op.apply(compose_reflection(u, r), ApplyPath::kDirect);
  Field rhs = compose_reflection(op.apply(u, ApplyPath::kDirect), r);
  double scale = rhs.sup_norm();
  for (std::int64_t i = 0; i < g.cell_count(); ++i)
    REQUIRE(lhs[i] == Catch::Approx(rhs[i]).margin(1e-12 * scale));
}

TEST_CASE("fft path matches the direct path") {
  SECTION("two dimensions") {
    GridSpec g = square_grid(2, 24, 1.0);
    auto table = make_table(g, 0.6);
    NonlocalOperator op(g, table);
    Rng rng(22);
    Field u = random_field(full_mask(g), rng);
    Field direct = op.apply(u, ApplyPath::kDirect);
    Field fast = op.apply(u, ApplyPath::kFft);
    double scale = direct.sup_norm();
    for (std::int64_t i = 0; i < g.cell_count(); ++i)
      REQUIRE(fast[i] == Catch::Approx(direct[i]).margin(1e-11 * scale));
  }
  SECTION("one dimension") {
    GridSpec g = square_grid(1, 128, 1.0);
    auto table = make_table(g, 0.3);
    NonlocalOperator op(g, table);
    Rng rng(23);
    Field u = random_field(full_mask(g), rng);
    Field direct = op.apply(u, ApplyPath::kDirect);
    Field fast = op.apply(u, ApplyPath::kFft);
    double scale = direct.sup_norm();
    for (std::int64_t i = 0; i < g.cell_count(); ++i)
      REQUIRE(fast[i] == Catch::Approx(direct[i]).margin(1e-11 * scale));
  }
}

TEST_CASE("energy: symmetry, positivity, modulus inequality, consistency") {
  GridSpec g = square_grid(2, 20, 1.0);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table);
  Rng rng(24);
  const double cell = std::pow(g.h, 2);

  for (int trial = 0; trial < 20; ++trial) {
    Field u = random_field(full_mask(g), rng);
    Field v = random_field(full_mask(g), rng);

    double e_uu = op.energy(u, u);
    REQUIRE(e_uu >= 0.0);
    REQUIRE(op.energy(u, v) == op.energy(v, u));  // identical fixed-order sums
    REQUIRE(op.energy(abs_field(u), abs_field(u)) <= e_uu * (1.0 + 1e-14));

    // discrete integration by parts: sum (Lu) v h^dim = energy(u, v)
    Field Lu = op.apply(u, ApplyPath::kDirect);
    KahanSum dot;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) dot.add(Lu[i] * v[i]);
    double via_apply = dot.value() * cell;
    double via_energy = op.energy(u, v);
    REQUIRE(via_apply == Catch::Approx(via_energy).margin(1e-10 * std::max(1.0, e_uu)));
  }
}

TEST_CASE("parity decomposition splits the energy exactly") {
  GridSpec g = square_grid(2, 20, 1.0);
  auto table = make_table(g, 0.7);
  NonlocalOperator op(g, table);
  Rng rng(25);
  Reflection r{0, 0.0};
  for (int trial = 0; trial < 10; ++trial) {
    Field u = random_field(full_mask(g), rng);
    Field even = symmetrize_even(u, r);
    Field odd = antisymmetrize(u, r);
    double total = op.energy(u, u);
    double split = op.energy(even, even) + op.energy(odd, odd);
    REQUIRE(split == Catch::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("seminorm: zero field, monotone regions, halfspace cut inequality") {
  GridSpec g = square_grid(2, 20, 1.0);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table);
  Rng rng(26);
  Reflection r1{0, 0.0}, r2{1, 0.0};

  Field zero(full_mask(g));
  REQUIRE(op.seminorm_rho(zero, full_mask(g)) == 0.0);

  Field w = random_field(full_mask(g), rng);
  RegionMask small = halfspace_mask(g, 0, 0.5);
  RegionMask large = halfspace_mask(g, 0, 0.0);
  REQUIRE(op.seminorm_rho(w, small) <= op.seminorm_rho(w, large) * (1.0 + 1e-14));

  // rho_s(w 1_{H_i}, U ∪ r_j U) <= rho_s(w, U_{1,2}) for doubly antisymmetric w
  Field dodd = random_doubly_odd_field(full_mask(g), r1, r2, rng);
  RegionMask quadrant(g);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    auto x = g.center(i);
    if (x[0] > 0.1 && x[0] < 0.7 && x[1] > 0.1 && x[1] < 0.7)
      quadrant.mask[static_cast<std::size_t>(i)] = 1;
  }
  RegionMask orbit = symmetrized_set(quadrant, r1, r2);
  RegionMask u_r2u = symmetrized_set(quadrant, r2, r2);  // U ∪ r2(U)
  Field w1 = restrict_to(dodd, halfspace_mask(g, 0, 0.0));
  double lhs = op.seminorm_rho(w1, u_r2u);
  double rhs = op.seminorm_rho(dodd, orbit);
  REQUIRE(lhs <= rhs * (1.0 + 1e-12));
}

TEST_CASE("negative part test inequality from the kernel positivity") {
  GridSpec g = square_grid(2, 20, 1.0);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table);
  Rng rng(27);
  RegionMask inner(g);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    auto x = g.center(i);
    if (std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5)
      inner.mask[static_cast<std::size_t>(i)] = 1;
  }
  for (int trial = 0; trial < 10; ++trial) {
    // w >= 0 outside the inner region, arbitrary sign inside
    Field w = random_field(full_mask(g), rng);
    for (std::int64_t i = 0; i < g.cell_count(); ++i)
      if (!inner.contains(i) && w[i] < 0.0) w.raw()[static_cast<std::size_t>(i)] *= -1.0;
    Field minus = negative_part(w);
    double scale = std::max(op.energy(w, w), 1.0);
    REQUIRE(op.energy(minus, minus) <= -op.energy(w, minus) + 1e-12 * scale);
  }
}

TEST_CASE("antisymmetric reduction: rows and positivity") {
  GridSpec g = square_grid(2, 16, 1.0);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table);
  Reflection r{1, 0.0};
  RegionMask upper = halfspace_mask(g, 1, 0.0);
  OddReducedOperator reduced = antisymmetric_reduce(op, r, upper, ApplyPath::kDirect);
  MaskedOperator full(op, upper, ApplyPath::kDirect);
  const auto n = static_cast<std::size_t>(reduced.size());

  SECTION("rows strictly more diagonally dominant than the full rows") {
    std::vector<double> basis(n, 0.0), row_reduced(n), row_full(n);
    for (std::size_t j = 0; j < n; j += 7) {
      basis.assign(n, 0.0);
      basis[j] = 1.0;
      reduced.apply(basis, row_reduced);
      full.apply(basis, row_full);
      REQUIRE(row_reduced[j] > row_full[j]);  // diagonal strictly grows
      double off_reduced = 0.0, off_full = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        REQUIRE(row_reduced[i] <= 0.0);  // Z-matrix structure survives
        off_reduced += std::abs(row_reduced[i]);
        off_full += std::abs(row_full[i]);
      }
      REQUIRE(off_reduced < off_full);
      REQUIRE(row_reduced[j] - off_reduced > row_full[j] - off_full);
    }
  }

  SECTION("constant field maps to a strictly positive field") {
    std::vector<double> ones(n, 1.0), out(n);
    reduced.apply(ones, out);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(out[i] > 0.0);
  }

  SECTION("reduced application equals the full apply on the odd extension") {
    Rng rng(28);
    std::vector<double> x(n), out(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    reduced.apply(x, out);
    Field ext = reduced.to_full_field(x);
    Field Lext = op.apply(ext, ApplyPath::kDirect);
    const auto& cells = reduced.cells();
    for (std::size_t i = 0; i < n; ++i) REQUIRE(out[i] == Lext[cells[i]]);
  }
}

TEST_CASE("threaded apply and energy are deterministic") {
  GridSpec g = square_grid(2, 24, 1.0);
  auto table = make_table(g, 0.5);
  Rng rng(29);
  RegionMask everywhere = full_mask(g);
  Field u = random_field(everywhere, rng);
  Field v = random_field(everywhere, rng);

  NonlocalOperator serial(g, table, 1);
  NonlocalOperator threaded(g, table, 4);
  NonlocalOperator threaded2(g, table, 4);

  Field a = threaded.apply(u, ApplyPath::kDirect);
  Field b = threaded2.apply(u, ApplyPath::kDirect);
  Field c = serial.apply(u, ApplyPath::kDirect);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    REQUIRE(a[i] == b[i]);
    REQUIRE(a[i] == c[i]);  // row sums do not depend on the chunking
  }

  double e1 = threaded.energy(u, v);
  double e2 = threaded2.energy(u, v);
  REQUIRE(e1 == e2);
  REQUIRE(e1 == Catch::Approx(serial.energy(u, v)).epsilon(1e-13));
}
