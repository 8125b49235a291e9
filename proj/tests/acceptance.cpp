// Acceptance suite: one tolerance-pinned criterion per section, one
// pass/fail line each. Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <vector>

#include "oracles.hpp"
#include "solve.hpp"
#include "test_support.hpp"
#include "verify.hpp"

using namespace fraclab;
using namespace fraclab::testing;

namespace {

int g_failures = 0;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int number, bool pass, const char* description, const std::string& detail,
            double seconds) {
  std::printf("[%s] %02d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", number, description,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

Domain disk_domain(const GridSpec& g, double radius) {
  DomainParams params;
  params.radius = radius;
  return build_domain(DomainLabel::kBall, params, g);
}

Domain ellipse_domain(const GridSpec& g, double a, double b) {
  DomainParams params;
  params.semi_axes = {a, b, 0.0};
  return build_domain(DomainLabel::kEllipse, params, g);
}

// ------------------------------------------------------------ criterion 1

void criterion_kernel_claim() {
  Stopwatch watch;
  Reflection r1{0, 0.0}, r2{1, 0.0};
  Rng rng(1001);
  double worst = 1e300;
  std::int64_t violations = 0;
  const std::int64_t pairs = 1000000;
  for (int dim : {1, 2, 3})
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      KernelParams params = resolve_kernel_params({dim, s, 0.0});
      for (std::int64_t i = 0; i < pairs; ++i) {
        std::array<double, 2> x{rng.uniform(1e-3, 10.0), rng.uniform(1e-3, 10.0)};
        std::array<double, 2> y{rng.uniform(1e-3, 10.0), rng.uniform(1e-3, 10.0)};
        if (x == y) continue;
        double d = four_point_deficit(params, x, y, r1, r2);
        worst = std::min(worst, d);
        if (d < -1e-12) ++violations;
      }
    }
  double elapsed = watch.seconds();
  report(1, violations == 0 && elapsed < 30.0, "four-point kernel claim",
         fmt("min deficit %.3e over 15x10^6 pairs, %lld below -1e-12", worst,
             static_cast<long long>(violations)),
         elapsed);
}

// ------------------------------------------------------------ criterion 2

void criterion_surrogate() {
  Stopwatch watch;
  std::vector<double> ab = {0.0};
  for (int i = 0; i < 199; ++i) ab.push_back(std::pow(10.0, -6.0 + 9.0 * i / 198.0));
  double worst = 1e300, zero_edge = 0.0;
  std::int64_t violations = 0;
  for (int e = -3; e <= 3; ++e) {
    double m = std::pow(10.0, e);
    for (double a : ab)
      for (double b : ab) {
        double value = f_surrogate(a, b, m, 2, 0.5);
        worst = std::min(worst, value);
        if (value < -1e-12) ++violations;
        if (a == 0.0) zero_edge = std::max(zero_edge, std::abs(value));
      }
  }
  // thinner sweep across kernel orders and exponents
  for (int dim : {1, 2, 3})
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (int e = -3; e <= 3; e += 2)
        for (std::size_t i = 0; i < ab.size(); i += 3)
          for (std::size_t j = 0; j < ab.size(); j += 3) {
            double value = f_surrogate(ab[i], ab[j], std::pow(10.0, e), dim, s);
            worst = std::min(worst, value);
            if (value < -1e-12) ++violations;
            if (ab[i] == 0.0) zero_edge = std::max(zero_edge, std::abs(value));
          }
  report(2, violations == 0 && zero_edge <= 1e-15, "surrogate nonnegativity",
         fmt("min f %.3e, zero-edge max %.2e, %lld violations", worst, zero_edge,
             static_cast<long long>(violations)),
         watch.seconds());
}

// ------------------------------------------------------------ criterion 3

void criterion_lemma22() {
  Stopwatch watch;
  GridSpec g = square_grid(2, 32, 1.0);
  Reflection r1{0, 0.0}, r2{1, 0.0};
  Rng rng(1003);
  bool ok = true;
  double worst_ratio = -1e300;
  int equality_instances = 0;
  for (double s : {0.3, 0.5, 0.7}) {
    auto table = make_table(g, s);
    NonlocalOperator op(g, table);
    for (int trial = 0; trial < 200; ++trial) {
      Field w;
      if (trial % 10 == 9) {
        // one-signed quadrant data: the equality case
        RegionMask quadrant(g);
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
          auto x = g.center(i);
          if (x[0] > 0.0 && x[1] > 0.0 && x[0] < 0.9 && x[1] < 0.9)
            quadrant.mask[static_cast<std::size_t>(i)] = 1;
        }
        Field gen(quadrant);
        for (auto flat : quadrant.cells()) gen.set(flat, rng.uniform(0.0, 1.0));
        w = doubly_odd_extension(gen, r1, r2);
      } else {
        w = random_doubly_odd_field(full_mask(g), r1, r2, rng);
      }
      auto check = lemma22_check(op, w, r1, r2, 1e-10);
      ok = ok && check.pass;
      double e_ww = check.tolerance / 1e-10;
      worst_ratio = std::max(worst_ratio, check.margin / std::max(e_ww, 1e-300));
      if (std::abs(check.margin) <= check.tolerance) {
        ++equality_instances;
        Field v = test_function_v(w, r1, r2);
        ok = ok && v.sup_norm() <= 1e-10 * w.sup_norm();
      }
    }
  }
  double elapsed = watch.seconds();
  report(3, ok && elapsed < 120.0, "discrete antisymmetric energy inequality",
         fmt("600 fields, worst margin/energy %.3e <= 1e-10, %d equality instances",
             worst_ratio, equality_instances),
         elapsed);
}

// ------------------------------------------------------------ criterion 4

void criterion_polarization() {
  Stopwatch watch;
  GridSpec g = square_grid(2, 64, 1.2);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table, 2);
  Domain disk = disk_domain(g, 1.0);
  Reflection rN{1, 0.0};
  Rng rng(1004);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Field u = random_odd_field(disk.region(), rN, rng);
    auto check = polarization_identity_check(op, u, rN, 1e-10);
    ok = ok && check.pass;
    worst = std::max(worst, check.margin);
  }
  report(4, ok, "polarization identity",
         fmt("100 odd fields on the 64^2 disk, worst relative gap %.3e <= 1e-10, "
             "p-norms preserved to 1e-12",
             worst),
         watch.seconds());
}

// ------------------------------------------------------------ criterion 5

void criterion_torsion() {
  Stopwatch watch;
  std::vector<double> errors;
  for (double h : {1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0}) {
    int cells = static_cast<int>(std::llround(2.0 / h)) + 16;
    std::array<int, kMaxDim> extent{};
    extent[0] = cells;
    GridSpec g(1, h, extent);
    auto table = make_table(g, 0.5);
    NonlocalOperator op(g, table);
    Domain interval = disk_domain(g, 1.0);
    SolverOptions opts;
    opts.tolerance = 1e-11;
    Field psi = torsion(op, interval.region(), opts);
    double worst = 0.0;
    for (auto flat : interval.region().cells()) {
      double x = g.center(flat)[0];
      if (std::abs(x) > 0.9) continue;
      double exact = std::sqrt(1.0 - x * x);
      worst = std::max(worst, std::abs(psi[flat] - exact) / exact);
    }
    errors.push_back(worst);
  }
  bool monotone = errors[0] > errors[1] && errors[1] > errors[2];
  double elapsed = watch.seconds();
  report(5, errors[2] <= 0.02 && monotone && elapsed < 30.0, "torsion oracle",
         fmt("max relative error vs sqrt(1-x^2): h=1/64 %.4f > 1/128 %.4f > 1/256 %.4f "
             "<= 0.02",
             errors[0], errors[1], errors[2]),
         elapsed);
}

// ------------------------------------------------------------ criterion 6

void criterion_eigen_sanity() {
  Stopwatch watch;
  GridSpec g = square_grid(2, 64, 1.2);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table, 2);
  SolverOptions opts;
  opts.tolerance = 1e-10;
  opts.max_iterations = 2000;
  Reflection rN{1, 0.0};

  Domain disk = disk_domain(g, 1.0);
  SpectralResult odd_disk = antisym_eig(op, rN, disk, opts);
  SpectralResult full_disk = dirichlet_eig(op, disk.region(), 2, opts);
  double margin_disk = odd_disk.eigenvalues[0] - full_disk.eigenvalues[0];
  double second_gap = std::abs(odd_disk.eigenvalues[0] - full_disk.eigenvalues[1]) /
                      full_disk.eigenvalues[1];

  Domain rect = ellipse_domain(g, 1.0, 0.6);  // placeholder, replaced below
  {
    DomainParams params;
    params.half_widths = {1.0, 0.6, 0.0};
    rect = build_domain(DomainLabel::kRectangle, params, g);
  }
  SpectralResult odd_rect = antisym_eig(op, rN, rect, opts);
  SpectralResult full_rect = dirichlet_eig(op, rect.region(), 1, opts);
  double margin_rect = odd_rect.eigenvalues[0] - full_rect.eigenvalues[0];

  bool ok = margin_disk > 0.0 && margin_rect > 0.0 && second_gap <= 1e-6;
  report(6, ok, "antisymmetric eigenvalue sanity",
         fmt("disk margin %.4f > 0, rectangle margin %.4f > 0, disk second-eigenvalue "
             "gap %.2e <= 1e-6",
             margin_disk, margin_rect, second_gap),
         watch.seconds());
}

// ------------------------------------------------------------ criterion 7

void criterion_small_volume_blowup() {
  Stopwatch watch;
  GridSpec g = square_grid(2, 96, 1.0);  // h = 1/48
  const double s = 0.5;
  auto table = make_table(g, s);
  NonlocalOperator op(g, table, 2);
  Reflection r1{0, 0.0};
  SolverOptions opts;
  opts.tolerance = 1e-8;
  opts.max_iterations = 2000;

  std::vector<double> lambdas;
  int base = 48;
  for (int k = 0; k <= 3; ++k) {
    int cells = base >> k;
    RegionMask U(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      auto x = g.center(i);
      if (x[0] > 0.0 && x[0] < cells * g.h && x[1] > 0.0 && x[1] < cells * g.h)
        U.mask[static_cast<std::size_t>(i)] = 1;
    }
    lambdas.push_back(antisym_eig_region(op, r1, U, opts).eigenvalues.front());
  }
  bool increasing = true;
  double worst_ratio_error = 0.0;
  double expected = std::pow(2.0, 2.0 * s);
  for (int k = 0; k < 3; ++k) {
    if (lambdas[k + 1] <= lambdas[k]) increasing = false;
    double ratio = lambdas[k + 1] / lambdas[k];
    worst_ratio_error = std::max(worst_ratio_error, std::abs(ratio / expected - 1.0));
  }
  report(7, increasing && worst_ratio_error <= 0.10, "small-volume blow-up",
         fmt("lambda^- = %.3f, %.3f, %.3f, %.3f; worst ratio error vs 2^(2s) = %.1f%%",
             lambdas[0], lambdas[1], lambdas[2], lambdas[3], 100.0 * worst_ratio_error),
         watch.seconds());
}

// ------------------------------------------------------------ criterion 8

void criterion_pipeline() {
  const double h = 2.52 / 96.0;
  std::array<int, kMaxDim> extent{96, 96, 0};
  GridSpec g(2, h, extent);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table, 2);
  Reflection r1{0, 0.0}, rN{1, 0.0};

  int index = 0;
  for (bool use_ellipse : {false, true}) {
    Domain domain = use_ellipse ? ellipse_domain(g, 1.0, 0.6) : disk_domain(g, 1.0);
    for (double p : {2.0, 3.0}) {
      Stopwatch watch;
      double value = 0.0;
      Field u;
      if (p == 2.0) {
        SolverOptions opts;
        opts.tolerance = 1e-10;
        opts.max_iterations = 2000;
        SpectralResult eig = antisym_eig(op, rN, domain, opts);
        value = eig.eigenvalues.front();
        u = eig.eigenfields.front();
      } else {
        SolverOptions opts;
        opts.tolerance = 1e-8;
        opts.max_iterations = 40000;
        MinimizerResult min = p_minimize(op, p, rN, domain, opts);
        value = min.value;
        u = min.minimizer;
      }
      auto sign = check_sign(u, halfspace_mask(g, 1, 0.0), 1e-8);
      auto symmetry = check_symmetry(u, r1, 1e-6);
      auto monotone = check_monotonicity(u, domain, 1e-8);
      Nonlinearity f = Nonlinearity::power(p, value);
      auto scan = moving_plane_scan(u, f, domain);
      bool ok = sign.pass && symmetry.pass && monotone.pass && scan.lambda0 <= g.h;
      double elapsed = watch.seconds();
      report(8, ok && elapsed < 300.0,
             index == 0   ? "minimizer pipeline (disk, p = 2)"
             : index == 1 ? "minimizer pipeline (disk, p = 3)"
             : index == 2 ? "minimizer pipeline (ellipse, p = 2)"
                          : "minimizer pipeline (ellipse, p = 3)",
             fmt("value %.4f; sign margin %.1e, symmetry %.1e <= 1e-6, monotone %s, "
                 "lambda0 %.4f <= h %.4f",
                 value, sign.margin, symmetry.margin, monotone.pass ? "yes" : "NO",
                 scan.lambda0, g.h),
             elapsed);
      ++index;
    }
  }
}

// ------------------------------------------------------------ criterion 9

void criterion_uniqueness() {
  Stopwatch watch;
  GridSpec g = square_grid(2, 48, 1.2);
  auto table = make_table(g, 0.5);
  NonlocalOperator op(g, table, 2);
  Domain disk = disk_domain(g, 1.0);
  Reflection rN{1, 0.0};

  std::vector<Field> minimizers;
  for (int seed = 1; seed <= 10; ++seed) {
    SolverOptions opts;
    opts.tolerance = 1e-8;
    opts.max_iterations = 30000;
    opts.seed = static_cast<std::uint64_t>(seed * 101);
    opts.initial_guess = SolverOptions::InitialGuess::kRandom;
    minimizers.push_back(p_minimize(op, 2.0, rN, disk, opts).minimizer);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < minimizers.size(); ++i)
    for (std::size_t j = i + 1; j < minimizers.size(); ++j) {
      double diff = (minimizers[i] - minimizers[j]).lp_norm(2.0);
      double sum = (minimizers[i] + minimizers[j]).lp_norm(2.0);
      worst = std::max(worst, std::min(diff, sum));
    }
  report(9, worst <= 1e-6, "p = 2 uniqueness across seeds",
         fmt("10 seeds, worst aligned L2 distance %.2e <= 1e-6", worst), watch.seconds());
}

// ------------------------------------------------------------ criterion 10

void criterion_hopf() {
  Stopwatch watch;
  const double h = 2.52 / 128.0;
  std::array<int, kMaxDim> extent{128, 128, 0};
  GridSpec g(2, h, extent);
  bool ok = true;
  std::string detail;
  for (double s : {0.3, 0.5, 0.7}) {
    auto table = make_table(g, s);
    NonlocalOperator op(g, table, 2);
    Domain disk = disk_domain(g, 1.0);
    SolverOptions opts;
    opts.tolerance = 1e-10;
    opts.max_iterations = 2000;

    Field psi = torsion(op, disk.region(), opts);
    auto fit_torsion = hopf_decay_fit(psi, disk.region(), s);
    SpectralResult eig = dirichlet_eig(op, disk.region(), 1, opts);
    auto fit_eig = hopf_decay_fit(eig.eigenfields.front(), disk.region(), s);
    ok = ok && fit_torsion.consistent && fit_eig.consistent;
    ok = ok && fit_torsion.min_ratio > 0.0 && fit_eig.min_ratio > 0.0;
    detail += fmt("s=%.1f: torsion %.3f eig %.3f; ", s, fit_torsion.exponent,
                  fit_eig.exponent);
  }
  report(10, ok, "boundary decay exponents",
         detail + "all within +/-0.1 of s with positive lower ratio", watch.seconds());
}

// ------------------------------------------------------------ criterion 11

void criterion_symbol() {
  Stopwatch watch;
  double worst = 0.0;
  for (int dim : {1, 2})
    for (double s : {0.25, 0.5, 0.75})
      for (double xi : {1.0, 2.0, 4.0}) {
        double symbol = oracles::fourier_symbol(dim, s, xi);
        double target = std::pow(xi, 2.0 * s);
        worst = std::max(worst, std::abs(symbol - target) / target);
      }
  report(11, worst <= 0.005, "Fourier symbol oracle",
         fmt("max relative deviation from |xi|^(2s): %.2e <= 5e-3", worst),
         watch.seconds());
}

}  // namespace

int main() {
  std::printf("fraclab acceptance suite\n");
  Stopwatch total;
  criterion_kernel_claim();
  criterion_surrogate();
  criterion_lemma22();
  criterion_polarization();
  criterion_torsion();
  criterion_eigen_sanity();
  criterion_small_volume_blowup();
  criterion_pipeline();
  criterion_uniqueness();
  criterion_hopf();
  criterion_symbol();
  std::printf("%s: %d criterion failure(s), %.1f s total\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", g_failures,
              total.seconds());
  return g_failures == 0 ? 0 : 1;
}
