#include "oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kernel.hpp"

namespace fraclab::oracles {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr int kOrder = 16;
constexpr double kNodes[kOrder] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kWeights[kOrder] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

double panel(const std::function<double(double)>& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kOrder; ++i) sum += kWeights[i] * f(mid + half * kNodes[i]);
  return sum * half;
}

// dyadic panels from `from` down toward 0 (relative floor 2^-52)
double panel_dyadic_to_zero(const std::function<double(double)>& f, double from) {
  double total = 0.0;
  double hi = from;
  for (int k = 0; k < 60; ++k) {
    double lo = 0.5 * hi;
    total += panel(f, lo, hi);
    hi = lo;
  }
  return total;
}

// dyadic refinement of [a, b] clustering toward the endpoint `toward`
double panel_refined_endpoint(const std::function<double(double)>& f, double a,
                              double b, bool toward_b) {
  double total = 0.0;
  double len = b - a;
  double step = 0.5;
  double prev = 0.0;
  for (int k = 0; k < 50; ++k) {
    double next = (k == 49) ? 1.0 : prev + step;
    double lo = toward_b ? a + prev * len : b - next * len;
    double hi = toward_b ? a + next * len : b - prev * len;
    total += panel(f, lo, hi);
    prev = next;
    step *= 0.5;
  }
  return total;
}

}  // namespace

double fourier_symbol(int dim, double s, double xi) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("fourier_symbol: dim must be 1 or 2");
  const double c = normalization_constant(dim, s);
  // 1 - oscillation, evaluated without cancellation for small arguments
  auto deficit = [&](double r) {
    double t = xi * r;
    if (dim == 1) {
      double half = std::sin(0.5 * t);
      return 2.0 * half * half;
    }
    if (t < 1e-4) return 0.25 * t * t * (1.0 - t * t / 16.0);
    return 1.0 - std::cyl_bessel_j(0.0, t);
  };
  const double ring = dim == 1 ? 2.0 : 2.0 * M_PI;  // both half-lines resp. circle
  auto integrand = [&](double r) {
    return deficit(r) * std::pow(r, -1.0 - 2.0 * s);
  };

  const double first = 0.5 * M_PI / xi;
  double total = panel_dyadic_to_zero(integrand, first);
  const int half_periods = 4000;
  const double step = M_PI / xi;
  double r = first;
  for (int k = 0; k < half_periods; ++k) {
    total += panel(integrand, r, r + step);
    r += step;
  }
  // analytic tail of the non-oscillatory part; the oscillatory remainder is
  // below 1e-8 at this range
  total += std::pow(r, -2.0 * s) / (2.0 * s);
  // (c/2) int_{R^dim} (2 - 2cos(xi y_1)) K = c * ring * int_0^inf (1 - osc) r^(-1-2s) dr
  return c * ring * total;
}

double second_difference_1d(const std::function<double(double)>& u, double x,
                            double s, double support, double c) {
  auto field = [&](double t) { return std::abs(t) < support ? u(t) : 0.0; };
  auto integrand = [&](double y) {
    return (2.0 * field(x) - field(x + y) - field(x - y)) *
           std::pow(y, -1.0 - 2.0 * s);
  };
  // kinks where x +/- y crosses the support boundary
  double b1 = support - std::abs(x);
  double b2 = support + std::abs(x);

  // dyadic panels stop before the second difference hits cancellation noise;
  // below that the integrand behaves like C y^(1-2s), integrated in closed form
  double total = 0.0;
  double hi = 0.5 * b1;
  for (int k = 0; k < 23; ++k) {
    total += panel(integrand, 0.5 * hi, hi);
    hi *= 0.5;
  }
  total += integrand(hi) * hi / (2.0 - 2.0 * s);

  total += panel_refined_endpoint(integrand, 0.5 * b1, b1, true);
  double mid = 0.5 * (b1 + b2);
  total += panel_refined_endpoint(integrand, b1, mid, false);
  total += panel_refined_endpoint(integrand, mid, b2, true);
  // beyond b2 both shifted arguments vanish
  total += 2.0 * field(x) * std::pow(b2, -2.0 * s) / (2.0 * s);
  return c * total;
}

double cell_mass_exact_1d(double c, double s, double h, int m) {
  return c / s * (std::pow(0.5 * h, -2.0 * s) - std::pow((m + 0.5) * h, -2.0 * s));
}

double cell_mass_exact_2d(double c, double s, double h) {
  // ball complement of radius h/2 plus the corner region of the center cell
  double ball = 2.0 * M_PI / (2.0 * s) * std::pow(0.5 * h, -2.0 * s);
  auto corner = [&](double theta) {
    return 1.0 - std::pow(std::cos(theta), 2.0 * s);
  };
  double angular = panel(corner, 0.0, 0.25 * M_PI);
  double correction = 4.0 / s * std::pow(0.5 * h, -2.0 * s) * angular;
  return c * (ball - correction);
}

}  // namespace fraclab::oracles
