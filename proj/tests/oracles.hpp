#pragma once

#include <functional>

// Independent quadrature oracles used by the tests. Everything here
// evaluates continuum integrals directly and never touches the discrete
// weight tables or operators it is used to check.
namespace fraclab::oracles {

/// Second-difference integral of a pure oscillation cos(xi * y_1) at the
/// origin, i.e. the Fourier symbol of the operator; equals |xi|^(2s) when
/// the normalization constant is the symbol-normalizing one.
double fourier_symbol(int dim, double s, double xi);

/// c * int_0^inf (2u(x) - u(x+y) - u(x-y)) y^(-1-2s) dy for a compactly
/// supported u on [-support, support] (zero outside), with integrable kinks
/// at the support endpoints.
double second_difference_1d(const std::function<double(double)>& u, double x,
                            double s, double support, double c);

/// Exact kernel mass, dimension 1: c * integral of |z|^(-1-2s) over the
/// cells k = -m..m (k != 0), i.e. over [-(m+1/2)h, (m+1/2)h] minus the
/// center cell.
double cell_mass_exact_1d(double c, double s, double h, int m);

/// Exact kernel mass over the full cell complement in dimension 2:
/// c * integral of |z|^(-2-2s) outside the center cell (ball complement
/// minus the corner correction of the center cell).
double cell_mass_exact_2d(double c, double s, double h);

}  // namespace fraclab::oracles
