#include "solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "util.hpp"

namespace fraclab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  KahanSum sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum.add(a[i] * b[i]);
  return sum.value();
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

CgResult conjugate_gradient(const LinearMap& A, std::span<const double> b,
                            std::vector<double>& x, double rel_tol, int max_iter) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  std::vector<double> r(n), p(n), Ap(n);
  A.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  p = r;
  double bnorm = norm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, 0.0, true};
  }
  double rs = dot(r, r);
  CgResult result;
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(rs) <= rel_tol * bnorm) {
      result.iterations = it;
      result.residual = std::sqrt(rs) / bnorm;
      result.converged = true;
      return result;
    }
    A.apply(p, Ap);
    double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;  // lost positive definiteness
    double alpha = rs / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    double rs_new = dot(r, r);
    double beta = rs_new / rs;
    rs = rs_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    result.iterations = it + 1;
  }
  result.residual = std::sqrt(rs) / bnorm;
  result.converged = std::sqrt(rs) <= rel_tol * bnorm;
  return result;
}

double Nonlinearity::eval(const std::array<double, kMaxDim>& x, double u) const {
  if (custom) return custom(x, u);
  return coeff * std::pow(std::abs(u), p - 2.0) * u;
}

double Nonlinearity::lipschitz_bound(double K) const {
  if (lipschitz) return lipschitz(K);
  if (custom) throw std::invalid_argument("custom nonlinearity needs a Lipschitz callback");
  if (p >= 2.0) return std::abs(coeff) * (p - 1.0) * std::pow(K, p - 2.0);
  throw std::invalid_argument("power nonlinearity with p < 2 is not locally Lipschitz at 0");
}

Nonlinearity Nonlinearity::power(double p, double coeff) {
  Nonlinearity f;
  f.p = p;
  f.coeff = coeff;
  return f;
}

double f1_defect(const Nonlinearity& f, const Domain& domain, double bound_K,
                 std::uint64_t seed, int samples) {
  Rng rng(seed);
  auto cells = domain.region().cells();
  if (cells.empty()) return 0.0;
  double L = f.lipschitz_bound(bound_K);
  double worst = -1e300;
  for (int i = 0; i < samples; ++i) {
    auto x = domain.grid.center(cells[rng.below(cells.size())]);
    double u = rng.uniform(-bound_K, bound_K);
    double v = rng.uniform(-bound_K, bound_K);
    double lhs = std::abs(f.eval(x, u) - f.eval(x, v));
    worst = std::max(worst, lhs - L * std::abs(u - v));
  }
  return worst;
}

double f2_defect(const Nonlinearity& f, const Domain& domain, double bound_K,
                 std::uint64_t seed, int samples) {
  Rng rng(seed);
  auto cells = domain.region().cells();
  if (cells.empty()) return 0.0;
  double worst = -1e300;
  for (int i = 0; i < samples; ++i) {
    auto x = domain.grid.center(cells[rng.below(cells.size())]);
    double u = rng.uniform(-bound_K, bound_K);
    double t = rng.uniform(-1.0, 1.0);
    auto xt = x;
    xt[0] = t * x[0];
    worst = std::max(worst, f.eval(x, u) - f.eval(xt, u));
  }
  return worst;
}

namespace {

struct EigenPair {
  double value = 0.0;
  std::vector<double> vec;  // unit in the h^dim-weighted norm
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// inverse power iteration in the complement of `deflate`
EigenPair smallest_eigenpair(const LinearMap& A, double cell_volume,
                             const std::vector<std::vector<double>>& deflate,
                             const SolverOptions& opts, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(A.size());
  auto hdot = [&](std::span<const double> a, std::span<const double> b) {
    return dot(a, b) * cell_volume;
  };
  auto orthify = [&](std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : deflate) {
        double c = hdot(v, b);
        axpy(-c, b, v);
      }
  };

  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  orthify(x);
  double nx = std::sqrt(hdot(x, x));
  if (nx == 0.0) throw SolverError("eigen solver: degenerate start vector");
  for (auto& v : x) v /= nx;

  std::unique_ptr<DiagShiftedMap> shifted;
  const LinearMap* op = &A;
  if (opts.shift != 0.0) {
    shifted = std::make_unique<DiagShiftedMap>(
        A, std::vector<double>(n, opts.shift));
    op = shifted.get();
  }

  EigenPair out;
  std::vector<double> Ax(n), y(n);
  for (int outer = 0; outer < opts.max_iterations; ++outer) {
    A.apply(x, Ax);
    double lambda = hdot(x, Ax);
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = Ax[i] - lambda * x[i];
      res2 += d * d;
    }
    double res = std::sqrt(res2 * cell_volume);
    out.value = lambda;
    out.residual = res;
    out.iterations = outer;
    if (res <= opts.tolerance * std::max(1.0, std::abs(lambda))) {
      out.converged = true;
      out.vec = x;
      return out;
    }
    double inner_rtol = std::clamp(0.05 * res / std::max(1.0, std::abs(lambda)), 1e-12, 1e-2);
    y = x;
    for (auto& v : y) v /= std::max(lambda, 1e-30);  // warm start near A^{-1} x
    conjugate_gradient(*op, x, y, inner_rtol, opts.max_inner_iterations);
    orthify(y);
    double ny = std::sqrt(hdot(y, y));
    if (!(ny > 0.0)) throw SolverError("eigen solver: iterate collapsed");
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
  }
  out.vec = x;
  return out;
}

SpectralResult eig_on_map(const LinearMap& A, double cell_volume, int count,
                          const SolverOptions& opts,
                          const std::function<Field(std::span<const double>)>& to_field) {
  SpectralResult result;
  Rng rng(opts.seed);
  std::vector<std::vector<double>> basis;
  result.converged = true;
  for (int j = 0; j < count; ++j) {
    EigenPair pair = smallest_eigenpair(A, cell_volume, basis, opts, rng);
    if (!pair.converged) {
      result.converged = false;
      throw SolverError("eigen solver did not converge within " +
                        std::to_string(opts.max_iterations) +
                        " iterations (residual " + std::to_string(pair.residual) + ")");
    }
    result.eigenvalues.push_back(pair.value);
    result.residuals.push_back(pair.residual);
    result.iterations += pair.iterations;
    Field f = to_field(pair.vec);
    normalize_sign(f);
    result.eigenfields.push_back(std::move(f));
    basis.push_back(std::move(pair.vec));
  }
  return result;
}

}  // namespace

void normalize_sign(Field& u) {
  const GridSpec& g = u.grid();
  double peak = u.sup_norm();
  if (peak == 0.0) return;
  std::int64_t pick = -1;
  double best_coord = -1e300;
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    if (std::abs(u[i]) < (1.0 - 1e-12) * peak) continue;
    double cN = g.coord(g.dim - 1, g.unflatten(i)[g.dim - 1]);
    if (cN > best_coord + 1e-15 * g.h || pick < 0) {
      best_coord = cN;
      pick = i;
    }
  }
  if (pick >= 0 && u[pick] < 0.0) {
    Field flipped = -1.0 * u;
    u = flipped;
  }
}

SpectralResult dirichlet_eig(const NonlocalOperator& L, const RegionMask& D,
                             int count, const SolverOptions& opts) {
  if (D.count() == 0) throw std::invalid_argument("dirichlet_eig: empty region");
  MaskedOperator A(L, D, opts.apply_path);
  double cell_volume = std::pow(L.grid().h, L.grid().dim);
  return eig_on_map(A, cell_volume, count, opts,
                    [&](std::span<const double> x) { return A.to_field(x); });
}

SpectralResult antisym_eig(const NonlocalOperator& L, const Reflection& r,
                           const Domain& omega, const SolverOptions& opts) {
  // upper-half cells of the domain
  RegionMask upper(L.grid());
  const GridSpec& g = L.grid();
  for (std::int64_t i = 0; i < g.cell_count(); ++i)
    if (omega.mask[static_cast<std::size_t>(i)] &&
        g.coord(r.axis, g.unflatten(i)[r.axis]) > r.level)
      upper.mask[static_cast<std::size_t>(i)] = 1;
  return antisym_eig_region(L, r, upper, opts);
}

SpectralResult antisym_eig_region(const NonlocalOperator& L, const Reflection& r,
                                  const RegionMask& U, const SolverOptions& opts) {
  OddReducedOperator A(L, r, U, opts.apply_path);
  double cell_volume = std::pow(L.grid().h, L.grid().dim);
  // the odd extension doubles the mass: rescale to unit L2 on the full grid
  SpectralResult result = eig_on_map(
      A, cell_volume, 1, opts, [&](std::span<const double> x) {
        Field full = A.to_full_field(x);
        double n2 = full.lp_norm(2.0);
        return n2 > 0.0 ? (1.0 / n2) * full : full;
      });
  return result;
}

SpectralResult doubly_antisym_eig_region(const NonlocalOperator& L,
                                         const Reflection& r1, const Reflection& r2,
                                         const RegionMask& U,
                                         const SolverOptions& opts) {
  DoublyOddReducedOperator A(L, r1, r2, U, opts.apply_path);
  double cell_volume = std::pow(L.grid().h, L.grid().dim);
  return eig_on_map(A, cell_volume, 1, opts, [&](std::span<const double> x) {
    Field full = A.to_full_field(x);
    double n2 = full.lp_norm(2.0);
    return n2 > 0.0 ? (1.0 / n2) * full : full;
  });
}

MinimizerResult p_minimize(const NonlocalOperator& L, double p,
                           const std::optional<Reflection>& r, const Domain& omega,
                           const SolverOptions& opts) {
  const GridSpec& g = L.grid();
  const int N = g.dim;
  const double s = L.table().params.s;
  if (2.0 * s < N) {
    double critical = 2.0 * N / (N - 2.0 * s);
    if (!(p > 1.0 && p < critical))
      throw std::invalid_argument("exponent p must lie in (1, " + std::to_string(critical) +
                                  ") for this dimension and order");
  } else if (!(p > 1.0)) {
    throw std::invalid_argument("exponent p must exceed 1");
  }
  if (r && !r->lattice_aligned(g))
    throw std::invalid_argument("constraint reflection is not lattice aligned");

  MaskedOperator A(L, omega.region(), opts.apply_path);
  const auto& cells = A.cells();
  const std::size_t n = cells.size();
  const double cell_volume = std::pow(g.h, N);

  // partner indices for the exact odd projection
  std::vector<std::size_t> partner(n);
  if (r) {
    std::vector<std::int64_t> where(static_cast<std::size_t>(g.cell_count()), -1);
    for (std::size_t i = 0; i < n; ++i) where[static_cast<std::size_t>(cells[i])] = static_cast<std::int64_t>(i);
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t m = reflect_index(g, cells[i], *r);
      if (m < 0 || where[static_cast<std::size_t>(m)] < 0)
        throw std::invalid_argument("domain is not symmetric under the constraint reflection");
      partner[i] = static_cast<std::size_t>(where[static_cast<std::size_t>(m)]);
    }
  }
  auto project_odd = [&](std::vector<double>& v) {
    if (!r) return;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = 0.5 * (v[i] - v[partner[i]]);
    v = std::move(out);
  };
  auto pnorm = [&](std::span<const double> v) {
    KahanSum sum;
    for (double w : v) sum.add(std::pow(std::abs(w), p));
    return std::pow(sum.value() * cell_volume, 1.0 / p);
  };

  std::vector<double> x(n);
  if (opts.initial_guess == SolverOptions::InitialGuess::kRandom) {
    Rng rng(opts.seed);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  } else if (r) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] = g.coord(r->axis, g.unflatten(cells[i])[r->axis]) - r->level;
  } else {
    std::fill(x.begin(), x.end(), 1.0);
  }
  project_odd(x);
  double np = pnorm(x);
  if (!(np > 1e-14)) throw SolverError("p_minimize: initial guess collapsed to zero");
  for (auto& v : x) v /= np;

  MinimizerResult out;
  std::vector<double> Ax(n), d(n), Ad(n), trial(n);
  A.apply(x, Ax);
  double energy = dot(x, Ax) * cell_volume;
  out.energy_history.push_back(energy);

  int iter = 0;
  int stalls = 0;
  for (; iter < opts.max_iterations; ++iter) {
    double lambda = energy;  // unit p-norm
    // descend along the Euler-Lagrange residual (the tangential gradient)
    for (std::size_t i = 0; i < n; ++i)
      d[i] = Ax[i] - lambda * std::pow(std::abs(x[i]), p - 2.0) * x[i];
    double res2 = dot(d, d) * cell_volume;
    out.residual = std::sqrt(res2);
    if (out.residual <= opts.tolerance * std::max(1.0, std::abs(lambda))) {
      out.converged = true;
      break;
    }
    project_odd(d);
    A.apply(d, Ad);
    double e_xd = dot(d, Ax) * cell_volume;
    double e_dd = dot(d, Ad) * cell_volume;

    // backtracking halving from 1.0, sufficient decrease 1e-4
    double tau = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, tau *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - tau * d[i];
      double tn = pnorm(trial);
      if (!(tn > 1e-14)) continue;
      double e_trial = (energy - 2.0 * tau * e_xd + tau * tau * e_dd) / (tn * tn);
      if (e_trial <= energy - 1e-4 * tau * res2) {
        for (std::size_t i = 0; i < n; ++i) x[i] = trial[i] / tn;
        bool refresh = (iter % 25) == 24;
        if (refresh) {
          A.apply(x, Ax);
        } else {
          for (std::size_t i = 0; i < n; ++i) Ax[i] = (Ax[i] - tau * Ad[i]) / tn;
        }
        energy = dot(x, Ax) * cell_volume;
        accepted = true;
        stalls = 0;
        break;
      }
    }
    if (!accepted) {
      // the incremental Ax may have drifted; retry once from a fresh
      // application before declaring the flow flat
      if (++stalls >= 2) break;
      A.apply(x, Ax);
      energy = dot(x, Ax) * cell_volume;
    }
    out.energy_history.push_back(energy);
  }
  out.iterations = iter;
  if (!out.converged) {
    // final exact residual with a fresh application
    A.apply(x, Ax);
    double lambda = dot(x, Ax) * cell_volume;
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double el = Ax[i] - lambda * std::pow(std::abs(x[i]), p - 2.0) * x[i];
      res2 += el * el;
    }
    out.residual = std::sqrt(res2 * cell_volume);
    energy = lambda;
    out.converged = out.residual <= opts.tolerance * std::max(1.0, std::abs(lambda));
    if (!out.converged) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.3e after %d iterations", out.residual, iter);
      throw SolverError(std::string("p_minimize did not reach the requested residual (") +
                        buf + ")");
    }
  }

  out.value = energy;
  Field u = A.to_field(x);
  if (r && r->level == 0.0) u.set_tag({r->axis, -1});
  normalize_sign(u);
  out.minimizer = std::move(u);
  return out;
}

Field torsion(const NonlocalOperator& L, const RegionMask& B,
              const SolverOptions& opts, CgResult* stats) {
  if (B.count() == 0) throw std::invalid_argument("torsion: empty region");
  MaskedOperator A(L, B, opts.apply_path);
  std::vector<double> b(static_cast<std::size_t>(A.size()), 1.0), x;
  CgResult cg = conjugate_gradient(A, b, x, opts.tolerance, opts.max_inner_iterations);
  if (stats) *stats = cg;
  if (!cg.converged)
    throw SolverError("torsion solve did not converge (residual " +
                      std::to_string(cg.residual) + ")");
  return A.to_field(x);
}

Field linear_solve(const NonlocalOperator& L, const Field& rhs, const RegionMask& D,
                   const SolverOptions& opts, CgResult* stats) {
  if (D.count() == 0) throw std::invalid_argument("linear_solve: empty region");
  MaskedOperator A(L, D, opts.apply_path);
  std::vector<double> b = A.from_field(rhs), x;
  CgResult cg = conjugate_gradient(A, b, x, opts.tolerance, opts.max_inner_iterations);
  if (stats) *stats = cg;
  if (!cg.converged)
    throw SolverError("linear solve did not converge (residual " +
                      std::to_string(cg.residual) + ")");
  return A.to_field(x);
}

}  // namespace fraclab
