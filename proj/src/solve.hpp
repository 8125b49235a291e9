#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nonlocal.hpp"

namespace fraclab {

struct SolverOptions {
  double tolerance = 1e-9;      // relative residual target
  int max_iterations = 600;     // outer (eigen / flow) iterations
  int max_inner_iterations = 20000;  // conjugate-gradient cap
  std::uint64_t seed = 1;
  enum class InitialGuess { kDefault, kRandom } initial_guess = InitialGuess::kDefault;
  double shift = 0.0;           // spectral shift for inverse iteration
  ApplyPath apply_path = ApplyPath::kAuto;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  // relative to the right-hand side
  bool converged = false;
};

/// Plain conjugate gradients on a symmetric positive definite map.
CgResult conjugate_gradient(const LinearMap& A, std::span<const double> b,
                            std::vector<double>& x, double rel_tol, int max_iter);

struct SpectralResult {
  std::vector<double> eigenvalues;   // nondecreasing
  std::vector<Field> eigenfields;    // unit discrete-L2 norm, sign normalized
  std::vector<double> residuals;     // ||L u - lambda u||_2 / ||u||_2
  int iterations = 0;
  bool converged = false;
};

struct MinimizerResult {
  double value = 0.0;   // constrained minimum of the energy at unit p-norm
  Field minimizer;
  double residual = 0.0;  // Euler-Lagrange residual ||L u - value |u|^(p-2) u||_2
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_history;
};

/// Nonlinearity f(x, u); defaults to the power form coeff |u|^(p-2) u.
struct Nonlinearity {
  double p = 2.0;
  double coeff = 1.0;
  std::function<double(const std::array<double, kMaxDim>&, double)> custom;

  double eval(const std::array<double, kMaxDim>& x, double u) const;
  /// Lipschitz constant in u over |u| <= K (power form; custom must supply one).
  std::function<double(double)> lipschitz;
  double lipschitz_bound(double K) const;

  static Nonlinearity power(double p, double coeff);
};

/// Worst sampled violation of the Lipschitz condition |f(x,u)-f(x,v)| <= L|u-v|
/// over |u|,|v| <= K; nonpositive values mean the condition held.
double f1_defect(const Nonlinearity& f, const Domain& domain, double bound_K,
                 std::uint64_t seed, int samples = 2000);

/// Worst sampled violation of f(t x1, ..., u) >= f(x, u) for t in [-1,1].
double f2_defect(const Nonlinearity& f, const Domain& domain, double bound_K,
                 std::uint64_t seed, int samples = 2000);

/// Smallest `count` Dirichlet eigenpairs of L on D via inverse iteration with
/// deflation. Throws SolverError on non-convergence.
SpectralResult dirichlet_eig(const NonlocalOperator& L, const RegionMask& D,
                             int count, const SolverOptions& opts);

/// Smallest eigenvalue of the antisymmetric sector about r on the symmetric
/// domain; the odd eigenfield is returned on the full domain.
SpectralResult antisym_eig(const NonlocalOperator& L, const Reflection& r,
                           const Domain& omega, const SolverOptions& opts);

/// lambda_1^-(U) for U strictly inside the halfspace of r: smallest Rayleigh
/// quotient over r-antisymmetric fields supported in U ∪ r(U).
SpectralResult antisym_eig_region(const NonlocalOperator& L, const Reflection& r,
                                  const RegionMask& U, const SolverOptions& opts);

/// Smallest eigenvalue of the doubly antisymmetric sector over U ⊂ H1 ∩ H2.
SpectralResult doubly_antisym_eig_region(const NonlocalOperator& L,
                                         const Reflection& r1, const Reflection& r2,
                                         const RegionMask& U,
                                         const SolverOptions& opts);

/// Normalized-gradient-flow minimizer of energy(u,u) over unit p-norm fields
/// supported in the domain, optionally constrained to u ∘ r = -u. Gradient
/// steps use backtracking halving from 1.0 with sufficient-decrease factor
/// 1e-4; iterates are antisymmetrized exactly and p-renormalized.
MinimizerResult p_minimize(const NonlocalOperator& L, double p,
                           const std::optional<Reflection>& r, const Domain& omega,
                           const SolverOptions& opts);

/// Solution of L psi = 1 on B with exterior zero.
Field torsion(const NonlocalOperator& L, const RegionMask& B,
              const SolverOptions& opts, CgResult* stats = nullptr);

/// Conjugate-gradient solve of the restricted system L u = rhs on D.
Field linear_solve(const NonlocalOperator& L, const Field& rhs, const RegionMask& D,
                   const SolverOptions& opts, CgResult* stats = nullptr);

/// Deterministic sign convention: the value at the largest-|value| cell with
/// the greatest last-axis coordinate is made positive.
void normalize_sign(Field& u);

}  // namespace fraclab
