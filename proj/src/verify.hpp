#pragma once

#include <string>
#include <vector>

#include "solve.hpp"

namespace fraclab {

struct VerificationReport {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  double tolerance = 0.0;
  std::int64_t worst_cell = -1;  // flat index of the worst violation, -1 if none
  std::string note;
};

/// margin = ||u - u∘r||_inf / ||u||_inf (0 for the zero field).
VerificationReport check_symmetry(const Field& u, const Reflection& r,
                                  double tolerance = 1e-6);

/// Strict decrease in x1 on the quarter Ω ∩ {x1>0} ∩ {xN>0}: strict between
/// cell pairs both at distance >= 2h from the boundary, tolerance
/// tol_rel * ||u||_inf elsewhere. Reports the "u ≡ 0" branch explicitly when
/// ||u||_inf <= tol_rel.
VerificationReport check_monotonicity(const Field& u, const Domain& omega,
                                      double tol_rel = 1e-8);

/// One-sign check on H after global sign normalization.
VerificationReport check_sign(const Field& u, const RegionMask& half,
                              double tol_rel = 1e-8);

/// Difference quotient (f(x,u(r_{1,level}x)) - f(x,u(x))) / (u(r_{1,level}x) - u(x)),
/// zero where the values coincide, on supp(u) ∩ {x1 > level} ∩ {xN > 0}.
Field linearized_coefficient(const Field& u, const Nonlinearity& f, double level);

struct MovingPlaneResult {
  std::vector<double> levels;  // descending, multiples of h/2 in (0, lambda1)
  std::vector<double> minima;  // per-level min of v_lambda over Omega_lambda
  double lambda1 = 0.0;        // sup of x1 over the domain
  double lambda0 = 0.0;        // largest failing level (0 if none)
  double c_inf = 0.0;          // max |c_lambda| over the scan
  double tolerance = 0.0;
  double antisymmetry_defect = 0.0;  // worst double-antisymmetry violation of v_lambda
};

/// Scans v_lambda = u∘r_{1,lambda} - u over descending lattice levels.
MovingPlaneResult moving_plane_scan(const Field& u, const Nonlinearity& f,
                                    const Domain& omega, double tol_rel = 1e-8);

/// Residual check of L w >= c w on U plus w >= 0 on (H1 ∩ H2) \ U.
VerificationReport supersolution_check(const NonlocalOperator& L, const Field& w,
                                       const Field& c, const RegionMask& U,
                                       const Reflection& r1, const Reflection& r2,
                                       double tolerance);

struct SmallVolumeResult {
  double c_inf = 0.0;
  std::vector<double> measures;       // strictly decreasing
  std::vector<double> lambda_minus;   // lambda_1^-(U) per region
  double delta_star = 0.0;            // largest measure with lambda_1^- >= c_inf downward
  bool validation_pass = false;       // generated supersolutions stayed nonnegative
  double worst_supersolution_min = 0.0;
  std::string note;
};

/// Computes lambda_1^- along a shrinking family and instantiates the
/// small-volume maximum principle: below delta_star, random supersolutions
/// with |c| <= c_inf are solved for and checked for nonnegativity.
SmallVolumeResult small_volume_threshold(const NonlocalOperator& L, double c_inf,
                                         const std::vector<RegionMask>& family,
                                         const Reflection& r1, const Reflection& r2,
                                         const SolverOptions& opts);

struct DecayFitResult {
  double exponent = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double fit_residual = 0.0;  // RMS residual of the log-log regression
  int point_count = 0;
  double min_ratio = 0.0;     // min u / delta^s over the window
  double s_target = 0.0;
  bool consistent = false;    // |exponent - s| <= exponent_tol and min_ratio > 0
};

/// Log-log regression of u against the distance to the boundary of B over
/// [window_lo, window_hi] (defaults: [2h, 0.5 * max distance]). Throws when
/// fewer than 8 usable points exist.
DecayFitResult hopf_decay_fit(const Field& u, const RegionMask& B, double s,
                              double window_lo = 0.0, double window_hi = 0.0,
                              double exponent_tol = 0.1);

/// Equality of energy(u polarized) - energy(u) with the explicit kernel
/// difference double sum over the positive/negative sets, plus the
/// energy-does-not-increase and p-norm-preservation assertions.
VerificationReport polarization_identity_check(const NonlocalOperator& L,
                                               const Field& u, const Reflection& rN,
                                               double tolerance = 1e-10);

/// energy(w,v) + energy(v,v) <= 0 with the lemma test function; equality
/// forces v ≡ 0.
VerificationReport lemma22_check(const NonlocalOperator& L, const Field& w,
                                 const Reflection& r1, const Reflection& r2,
                                 double tol_rel = 1e-10);

/// Distance from each cell of B to the nearest cell outside B, offset by
/// h/2 to approximate the distance to the interface (0 outside B).
std::vector<double> boundary_distance(const RegionMask& B);

}  // namespace fraclab
