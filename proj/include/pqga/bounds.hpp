#pragma once

#include <optional>
#include <stdexcept>

#include "pqga/solver.hpp"

namespace pqga {

/// Problem constants under which the performance guarantees are stated:
/// gradient bound D, smoothness L, strong convexity rho, constraint
/// Lipschitz constant beta, constraint bound G, interior margin eps,
/// feasible-set diameter R, and the maximum period duration.
struct AssumptionConstants {
  double grad_bound = 0;            // D
  double smoothness = 0;            // L
  double strong_convexity = 0;      // rho
  double constraint_lipschitz = 0;  // beta
  double constraint_bound = 0;      // G
  double interior_margin = 0;       // eps
  double set_radius = 0;            // R
  double max_duration = 1;          // T_max

  void validate() const;
};

/// Thrown when a guarantee is evaluated outside its hypotheses; the message
/// names the violated inequality.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Contraction ratio (alpha - rho) / (alpha + rho).
double contraction_ratio(const AssumptionConstants& c, double alpha);

/// rho^J evaluated in log space to avoid underflow for large J.
double contraction_power(double rho, int steps);

/// Dynamic regret guarantee
///   (D^2 T_max / 4a) T + (a rho^J + e)(R^2 + 2R Pi_x) + g^2 G^2 (T_max^2 + Pi_T)
/// valid for alpha >= T_max*L, eta >= beta^2 gamma^2 T_max^2, gamma > 0.
double dynamic_regret_bound(const AssumptionConstants& c, const PqgaParams& p,
                            double path_length, double duration_variation,
                            double horizon);

/// Improved guarantee for J with 2 rho^{J+1} < 1 and eta >= max{4a, b^2g^2Tmax^2}:
///   Pi_grad/(4 xi) + (L+xi)/(1-2rho^{J+1}) *
///     (R^2 + [g^2G^2(T_max^2+Pi_T) + e R (R + 2 Pi_x)] / (a + rho)).
double dynamic_regret_bound_largeJ(const AssumptionConstants& c,
                                   const PqgaParams& p, double path_length,
                                   double duration_variation,
                                   double squared_gradients, double horizon,
                                   double xi);

/// Static regret guarantee (no path-length dependence):
///   (D^2 T_max / 4a) T + (a rho^J + e) R^2 + g^2 G^2 (T_max^2 + Pi_T).
double static_regret_bound(const AssumptionConstants& c, const PqgaParams& p,
                           double duration_variation, double horizon);

/// Constraint-violation guarantee, valid for any positive parameters:
///   2 G T_max + [(a+e) R^2 + D R T_max^2 + 2 g^2 G^2 T_max] / (eps g^2).
double violation_bound(const AssumptionConstants& c, const PqgaParams& p);

/// Smallest J >= 0 with 2 rho^{J+1} < 1. Requires 0 <= rho < 1.
int min_J_for_contraction(double rho);

/// Parameter prescriptions, selected by mode:
///   1: gamma^2 = T^kappa, eta = b^2 g^2 Tmax^2, alpha = Tmax L T^{(1-nu)/2}
///      (requires nu and kappa in [0, 1/2])
///   2: alpha = Tmax L T^{1/2}, eta = b^2 g^2 Tmax^2, gamma^2 = 1
///   3: alpha = Tmax L, eta = max{4 alpha, b^2 g^2 Tmax^2}, gamma = 1,
///      J = smallest with 2 rho^{J+1} < 1
///   4: gamma^2 = T^{1/2}, eta = b^2 g^2 Tmax^2, alpha = Tmax L T^{(1-nu)/2}
///      (requires nu)
///   5: alpha = Tmax L T^{1/2}, eta = b^2 g^2 Tmax^2, gamma^2 = T^{1/2}
///   6: as mode 3 (bounded duration-variation regime)
/// Modes that leave J free return requested_J.
PqgaParams select_params(const AssumptionConstants& c, int mode, double horizon,
                         std::optional<double> nu = std::nullopt,
                         std::optional<double> delta = std::nullopt,
                         std::optional<double> kappa = std::nullopt,
                         int requested_J = 0);

/// Constants for the precoding application from the power limits and a
/// channel-norm cap B: rho = 2, L = B^2, D = 4 B^2 sqrt(Pmax),
/// beta = 2 sqrt(Pmax), G = max{Pbar, Pmax - Pbar}, eps = Pbar,
/// R = 2 sqrt(Pmax). max_duration is left at 1 for the caller to fill.
AssumptionConstants mimo_constants(double p_max_watts, double p_bar_watts,
                                   double channel_norm_bound);

struct BoundReport {
  double re_dynamic = 0;
  std::optional<double> re_dynamic_largeJ;
  double re_static = 0;
  double vo = 0;
  double rho = 0;
  double xi = 0;
  PqgaParams params_used;
  double path_length = 0;
  double duration_variation = 0;
  double squared_gradients = 0;
  double horizon = 0;
};

/// Evaluates every applicable guarantee at the given variation inputs. The
/// large-J value is filled only when its hypotheses hold. xi defaults to L.
BoundReport bound_report(const AssumptionConstants& c, const PqgaParams& p,
                         double path_length, double duration_variation,
                         double squared_gradients, double horizon,
                         std::optional<double> xi = std::nullopt);

}  // namespace pqga
