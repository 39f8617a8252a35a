#include "pqga/bounds.hpp"

#include <cmath>
#include <string>

namespace pqga {

namespace {

void require(bool ok, const std::string& inequality) {
  if (!ok) throw HypothesisError("hypothesis violated: " + inequality);
}

void check_regret_hypotheses(const AssumptionConstants& c, const PqgaParams& p) {
  c.validate();
  require(p.alpha >= c.max_duration * c.smoothness, "alpha >= T_max * L");
  require(p.eta >= c.constraint_lipschitz * c.constraint_lipschitz * p.gamma *
                       p.gamma * c.max_duration * c.max_duration,
          "eta >= beta^2 * gamma^2 * T_max^2");
  require(p.gamma > 0, "gamma > 0");
}

}  // namespace

void AssumptionConstants::validate() const {
  if (!(grad_bound > 0 && smoothness > 0 && strong_convexity > 0 &&
        constraint_lipschitz > 0 && constraint_bound > 0 && interior_margin > 0 &&
        set_radius > 0 && max_duration >= 1)) {
    throw HypothesisError("hypothesis violated: constants must be positive");
  }
  if (strong_convexity > smoothness) {
    throw HypothesisError("hypothesis violated: rho <= L");
  }
}

double contraction_ratio(const AssumptionConstants& c, double alpha) {
  return (alpha - c.strong_convexity) / (alpha + c.strong_convexity);
}

double contraction_power(double rho, int steps) {
  if (steps == 0) return 1.0;
  if (rho <= 0) return 0.0;
  return std::exp(static_cast<double>(steps) * std::log(rho));
}

double dynamic_regret_bound(const AssumptionConstants& c, const PqgaParams& p,
                            double path_length, double duration_variation,
                            double horizon) {
  check_regret_hypotheses(c, p);
  const double rho = contraction_ratio(c, p.alpha);
  const double rhoJ = contraction_power(rho, p.steps_J);
  const double R = c.set_radius;
  return c.grad_bound * c.grad_bound * c.max_duration / (4.0 * p.alpha) * horizon +
         (p.alpha * rhoJ + p.eta) * (R * R + 2.0 * R * path_length) +
         p.gamma * p.gamma * c.constraint_bound * c.constraint_bound *
             (c.max_duration * c.max_duration + duration_variation);
}

double dynamic_regret_bound_largeJ(const AssumptionConstants& c,
                                   const PqgaParams& p, double path_length,
                                   double duration_variation,
                                   double squared_gradients, double horizon,
                                   double xi) {
  (void)horizon;
  c.validate();
  require(xi > 0, "xi > 0");
  require(p.alpha >= c.max_duration * c.smoothness, "alpha >= T_max * L");
  require(p.eta >= std::max(4.0 * p.alpha,
                            c.constraint_lipschitz * c.constraint_lipschitz *
                                p.gamma * p.gamma * c.max_duration * c.max_duration),
          "eta >= max{4*alpha, beta^2 * gamma^2 * T_max^2}");
  const double rho = contraction_ratio(c, p.alpha);
  const double contraction = 2.0 * contraction_power(rho, p.steps_J + 1);
  require(contraction < 1.0, "2 * rho^{J+1} < 1");
  const double R = c.set_radius;
  const double inner =
      R * R + (p.gamma * p.gamma * c.constraint_bound * c.constraint_bound *
                   (c.max_duration * c.max_duration + duration_variation) +
               p.eta * R * (R + 2.0 * path_length)) /
                  (p.alpha + c.strong_convexity);
  return squared_gradients / (4.0 * xi) +
         (c.smoothness + xi) / (1.0 - contraction) * inner;
}

double static_regret_bound(const AssumptionConstants& c, const PqgaParams& p,
                           double duration_variation, double horizon) {
  check_regret_hypotheses(c, p);
  const double rho = contraction_ratio(c, p.alpha);
  const double rhoJ = contraction_power(rho, p.steps_J);
  const double R = c.set_radius;
  return c.grad_bound * c.grad_bound * c.max_duration / (4.0 * p.alpha) * horizon +
         (p.alpha * rhoJ + p.eta) * R * R +
         p.gamma * p.gamma * c.constraint_bound * c.constraint_bound *
             (c.max_duration * c.max_duration + duration_variation);
}

double violation_bound(const AssumptionConstants& c, const PqgaParams& p) {
  c.validate();
  require(p.alpha > 0 && p.eta > 0 && p.gamma > 0, "alpha, eta, gamma > 0");
  const double R = c.set_radius;
  const double Tm = c.max_duration;
  const double G = c.constraint_bound;
  return 2.0 * G * Tm +
         ((p.alpha + p.eta) * R * R + c.grad_bound * R * Tm * Tm +
          2.0 * p.gamma * p.gamma * G * G * Tm) /
             (c.interior_margin * p.gamma * p.gamma);
}

int min_J_for_contraction(double rho) {
  if (rho >= 1.0) {
    throw HypothesisError("hypothesis violated: rho < 1 (no finite J exists)");
  }
  if (rho < 0) {
    throw HypothesisError("hypothesis violated: rho >= 0");
  }
  int J = 0;
  while (2.0 * contraction_power(rho, J + 1) >= 1.0) ++J;
  return J;
}

PqgaParams select_params(const AssumptionConstants& c, int mode, double horizon,
                         std::optional<double> nu, std::optional<double> delta,
                         std::optional<double> kappa, int requested_J) {
  (void)delta;  // delta only shifts the claimed rates, never the parameters
  c.validate();
  if (horizon < 1) throw std::invalid_argument("select_params: horizon must be >= 1");
  const double Tm = c.max_duration;
  const double L = c.smoothness;
  const double beta = c.constraint_lipschitz;
  PqgaParams p;
  p.steps_J = requested_J;

  auto eta_from = [&](double gamma_sq) { return beta * beta * gamma_sq * Tm * Tm; };

  switch (mode) {
    case 1: {
      if (!nu) throw std::invalid_argument("select_params: mode 1 requires nu");
      if (!kappa) throw std::invalid_argument("select_params: mode 1 requires kappa");
      if (*kappa < 0.0 || *kappa > 0.5) {
        throw std::invalid_argument("select_params: kappa must lie in [0, 1/2]");
      }
      const double gamma_sq = std::pow(horizon, *kappa);
      p.gamma = std::sqrt(gamma_sq);
      p.eta = eta_from(gamma_sq);
      p.alpha = Tm * L * std::pow(horizon, (1.0 - *nu) / 2.0);
      break;
    }
    case 2: {
      p.gamma = 1.0;
      p.eta = eta_from(1.0);
      p.alpha = Tm * L * std::sqrt(horizon);
      break;
    }
    case 3:
    case 6: {
      p.alpha = Tm * L;
      p.gamma = 1.0;
      p.eta = std::max(4.0 * p.alpha, eta_from(1.0));
      const double rho = contraction_ratio(c, p.alpha);
      p.steps_J = std::max(requested_J, min_J_for_contraction(std::max(rho, 0.0)));
      break;
    }
    case 4: {
      if (!nu) throw std::invalid_argument("select_params: mode 4 requires nu");
      const double gamma_sq = std::sqrt(horizon);
      p.gamma = std::sqrt(gamma_sq);
      p.eta = eta_from(gamma_sq);
      p.alpha = Tm * L * std::pow(horizon, (1.0 - *nu) / 2.0);
      break;
    }
    case 5: {
      const double gamma_sq = std::sqrt(horizon);
      p.gamma = std::sqrt(gamma_sq);
      p.eta = eta_from(gamma_sq);
      p.alpha = Tm * L * std::sqrt(horizon);
      break;
    }
    default:
      throw std::invalid_argument("select_params: mode must be in 1..6");
  }
  p.validate();
  return p;
}

AssumptionConstants mimo_constants(double p_max_watts, double p_bar_watts,
                                   double channel_norm_bound) {
  if (!(p_bar_watts > 0) || !(channel_norm_bound > 0)) {
    throw std::invalid_argument("mimo_constants: powers and B must be positive");
  }
  if (p_bar_watts > p_max_watts) {
    throw std::invalid_argument("mimo_constants: P_bar must not exceed P_max");
  }
  const double B = channel_norm_bound;
  AssumptionConstants c;
  c.strong_convexity = 2.0;
  c.smoothness = B * B;
  c.grad_bound = 4.0 * B * B * std::sqrt(p_max_watts);
  c.constraint_lipschitz = 2.0 * std::sqrt(p_max_watts);
  c.constraint_bound = std::sqrt(std::max(p_bar_watts * p_bar_watts,
                                          (p_max_watts - p_bar_watts) *
                                              (p_max_watts - p_bar_watts)));
  c.interior_margin = p_bar_watts;
  c.set_radius = 2.0 * std::sqrt(p_max_watts);
  c.max_duration = 1;
  return c;
}

BoundReport bound_report(const AssumptionConstants& c, const PqgaParams& p,
                         double path_length, double duration_variation,
                         double squared_gradients, double horizon,
                         std::optional<double> xi) {
  BoundReport r;
  r.params_used = p;
  r.path_length = path_length;
  r.duration_variation = duration_variation;
  r.squared_gradients = squared_gradients;
  r.horizon = horizon;
  r.rho = contraction_ratio(c, p.alpha);
  r.xi = xi.value_or(c.smoothness);
  r.re_dynamic = dynamic_regret_bound(c, p, path_length, duration_variation, horizon);
  r.re_static = static_regret_bound(c, p, duration_variation, horizon);
  r.vo = violation_bound(c, p);
  try {
    r.re_dynamic_largeJ = dynamic_regret_bound_largeJ(
        c, p, path_length, duration_variation, squared_gradients, horizon, r.xi);
  } catch (const HypothesisError&) {
    r.re_dynamic_largeJ.reset();
  }
  return r;
}

}  // namespace pqga
