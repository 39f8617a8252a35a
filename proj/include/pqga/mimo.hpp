#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pqga/problem.hpp"
#include "pqga/rng.hpp"

namespace pqga::mimo {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Cell and radio parameters. Power limits are stored in dBm as configured;
/// use the *_watts() accessors for linear-scale values.
struct CellConfig {
  int antennas = 32;          // N
  int providers = 4;          // M
  int users_per_provider = 2; // K_m
  double p_max_dbm = 33.0;
  double p_bar_dbm = 30.0;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 10.0;
  double bandwidth_hz = 15e3;
  double channel_correlation = 0.997;  // alpha_h
  double shadowing_std_db = 8.0;
  double cell_radius_m = 500.0;
  double min_distance_m = 10.0;
  double channel_norm_bound = 1.0;  // cap B used for the guarantee constants

  int users() const { return providers * users_per_provider; }
  double p_max_watts() const;
  double p_bar_watts() const;
  /// Noise power: density + 10*log10(bandwidth) + noise figure, in dB domain.
  double noise_power_watts() const;
  void validate() const;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watts);

/// Path loss in dB at distance d meters with an explicit shadowing term.
double pathloss_db(double distance_m, double shadow_db);

/// Linear-scale channel gain with shadowing drawn as a real normal in dB.
double pathloss_shadowing(double distance_m, RngStream& rng, double sigma_phi_db);

struct UserPlacement {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> distance;
};

/// Uniform placement over the hexagonal cell of circumradius
/// cell_radius_m by rejection sampling from the bounding disk, enforcing the
/// minimum BS distance.
UserPlacement place_users(const CellConfig& config, RngStream& rng);

/// True if (x, y) lies in the flat-vertex regular hexagon of circumradius a.
bool inside_hexagon(double x, double y, double circumradius);

/// One AR(1) step h' = alpha*h + z with z ~ CN(0, (1-alpha^2)*beta*I); the
/// stationary per-entry variance is beta.
ComplexVector channel_step(const ComplexVector& h_prev, double beta,
                           double alpha_h, RngStream& rng);

/// Per-provider zero-forcing precoders and the block-diagonal demand they
/// induce. Each block H^m W^m equals a positive multiple of the identity.
struct VirtualizationDemand {
  ComplexMatrix demand;                  // K x K block diagonal
  std::vector<ComplexMatrix> precoders;  // W^m, each N x K_m
  std::vector<double> power_scale;       // the ZF normalization per provider
};

/// ZF demand from per-provider channel blocks (rows of H grouped by
/// provider). Each precoder is normalized to power p_max/providers.
/// Rank-deficient provider channels are rejected.
VirtualizationDemand zf_demand(const ComplexMatrix& channel, int providers,
                               int users_per_provider, double p_max_watts);

/// Precoding deviation ||H V - D||_F^2.
double precoding_deviation(const ComplexMatrix& channel, const ComplexMatrix& precoder,
                           const ComplexMatrix& demand);

/// Conjugate-variable gradient H^H (H V - D) of the precoding deviation.
ComplexMatrix deviation_gradient(const ComplexMatrix& channel,
                                 const ComplexMatrix& precoder,
                                 const ComplexMatrix& demand);

/// Long-term power constraint value ||V||_F^2 - p_bar.
double power_constraint_g(const ComplexMatrix& precoder, double p_bar_watts);

/// Scale to the power ball of radius sqrt(p_max) when outside it.
ComplexMatrix project_power_ball(const ComplexMatrix& precoder, double p_max_watts);

/// One closed-form aggregated descent step
///   X = V - (T/(a S)) sum_s H_s^H (H_s V - D_s), then power-ball projection.
ComplexMatrix pqga_mimo_inner_step(const ComplexMatrix& v_prev,
                                   const std::vector<const ComplexMatrix*>& channels,
                                   const std::vector<const ComplexMatrix*>& demands,
                                   int duration, double alpha, double p_max_watts);

/// Closed-form per-period decision
///   X = [a Vd + e Vp - (T/S) sum_s H_s^H (H_s Vd - D_s)]
///         / [a + e + qw * gamma * T_next],  then power-ball projection,
/// where qw = Q_{i+1} + gamma*T_i*g(V_prev) >= 0.
ComplexMatrix pqga_mimo_decision(const ComplexMatrix& v_descent,
                                 const ComplexMatrix& v_prev,
                                 const std::vector<const ComplexMatrix*>& channels,
                                 const std::vector<const ComplexMatrix*>& demands,
                                 int duration, int next_duration,
                                 double queue_weight, double alpha, double eta,
                                 double gamma, double p_max_watts);

struct PrecoderOracleResult {
  ComplexMatrix precoder;
  double lambda = 0;          // power multiplier; 0 when the limit is slack
  double power_residual = 0;  // |power - limit|/limit when the limit binds
  int bisection_iterations = 0;
};

/// Minimizer of sum_s w_s ||H_s V - D_s||_F^2 subject to ||V||_F^2 <= limit:
/// ridge solution V(l) = (sum w H^H H + l I)^{-1} sum w H^H D with a scalar
/// bisection on l driving the power to the limit when it binds.
PrecoderOracleResult weighted_precoder_oracle(
    const std::vector<const ComplexMatrix*>& channels,
    const std::vector<const ComplexMatrix*>& demands,
    const std::vector<double>& weights, double power_limit,
    double power_tol = 1e-9);

/// Per-user rates log2(1 + SINR) where the desired and interfering signals
/// use the unconjugated products h_k^T v_j.
Eigen::VectorXd sinr_rates(const ComplexMatrix& channel, const ComplexMatrix& precoder,
                           double noise_power_watts);

/// Interleaved real/imaginary embedding of a complex matrix (column-major),
/// under which the real inner product equals Re tr{A^H B} and norms match.
Vector embed_complex(const ComplexMatrix& m);
ComplexMatrix unembed_complex(const Vector& x, int rows, int cols);

/// A seeded channel/demand realization over a horizon, shared by every
/// policy of an experiment. The ProblemInstance returned by problem() holds
/// pointers into this object, which must outlive it.
class MimoSimulation {
 public:
  MimoSimulation(const CellConfig& config, std::uint64_t seed, int horizon);

  const CellConfig& config() const { return config_; }
  int horizon() const { return horizon_; }
  const ComplexMatrix& channel(int t) const { return channels_.at(t); }
  const ComplexMatrix& demand(int t) const { return demands_.at(t); }
  double demand_norm_sq(int t) const { return demand_norm_sq_.at(t); }
  const std::vector<double>& user_gains() const { return betas_; }
  const UserPlacement& placement() const { return placement_; }
  double noise_power() const { return noise_power_; }
  /// Largest ||H_t||_F over the realization (for checking the cap B).
  double max_channel_norm() const { return max_channel_norm_; }

  /// Online problem over the embedded precoder space with the closed-form
  /// fast paths wired in.
  ProblemInstance problem() const;

 private:
  CellConfig config_;
  int horizon_ = 0;
  UserPlacement placement_;
  std::vector<double> betas_;
  std::vector<ComplexMatrix> channels_;
  std::vector<ComplexMatrix> demands_;
  std::vector<double> demand_norm_sq_;
  double noise_power_ = 0;
  double max_channel_norm_ = 0;
};

}  // namespace pqga::mimo
