#include "pqga/mimo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pqga/bounds.hpp"

namespace pqga::mimo {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double CellConfig::p_max_watts() const { return dbm_to_watt(p_max_dbm); }
double CellConfig::p_bar_watts() const { return dbm_to_watt(p_bar_dbm); }

double CellConfig::noise_power_watts() const {
  const double dbm = noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz) +
                     noise_figure_db;
  return dbm_to_watt(dbm);
}

void CellConfig::validate() const {
  if (antennas < 1 || providers < 1 || users_per_provider < 1) {
    throw std::invalid_argument("cell: antennas, providers, users must be positive");
  }
  if (users_per_provider > antennas) {
    throw std::invalid_argument("cell: ZF needs users_per_provider <= antennas");
  }
  if (p_bar_watts() > p_max_watts()) {
    throw std::invalid_argument("cell: average power limit exceeds peak power limit");
  }
  if (channel_correlation < 0.0 || channel_correlation > 1.0) {
    throw std::invalid_argument("cell: channel correlation must lie in [0, 1]");
  }
  if (!(bandwidth_hz > 0) || !(cell_radius_m > 0) ||
      !(min_distance_m >= 0) || min_distance_m >= cell_radius_m) {
    throw std::invalid_argument("cell: invalid geometry or bandwidth");
  }
  if (!(channel_norm_bound > 0)) {
    throw std::invalid_argument("cell: channel norm bound must be positive");
  }
}

double pathloss_db(double distance_m, double shadow_db) {
  if (!(distance_m > 0)) {
    throw std::invalid_argument("pathloss: distance must be positive");
  }
  return -31.54 - 33.0 * std::log10(distance_m) - shadow_db;
}

double pathloss_shadowing(double distance_m, RngStream& rng, double sigma_phi_db) {
  const double shadow = rng.normal(0.0, sigma_phi_db);
  return std::pow(10.0, pathloss_db(distance_m, shadow) / 10.0);
}

bool inside_hexagon(double x, double y, double circumradius) {
  const double apothem = circumradius * std::sqrt(3.0) / 2.0;
  // Edge normals of a vertex-at-(a,0) hexagon point at 30, 90 and 150 deg.
  const double n1 = std::abs(x * std::cos(M_PI / 6.0) + y * std::sin(M_PI / 6.0));
  const double n2 = std::abs(y);
  const double n3 = std::abs(x * std::cos(5.0 * M_PI / 6.0) + y * std::sin(5.0 * M_PI / 6.0));
  return n1 <= apothem && n2 <= apothem && n3 <= apothem;
}

UserPlacement place_users(const CellConfig& config, RngStream& rng) {
  UserPlacement placement;
  const int K = config.users();
  placement.x.reserve(K);
  placement.y.reserve(K);
  placement.distance.reserve(K);
  const double a = config.cell_radius_m;
  long draws = 0;
  while (static_cast<int>(placement.x.size()) < K) {
    if (++draws > 1000000) {
      throw std::runtime_error("place_users: rejection sampling exceeded 1e6 draws");
    }
    const double r = a * std::sqrt(rng.uniform());
    const double theta = 2.0 * M_PI * rng.uniform();
    const double px = r * std::cos(theta);
    const double py = r * std::sin(theta);
    const double d = std::hypot(px, py);
    if (d < config.min_distance_m) continue;
    if (!inside_hexagon(px, py, a)) continue;
    placement.x.push_back(px);
    placement.y.push_back(py);
    placement.distance.push_back(d);
  }
  return placement;
}

ComplexVector channel_step(const ComplexVector& h_prev, double beta,
                           double alpha_h, RngStream& rng) {
  if (alpha_h < 0.0 || alpha_h > 1.0) {
    throw std::invalid_argument("channel_step: correlation must lie in [0, 1]");
  }
  const double innovation_var = (1.0 - alpha_h * alpha_h) * beta;
  ComplexVector h(h_prev.size());
  for (Eigen::Index n = 0; n < h_prev.size(); ++n) {
    h(n) = alpha_h * h_prev(n) + rng.cnormal(innovation_var);
  }
  return h;
}

VirtualizationDemand zf_demand(const ComplexMatrix& channel, int providers,
                               int users_per_provider, double p_max_watts) {
  const int K = providers * users_per_provider;
  if (channel.rows() != K) {
    throw std::invalid_argument("zf_demand: channel rows must equal total users");
  }
  VirtualizationDemand out;
  out.demand = ComplexMatrix::Zero(K, K);
  out.precoders.reserve(providers);
  out.power_scale.reserve(providers);
  const double per_provider_power = p_max_watts / providers;
  for (int m = 0; m < providers; ++m) {
    const ComplexMatrix Hm =
        channel.middleRows(m * users_per_provider, users_per_provider);
    const ComplexMatrix gram = Hm * Hm.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
    if (es.eigenvalues()(0) <=
        1e-12 * std::max(1.0, es.eigenvalues()(users_per_provider - 1))) {
      throw std::runtime_error("zf_demand: rank-deficient channel for provider " +
                               std::to_string(m));
    }
    const ComplexMatrix pinv = Hm.adjoint() * gram.inverse();
    const double norm_sq = pinv.squaredNorm();
    const double scale = std::sqrt(per_provider_power / norm_sq);
    ComplexMatrix Wm = scale * pinv;
    out.demand.block(m * users_per_provider, m * users_per_provider,
                     users_per_provider, users_per_provider) = Hm * Wm;
    out.precoders.push_back(std::move(Wm));
    out.power_scale.push_back(scale);
  }
  return out;
}

double precoding_deviation(const ComplexMatrix& channel, const ComplexMatrix& precoder,
                           const ComplexMatrix& demand) {
  if (channel.cols() != precoder.rows() || channel.rows() != demand.rows() ||
      precoder.cols() != demand.cols()) {
    throw std::invalid_argument("precoding_deviation: shape mismatch");
  }
  return (channel * precoder - demand).squaredNorm();
}

ComplexMatrix deviation_gradient(const ComplexMatrix& channel,
                                 const ComplexMatrix& precoder,
                                 const ComplexMatrix& demand) {
  return channel.adjoint() * (channel * precoder - demand);
}

double power_constraint_g(const ComplexMatrix& precoder, double p_bar_watts) {
  return precoder.squaredNorm() - p_bar_watts;
}

ComplexMatrix project_power_ball(const ComplexMatrix& precoder, double p_max_watts) {
  const double nsq = precoder.squaredNorm();
  if (nsq <= p_max_watts) return precoder;
  return precoder * (std::sqrt(p_max_watts) / std::sqrt(nsq));
}

namespace {

ComplexMatrix aggregated_deviation_gradient(
    const ComplexMatrix& at, const std::vector<const ComplexMatrix*>& channels,
    const std::vector<const ComplexMatrix*>& demands, double weight) {
  ComplexMatrix sum = ComplexMatrix::Zero(at.rows(), at.cols());
  for (std::size_t s = 0; s < channels.size(); ++s) {
    sum.noalias() += channels[s]->adjoint() * ((*channels[s]) * at - (*demands[s]));
  }
  return weight * sum;
}

}  // namespace

ComplexMatrix pqga_mimo_inner_step(const ComplexMatrix& v_prev,
                                   const std::vector<const ComplexMatrix*>& channels,
                                   const std::vector<const ComplexMatrix*>& demands,
                                   int duration, double alpha, double p_max_watts) {
  if (channels.empty() || channels.size() != demands.size()) {
    throw std::invalid_argument("pqga_mimo_inner_step: invalid feedback set");
  }
  if (!v_prev.allFinite()) {
    throw std::invalid_argument("pqga_mimo_inner_step: nonfinite precoder");
  }
  const double weight = static_cast<double>(duration) /
                        (alpha * static_cast<double>(channels.size()));
  const ComplexMatrix x =
      v_prev - aggregated_deviation_gradient(v_prev, channels, demands, weight);
  return project_power_ball(x, p_max_watts);
}

ComplexMatrix pqga_mimo_decision(const ComplexMatrix& v_descent,
                                 const ComplexMatrix& v_prev,
                                 const std::vector<const ComplexMatrix*>& channels,
                                 const std::vector<const ComplexMatrix*>& demands,
                                 int duration, int next_duration,
                                 double queue_weight, double alpha, double eta,
                                 double gamma, double p_max_watts) {
  if (channels.empty() || channels.size() != demands.size()) {
    throw std::invalid_argument("pqga_mimo_decision: invalid feedback set");
  }
  if (!v_descent.allFinite() || !v_prev.allFinite()) {
    throw std::invalid_argument("pqga_mimo_decision: nonfinite precoder");
  }
  const double weight = static_cast<double>(duration) /
                        static_cast<double>(channels.size());
  const ComplexMatrix numerator =
      alpha * v_descent + eta * v_prev -
      aggregated_deviation_gradient(v_descent, channels, demands, weight);
  const double denominator =
      alpha + eta + queue_weight * gamma * static_cast<double>(next_duration);
  return project_power_ball(numerator / denominator, p_max_watts);
}

PrecoderOracleResult weighted_precoder_oracle(
    const std::vector<const ComplexMatrix*>& channels,
    const std::vector<const ComplexMatrix*>& demands,
    const std::vector<double>& weights, double power_limit, double power_tol) {
  if (channels.empty() || channels.size() != demands.size() ||
      channels.size() != weights.size()) {
    throw std::invalid_argument("precoder_oracle: invalid feedback set");
  }
  if (!(power_limit > 0)) {
    throw std::invalid_argument("precoder_oracle: power limit must be positive");
  }
  const Eigen::Index N = channels[0]->cols();
  const Eigen::Index K = demands[0]->cols();
  ComplexMatrix gram = ComplexMatrix::Zero(N, N);
  ComplexMatrix rhs = ComplexMatrix::Zero(N, K);
  for (std::size_t s = 0; s < channels.size(); ++s) {
    gram.noalias() += weights[s] * (channels[s]->adjoint() * (*channels[s]));
    rhs.noalias() += weights[s] * (channels[s]->adjoint() * (*demands[s]));
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
  const Eigen::VectorXd eigs = es.eigenvalues().cwiseMax(0.0);
  const ComplexMatrix coeffs = es.eigenvectors().adjoint() * rhs;
  const Eigen::VectorXd row_energy = coeffs.rowwise().squaredNorm().real();
  const double eig_floor = 1e-14 * std::max(1.0, eigs(N - 1));

  auto power_at = [&](double lambda) {
    double p = 0;
    for (Eigen::Index j = 0; j < N; ++j) {
      const double denom = eigs(j) + lambda;
      if (denom <= 0) {
        if (row_energy(j) > 0) return std::numeric_limits<double>::infinity();
        continue;
      }
      p += row_energy(j) / (denom * denom);
    }
    return p;
  };
  auto precoder_at = [&](double lambda) -> ComplexMatrix {
    ComplexMatrix scaled = coeffs;
    for (Eigen::Index j = 0; j < N; ++j) {
      const double denom = eigs(j) + lambda;
      if (denom <= eig_floor && lambda == 0.0) {
        scaled.row(j).setZero();  // pseudo-inverse convention on the null space
      } else {
        scaled.row(j) /= denom;
      }
    }
    return es.eigenvectors() * scaled;
  };

  PrecoderOracleResult result;
  // Null-space energy forces the limit to bind; otherwise check lambda = 0.
  bool null_energy = false;
  for (Eigen::Index j = 0; j < N; ++j) {
    if (eigs(j) <= eig_floor && row_energy(j) > eig_floor * eig_floor) {
      null_energy = true;
      break;
    }
  }
  if (!null_energy && power_at(0.0) <= power_limit) {
    result.precoder = precoder_at(0.0);
    result.lambda = 0;
    return result;
  }

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (power_at(hi) > power_limit) {
    hi *= 2.0;
    if (++doublings > 600) {
      throw std::runtime_error("precoder_oracle: failed to bracket the power multiplier");
    }
  }
  double power = 0;
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    power = power_at(mid);
    ++result.bisection_iterations;
    if (std::abs(power - power_limit) <= power_tol * power_limit) {
      result.lambda = mid;
      result.precoder = precoder_at(mid);
      result.power_residual = std::abs(power - power_limit) / power_limit;
      return result;
    }
    if (power > power_limit) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw std::runtime_error("precoder_oracle: bisection failed to reach power tolerance");
}

Eigen::VectorXd sinr_rates(const ComplexMatrix& channel, const ComplexMatrix& precoder,
                           double noise_power_watts) {
  if (!(noise_power_watts > 0)) {
    throw std::invalid_argument("sinr_rates: noise power must be positive");
  }
  const Eigen::Index K = channel.rows();
  const ComplexMatrix received = channel * precoder;  // (k,j) = h_k^T v_j
  Eigen::VectorXd rates(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double interference = 0;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j != k) interference += std::norm(received(k, j));
    }
    const double sinr = std::norm(received(k, k)) / (interference + noise_power_watts);
    rates(k) = std::log2(1.0 + sinr);
  }
  return rates;
}

Vector embed_complex(const ComplexMatrix& m) {
  Vector x(2 * m.size());
  const std::complex<double>* data = m.data();
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    x(2 * j) = data[j].real();
    x(2 * j + 1) = data[j].imag();
  }
  return x;
}

ComplexMatrix unembed_complex(const Vector& x, int rows, int cols) {
  if (x.size() != 2 * static_cast<Eigen::Index>(rows) * cols) {
    throw std::invalid_argument("unembed_complex: dimension mismatch");
  }
  ComplexMatrix m(rows, cols);
  std::complex<double>* data = m.data();
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    data[j] = {x(2 * j), x(2 * j + 1)};
  }
  return m;
}

MimoSimulation::MimoSimulation(const CellConfig& config, std::uint64_t seed,
                               int horizon)
    : config_(config), horizon_(horizon) {
  config_.validate();
  if (horizon < 1) throw std::invalid_argument("simulation: horizon must be positive");

  const int K = config_.users();
  const int N = config_.antennas;

  RngStream placement_rng = derive_stream(seed, "placement");
  placement_ = place_users(config_, placement_rng);

  RngStream shadow_rng = derive_stream(seed, "shadowing");
  betas_.reserve(K);
  for (int k = 0; k < K; ++k) {
    betas_.push_back(pathloss_shadowing(placement_.distance[k], shadow_rng,
                                        config_.shadowing_std_db));
  }

  RngStream channel_rng = derive_stream(seed, "channel");
  channels_.reserve(horizon);
  demands_.reserve(horizon);
  demand_norm_sq_.reserve(horizon);

  ComplexMatrix H(K, N);
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) H(k, n) = channel_rng.cnormal(betas_[k]);
  }
  for (int t = 0; t < horizon; ++t) {
    if (t > 0) {
      for (int k = 0; k < K; ++k) {
        H.row(k) = channel_step(H.row(k).transpose(), betas_[k],
                                config_.channel_correlation, channel_rng)
                       .transpose();
      }
    }
    channels_.push_back(H);
    max_channel_norm_ = std::max(max_channel_norm_, H.norm());
    VirtualizationDemand d = zf_demand(H, config_.providers,
                                       config_.users_per_provider,
                                       config_.p_max_watts());
    demand_norm_sq_.push_back(d.demand.squaredNorm());
    demands_.push_back(std::move(d.demand));
  }
  noise_power_ = config_.noise_power_watts();
}

ProblemInstance MimoSimulation::problem() const {
  ProblemInstance p;
  const int N = config_.antennas;
  const int K = config_.users();
  const double p_max = config_.p_max_watts();
  const double p_bar = config_.p_bar_watts();
  p.decision_dim = 2 * N * K;
  p.constraint_dim = 1;

  p.loss_value = [this, N, K](int t, const Vector& x) {
    return precoding_deviation(channel(t), unembed_complex(x, N, K), demand(t));
  };
  p.loss_gradient = [this, N, K](int t, const Vector& x) {
    const ComplexMatrix V = unembed_complex(x, N, K);
    return embed_complex(2.0 * deviation_gradient(channel(t), V, demand(t)));
  };
  p.constraint = [p_bar](const Vector& x) {
    Vector g(1);
    g(0) = x.squaredNorm() - p_bar;
    return g;
  };
  p.constraint_jacobian = [](const Vector& x) {
    Matrix j(1, x.size());
    j.row(0) = 2.0 * x.transpose();
    return j;
  };
  p.project_feasible = [p_max](const Vector& x) { return project_ball(x, p_max); };
  p.project_constrained = [p_bar](const Vector& x) { return project_ball(x, p_bar); };

  const AssumptionConstants c =
      mimo_constants(p_max, p_bar, config_.channel_norm_bound);
  p.grad_bound = c.grad_bound;
  p.smoothness = c.smoothness;
  p.strong_convexity = c.strong_convexity;
  p.constraint_lipschitz = c.constraint_lipschitz;
  p.constraint_bound = c.constraint_bound;
  p.interior_margin = c.interior_margin;
  p.set_radius = c.set_radius;
  p.constraint_curvature = 2.0;

  p.closed_form_descent_step = [this, N, K, p_max](const Vector& x,
                                                   const std::vector<int>& slots,
                                                   int duration, double alpha) {
    std::vector<const ComplexMatrix*> hs, ds;
    hs.reserve(slots.size());
    ds.reserve(slots.size());
    for (int t : slots) {
      hs.push_back(&channel(t));
      ds.push_back(&demand(t));
    }
    return embed_complex(pqga_mimo_inner_step(unembed_complex(x, N, K), hs, ds,
                                              duration, alpha, p_max));
  };
  p.closed_form_subproblem = [this, N, K, p_max](const SubproblemInput& in,
                                                 double alpha, double eta) {
    std::vector<const ComplexMatrix*> hs, ds;
    hs.reserve(in.feedback_slots.size());
    ds.reserve(in.feedback_slots.size());
    for (int t : in.feedback_slots) {
      hs.push_back(&channel(t));
      ds.push_back(&demand(t));
    }
    return embed_complex(pqga_mimo_decision(
        unembed_complex(in.x_descent, N, K), unembed_complex(in.x_prev, N, K), hs,
        ds, in.duration, in.next_duration, in.queue_weight(0), alpha, eta,
        in.gamma, p_max));
  };
  p.constrained_weighted_solver = [this, p_bar](const std::vector<int>& slots,
                                                const std::vector<double>& weights) {
    std::vector<const ComplexMatrix*> hs, ds;
    hs.reserve(slots.size());
    ds.reserve(slots.size());
    for (int t : slots) {
      hs.push_back(&channel(t));
      ds.push_back(&demand(t));
    }
    return embed_complex(
        weighted_precoder_oracle(hs, ds, weights, p_bar).precoder);
  };
  p.slot_sample = [this, N, K](int t, const Vector& x) {
    ProblemInstance::SlotSample s;
    const ComplexMatrix V = unembed_complex(x, N, K);
    const double dnsq = demand_norm_sq(t);
    if (dnsq <= 0) {
      s.demand_zero = true;
    } else {
      s.normalized_deviation = precoding_deviation(channel(t), V, demand(t)) / dnsq;
    }
    s.power = V.squaredNorm();
    s.rate_sum = sinr_rates(channel(t), V, noise_power()).sum();
    return s;
  };
  return p;
}

}  // namespace pqga::mimo
