#pragma once

#include <vector>

#include "pqga/problem.hpp"
#include "pqga/rng.hpp"

namespace pqga::synthetic {

/// Tracking losses f_t(x) = ||x - a_t||^2 over the ball X0 = {||x|| <= radius},
/// with targets a_t moving as a seeded bounded random walk. The long-term
/// constraint is either a smaller ball g(x) = ||x||^2 - inner_radius^2 or an
/// affine system g(x) = A x - b with b > 0 (so the origin is interior).
struct SyntheticConfig {
  int dim = 2;
  double feasible_radius = 2.0;  // X0 radius
  double target_radius = 1.0;    // targets stay inside this sphere
  double target_drift = 0.15;    // per-slot random-walk step
  enum class Constraint { kBall, kAffine } constraint = Constraint::kBall;
  double inner_radius = 1.5;  // ball constraint radius
  Matrix affine_A;            // affine case, C x n
  Vector affine_b;            // componentwise positive

  void validate() const;
};

/// Seeded target path shared by every policy of an experiment; the problem()
/// closure holds a pointer into this object.
class SyntheticSimulation {
 public:
  SyntheticSimulation(const SyntheticConfig& config, std::uint64_t seed,
                      int horizon);

  const SyntheticConfig& config() const { return config_; }
  int horizon() const { return static_cast<int>(targets_.size()); }
  const Vector& target(int t) const { return targets_.at(t); }

  ProblemInstance problem() const;

 private:
  SyntheticConfig config_;
  std::vector<Vector> targets_;
};

}  // namespace pqga::synthetic
