#pragma once

#include <cmath>
#include <random>

#include "ndtsim/types.hpp"

namespace ndtsim {

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

/// Shortest signed angular difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

bool finite(const Vec3& v);
bool finite(const Vec4& v);

using Rng = std::mt19937_64;

/// One zero-mean Gaussian draw scaled by sigma. A standard-normal variate is
/// drawn even when sigma is zero so the engine stream advances identically
/// for noisy and noise-free configurations of the same seed.
double gaussian(Rng& rng, double sigma);
Vec3 gaussian_vec3(Rng& rng, double sigma);

/// Exact zero-order-hold discretization of the scalar system
///   m x'' + d x' + k x = u,  u constant over a step of length dt.
/// Handles under-, over-, and critically damped parameter sets.
class SecondOrderZoh {
 public:
  SecondOrderZoh() = default;
  SecondOrderZoh(double m, double d, double k, double dt);

  /// Propagates (x, xd) one step under constant input u.
  void step(double& x, double& xd, double u) const;

 private:
  double phi11_ = 1.0, phi12_ = 0.0, phi21_ = 0.0, phi22_ = 1.0;
  double inv_k_ = 0.0;
};

}  // namespace ndtsim
