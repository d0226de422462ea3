#include "ndtsim/math.hpp"

#include <numbers>

#include "ndtsim/errors.hpp"

namespace ndtsim {

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

double angle_diff(double a, double b) { return wrap_angle(a - b); }

bool finite(const Vec3& v) { return v.allFinite(); }
bool finite(const Vec4& v) { return v.allFinite(); }

double gaussian(Rng& rng, double sigma) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng) * sigma;
}

Vec3 gaussian_vec3(Rng& rng, double sigma) {
  return Vec3(gaussian(rng, sigma), gaussian(rng, sigma), gaussian(rng, sigma));
}

SecondOrderZoh::SecondOrderZoh(double m, double d, double k, double dt) {
  if (!(m > 0.0) || !(d >= 0.0) || !(k > 0.0) || !(dt > 0.0)) {
    throw ConfigError("second-order system needs m > 0, d >= 0, k > 0, dt > 0");
  }
  inv_k_ = 1.0 / k;
  const double wn = std::sqrt(k / m);
  const double zeta = d / (2.0 * std::sqrt(k * m));
  const double s = -zeta * wn;
  const double es = std::exp(s * dt);
  if (std::abs(zeta - 1.0) < 1e-9) {
    // critically damped: double pole at s
    phi11_ = es * (1.0 - s * dt);
    phi12_ = es * dt;
    phi21_ = -es * wn * wn * dt;
    phi22_ = es * (1.0 + s * dt);
  } else if (zeta < 1.0) {
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    const double c = std::cos(wd * dt);
    const double sn = std::sin(wd * dt);
    phi11_ = es * (c + (zeta * wn / wd) * sn);
    phi12_ = es * sn / wd;
    phi21_ = -es * (wn * wn / wd) * sn;
    phi22_ = es * (c - (zeta * wn / wd) * sn);
  } else {
    const double wd = wn * std::sqrt(zeta * zeta - 1.0);
    const double c = std::cosh(wd * dt);
    const double sn = std::sinh(wd * dt);
    phi11_ = es * (c + (zeta * wn / wd) * sn);
    phi12_ = es * sn / wd;
    phi21_ = -es * (wn * wn / wd) * sn;
    phi22_ = es * (c - (zeta * wn / wd) * sn);
  }
}

void SecondOrderZoh::step(double& x, double& xd, double u) const {
  const double xs = u * inv_k_;
  const double dx = x - xs;
  const double nx = xs + phi11_ * dx + phi12_ * xd;
  const double nxd = phi21_ * dx + phi22_ * xd;
  x = nx;
  xd = nxd;
}

}  // namespace ndtsim
