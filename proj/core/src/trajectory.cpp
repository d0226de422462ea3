#include "ndtsim/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "ndtsim/errors.hpp"
#include "ndtsim/math.hpp"

namespace ndtsim {

void TrajectoryLimits::validate() const {
  if (!(max_vel > 0.0) || !(max_acc > 0.0) || !(max_yaw_rate > 0.0) ||
      !(max_yaw_acc > 0.0)) {
    throw ConfigError("trajectory limits must be > 0");
  }
}

namespace {

constexpr double kMinSegmentDuration = 0.1;  // s
constexpr double kLimitSlack = 1.01;
constexpr int kScaleIterations = 5;

double falling_factorial(int k, int n) {
  double f = 1.0;
  for (int i = 0; i < n; ++i) f *= static_cast<double>(k - i);
  return f;
}

// Endpoint-derivative map for a degree-(ncoef-1) polynomial in normalized
// time u = t/T: rows are derivative orders 0..order-1 at t=0 followed by the
// same at t=T, in real-time units.
Eigen::MatrixXd endpoint_map(int ncoef, int order, double T) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * order, ncoef);
  double tpow = 1.0;
  for (int n = 0; n < order; ++n) {
    A(n, n) = falling_factorial(n, n) / tpow;
    for (int k = n; k < ncoef; ++k) {
      A(order + n, k) = falling_factorial(k, n) / tpow;
    }
    tpow *= T;
  }
  return A;
}

// Gram matrix of the squared cost derivative over one segment, in the
// normalized-coefficient basis.
Eigen::MatrixXd cost_gram(int ncoef, int cost_deriv, double T) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(ncoef, ncoef);
  const double tscale = std::pow(T, 2 * cost_deriv - 1);
  for (int i = cost_deriv; i < ncoef; ++i) {
    for (int j = cost_deriv; j < ncoef; ++j) {
      Q(i, j) = falling_factorial(i, cost_deriv) *
                falling_factorial(j, cost_deriv) /
                (static_cast<double>(i + j - 2 * cost_deriv + 1) * tscale);
    }
  }
  return Q;
}

// Solves the minimum-cost interpolation over shared waypoint derivatives.
// channels: one column per scalar channel (x, y, z or yaw). fixed_mask/values
// are (waypoints x order); continuity through order-1 derivatives at interior
// waypoints holds by construction because adjacent segments share them.
// Returns per-segment normalized coefficients, one column per channel.
std::vector<Eigen::MatrixXd> solve_channels(
    const std::vector<double>& durations, int ncoef, int order, int cost_deriv,
    const Eigen::MatrixXd& fixed_values,
    const std::vector<std::vector<bool>>& fixed_mask) {
  const int S = static_cast<int>(durations.size());
  const int W = S + 1;
  const int G = W * order;
  const int channels = static_cast<int>(fixed_values.cols()) / W;

  std::vector<Eigen::MatrixXd> Ainv(static_cast<size_t>(S));
  Eigen::MatrixXd Hg = Eigen::MatrixXd::Zero(G, G);
  for (int s = 0; s < S; ++s) {
    const Eigen::MatrixXd A = endpoint_map(ncoef, order, durations[static_cast<size_t>(s)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
      throw SolverSingular("endpoint map is singular (degenerate duration?)");
    }
    Ainv[static_cast<size_t>(s)] = lu.inverse();
    const Eigen::MatrixXd H =
        Ainv[static_cast<size_t>(s)].transpose() *
        cost_gram(ncoef, cost_deriv, durations[static_cast<size_t>(s)]) *
        Ainv[static_cast<size_t>(s)];
    Hg.block(s * order, s * order, 2 * order, 2 * order) += H;
  }

  std::vector<int> fixed_idx, free_idx;
  for (int w = 0; w < W; ++w) {
    for (int n = 0; n < order; ++n) {
      (fixed_mask[static_cast<size_t>(w)][static_cast<size_t>(n)] ? fixed_idx
                                                                  : free_idx)
          .push_back(w * order + n);
    }
  }

  // Global derivative vector per channel.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(G, channels);
  for (int c = 0; c < channels; ++c) {
    for (int w = 0; w < W; ++w) {
      for (int n = 0; n < order; ++n) {
        d(w * order + n, c) = fixed_values(n, c * W + w);
      }
    }
  }

  if (!free_idx.empty()) {
    const int nf = static_cast<int>(free_idx.size());
    const int np = static_cast<int>(fixed_idx.size());
    Eigen::MatrixXd Hff(nf, nf), Hfp(nf, np);
    Eigen::MatrixXd dp(np, channels);
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < nf; ++j) Hff(i, j) = Hg(free_idx[static_cast<size_t>(i)], free_idx[static_cast<size_t>(j)]);
      for (int j = 0; j < np; ++j) Hfp(i, j) = Hg(free_idx[static_cast<size_t>(i)], fixed_idx[static_cast<size_t>(j)]);
    }
    for (int j = 0; j < np; ++j) {
      dp.row(j) = d.row(fixed_idx[static_cast<size_t>(j)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Hff);
    if (!lu.isInvertible()) {
      throw SolverSingular("free-derivative system is singular");
    }
    const Eigen::MatrixXd df = lu.solve(-Hfp * dp);
    for (int i = 0; i < nf; ++i) {
      d.row(free_idx[static_cast<size_t>(i)]) = df.row(i);
    }
  }

  std::vector<Eigen::MatrixXd> coefs(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    Eigen::MatrixXd ds(2 * order, channels);
    ds.topRows(order) = d.block(s * order, 0, order, channels);
    ds.bottomRows(order) = d.block((s + 1) * order, 0, order, channels);
    coefs[static_cast<size_t>(s)] = Ainv[static_cast<size_t>(s)] * ds;
  }
  return coefs;
}

double poly_eval_derivative(std::span<const double> coef, double u, double T,
                            int order) {
  double acc = 0.0;
  const int n = static_cast<int>(coef.size());
  for (int k = n - 1; k >= order; --k) {
    acc = acc * u + coef[static_cast<size_t>(k)] * falling_factorial(k, order);
  }
  return acc / std::pow(T, order);
}

double profile_duration(double length, double vmax, double amax) {
  if (length <= 0.0) return 0.0;
  if (length <= vmax * vmax / amax) {
    return 2.0 * std::sqrt(length / amax);  // triangular
  }
  return length / vmax + vmax / amax;  // trapezoidal
}

struct LimitScan {
  double vel = 0.0, acc = 0.0, yaw_rate = 0.0, yaw_acc = 0.0;
};

LimitScan scan_extrema(const Trajectory& traj) {
  LimitScan m;
  const double T = traj.total_duration();
  const double dt = 0.01;
  for (double t = 0.0;; t += dt) {
    const double tc = std::min(t, T);
    m.vel = std::max(m.vel, traj.position_derivative(tc, 1).norm());
    m.acc = std::max(m.acc, traj.position_derivative(tc, 2).norm());
    m.yaw_rate = std::max(m.yaw_rate, std::abs(traj.yaw_derivative(tc, 1)));
    m.yaw_acc = std::max(m.yaw_acc, std::abs(traj.yaw_derivative(tc, 2)));
    if (t >= T) break;
  }
  return m;
}

}  // namespace

Trajectory::Trajectory(std::span<const Waypoint> wps,
                       const std::vector<double>& durations) {
  const int W = static_cast<int>(wps.size());
  const int S = W - 1;
  if (W < 2 || durations.size() != static_cast<size_t>(S)) {
    throw ConfigError("trajectory needs N waypoints and N-1 durations");
  }
  for (double d : durations) {
    if (!(d > 0.0)) throw ConfigError("segment durations must be > 0");
  }

  // Position channels: derivative slots 0..4 per waypoint. Positions are
  // always fixed; boundary velocity/acceleration come from the waypoints
  // (rest default) and boundary jerk/snap are zero; interior derivatives are
  // free and take the cost-minimizing values.
  const int pos_order = 5;
  std::vector<std::vector<bool>> mask(static_cast<size_t>(W),
                                      std::vector<bool>(pos_order, false));
  for (int w = 0; w < W; ++w) mask[static_cast<size_t>(w)][0] = true;
  for (int n = 1; n < pos_order; ++n) {
    mask[0][static_cast<size_t>(n)] = true;
    mask[static_cast<size_t>(W - 1)][static_cast<size_t>(n)] = true;
  }
  Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(pos_order, 3 * W);
  for (int c = 0; c < 3; ++c) {
    for (int w = 0; w < W; ++w) {
      const Waypoint& wp = wps[static_cast<size_t>(w)];
      vals(0, c * W + w) = wp.p[c];
      if (w == 0 || w == W - 1) {
        vals(1, c * W + w) = wp.v ? (*wp.v)[c] : 0.0;
        vals(2, c * W + w) = wp.a ? (*wp.a)[c] : 0.0;
      }
    }
  }
  const auto pos_coefs = solve_channels(durations, 10, pos_order, 4, vals, mask);

  // Yaw channel: slots 0..2, degree 5, minimum jerk, shortest-angle unwrap.
  const int yaw_order = 3;
  std::vector<std::vector<bool>> ymask(static_cast<size_t>(W),
                                       std::vector<bool>(yaw_order, false));
  for (int w = 0; w < W; ++w) ymask[static_cast<size_t>(w)][0] = true;
  for (int n = 1; n < yaw_order; ++n) {
    ymask[0][static_cast<size_t>(n)] = true;
    ymask[static_cast<size_t>(W - 1)][static_cast<size_t>(n)] = true;
  }
  Eigen::MatrixXd yvals = Eigen::MatrixXd::Zero(yaw_order, W);
  double yaw_prev = wps[0].yaw;
  yvals(0, 0) = yaw_prev;
  for (int w = 1; w < W; ++w) {
    yaw_prev += angle_diff(wps[static_cast<size_t>(w)].yaw, yaw_prev);
    yvals(0, w) = yaw_prev;
  }
  const auto yaw_coefs = solve_channels(durations, 6, yaw_order, 3, yvals, ymask);

  knots_.resize(static_cast<size_t>(S) + 1);
  knots_[0] = 0.0;
  segments_.resize(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    auto& seg = segments_[static_cast<size_t>(s)];
    seg.duration = durations[static_cast<size_t>(s)];
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 10; ++k) {
        seg.pos[static_cast<size_t>(c)][static_cast<size_t>(k)] =
            pos_coefs[static_cast<size_t>(s)](k, c);
      }
    }
    for (int k = 0; k < 6; ++k) {
      seg.yaw[static_cast<size_t>(k)] = yaw_coefs[static_cast<size_t>(s)](k, 0);
    }
    knots_[static_cast<size_t>(s) + 1] = knots_[static_cast<size_t>(s)] + seg.duration;
  }
  total_duration_ = knots_.back();
  end_p_ = wps.back().p;
  end_yaw_ = yvals(0, W - 1);
}

std::vector<double> allocate_times(std::span<const Waypoint> waypoints,
                                   const TrajectoryLimits& limits) {
  if (waypoints.size() < 2) {
    throw ConfigError("time allocation needs at least 2 waypoints");
  }
  limits.validate();
  std::vector<double> T;
  T.reserve(waypoints.size() - 1);
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double len = (waypoints[i + 1].p - waypoints[i].p).norm();
    const double dyaw = std::abs(angle_diff(waypoints[i + 1].yaw, waypoints[i].yaw));
    const double t_lin = profile_duration(len, limits.max_vel, limits.max_acc);
    const double t_yaw = profile_duration(dyaw, limits.max_yaw_rate, limits.max_yaw_acc);
    T.push_back(std::max({t_lin, t_yaw, kMinSegmentDuration}));
  }
  return T;
}

Trajectory plan(std::span<const Waypoint> waypoints,
                const TrajectoryLimits& limits) {
  if (waypoints.size() < 2) throw ConfigError("plan needs at least 2 waypoints");
  for (const Waypoint& w : waypoints) {
    if (!finite(w.p) || !std::isfinite(w.yaw)) {
      throw NonFiniteInput("non-finite waypoint");
    }
  }
  std::vector<double> durations = allocate_times(waypoints, limits);

  for (int iter = 0; iter < kScaleIterations; ++iter) {
    Trajectory traj(waypoints, durations);
    const LimitScan m = scan_extrema(traj);
    const double factor = std::max(
        {m.vel / limits.max_vel, std::sqrt(m.acc / limits.max_acc),
         m.yaw_rate / limits.max_yaw_rate,
         std::sqrt(m.yaw_acc / limits.max_yaw_acc)});
    if (factor <= kLimitSlack) return traj;
    for (double& d : durations) d *= factor;
  }
  throw LimitUnreachable("limits not met after 5 duration scalings");
}

ReferenceSetpoint Trajectory::sample(double t) const {
  ReferenceSetpoint s;
  s.t = t;
  if (t > total_duration_) {
    // terminal state held, zero derivatives
    s.p = end_p_;
    s.yaw = end_yaw_;
    return s;
  }
  const double tc = std::clamp(t, 0.0, total_duration_);
  s.p = position_derivative(tc, 0);
  s.v = position_derivative(tc, 1);
  s.a = position_derivative(tc, 2);
  s.yaw = yaw_derivative(tc, 0);
  s.yaw_rate = yaw_derivative(tc, 1);
  return s;
}

namespace {

std::pair<size_t, double> locate(const std::vector<double>& knots, double t) {
  const double tc = std::clamp(t, knots.front(), knots.back());
  const auto it = std::upper_bound(knots.begin(), knots.end() - 1, tc);
  const size_t seg = static_cast<size_t>(std::max<std::ptrdiff_t>(
      0, std::distance(knots.begin(), it) - 1));
  return {seg, tc - knots[seg]};
}

}  // namespace

Vec3 Trajectory::position_derivative(double t, int order) const {
  const auto [si, local] = locate(knots_, t);
  const Segment& seg = segments_[si];
  const double u = seg.duration > 0.0 ? local / seg.duration : 0.0;
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    out[c] = poly_eval_derivative(seg.pos[static_cast<size_t>(c)], u,
                                  seg.duration, order);
  }
  return out;
}

double Trajectory::yaw_derivative(double t, int order) const {
  const auto [si, local] = locate(knots_, t);
  const Segment& seg = segments_[si];
  const double u = seg.duration > 0.0 ? local / seg.duration : 0.0;
  return poly_eval_derivative(seg.yaw, u, seg.duration, order);
}

}  // namespace ndtsim
