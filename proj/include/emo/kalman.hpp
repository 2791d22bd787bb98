#pragma once

// Constant-velocity Kalman filter over (cx, cy, aspect, height) and their
// per-frame velocities. Noise scales with box height so near and far objects
// get comparable relative uncertainty.

#include <Eigen/Dense>

#include "emo/core.hpp"

namespace emo {

struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Zero();
};

struct KalmanConfig {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
};

namespace kalman_detail {

inline Eigen::Matrix<double, 8, 8> motion_matrix() {
  Eigen::Matrix<double, 8, 8> f = Eigen::Matrix<double, 8, 8>::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;  // dt = one frame
  return f;
}

inline Eigen::Matrix<double, 4, 8> observation_matrix() {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

inline Eigen::Matrix<double, 4, 1> box_to_measurement(const BoundingBox& box) {
  Eigen::Matrix<double, 4, 1> z;
  z << box.center_x(), box.center_y(), box.width / box.height, box.height;
  return z;
}

inline void symmetrize(Eigen::Matrix<double, 8, 8>& p) { p = ((p + p.transpose()) / 2.0).eval(); }

}  // namespace kalman_detail

inline KalmanState kalman_init(const BoundingBox& box, const KalmanConfig& cfg = {}) {
  if (box.area() <= 0 || !box.valid()) throw DegenerateBox();
  KalmanState s;
  s.mean.head<4>() = kalman_detail::box_to_measurement(box);
  const double h = box.height;
  Eigen::Matrix<double, 8, 1> std;
  std << 2 * cfg.std_weight_position * h, 2 * cfg.std_weight_position * h, 1e-2,
      2 * cfg.std_weight_position * h, 10 * cfg.std_weight_velocity * h,
      10 * cfg.std_weight_velocity * h, 1e-5, 10 * cfg.std_weight_velocity * h;
  s.covariance = std.cwiseProduct(std).asDiagonal();
  return s;
}

inline KalmanState kalman_predict(const KalmanState& state, const KalmanConfig& cfg = {}) {
  const auto f = kalman_detail::motion_matrix();
  const double h = state.mean(3);
  Eigen::Matrix<double, 8, 1> std;
  std << cfg.std_weight_position * h, cfg.std_weight_position * h, 1e-2,
      cfg.std_weight_position * h, cfg.std_weight_velocity * h, cfg.std_weight_velocity * h, 1e-5,
      cfg.std_weight_velocity * h;
  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose();
  out.covariance += Eigen::Matrix<double, 8, 8>(std.cwiseProduct(std).asDiagonal());
  kalman_detail::symmetrize(out.covariance);
  return out;
}

inline KalmanState kalman_update(const KalmanState& state, const BoundingBox& observation,
                                 const KalmanConfig& cfg = {}) {
  if (observation.area() <= 0 || !observation.valid()) throw DegenerateBox();
  const auto hm = kalman_detail::observation_matrix();
  const double h = state.mean(3);
  Eigen::Matrix<double, 4, 1> std;
  std << cfg.std_weight_position * h, cfg.std_weight_position * h, 1e-1,
      cfg.std_weight_position * h;
  const Eigen::Matrix4d r = std.cwiseProduct(std).asDiagonal();

  const Eigen::Matrix4d s_innov = hm * state.covariance * hm.transpose() + r;
  const Eigen::Matrix<double, 8, 4> gain =
      state.covariance * hm.transpose() * s_innov.ldlt().solve(Eigen::Matrix4d::Identity());
  const Eigen::Matrix<double, 4, 1> innovation =
      kalman_detail::box_to_measurement(observation) - hm * state.mean;

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance = state.covariance - gain * s_innov * gain.transpose();
  kalman_detail::symmetrize(out.covariance);
  return out;
}

inline BoundingBox state_to_box(const KalmanState& state) {
  const double cx = state.mean(0), cy = state.mean(1), a = state.mean(2), h = state.mean(3);
  const double w = a * h;
  return BoundingBox{cx - w / 2.0, cy - h / 2.0, w, h};
}

}  // namespace emo
