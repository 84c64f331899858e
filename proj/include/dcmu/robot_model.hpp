#pragma once

#include <cstdint>
#include <random>

#include "dcmu/vec2.hpp"

namespace dcmu {

/// Motion (Q) and sensing (R) noise covariances, m^2.
struct NoiseParams {
  Mat2 Q;
  Mat2 R;
};

enum class Role { leader, follower };

/// Per-robot simulation state: true, estimated and nominal positions plus
/// the estimation (P), feedback-dispersion (Lambda) and total (Sigma) covariances.
struct RobotState {
  Role role{Role::follower};
  Vec2 x_true;
  Vec2 x_hat;
  Vec2 x_nom;
  Mat2 P;
  Mat2 Lambda;
  Mat2 Sigma;
  double sigma_eig_max{0.0};
  Mat2 K_fb;
  Vec2 u_nom;
};

using Rng = std::mt19937_64;

/// Independent noise stream for one robot in one episode. Streams for
/// different robots do not depend on the team size.
Rng make_robot_stream(std::uint64_t episode_seed, std::uint64_t robot_index);

/// Draw from N(0, cov). Zero covariance draws nothing and returns (0,0).
Vec2 sample_gaussian(const Mat2& cov, Rng& rng);

struct Prediction {
  Vec2 x_bar;
  Mat2 P_bar;
};

/// KF prediction: x_bar = x_hat + dt*u, P_bar = P + Q.
Prediction kf_predict(const Vec2& x_hat, const Mat2& P, const Vec2& u_total, double dt,
                      const Mat2& Q);

struct Correction {
  Vec2 x_hat;
  Mat2 P;
  Mat2 G;
};

/// KF correction with gain G = P_bar (P_bar + R)^-1. Throws std::domain_error
/// when P_bar + R is singular.
Correction kf_correct(const Vec2& x_bar, const Mat2& P_bar, const Vec2& z, const Mat2& R);

/// Correction that also accepts a noiseless sensor (R == 0): the limit
/// R -> 0 gives G = I, x_hat = z, P = 0.
Correction kf_correct_or_exact(const Vec2& x_bar, const Mat2& P_bar, const Vec2& z,
                               const Mat2& R);

/// u = u_nom - K (x_hat - x_nom), each component clamped to [-v_max, v_max].
Vec2 total_control(const Vec2& u_nom, const Vec2& x_hat, const Vec2& x_nom, const Mat2& K_fb,
                   double v_max);

/// x' = x + dt*u + w, w ~ N(0, Q).
Vec2 step_true_state(const Vec2& x_true, const Vec2& u_total, double dt, const Mat2& Q,
                     Rng& rng);

/// z = x + v, v ~ N(0, R).
Vec2 sample_measurement(const Vec2& x_true, const Mat2& R, Rng& rng);

struct Dispersion {
  Mat2 Lambda;
  Mat2 Sigma;
  double sigma_eig_max{0.0};
};

/// Lambda' = (I - dt K) Lambda (I - dt K)^T + G P_bar, Sigma' = P' + Lambda'.
/// None of this depends on the nominal position.
Dispersion update_dispersion(const Mat2& Lambda, const Mat2& P_new, const Mat2& P_bar,
                             const Mat2& G, double dt, const Mat2& K_fb);

/// x_nom' = x_nom + dt * u_nom.
inline Vec2 advance_nominal(const Vec2& x_nom, const Vec2& u_nom, double dt) {
  return x_nom + dt * u_nom;
}

}  // namespace dcmu
