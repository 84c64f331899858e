#include "dcmu/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcmu {

namespace {

Mat2 symmetrized(const Mat2& m) {
  const double off = 0.5 * (m.xy + m.yx);
  return {m.xx, off, off, m.yy};
}

}  // namespace

Rng make_robot_stream(std::uint64_t episode_seed, std::uint64_t robot_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(episode_seed),
                    static_cast<std::uint32_t>(episode_seed >> 32),
                    static_cast<std::uint32_t>(robot_index),
                    static_cast<std::uint32_t>(robot_index >> 32), 0x6e6f6973u};
  return Rng(seq);
}

Vec2 sample_gaussian(const Mat2& cov, Rng& rng) {
  if (cov.is_zero()) return {};
  // Cholesky factor of a PSD 2x2 matrix; tolerates a zero leading entry.
  const double l11 = std::sqrt(std::max(cov.xx, 0.0));
  const double l21 = l11 > 0.0 ? 0.5 * (cov.xy + cov.yx) / l11 : 0.0;
  const double l22 = std::sqrt(std::max(cov.yy - l21 * l21, 0.0));
  std::normal_distribution<double> n01(0.0, 1.0);
  const double e1 = n01(rng);
  const double e2 = n01(rng);
  return {l11 * e1, l21 * e1 + l22 * e2};
}

Prediction kf_predict(const Vec2& x_hat, const Mat2& P, const Vec2& u_total, double dt,
                      const Mat2& Q) {
  return {x_hat + dt * u_total, P + Q};
}

Correction kf_correct(const Vec2& x_bar, const Mat2& P_bar, const Vec2& z, const Mat2& R) {
  const Mat2 S = P_bar + R;
  Mat2 S_inv;
  try {
    S_inv = S.inverse(1e-300);
  } catch (const std::domain_error&) {
    throw std::domain_error("kf_correct: P_bar + R is singular");
  }
  const Mat2 G = P_bar * S_inv;
  Correction c;
  c.G = G;
  c.x_hat = x_bar + G * (z - x_bar);
  c.P = symmetrized(P_bar - G * P_bar);
  return c;
}

Correction kf_correct_or_exact(const Vec2& x_bar, const Mat2& P_bar, const Vec2& z,
                               const Mat2& R) {
  if (R.is_zero()) {
    return {z, Mat2{}, Mat2::identity()};
  }
  return kf_correct(x_bar, P_bar, z, R);
}

Vec2 total_control(const Vec2& u_nom, const Vec2& x_hat, const Vec2& x_nom, const Mat2& K_fb,
                   double v_max) {
  return clamp_components(u_nom - K_fb * (x_hat - x_nom), v_max);
}

Vec2 step_true_state(const Vec2& x_true, const Vec2& u_total, double dt, const Mat2& Q,
                     Rng& rng) {
  return x_true + dt * u_total + sample_gaussian(Q, rng);
}

Vec2 sample_measurement(const Vec2& x_true, const Mat2& R, Rng& rng) {
  return x_true + sample_gaussian(R, rng);
}

Dispersion update_dispersion(const Mat2& Lambda, const Mat2& P_new, const Mat2& P_bar,
                             const Mat2& G, double dt, const Mat2& K_fb) {
  const Mat2 F = Mat2::identity() - dt * K_fb;
  Dispersion d;
  d.Lambda = symmetrized(F * Lambda * F.transpose() + G * P_bar);
  d.Sigma = P_new + d.Lambda;
  d.sigma_eig_max = d.Sigma.max_sym_eigenvalue();
  return d;
}

}  // namespace dcmu
