#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "zeno/fock.hpp"

namespace zeno {

// Parameters of one N-stage run: target photon number n, per-stage mixing
// angle theta, cross-Kerr phase rate kappa.
struct StageParams {
  int n;
  int N;
  double kappa;
  double theta;

  StageParams(int n_, int N_, double kappa_, double theta_)
      : n(n_), N(N_), kappa(kappa_), theta(theta_) {
    if (n < 1) throw std::invalid_argument("StageParams: n must be >= 1");
    if (N < 1) throw std::invalid_argument("StageParams: N must be >= 1");
    if (!std::isfinite(kappa) || !std::isfinite(theta))
      throw std::invalid_argument("StageParams: non-finite parameter");
  }

  // Splits a quarter-turn pump across N stages, the configuration that
  // would move all population 0 -> n if the probe field were absent.
  static StageParams cascade(int n_, int N_, double kappa_) {
    return StageParams(n_, N_, kappa_, std::numbers::pi / (2.0 * N_));
  }

  double total_angle() const { return N * theta; }

  bool is_design_angle(double tol = 1e-12) const {
    return std::abs(total_angle() - std::numbers::pi / 2.0) <= tol;
  }

  // Conditional phase picked up by |n> against probe occupation m.
  double delta(int m) const { return kappa * n * m; }
};

// Pump Hamiltonian with an exactly closed {|0>, |n>} subspace:
//   H = (g / sqrt(n!)) * (M + M^dag),  M = a^n - (1/n) a^dag a^(n+1).
// The subtracted term cancels every matrix element out of the subspace,
// which is what makes the truncated two-level reduction exact rather
// than perturbative.
inline CMatrix kh_hamiltonian(int n, double g, const ModeSpace& space) {
  if (n < 1) throw std::invalid_argument("kh_hamiltonian: n must be >= 1");
  if (space.dim() < 2 * n + 2)
    throw std::invalid_argument(
        "kh_hamiltonian: cutoff must be at least 2n+2 = " +
        std::to_string(2 * n + 2) + ", got " + std::to_string(space.dim()));
  const LadderOps ops = ladder_ops(space);
  CMatrix an = CMatrix::Identity(space.dim(), space.dim());
  for (int k = 0; k < n; ++k) an = an * ops.annihilation;
  const CMatrix m =
      an - (1.0 / n) * ops.creation * an * ops.annihilation;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return (g / std::sqrt(fact)) * (m + m.adjoint());
}

// Action of exp(i H theta) restricted to the (|0>, |n>) subspace.
inline Eigen::Matrix2cd kh_block_rotation(double theta) {
  Eigen::Matrix2cd r;
  const Complex is(0.0, std::sin(theta));
  r << std::cos(theta), is, is, std::cos(theta);
  return r;
}

// Amplitudes after N stages, starting from |0>_a, with the probe frozen
// in number state |m>: v multiplies |0>_a, w multiplies |n>_a.
struct BlockAmplitudes {
  int m;
  Complex v;
  Complex w;
  double delta;
  double eta;
};

// Closed-form N-stage evaluation. Per stage the block picks up a rotation
// by theta followed by the conditional phase delta = kappa*n*m on |n>.
// Diagonalizing the per-stage 2x2 gives cos(eta) = cos(theta)cos(delta/2)
// and the N-fold product telescopes through sin(N eta)/sin(eta), which is
// evaluated by Chebyshev recurrence so nothing divides by sin(eta).
inline BlockAmplitudes vw_closed_form(const StageParams& p, int m) {
  if (m < 0) throw std::invalid_argument("vw_closed_form: m must be >= 0");
  const double delta = p.delta(m);
  const double half = 0.5 * delta;
  double c = std::cos(p.theta) * std::cos(half);
  c = std::clamp(c, -1.0, 1.0);
  const double eta = std::acos(c);

  // ratio = sin(N eta)/sin(eta) via U_{N-1}(c).
  double s_prev = 0.0, s = 1.0;
  for (int k = 1; k < p.N; ++k) {
    const double next = 2.0 * c * s - s_prev;
    s_prev = s;
    s = next;
  }
  const double ratio = s;
  const double cos_n = std::cos(p.N * eta);

  const Complex phase_v = std::exp(Complex(0.0, p.N * half));
  const Complex phase_w = std::exp(Complex(0.0, (p.N + 1) * half));
  BlockAmplitudes out;
  out.m = m;
  out.delta = delta;
  out.eta = eta;
  out.v = phase_v *
          (cos_n - Complex(0.0, std::cos(p.theta) * std::sin(half) * ratio));
  out.w = Complex(0.0, 1.0) * phase_w * std::sin(p.theta) * ratio;
  return out;
}

// Large-N behavior of the quarter-turn cascade for m >= 1:
//   v -> 1 - i pi^2 / (8 tan(delta/2) N),  w -> O(1/N).
// Undefined when delta is a multiple of 2 pi (no conditional phase
// survives and the pump turn completes unobstructed).
inline BlockAmplitudes vw_asymptotic(const StageParams& p, int m) {
  if (m < 1)
    throw std::invalid_argument("vw_asymptotic: only meaningful for m >= 1");
  if (!p.is_design_angle(1e-9))
    throw std::invalid_argument(
        "vw_asymptotic: requires the quarter-turn cascade N*theta = pi/2");
  const double delta = p.delta(m);
  const double two_pi = 2.0 * std::numbers::pi;
  const double r = std::abs(std::fmod(delta, two_pi));
  if (r < 1e-9 || two_pi - r < 1e-9)
    throw std::invalid_argument(
        "vw_asymptotic: delta is a multiple of 2 pi, no Zeno suppression");
  const double half = 0.5 * delta;
  const double pi = std::numbers::pi;
  BlockAmplitudes out;
  out.m = m;
  out.delta = delta;
  out.eta = std::acos(std::clamp(std::cos(half), -1.0, 1.0));
  out.v = 1.0 - Complex(0.0, pi * pi / (8.0 * std::tan(half) * p.N));
  out.w = Complex(0.0, 1.0) * std::exp(Complex(0.0, (p.N + 1) * half)) * pi *
          std::sin(p.N * half) / (2.0 * p.N * std::sin(half));
  return out;
}

// Full N-stage operator on the (|0>, |n>) block for probe occupation m.
// Columns: image of |0> is (v, w); the second column is fixed by the
// determinant of the per-stage factors, det = e^{i delta} each.
inline Eigen::Matrix2cd block_matrix(const StageParams& p, int m) {
  const BlockAmplitudes b = vw_closed_form(p, m);
  const Complex det = std::exp(Complex(0.0, p.N * b.delta));
  Eigen::Matrix2cd u;
  u << b.v, -std::conj(b.w) * det, b.w, std::conj(b.v) * det;
  return u;
}

// Survival probability of |0> under N rotate-then-measure rounds.
inline double projective_survival(int N, double theta) {
  if (N < 1) throw std::invalid_argument("projective_survival: N must be >= 1");
  return std::pow(std::cos(theta) * std::cos(theta), N);
}

// Period (in stage count) of the emission revivals for occupation m,
// 2 pi over the detuning folded into (0, pi].
inline double oscillation_period(const StageParams& p, int m) {
  const double two_pi = 2.0 * std::numbers::pi;
  double d0 = std::abs(std::fmod(p.delta(m), two_pi));
  if (d0 > std::numbers::pi) d0 = two_pi - d0;
  if (d0 < 1e-12)
    throw std::invalid_argument(
        "oscillation_period: zero detuning, emission is not oscillatory");
  return two_pi / d0;
}

}  // namespace zeno
