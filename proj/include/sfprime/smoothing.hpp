#pragma once

// A concrete periodic cutoff chi supported in (-delta, delta) mod 1:
// the indicator of [-delta/2, delta/2] convolved with r unit-mass boxes of
// width delta/(2r), r = ceil(log N). Pointwise values come from the exact
// degree-r spline (an Irwin-Hall CDF difference, evaluated in extended
// precision with the symmetric form to keep the alternating sum tame), and
// Fourier coefficients from the closed product of sinc factors:
//
//   c_hat(k) = delta * sinc(k*delta) * sinc(k*delta/(2r))^r,
//   sinc(x)  = sin(pi x)/(pi x),   c_hat(0) = delta exactly.
//
// Support half-width is delta/2 + r*(delta/(4r)) = 3*delta/4 < delta, the
// total box mass is delta/2 <= the inner width, so chi(0) = 1, and the tail
// beyond K = delta^-1 log^2 N decays like (2/(pi log N))^r.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sfprime/errors.hpp"

namespace sfprime {

// The parameter regime: delta = N^-theta and K = ceil(delta^-1 log^2 N).
struct RunConfig {
  uint64_t N = 0;
  double theta = 0.0;
  double delta = 0.0;
  uint64_t K = 0;

  static RunConfig make(uint64_t N, double theta) {
    if (N < 3) throw std::domain_error("RunConfig: N must be >= 3");
    if (!(theta > 0.0 && theta < 0.5))
      throw std::domain_error("RunConfig: theta must lie in (0, 1/2)");
    RunConfig c;
    c.N = N;
    c.theta = theta;
    double logn = std::log(static_cast<double>(N));
    c.delta = std::exp(-theta * logn);
    c.K = static_cast<uint64_t>(std::ceil(logn * logn / c.delta));
    return c;
  }

  // The theorem concerns theta < 1/10; larger theta still yields a valid
  // cutoff and decomposition, just outside the proven regime.
  bool in_theorem_range() const { return theta < 0.1; }
};

class SmoothingFunction {
 public:
  SmoothingFunction(double delta, unsigned r, uint64_t K)
      : delta_(delta), r_(r), K_(K) {
    if (!(delta > 0.0 && delta < 0.5))
      throw std::domain_error("chi: delta must lie in (0, 1/2)");
    if (r < 1) throw std::domain_error("chi: mollification order must be >= 1");
    binom_.assign(r + 1, 1.0L);
    for (unsigned j = 1; j <= r; ++j)
      binom_[j] = binom_[j - 1] * (r - j + 1) / j;
    log_rfact_ = 0.0L;
    for (unsigned j = 2; j <= r; ++j) log_rfact_ += std::log(static_cast<long double>(j));
    rfact_ = std::exp(log_rfact_);
  }

  double delta() const { return delta_; }
  unsigned order() const { return r_; }
  uint64_t coefficient_horizon() const { return K_; }
  double inner_halfwidth() const { return delta_ / 2; }
  double box_width() const { return delta_ / (2.0 * r_); }
  double support_halfwidth() const { return 0.75 * delta_; }
  double integral() const { return delta_; }  // = c_hat(0)

  // chi(t), t reduced mod 1. Exact spline value.
  double eval(double t) const {
    double tc = t - std::floor(t);
    if (tc >= 0.5) tc -= 1.0;  // center into [-1/2, 1/2)
    long double a = 0.5L * delta_;
    long double w = box_width();
    long double hi = irwin_hall_cdf((tc + a) / w + 0.5L * r_);
    long double lo = irwin_hall_cdf((tc - a) / w + 0.5L * r_);
    long double v = hi - lo;
    if (v < 0.0L) v = 0.0L;
    if (v > 1.0L) v = 1.0L;
    return static_cast<double>(v);
  }

  // c_hat(k): the k-th Fourier coefficient of chi. Real and even in k.
  double coeff(int64_t k) const {
    if (k == 0) return delta_;
    long double kk = std::abs(static_cast<long double>(k));
    long double s1 = sincl(kk * delta_);
    long double s2 = sincl(kk * delta_ / (2.0L * r_));
    return static_cast<double>(delta_ * s1 * std::pow(s2, static_cast<long double>(r_)));
  }

  // c(k) = c_hat(k)/delta, the paper's normalization with c(0) = delta
  // rescaled so that |c(k)| <= 1.
  double coeff_normalized(int64_t k) const {
    if (k == 0) return delta_;  // c(0) = delta
    return coeff(k) / delta_;
  }

  // Truncated Fourier series delta + sum_{0<|k|<=K} c_hat(k) e(kt).
  double partial_sum(double t, uint64_t K) const {
    long double acc = delta_;
    for (uint64_t k = 1; k <= K; ++k)
      acc += 2.0L * static_cast<long double>(coeff(static_cast<int64_t>(k))) *
             std::cos(2.0L * pi_l * k * static_cast<long double>(t));
    return static_cast<double>(acc);
  }

  // Upper bound on sum_{|k|>K} |c(k)| (normalized coefficients): direct
  // summation until the analytic envelope certifies the remainder, which is
  // then added. The result over-estimates, never under-estimates.
  double tail_abs_normalized(uint64_t K) const {
    long double acc = 0.0L;
    uint64_t k = K + 1;
    for (;;) {
      for (int step = 0; step < 256; ++step, ++k)
        acc += std::abs(static_cast<long double>(coeff_normalized(
            static_cast<int64_t>(k))));
      long double rem = envelope_remainder(k);
      if (rem <= acc * 1e-6L + 1e-320L) {
        acc += rem;
        break;
      }
      if (k > K + (1u << 22))
        throw std::runtime_error("chi tail: envelope failed to converge");
    }
    return static_cast<double>(2.0L * acc);
  }

 private:
  static constexpr long double pi_l = 3.14159265358979323846264338327950288L;

  static long double sincl(long double x) {
    if (x == 0.0L) return 1.0L;
    long double px = pi_l * x;
    return std::sin(px) / px;
  }

  // CDF of a sum of r independent U[0,1]. Symmetric form keeps the
  // alternating sum's largest term near (e/2)^r instead of e^r.
  long double irwin_hall_cdf(long double y) const {
    if (y <= 0.0L) return 0.0L;
    if (y >= static_cast<long double>(r_)) return 1.0L;
    if (y > 0.5L * r_) return 1.0L - irwin_hall_cdf(static_cast<long double>(r_) - y);
    long double acc = 0.0L;
    long double sign = 1.0L;
    unsigned jmax = static_cast<unsigned>(std::floor(y));
    for (unsigned j = 0; j <= jmax; ++j) {
      acc += sign * binom_[j] * std::pow(y - j, static_cast<long double>(r_));
      sign = -sign;
    }
    return acc / rfact_;
  }

  // Bound on sum_{k >= k0} |c(k)| from |sinc(k delta)| <= 1/(pi k delta) and
  // |sinc(k delta/(2r))|^r <= (2r/(pi k delta))^r: comparing the sum with
  // the integral of k^-(r+1) gives
  //   sum_{k>=k0} <= (2r/(pi delta k0))^r / (pi delta) * (1/r + 1/k0).
  long double envelope_remainder(uint64_t k0) const {
    long double pd = pi_l * delta_;
    long double base = 2.0L * r_ / (pd * static_cast<long double>(k0));
    if (base >= 1.0L)  // envelope not yet decaying: keep summing terms
      return std::numeric_limits<long double>::infinity();
    long double powr = std::pow(base, static_cast<long double>(r_));
    return powr / pd *
           (1.0L / r_ + 1.0L / static_cast<long double>(k0));
  }

  double delta_;
  unsigned r_;
  uint64_t K_;
  std::vector<long double> binom_;
  long double rfact_;
  long double log_rfact_;
};

// Builds the cutoff for a parameter regime: r = ceil(log N).
inline SmoothingFunction build_chi(const RunConfig& config) {
  if (config.delta >= 0.5)
    throw std::domain_error("build_chi: delta >= 1/2 breaks the period-1 support");
  unsigned r = static_cast<unsigned>(
      std::ceil(std::log(static_cast<double>(config.N))));
  if (r < 1) r = 1;
  return SmoothingFunction(config.delta, r, config.K);
}

// c_hat(k) for k = 0..k_max. The horizon must cover K so exports always
// contain the coefficients the decomposition uses.
inline std::vector<double> fourier_coeffs(const SmoothingFunction& chi,
                                          uint64_t k_max) {
  if (k_max < chi.coefficient_horizon())
    throw std::domain_error("fourier_coeffs: k_max must be >= K");
  std::vector<double> out(k_max + 1);
  for (uint64_t k = 0; k <= k_max; ++k)
    out[k] = chi.coeff(static_cast<int64_t>(k));
  return out;
}

}  // namespace sfprime
