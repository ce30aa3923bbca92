#pragma once

// Exact evaluators for the exponential-sum lemmas, plus bound-ratio
// reporting. The left side of every report is a directly computed sum;
// the right side is the lemma's bound with the implicit constant set to 1
// and x^eps instantiated as log^3 x. Ratios are descriptive output; only
// finiteness and oracle equality of the left side are ever asserted.

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "sfprime/alpha.hpp"
#include "sfprime/dioph.hpp"
#include "sfprime/errors.hpp"
#include "sfprime/parallel.hpp"
#include "sfprime/tables.hpp"

namespace sfprime {

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::map<std::string, double> params;
  std::string alpha_id;
};

struct ProgressionSum {
  std::complex<double> value;
  double magnitude = 0.0;
  uint64_t terms = 0;
  bool degenerate = false;   // ||alpha d|| vanished; value = terms * e(alpha n0)
  double classical_cap = 0;  // min(X/d + 1, 1/(2||alpha d||))
};

namespace detail {

// e(x) - 1 = 2i sin(pi x) e^{i pi x}, cancellation-free for small ||x||.
inline std::complex<double> e_minus_one(double centered_frac) {
  double s = std::sin(M_PI * centered_frac);
  double c = std::cos(M_PI * centered_frac);
  return std::complex<double>(0.0, 2.0 * s) * std::complex<double>(c, s);
}

inline std::complex<double> e_of_frac(Frac128 f) {
  double t = 2.0 * M_PI * f.to_double();
  return {std::cos(t), std::sin(t)};
}

}  // namespace detail

// sum_{n<=X, n=a (mod d)} e(alpha n), closed geometric form. The degenerate
// branch (||alpha d|| = 0 at working precision) returns the term count.
inline ProgressionSum progression_expsum(double X, uint64_t a, uint64_t d,
                                         const AlphaSpec& alpha) {
  if (X < 1.0) throw std::domain_error("progression_expsum: X must be >= 1");
  if (d < 1) throw std::domain_error("progression_expsum: d must be >= 1");
  a %= d;  // the sum depends on the residue class only

  ProgressionSum out;
  uint64_t n0 = (a == 0) ? d : a;
  if (static_cast<double>(n0) > X) {
    out.classical_cap = X / static_cast<double>(d) + 1.0;
    return out;  // empty sum
  }
  uint64_t T = static_cast<uint64_t>((X - static_cast<double>(n0)) /
                                     static_cast<double>(d)) +
               1;
  out.terms = T;

  bool exact_zero =
      alpha.is_rational_test() &&
      (static_cast<uint128_t>(alpha.rational_num() % alpha.rational_den()) *
       d) %
              alpha.rational_den() ==
          0;
  Frac128 psi = frac_alpha_linear_fixed(alpha, d);
  double psi_dist = psi.dist_to_nearest();
  std::complex<double> e_n0 =
      detail::e_of_frac(frac_alpha_linear_fixed(alpha, n0));

  if (exact_zero || psi_dist < 0x1p-60) {
    out.degenerate = true;
    out.value = static_cast<double>(T) * e_n0;
    out.magnitude = static_cast<double>(T);
    out.classical_cap = X / static_cast<double>(d) + 1.0;
    return out;
  }

  // (e(psi T) - 1) / (e(psi) - 1), with both fractions carried in fixed
  // point so the numerator's argument is reduced before any trig.
  Frac128 psiT = frac_alpha_linear_fixed(alpha, d * T);
  std::complex<double> num = detail::e_minus_one(psiT.centered());
  std::complex<double> den = detail::e_minus_one(psi.centered());
  out.value = e_n0 * num / den;
  out.magnitude = std::abs(out.value);
  out.classical_cap =
      std::min(X / static_cast<double>(d) + 1.0, 1.0 / (2.0 * psi_dist));
  return out;
}

// sum_{n<=X} min(XY/n, 1/||alpha n||) against the classical bound
// XY (1/q + 1/Y + q/(XY)) log(2 X q).
inline BoundReport lemma2_min_sum(double X, double Y, const AlphaSpec& alpha,
                                  uint64_t q) {
  if (X < 1.0 || Y < 1.0)
    throw std::domain_error("lemma2_min_sum: need X, Y >= 1");
  if (q < 1) throw std::domain_error("lemma2_min_sum: q must be >= 1");

  uint64_t n_max = static_cast<uint64_t>(X);
  NeumaierSum acc;
  for (uint64_t n = 1; n <= n_max; ++n) {
    double first = X * Y / static_cast<double>(n);
    double dist = dist_alpha_linear(alpha, n);
    double term = dist > 0.0 ? std::min(first, 1.0 / dist) : first;
    assert(term <= first * (1 + 1e-12));
    acc.add(term);
  }

  BoundReport rep;
  rep.lhs = static_cast<double>(acc.value());
  double qd = static_cast<double>(q);
  rep.rhs = X * Y * (1.0 / qd + 1.0 / Y + qd / (X * Y)) * std::log(2.0 * X * qd);
  rep.ratio = rep.lhs / rep.rhs;
  rep.alpha_id = alpha.id();
  rep.params = {{"X", X}, {"Y", Y}, {"q", qd}};
  return rep;
}

// Bilinear min sums of the two dyadic lemmas (power 2 and power 4):
//   lhs = sum_{m ~ M} tau_mu(m) sum_{j ~ J} tau_zeta(j)
//                         min{ x/(m^power j), 1/||alpha m^power j|| }.
inline BoundReport bilinear_min_sum(double x, uint64_t M, uint64_t J,
                                    const DivisorTable& tau_mu,
                                    const DivisorTable& tau_zeta, int power,
                                    const AlphaSpec& alpha, uint64_t q) {
  if (power != 2 && power != 4)
    throw std::domain_error("bilinear_min_sum: power must be 2 or 4");
  if (M < 1 || J < 1)
    throw std::domain_error("bilinear_min_sum: need M, J >= 1");
  if (tau_mu.limit < 2 * M || tau_zeta.limit < 2 * J)
    throw std::domain_error("bilinear_min_sum: divisor tables too small");
  if (q < 1) throw std::domain_error("bilinear_min_sum: q must be >= 1");

  NeumaierSum acc;
  for (uint64_t m = M + 1; m <= 2 * M; ++m) {
    uint64_t mp = m * m;
    if (power == 4) {
      if (mp > UINT64_MAX / mp)
        throw overflow_error("bilinear_min_sum: m^4 overflows");
      mp *= mp;
    }
    double tm = static_cast<double>(tau_mu.tau[m]);
    NeumaierSum inner;
    for (uint64_t j = J + 1; j <= 2 * J; ++j) {
      if (mp > UINT64_MAX / j)
        throw overflow_error("bilinear_min_sum: m^power * j overflows");
      uint64_t arg = mp * j;
      double first = x / static_cast<double>(arg);
      double dist = dist_alpha_linear(alpha, arg);
      double term = dist > 0.0 ? std::min(first, 1.0 / dist) : first;
      inner.add(static_cast<double>(tau_zeta.tau[j]) * term);
    }
    acc.add(tm * inner.value());
  }

  double Md = static_cast<double>(M), Jd = static_cast<double>(J);
  double qd = static_cast<double>(q);
  double logx = std::log(x);
  double eps = logx * logx * logx;  // x^eps surrogate
  double rhs;
  if (power == 2) {
    rhs = eps * (Md * Jd + x / std::pow(Md, 1.5) + x / (Md * std::sqrt(qd)) +
                 std::sqrt(x) * std::sqrt(qd) / Md);
  } else {
    rhs = eps * (Md * Jd + x / std::pow(Md, 25.0 / 8.0) +
                 x / (std::pow(Md, 3.0) * std::pow(qd, 0.125)) +
                 std::pow(x, 7.0 / 8.0) * std::pow(qd, 0.125) / std::pow(Md, 3.0));
  }

  BoundReport rep;
  rep.lhs = static_cast<double>(acc.value());
  rep.rhs = rhs;
  rep.ratio = rep.lhs / rep.rhs;
  rep.alpha_id = alpha.id();
  rep.params = {{"x", x},     {"M", Md},         {"J", Jd},
                {"power", static_cast<double>(power)},
                {"q", qd},    {"mu_order", static_cast<double>(tau_mu.order)},
                {"zeta_order", static_cast<double>(tau_zeta.order)}};
  return rep;
}

}  // namespace sfprime
