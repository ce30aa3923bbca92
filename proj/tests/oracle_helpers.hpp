#pragma once

// Independent oracles for the test suites. Everything here recomputes
// results by a route the library does not use: trial division instead of
// sieves, GMP big-rational reduction instead of 128-bit fixed point,
// grid convolution instead of the spline closed form.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline bool is_prime_trial(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Full factorization by trial division (exponent list).
inline std::vector<std::pair<uint64_t, unsigned>> factor_trial(uint64_t n) {
  std::vector<std::pair<uint64_t, unsigned>> f;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    f.push_back({d, e});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

inline int mobius_trial(uint64_t n) {
  if (n == 1) return 1;
  auto f = factor_trial(n);
  for (auto& [p, e] : f)
    if (e > 1) return 0;
  return f.size() % 2 == 0 ? 1 : -1;
}

inline bool squarefree_trial(uint64_t n) { return mobius_trial(n) != 0; }

// Number of ordered k-tuples with product n, by recursive divisor descent.
inline uint64_t tau_k_direct(unsigned k, uint64_t n) {
  if (k == 1) return 1;
  uint64_t total = 0;
  for (uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    total += tau_k_direct(k - 1, n / d);
    if (d != n / d) total += tau_k_direct(k - 1, d);
  }
  return total;
}

// High-precision alpha for reduction oracles: value carried as an mpq
// rational approximation with error below 2^-bits.
struct BigAlpha {
  mpq_class value;  // approximant
  int bits;         // |alpha - value| < 2^-bits

  static BigAlpha sqrt2(int bits = 320) {
    // floor(sqrt(2) * 2^bits) / 2^bits
    mpz_class two_shifted = mpz_class(2) << (2 * bits);
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), two_shifted.get_mpz_t());
    mpq_class v(root, mpz_class(1) << bits);
    v.canonicalize();
    return {v, bits};
  }

  static BigAlpha from_quotients(const std::vector<uint64_t>& q, int depth) {
    mpz_class p0 = 1, q0 = 0, p1 = static_cast<unsigned long>(q.at(0)), q1 = 1;
    for (int i = 1; i < depth && i < static_cast<int>(q.size()); ++i) {
      mpz_class a = static_cast<unsigned long>(q[i]);
      mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
    }
    mpq_class v(p1, q1);
    v.canonicalize();
    int bits = static_cast<int>(mpz_sizeinbase(q1.get_mpz_t(), 2)) * 2 - 2;
    return {v, bits};
  }

  // frac(value*n + beta) as double, exact rational arithmetic throughout.
  double frac_linear(uint64_t n, const mpq_class& beta = mpq_class(0)) const {
    mpq_class x = value * mpz_class(static_cast<unsigned long>(n)) + beta;
    mpz_class fl = x.get_num() / x.get_den();
    if (x < 0 && fl * x.get_den() != x.get_num()) fl -= 1;
    mpq_class f = x - mpq_class(fl);
    return f.get_d();
  }

  // ||value*n + beta||, exact comparison inside, rounded only on return.
  double dist_linear(uint64_t n, const mpq_class& beta = mpq_class(0)) const {
    mpq_class x = value * mpz_class(static_cast<unsigned long>(n)) + beta;
    mpz_class fl = x.get_num() / x.get_den();
    if (x < 0 && fl * x.get_den() != x.get_num()) fl -= 1;
    mpq_class f = x - mpq_class(fl);
    mpq_class d = f <= mpq_class(1, 2) ? f : mpq_class(1) - f;
    return d.get_d();
  }
};

inline std::mt19937_64 seeded_rng(uint64_t seed = 0x5f3759df) {
  return std::mt19937_64(seed);
}

}  // namespace oracle
