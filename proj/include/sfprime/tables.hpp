#pragma once

// Sieved tables of the arithmetic functions the rest of the workbench
// consumes: primality, Mobius mu, von Mangoldt Lambda, and the k-fold
// divisor function tau_k. All sieves run segmented so the scratch per
// segment stays cache-sized regardless of the table limit; results are
// identical for any segment size (tested).

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sfprime {

inline uint64_t isqrt_u64(uint64_t n) {
  if (n == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

struct PrimeTable {
  uint64_t limit = 0;
  std::vector<uint64_t> bits;     // primality bitset over [0, limit]
  std::vector<uint64_t> primes;   // ascending primes <= limit

  bool is_prime(uint64_t n) const {
    return n <= limit && (bits[n >> 6] >> (n & 63)) & 1;
  }
};

struct MobiusTable {
  uint64_t limit = 0;
  std::vector<int8_t> mu;         // mu[0] = 0 by convention; mu[1..limit]

  int mobius(uint64_t n) const { return mu[n]; }
};

struct MangoldtTable {
  uint64_t limit = 0;
  std::vector<double> lam;        // natural-log units; lam[0] = 0

  double operator()(uint64_t n) const { return lam[n]; }
};

struct DivisorTable {
  uint32_t order = 1;             // the k of tau_k
  uint64_t limit = 0;
  std::vector<uint64_t> tau;      // tau[0] = 0

  uint64_t operator()(uint64_t n) const { return tau[n]; }
};

namespace detail {

inline void set_bit(std::vector<uint64_t>& bits, uint64_t n) {
  bits[n >> 6] |= uint64_t{1} << (n & 63);
}

// Odd base primes up to lim by a plain small sieve (used to seed segments).
inline std::vector<uint64_t> base_primes(uint64_t lim) {
  std::vector<uint8_t> mark(lim + 1, 1);
  std::vector<uint64_t> out;
  for (uint64_t i = 2; i <= lim; ++i) {
    if (!mark[i]) continue;
    out.push_back(i);
    for (uint64_t j = i * i; j <= lim; j += i) mark[j] = 0;
  }
  return out;
}

}  // namespace detail

// Segmented sieve of Eratosthenes. `segment_bits` picks the segment span
// 2^segment_bits; the default keeps the per-segment flag array around the
// L2 cache. The output is independent of the segment size.
inline PrimeTable sieve_primes(uint64_t limit, unsigned segment_bits = 21) {
  if (limit < 2) throw std::domain_error("sieve_primes: limit must be >= 2");
  PrimeTable t;
  t.limit = limit;
  t.bits.assign((limit >> 6) + 1, 0);

  const uint64_t root = isqrt_u64(limit);
  const auto base = detail::base_primes(root < 2 ? 2 : root);
  const uint64_t span = uint64_t{1} << segment_bits;
  std::vector<uint8_t> seg;

  for (uint64_t lo = 2; lo <= limit; lo += span) {
    const uint64_t hi = std::min(limit, lo + span - 1);
    seg.assign(hi - lo + 1, 1);
    for (uint64_t p : base) {
      if (p * p > hi) break;
      uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
      for (uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
    }
    for (uint64_t n = lo; n <= hi; ++n) {
      if (seg[n - lo]) {
        detail::set_bit(t.bits, n);
        t.primes.push_back(n);
      }
    }
  }
  return t;
}

// Segmented Mobius sieve: divide out each base prime once per multiple,
// zero out multiples of p^2, and flip the sign once more when a cofactor
// larger than sqrt(limit) remains.
inline MobiusTable sieve_mobius(uint64_t limit, unsigned segment_bits = 18) {
  if (limit < 1) throw std::domain_error("sieve_mobius: limit must be >= 1");
  MobiusTable t;
  t.limit = limit;
  t.mu.assign(limit + 1, 0);
  t.mu[1] = 1;

  const uint64_t root = isqrt_u64(limit);
  const auto base = detail::base_primes(root < 2 ? 2 : root);
  const uint64_t span = uint64_t{1} << segment_bits;
  std::vector<uint64_t> rem;
  std::vector<int8_t> val;

  for (uint64_t lo = 2; lo <= limit; lo += span) {
    const uint64_t hi = std::min(limit, lo + span - 1);
    const uint64_t len = hi - lo + 1;
    rem.resize(len);
    val.assign(len, 1);
    for (uint64_t n = lo; n <= hi; ++n) rem[n - lo] = n;
    for (uint64_t p : base) {
      if (p > hi) break;
      for (uint64_t j = ((lo + p - 1) / p) * p; j <= hi; j += p) {
        uint64_t i = j - lo;
        if (val[i] == 0) continue;
        rem[i] /= p;
        if (rem[i] % p == 0)
          val[i] = 0;           // p^2 | n
        else
          val[i] = -val[i];
      }
    }
    for (uint64_t n = lo; n <= hi; ++n) {
      uint64_t i = n - lo;
      if (val[i] != 0 && rem[i] > 1) val[i] = -val[i];
      t.mu[n] = val[i];
    }
  }
  return t;
}

// Lambda(n) = log p iff n = p^k. Primes give log p directly; higher prime
// powers only need primes up to sqrt(limit).
inline MangoldtTable sieve_mangoldt(uint64_t limit) {
  if (limit < 1) throw std::domain_error("sieve_mangoldt: limit must be >= 1");
  MangoldtTable t;
  t.limit = limit;
  t.lam.assign(limit + 1, 0.0);
  if (limit < 2) return t;

  PrimeTable primes = sieve_primes(limit);
  for (uint64_t p : primes.primes) {
    double lp = std::log(static_cast<double>(p));
    t.lam[p] = lp;
    if (p <= isqrt_u64(limit)) {
      for (uint64_t q = p * p; q <= limit; q *= p) {
        t.lam[q] = lp;
        if (q > limit / p) break;
      }
    }
  }
  return t;
}

// tau_k by iterated Dirichlet convolution with the constant-1 function:
// tau_1 = 1, tau_k = tau_{k-1} * 1.
inline DivisorTable sieve_tau(uint32_t order, uint64_t limit) {
  if (order < 1) throw std::domain_error("sieve_tau: order must be >= 1");
  if (limit < 1) throw std::domain_error("sieve_tau: limit must be >= 1");
  DivisorTable t;
  t.order = order;
  t.limit = limit;
  t.tau.assign(limit + 1, 1);
  t.tau[0] = 0;
  for (uint32_t k = 2; k <= order; ++k) {
    std::vector<uint64_t> next(limit + 1, 0);
    for (uint64_t d = 1; d <= limit; ++d) {
      uint64_t td = t.tau[d];
      for (uint64_t m = d; m <= limit; m += d) next[m] += td;
    }
    t.tau.swap(next);
  }
  return t;
}

// mu^2(n) via the classical identity mu^2(n) = sum_{d^2 | n} mu(d).
// n = 0 returns 0 by convention. The Mobius table must cover sqrt(n).
inline int squarefree_indicator(uint64_t n, const MobiusTable& mob) {
  if (n == 0) return 0;
  uint64_t root = isqrt_u64(n);
  if (root > mob.limit)
    throw std::domain_error("squarefree_indicator: Mobius table too small");
  int64_t acc = 0;
  for (uint64_t d = 1; d <= root; ++d) {
    if (mob.mu[d] == 0) continue;
    if (n % (d * d) == 0) acc += mob.mu[d];
  }
  return static_cast<int>(acc);
}

}  // namespace sfprime
