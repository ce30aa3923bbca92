#pragma once

// Argument reduction frac(alpha*n + beta) with a certified error budget,
// and the search for primes with ||alpha*p + beta|| < p^-theta.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sfprime/alpha.hpp"
#include "sfprime/errors.hpp"
#include "sfprime/fixed128.hpp"
#include "sfprime/parallel.hpp"
#include "sfprime/tables.hpp"

namespace sfprime {

namespace detail {

// floor(frac(r/den) * 2^128) for 0 <= r < den < 2^64, exact, by two-step
// long division.
inline Frac128 exact_div_frac(uint64_t r, uint64_t den) {
  uint128_t top = static_cast<uint128_t>(r) << 64;
  uint128_t q1 = top / den;
  uint128_t rem = top % den;
  uint128_t q0 = (rem << 64) / den;
  return Frac128{(q1 << 64) + q0};
}

}  // namespace detail

// frac(alpha*n + beta) as a fixed-point fraction. Error <= 2^-40 is
// guaranteed inside the spec's precision budget; beyond it the call throws.
// The rational test kind reduces exactly via modular arithmetic.
inline Frac128 frac_alpha_linear_fixed(const AlphaSpec& alpha, uint64_t n,
                                       Frac128 beta = Frac128{}) {
  if (alpha.is_rational_test()) {
    uint64_t den = alpha.rational_den();
    uint64_t r = static_cast<uint64_t>(
        (static_cast<uint128_t>(alpha.rational_num() % den) * n) % den);
    return detail::exact_div_frac(r, den).add(beta);
  }
  if (n > alpha.max_argument())
    throw precision_error("frac_alpha_linear: n=" + std::to_string(n) +
                          " exceeds the precision budget of " + alpha.id());
  return alpha.frac().mul_u64(n).add(beta);
}

inline double frac_alpha_linear(const AlphaSpec& alpha, uint64_t n,
                                double beta = 0.0) {
  return frac_alpha_linear_fixed(alpha, n, Frac128::from_double(beta))
      .to_double();
}

// ||alpha*n + beta||.
inline double dist_alpha_linear(const AlphaSpec& alpha, uint64_t n,
                                Frac128 beta = Frac128{}) {
  return frac_alpha_linear_fixed(alpha, n, beta).dist_to_nearest();
}

struct SpecialPrimeHit {
  uint64_t p = 0;
  double dist = 0.0;   // ||alpha*p + beta||
  double bound = 0.0;  // p^-theta
};

struct SpecialPrimeOptions {
  bool allow_theta_zero = false;  // test mode: bound becomes p^0 = 1
  int threads = 1;
};

// All primes p <= limit with ||alpha*p + beta|| < p^-theta, ascending.
// theta must lie in (0, 1/2); theta = 0 is admitted only in test mode.
inline std::vector<SpecialPrimeHit> find_special_primes(
    const AlphaSpec& alpha, double beta, double theta, uint64_t limit,
    const PrimeTable& primes, const SpecialPrimeOptions& opt = {}) {
  if (theta == 0.0) {
    if (!opt.allow_theta_zero)
      throw std::domain_error("find_special_primes: theta = 0 requires test mode");
  } else if (!(theta > 0.0 && theta < 0.5)) {
    throw std::domain_error("find_special_primes: theta must lie in (0, 1/2)");
  }
  if (limit > primes.limit)
    throw std::domain_error("find_special_primes: prime table too small");
  if (limit > alpha.max_argument() && !alpha.is_rational_test())
    throw precision_error("find_special_primes: limit exceeds precision budget");

  const Frac128 b = Frac128::from_double(beta);
  std::size_t count = 0;
  while (count < primes.primes.size() && primes.primes[count] <= limit) ++count;

  const std::size_t n_chunks = default_chunk_count(count);
  std::vector<std::vector<SpecialPrimeHit>> parts(n_chunks);
  run_chunks(n_chunks, opt.threads, [&](std::size_t c) {
    std::size_t lo = count * c / n_chunks;
    std::size_t hi = count * (c + 1) / n_chunks;
    auto& out = parts[c];
    for (std::size_t i = lo; i < hi; ++i) {
      uint64_t p = primes.primes[i];
      double dist = frac_alpha_linear_fixed(alpha, p, b).dist_to_nearest();
      double bound =
          theta == 0.0 ? 1.0
                       : std::exp(-theta * std::log(static_cast<double>(p)));
      if (dist < bound) out.push_back({p, dist, bound});
    }
  });

  std::vector<SpecialPrimeHit> hits;
  for (auto& part : parts)
    hits.insert(hits.end(), part.begin(), part.end());
  return hits;
}

}  // namespace sfprime
