#pragma once

// AlphaSpec: a high-precision irrational alpha, canonicalized to a 128-bit
// fixed-point fraction plus a certified partial-quotient prefix. Built-in
// presets (sqrt2, phi, e, pi) ship 200 partial quotients, which pins alpha
// far below 2^-128; user input arrives as a continued fraction or a decimal
// string. A rational kind exists for tests that need exact degenerate
// behaviour (||alpha*q*k|| = 0); it is not a production alpha.

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfprime/errors.hpp"
#include "sfprime/fixed128.hpp"

namespace sfprime {

enum class AlphaKind { continued_fraction, decimal_string, rational_test };

struct Convergent {
  uint64_t a = 0;  // numerator
  uint64_t q = 1;  // denominator, gcd(a, q) = 1
};

namespace detail {

inline Frac128 mpz_low128(const mpz_class& z) {
  mpz_class low;
  mpz_tdiv_r_2exp(low.get_mpz_t(), z.get_mpz_t(), 128);
  mpz_class hi = low >> 64;
  mpz_class lo = low - (hi << 64);
  uint128_t v = (static_cast<uint128_t>(hi.get_ui()) << 64) | lo.get_ui();
  return Frac128{v};
}

// floor(frac(p/q) * 2^128) for q > 0.
inline Frac128 rational_frac128(const mpz_class& p, const mpz_class& q) {
  mpz_class r = p % q;
  if (r < 0) r += q;
  mpz_class scaled = (r << 128) / q;
  return mpz_low128(scaled);
}

// Continued-fraction expansion of a non-negative rational, at most
// max_terms terms; stops early if a partial quotient exceeds uint64.
inline std::vector<uint64_t> rational_cf(mpz_class num, mpz_class den,
                                         std::size_t max_terms) {
  std::vector<uint64_t> out;
  while (den != 0 && out.size() < max_terms) {
    mpz_class q = num / den;
    if (!q.fits_ulong_p()) break;
    out.push_back(q.get_ui());
    mpz_class r = num - q * den;
    num = den;
    den = r;
  }
  return out;
}

}  // namespace detail

class AlphaSpec {
 public:
  // --- constructors -------------------------------------------------------

  // Certified partial quotients [a0; a1, a2, ...]. a0 >= 0, a_i >= 1.
  static AlphaSpec from_quotients(std::vector<uint64_t> quotients,
                                  std::string id = "") {
    if (quotients.empty())
      throw std::domain_error("alpha: empty partial quotient list");
    for (std::size_t i = 1; i < quotients.size(); ++i)
      if (quotients[i] == 0)
        throw std::domain_error("alpha: partial quotients a_i must be >= 1");
    AlphaSpec a;
    a.kind_ = AlphaKind::continued_fraction;
    a.quotients_ = std::move(quotients);
    a.id_ = id.empty() ? quotients_id(a.quotients_) : std::move(id);
    a.canonicalize_from_quotients();
    return a;
  }

  // Decimal digits, truncated representation: alpha lies in
  // [M/10^L, (M+1)/10^L]. Rejects exact rationals whose reduced denominator
  // stays below 10^min_denominator_digits (the input must carry enough
  // digits to stand in for an irrational).
  static AlphaSpec from_decimal(const std::string& text,
                                unsigned min_denominator_digits = 21) {
    AlphaSpec a;
    a.kind_ = AlphaKind::decimal_string;
    a.id_ = "dec:" + text;
    a.canonicalize_from_decimal(text, min_denominator_digits);
    return a;
  }

  // Exact rational alpha = num/den, for tests of degenerate branches only.
  static AlphaSpec rational_for_tests(uint64_t num, uint64_t den) {
    if (den == 0) throw std::domain_error("alpha: zero denominator");
    uint64_t g = std::gcd(num, den);
    AlphaSpec a;
    a.kind_ = AlphaKind::rational_test;
    a.rat_num_ = num / g;
    a.rat_den_ = den / g;
    a.id_ = "rat:" + std::to_string(a.rat_num_) + "/" + std::to_string(a.rat_den_);
    mpz_class p(static_cast<unsigned long>(a.rat_num_));
    mpz_class q(static_cast<unsigned long>(a.rat_den_));
    a.frac_ = detail::rational_frac128(p, q);
    a.certified_bits_ = 127;
    return a;
  }

  // --- presets (200 partial quotients each) -------------------------------

  static AlphaSpec sqrt2() {
    std::vector<uint64_t> q(200, 2);
    q[0] = 1;
    return from_quotients(std::move(q), "sqrt2");
  }

  static AlphaSpec golden_ratio() {
    std::vector<uint64_t> q(200, 1);
    return from_quotients(std::move(q), "phi");
  }

  static AlphaSpec euler_e() {
    // [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]: a_i = 2(i+1)/3 at i = 2 mod 3.
    std::vector<uint64_t> q(200, 1);
    q[0] = 2;
    for (std::size_t i = 2; i < q.size(); i += 3) q[i] = 2 * (i + 1) / 3;
    return from_quotients(std::move(q), "e");
  }

  static AlphaSpec pi() {
    return from_quotients(
        std::vector<uint64_t>(std::begin(pi_quotients), std::end(pi_quotients)),
        "pi");
  }

  // CLI forms: sqrt2 | phi | e | pi | cf:[a0;a1,a2,...] | dec:<digits>
  static AlphaSpec parse(const std::string& s) {
    if (s == "sqrt2") return sqrt2();
    if (s == "phi") return golden_ratio();
    if (s == "e") return euler_e();
    if (s == "pi") return pi();
    if (s.rfind("cf:", 0) == 0) return parse_cf_form(s);
    if (s.rfind("dec:", 0) == 0) return from_decimal(s.substr(4));
    throw std::domain_error("alpha: unknown spec '" + s + "'");
  }

  // --- accessors -----------------------------------------------------------

  AlphaKind kind() const { return kind_; }
  const std::string& id() const { return id_; }
  const std::vector<uint64_t>& partial_quotients() const { return quotients_; }
  Frac128 frac() const { return frac_; }

  // |alpha - alpha_hat| < 2^-certified_bits, alpha_hat the stored fraction.
  int certified_bits() const { return certified_bits_; }

  // Largest n for which frac(alpha*n + beta) carries error <= 2^-40.
  uint64_t max_argument() const {
    int spare = certified_bits_ - 41;
    if (spare >= 64) return UINT64_MAX;
    if (spare < 0) return 0;
    return uint64_t{1} << spare;
  }

  bool is_rational_test() const { return kind_ == AlphaKind::rational_test; }
  uint64_t rational_num() const { return rat_num_; }
  uint64_t rational_den() const { return rat_den_; }

 private:
  AlphaSpec() = default;

  static std::string quotients_id(const std::vector<uint64_t>& q) {
    std::string s = "cf:[" + std::to_string(q[0]);
    for (std::size_t i = 1; i < q.size(); ++i)
      s += (i == 1 ? ";" : ",") + std::to_string(q[i]);
    return s + "]";
  }

  static AlphaSpec parse_cf_form(const std::string& s) {
    // cf:[a0;a1,a2,...]
    auto lb = s.find('['), rb = s.rfind(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb)
      throw std::domain_error("alpha: malformed cf form '" + s + "'");
    std::string body = s.substr(lb + 1, rb - lb - 1);
    std::vector<uint64_t> q;
    std::string cur;
    for (char c : body + ";") {
      if (c == ';' || c == ',') {
        if (cur.empty()) throw std::domain_error("alpha: empty cf term");
        q.push_back(std::stoull(cur));
        cur.clear();
      } else if (c >= '0' && c <= '9') {
        cur += c;
      } else {
        throw std::domain_error("alpha: bad character in cf form");
      }
    }
    return from_quotients(std::move(q));
  }

  void canonicalize_from_quotients() {
    // Convergents p/q in exact integers until q is far past 2^128.
    mpz_class p0 = 1, q0 = 0, p1(static_cast<unsigned long>(quotients_[0])), q1 = 1;
    std::size_t used = 1;
    for (; used < quotients_.size(); ++used) {
      if (mpz_sizeinbase(q1.get_mpz_t(), 2) > 140) break;
      mpz_class a(static_cast<unsigned long>(quotients_[used]));
      mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
    }
    frac_ = detail::rational_frac128(p1, q1);
    // |alpha - p1/q1| < 1/(q1*(q1+q0)): the next quotient is at least 1.
    mpz_class gap = q1 * (q1 + q0);
    int bits = static_cast<int>(mpz_sizeinbase(gap.get_mpz_t(), 2)) - 1;
    certified_bits_ = std::min(127, bits - 1);
    if (certified_bits_ < 1)
      throw precision_error("alpha: partial quotients certify no precision");
  }

  void canonicalize_from_decimal(const std::string& text,
                                 unsigned min_denominator_digits) {
    std::string int_part, frac_part;
    bool seen_dot = false;
    for (char c : text) {
      if (c == '.') {
        if (seen_dot) throw std::domain_error("alpha: two dots in decimal");
        seen_dot = true;
      } else if (c >= '0' && c <= '9') {
        (seen_dot ? frac_part : int_part) += c;
      } else {
        throw std::domain_error("alpha: bad character in decimal");
      }
    }
    if (int_part.empty()) int_part = "0";
    if (int_part.size() > 18)
      throw std::domain_error("alpha: integer part too large");
    std::size_t L = frac_part.size();

    mpz_class ten_l;
    mpz_ui_pow_ui(ten_l.get_mpz_t(), 10, L);
    mpz_class M(int_part + frac_part, 10);  // value = M / 10^L

    // Reject exact rationals with small reduced denominator.
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), M.get_mpz_t(), ten_l.get_mpz_t());
    mpz_class den_reduced = ten_l / g;
    mpz_class floor_den;
    mpz_ui_pow_ui(floor_den.get_mpz_t(), 10, min_denominator_digits);
    if (den_reduced < floor_den)
      throw std::domain_error(
          "alpha: decimal parses as a rational with denominator below the "
          "configured floor (need more digits)");

    frac_ = detail::rational_frac128(M, ten_l);
    // alpha in [M/10^L, (M+1)/10^L]: interval width 10^-L.
    int bits = static_cast<int>(mpz_sizeinbase(ten_l.get_mpz_t(), 2)) - 1;
    certified_bits_ = std::min(127, bits - 1);

    // Certified partial quotients: common prefix of the CF expansions of the
    // two interval endpoints, minus one guard term for the tail ambiguity
    // of rational expansions.
    auto lo = detail::rational_cf(M, ten_l, 400);
    auto hi = detail::rational_cf(M + 1, ten_l, 400);
    std::size_t n = 0;
    while (n < lo.size() && n < hi.size() && lo[n] == hi[n]) ++n;
    if (n > 0) --n;
    quotients_.assign(lo.begin(), lo.begin() + n);
    if (quotients_.empty())
      throw precision_error("alpha: decimal certifies no partial quotients");
  }

  static constexpr uint64_t pi_quotients[200] = {
      3,  7,  15, 1,  292, 1,  1,  1,  2,  1,  3,  1,  14, 2,  1,  1,  2,
      2,  2,  2,  1,  84,  2,  1,  1,  15, 3,  13, 1,  4,  2,  6,  6,  99,
      1,  2,  2,  6,  3,   5,  1,  1,  6,  8,  1,  7,  1,  2,  3,  7,  1,
      2,  1,  1,  12, 1,   1,  1,  3,  1,  1,  8,  1,  1,  2,  1,  6,  1,
      1,  5,  2,  2,  3,   1,  2,  4,  4,  16, 1,  161, 45, 1,  22, 1,  2,
      2,  1,  4,  1,  2,   24, 1,  2,  1,  3,  1,  2,  1,  1,  10, 2,  5,
      4,  1,  2,  2,  8,   1,  5,  2,  2,  26, 1,  4,  1,  1,  8,  2,  42,
      2,  1,  7,  3,  3,   1,  1,  7,  2,  4,  9,  7,  2,  3,  1,  57, 1,
      18, 1,  9,  19, 1,   2,  18, 1,  3,  7,  30, 1,  1,  1,  3,  3,  3,
      1,  2,  8,  1,  1,   2,  1,  15, 1,  2,  13, 1,  2,  1,  4,  1,  12,
      1,  1,  3,  3,  28,  1,  10, 3,  2,  20, 1,  1,  1,  1,  4,  1,  1,
      1,  5,  3,  2,  1,   6,  1,  4,  1,  120, 2, 1,  1};

  AlphaKind kind_ = AlphaKind::continued_fraction;
  std::string id_;
  std::vector<uint64_t> quotients_;
  Frac128 frac_{};
  int certified_bits_ = 0;
  uint64_t rat_num_ = 0, rat_den_ = 1;
};

// All continued-fraction convergents a/q with q <= q_max, ascending in q.
// Throws precision_error if the quotient list cannot certify completeness
// (no convergent with q > q_max was reached), and domain_error for the
// rational test kind.
inline std::vector<Convergent> convergents(const AlphaSpec& alpha,
                                           uint64_t q_max) {
  if (q_max < 1) throw std::domain_error("convergents: q_max must be >= 1");
  if (alpha.is_rational_test())
    throw std::domain_error("convergents: alpha is rational");
  const auto& quot = alpha.partial_quotients();

  std::vector<Convergent> out;
  uint128_t p0 = 1, q0 = 0;
  uint128_t p1 = quot[0], q1 = 1;
  if (q1 <= q_max) out.push_back({static_cast<uint64_t>(p1), 1});
  for (std::size_t i = 1; i < quot.size(); ++i) {
    uint128_t a = quot[i];
    uint128_t p2 = a * p1 + p0;
    uint128_t q2 = a * q1 + q0;
    if (q2 > q_max) return out;  // complete: next denominator exceeds q_max
    if (p2 > UINT64_MAX)
      throw overflow_error("convergents: numerator exceeds 64 bits");
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    out.push_back({static_cast<uint64_t>(p1), static_cast<uint64_t>(q1)});
  }
  throw precision_error(
      "convergents: partial quotients exhausted before q_max (alpha "
      "precision insufficient)");
}

}  // namespace sfprime
