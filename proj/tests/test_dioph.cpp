#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "sfprime/alpha.hpp"
#include "sfprime/dioph.hpp"
#include "sfprime/tables.hpp"

using namespace sfprime;

TEST_CASE("dist_nearest_int basics and symmetries") {
  REQUIRE(dist_nearest_int(2.3) == Catch::Approx(0.3).margin(1e-15));
  REQUIRE(dist_nearest_int(-0.5) == 0.5);
  REQUIRE(dist_nearest_int(7.0) == 0.0);

  auto rng = oracle::seeded_rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    double x = u(rng);
    int k = int(rng() % 7) - 3;
    REQUIRE(dist_nearest_int(x + k) == Catch::Approx(dist_nearest_int(x)).margin(1e-12));
    REQUIRE(dist_nearest_int(-x) == Catch::Approx(dist_nearest_int(x)).margin(1e-15));
    REQUIRE(dist_nearest_int(x) >= 0.0);
    REQUIRE(dist_nearest_int(x) <= 0.5);
  }
}

TEST_CASE("Frac128 round trips and wraps") {
  Frac128 f = Frac128::from_double(0.625);
  REQUIRE(f.to_double() == 0.625);
  REQUIRE(f.mul_u64(2).to_double() == 0.25);  // 1.25 mod 1
  REQUIRE(Frac128::from_double(-0.25).to_double() == 0.75);
  REQUIRE(Frac128::from_double(3.0).to_double() == 0.0);
  REQUIRE(Frac128::from_double(0.5).dist_to_nearest() == 0.5);
  REQUIRE(Frac128::from_double(0.875).dist_to_nearest() == Catch::Approx(0.125));
  REQUIRE(Frac128::from_double(0.875).centered() == Catch::Approx(-0.125));
}

TEST_CASE("sqrt2 preset matches the integer-sqrt fixed point") {
  // floor(frac(sqrt 2) * 2^128) computed via mpz_sqrt, an independent route.
  mpz_class shifted = mpz_class(2) << 256;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), shifted.get_mpz_t());
  mpz_class frac_bits;
  mpz_tdiv_r_2exp(frac_bits.get_mpz_t(), root.get_mpz_t(), 128);

  auto alpha = AlphaSpec::sqrt2();
  mpz_class got_hi(static_cast<unsigned long>(
      static_cast<uint64_t>(alpha.frac().v >> 64)));
  mpz_class got = (got_hi << 64) +
                  mpz_class(static_cast<unsigned long>(
                      static_cast<uint64_t>(alpha.frac().v)));
  // CF convergent truncation can differ from the sqrt route by <= 1 ulp
  REQUIRE(abs(got - frac_bits) <= 1);
  REQUIRE(alpha.certified_bits() >= 120);
  REQUIRE(alpha.max_argument() == UINT64_MAX);
}

TEST_CASE("convergents: golden ratio and sqrt2 frozen values") {
  auto phi = AlphaSpec::golden_ratio();
  auto cs = convergents(phi, 5);
  std::vector<std::pair<uint64_t, uint64_t>> expect = {
      {1, 1}, {2, 1}, {3, 2}, {5, 3}, {8, 5}};
  REQUIRE(cs.size() == expect.size());
  for (size_t i = 0; i < cs.size(); ++i) {
    REQUIRE(cs[i].a == expect[i].first);
    REQUIRE(cs[i].q == expect[i].second);
  }

  auto s2 = AlphaSpec::sqrt2();
  auto cs2 = convergents(s2, 12);
  std::vector<std::pair<uint64_t, uint64_t>> expect2 = {
      {1, 1}, {3, 2}, {7, 5}, {17, 12}};
  REQUIRE(cs2.size() == expect2.size());
  for (size_t i = 0; i < cs2.size(); ++i) {
    REQUIRE(cs2[i].a == expect2[i].first);
    REQUIRE(cs2[i].q == expect2[i].second);
  }
}

TEST_CASE("convergents satisfy the approximation and determinant laws") {
  for (auto alpha : {AlphaSpec::sqrt2(), AlphaSpec::euler_e(), AlphaSpec::pi(),
                     AlphaSpec::golden_ratio()}) {
    auto big = oracle::BigAlpha::from_quotients(alpha.partial_quotients(), 80);
    auto cs = convergents(alpha, 1'000'000);
    REQUIRE(cs.size() >= 5);
    for (const auto& c : cs) {
      REQUIRE(std::gcd(c.a, c.q) == 1);
      // |alpha - a/q| * q^2 < 1, exact rational comparison
      mpq_class diff = big.value - mpq_class(c.a, c.q);
      mpq_class scaled = abs(diff) * mpz_class(static_cast<unsigned long>(c.q)) *
                         mpz_class(static_cast<unsigned long>(c.q));
      REQUIRE(scaled < 1);
    }
    for (size_t i = 0; i + 1 < cs.size(); ++i) {
      __int128 det = static_cast<__int128>(cs[i + 1].a) * cs[i].q -
                     static_cast<__int128>(cs[i].a) * cs[i + 1].q;
      REQUIRE((det == 1 || det == -1));
    }
  }
}

TEST_CASE("convergents error paths") {
  // Too few quotients to certify completeness at q_max
  auto weak = AlphaSpec::from_quotients({1, 2, 2});
  REQUIRE_THROWS_AS(convergents(weak, 1'000'000), precision_error);
  // Rational test alpha has no convergent machinery
  auto rat = AlphaSpec::rational_for_tests(1, 2);
  REQUIRE_THROWS_AS(convergents(rat, 10), std::domain_error);
}

TEST_CASE("frac_alpha_linear frozen and oracle values") {
  auto s2 = AlphaSpec::sqrt2();
  REQUIRE(frac_alpha_linear(s2, 0, 0.0) == 0.0);
  // frac(sqrt2 * 10) = 0.14213562373095048...
  REQUIRE(frac_alpha_linear(s2, 10, 0.0) ==
          Catch::Approx(0.1421356237309504880).epsilon(1e-14));
  // frac(sqrt2 * 10^6 + 0.25) = 0.81237309504880168...
  auto big = oracle::BigAlpha::sqrt2();
  double got = frac_alpha_linear(s2, 1'000'000, 0.25);
  double want = big.frac_linear(1'000'000, mpq_class(1, 4));
  REQUIRE(got == Catch::Approx(0.8123730950488016887).epsilon(1e-12));
  REQUIRE(std::abs(got - want) < 1e-10);

  SECTION("oracle agreement across scales and alphas") {
    for (auto alpha : {AlphaSpec::sqrt2(), AlphaSpec::pi(), AlphaSpec::euler_e()}) {
      auto oracle_alpha =
          oracle::BigAlpha::from_quotients(alpha.partial_quotients(), 120);
      auto rng = oracle::seeded_rng(23);
      for (int i = 0; i < 200; ++i) {
        uint64_t n = rng() % 100'000'000;
        double a = frac_alpha_linear(alpha, n, 0.0);
        double b = oracle_alpha.frac_linear(n);
        double d = std::abs(a - b);
        d = std::min(d, 1.0 - d);  // mod-1 distance
        REQUIRE(d < 1e-10);
      }
    }
  }
}

TEST_CASE("frac_alpha_linear additivity mod 1") {
  auto alpha = AlphaSpec::pi();
  auto rng = oracle::seeded_rng(31);
  for (int i = 0; i < 300; ++i) {
    uint64_t m = rng() % 1'000'000'000, n = rng() % 1'000'000'000;
    double fm = frac_alpha_linear(alpha, m);
    double fn = frac_alpha_linear(alpha, n);
    double fmn = frac_alpha_linear(alpha, m + n);
    double d = std::abs(fm + fn - fmn);
    d = std::min({d, std::abs(d - 1.0), std::abs(d - 2.0)});
    REQUIRE(d < 0x1p-39);
  }
}

TEST_CASE("precision budget is enforced, never silently truncated") {
  // Five quotients certify ~10 bits: not even n = 1 meets the 2^-40 contract.
  auto tiny = AlphaSpec::from_quotients({1, 2, 2, 2, 2});
  REQUIRE(tiny.max_argument() == 0);
  REQUIRE_THROWS_AS(frac_alpha_linear(tiny, 1, 0.0), precision_error);

  // Thirty quotients leave a real but bounded budget.
  std::vector<uint64_t> q30(30, 2);
  q30[0] = 1;
  auto weak = AlphaSpec::from_quotients(q30);
  REQUIRE(weak.max_argument() > 0);
  REQUIRE(weak.max_argument() < UINT64_MAX);
  REQUIRE_NOTHROW(frac_alpha_linear(weak, 1, 0.0));
  REQUIRE_THROWS_AS(frac_alpha_linear(weak, UINT64_MAX / 2, 0.0),
                    precision_error);
}

TEST_CASE("decimal alpha parsing") {
  // 40 digits of sqrt(2)-1
  auto dec = AlphaSpec::from_decimal("0.4142135623730950488016887242096980785696");
  auto s2 = AlphaSpec::sqrt2();
  // same fractional part far below double resolution
  REQUIRE(dec.frac().to_double() ==
          Catch::Approx(s2.frac().to_double()).epsilon(1e-14));
  // certified partial quotients are a prefix of the true expansion: [0;2,2,2,...]
  const auto& q = dec.partial_quotients();
  REQUIRE(q.size() >= 10);
  REQUIRE(q[0] == 0);
  for (size_t i = 1; i < std::min<size_t>(q.size(), 20); ++i) REQUIRE(q[i] == 2);

  SECTION("low-denominator rationals are rejected") {
    REQUIRE_THROWS_AS(AlphaSpec::from_decimal("0.5"), std::domain_error);
    REQUIRE_THROWS_AS(AlphaSpec::from_decimal("0.250000000000000000000000000"),
                      std::domain_error);
  }
  SECTION("parse dispatch") {
    REQUIRE(AlphaSpec::parse("sqrt2").id() == "sqrt2");
    REQUIRE(AlphaSpec::parse("pi").id() == "pi");
    REQUIRE(AlphaSpec::parse("cf:[1;2,2,2,2,2,2,2]").partial_quotients().size() == 8);
    REQUIRE_THROWS_AS(AlphaSpec::parse("nonsense"), std::domain_error);
  }
}

TEST_CASE("find_special_primes: theta=0 test mode accepts every prime") {
  auto primes = sieve_primes(1000);
  auto s2 = AlphaSpec::sqrt2();
  SpecialPrimeOptions opt;
  opt.allow_theta_zero = true;
  auto hits = find_special_primes(s2, 0.0, 0.0, 1000, primes, opt);
  REQUIRE(hits.size() == primes.primes.size());
  REQUIRE_THROWS_AS(find_special_primes(s2, 0.0, 0.0, 1000, primes),
                    std::domain_error);
}

TEST_CASE("find_special_primes equals the exact big-rational scan") {
  auto primes = sieve_primes(1000);
  auto s2 = AlphaSpec::sqrt2();
  auto hits = find_special_primes(s2, 0.0, 0.1, 1000, primes);

  // Oracle: ||alpha p|| < p^{-1/10}  <=>  ||alpha p||^10 * p < 1, decided in
  // exact arithmetic on a 320-bit approximant with margin checked.
  auto big = oracle::BigAlpha::sqrt2(320);
  std::vector<uint64_t> want;
  for (uint64_t p : primes.primes) {
    mpq_class x = big.value * mpz_class(static_cast<unsigned long>(p));
    mpz_class fl = x.get_num() / x.get_den();
    mpq_class f = x - mpq_class(fl);
    mpq_class dist = f <= mpq_class(1, 2) ? f : mpq_class(1) - f;
    mpq_class lhs = dist;
    for (int i = 1; i < 10; ++i) lhs *= dist;
    lhs *= mpz_class(static_cast<unsigned long>(p));
    // decisively on one side: the approximant error cannot flip this
    REQUIRE(abs(lhs - 1) > mpq_class(1, 1'000'000));
    if (lhs < 1) want.push_back(p);
  }
  REQUIRE(hits.size() == want.size());
  for (size_t i = 0; i < hits.size(); ++i) {
    REQUIRE(hits[i].p == want[i]);
    REQUIRE(hits[i].dist < hits[i].bound);
    REQUIRE(hits[i].dist >= 0.0);
    REQUIRE(hits[i].dist <= 0.5);
  }
}

TEST_CASE("special prime counts track the heuristic density") {
  auto primes = sieve_primes(1'000'000);
  auto s2 = AlphaSpec::sqrt2();
  auto hits = find_special_primes(s2, 0.0, 0.1, 1'000'000, primes);
  double expected = 0.0;
  for (uint64_t p : primes.primes)
    expected += 2.0 * std::exp(-0.1 * std::log(double(p)));
  REQUIRE(double(hits.size()) > 0.5 * expected);
  REQUIRE(double(hits.size()) < 2.0 * expected);

  SECTION("threaded scan merges in order") {
    SpecialPrimeOptions opt;
    opt.threads = 4;
    auto hits4 = find_special_primes(s2, 0.0, 0.1, 1'000'000, primes, opt);
    REQUIRE(hits4.size() == hits.size());
    for (size_t i = 0; i < hits.size(); ++i) {
      REQUIRE(hits4[i].p == hits[i].p);
      REQUIRE(hits4[i].dist == hits[i].dist);
    }
  }
}
