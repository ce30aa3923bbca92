#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "oracle_helpers.hpp"
#include "sfprime/table_io.hpp"
#include "sfprime/tables.hpp"

using namespace sfprime;

TEST_CASE("sieve_primes matches hand and trial-division oracles") {
  auto t = sieve_primes(10);
  REQUIRE(t.primes == std::vector<uint64_t>{2, 3, 5, 7});

  auto t100 = sieve_primes(100);
  REQUIRE(t100.primes.size() == 25);

  auto t6 = sieve_primes(1'000'000);
  REQUIRE(t6.primes.size() == 78498);
  REQUIRE(t6.primes.front() == 2);

  // trial-division oracle over a sample window
  for (uint64_t n = 0; n <= 2000; ++n)
    REQUIRE(t6.is_prime(n) == oracle::is_prime_trial(n));
  for (uint64_t n = 999'000; n <= 1'000'000; ++n)
    REQUIRE(t6.is_prime(n) == oracle::is_prime_trial(n));
}

TEST_CASE("sieve_primes rejects limit < 2") {
  REQUIRE_THROWS_AS(sieve_primes(1), std::domain_error);
}

TEST_CASE("segmented sieves are independent of segmentation") {
  auto a = sieve_primes(300'000, 12);
  auto b = sieve_primes(300'000, 18);
  auto c = sieve_primes(300'000, 24);
  REQUIRE(a.bits == b.bits);
  REQUIRE(b.bits == c.bits);
  REQUIRE(a.primes == c.primes);

  auto ma = sieve_mobius(200'000, 10);
  auto mb = sieve_mobius(200'000, 16);
  auto mc = sieve_mobius(200'000, 22);
  REQUIRE(ma.mu == mb.mu);
  REQUIRE(mb.mu == mc.mu);
}

TEST_CASE("sieve_mobius values") {
  auto m = sieve_mobius(100'000);
  REQUIRE(m.mu[1] == 1);
  REQUIRE(m.mu[12] == 0);
  REQUIRE(m.mu[30] == -1);
  for (uint64_t n = 1; n <= 3000; ++n) REQUIRE(m.mu[n] == oracle::mobius_trial(n));

  SECTION("multiplicative on coprime arguments (spot)") {
    auto rng = oracle::seeded_rng(7);
    int checked = 0;
    while (checked < 300) {
      uint64_t a = rng() % 300 + 1, b = rng() % 300 + 1;
      if (std::gcd(a, b) != 1) continue;
      REQUIRE(int(m.mu[a * b]) == int(m.mu[a]) * int(m.mu[b]));
      ++checked;
    }
  }
}

TEST_CASE("sieve_mangoldt values and Chebyshev sum") {
  auto man = sieve_mangoldt(10'000);
  REQUIRE(man.lam[8] == Catch::Approx(std::log(2.0)).epsilon(1e-14));
  REQUIRE(man.lam[6] == 0.0);
  REQUIRE(man.lam[7] == Catch::Approx(std::log(7.0)).epsilon(1e-14));
  REQUIRE(man.lam[49] == Catch::Approx(std::log(7.0)).epsilon(1e-14));
  REQUIRE(man.lam[1] == 0.0);

  SECTION("sum_{d|n} Lambda(d) = log n") {
    for (uint64_t n = 1; n <= 3000; ++n) {
      double s = 0;
      for (uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        s += man.lam[d];
        if (d != n / d) s += man.lam[n / d];
      }
      REQUIRE(s == Catch::Approx(std::log((double)n)).margin(1e-9));
    }
  }

  SECTION("psi(10^4) within 3% of 10^4") {
    double s = 0;
    for (uint64_t n = 1; n <= 10'000; ++n) s += man.lam[n];
    REQUIRE(std::abs(s - 1e4) < 0.03 * 1e4);
  }
}

TEST_CASE("sieve_tau small values and convolution identity") {
  auto t2 = sieve_tau(2, 10'000);
  REQUIRE(t2.tau[1] == 1);
  REQUIRE(t2.tau[6] == 4);

  auto t1 = sieve_tau(1, 10'000);
  for (uint64_t n = 1; n <= 10'000; ++n) REQUIRE(t1.tau[n] == 1);

  auto t3 = sieve_tau(3, 10'000);
  REQUIRE(t3.tau[4] == 6);
  REQUIRE(t3.tau[4] == oracle::tau_k_direct(3, 4));

  SECTION("tau_k = tau_{k-1} * 1 by direct convolution, k <= 4") {
    auto t4 = sieve_tau(4, 10'000);
    const DivisorTable* prev[] = {&t1, &t2, &t3, &t4};
    for (int k = 1; k < 4; ++k) {
      const auto& small = *prev[k - 1];
      const auto& big = *prev[k];
      for (uint64_t n = 1; n <= 10'000; n += (n < 100 ? 1 : 97)) {
        uint64_t conv = 0;
        for (uint64_t d = 1; d * d <= n; ++d) {
          if (n % d) continue;
          conv += small.tau[d];
          if (d != n / d) conv += small.tau[n / d];
        }
        REQUIRE(big.tau[n] == conv);
      }
    }
  }

  SECTION("spot oracle for tau_3") {
    for (uint64_t n : {1ull, 2ull, 12ull, 36ull, 97ull, 720ull})
      REQUIRE(t3.tau[n] == oracle::tau_k_direct(3, n));
  }
}

TEST_CASE("squarefree_indicator equals mu^2 and handles edges") {
  auto mob = sieve_mobius(2000);
  REQUIRE(squarefree_indicator(1, mob) == 1);
  REQUIRE(squarefree_indicator(18, mob) == 0);
  REQUIRE(squarefree_indicator(0, mob) == 0);

  uint64_t big = 200'001;
  auto mob_big = sieve_mobius(isqrt_u64(big));
  REQUIRE(squarefree_indicator(big, mob_big) ==
          (oracle::squarefree_trial(big) ? 1 : 0));

  auto mfull = sieve_mobius(100'000);
  for (uint64_t n = 1; n <= 100'000; ++n)
    REQUIRE(squarefree_indicator(n, mfull) == int(mfull.mu[n]) * int(mfull.mu[n]));
}

TEST_CASE("squarefree count identity sum mu(d) floor(X/d^2)") {
  auto mob = sieve_mobius(100'000);
  for (uint64_t X : {1000ull, 10'000ull, 100'000ull}) {
    uint64_t direct = 0;
    for (uint64_t n = 1; n <= X; ++n)
      if (mob.mu[n] != 0) ++direct;
    int64_t viaid = 0;
    for (uint64_t d = 1; d * d <= X; ++d)
      viaid += int64_t(mob.mu[d]) * int64_t(X / (d * d));
    REQUIRE(int64_t(direct) == viaid);
  }
}

TEST_CASE("table serialization round-trips") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "sfprime_test_tables";
  fs::create_directories(dir);

  auto p = sieve_primes(50'000);
  save_table(p, (dir / "p.tbl").string());
  auto p2 = load_prime_table((dir / "p.tbl").string());
  REQUIRE(p2.limit == p.limit);
  REQUIRE(p2.bits == p.bits);
  REQUIRE(p2.primes == p.primes);

  auto m = sieve_mobius(50'000);
  save_table(m, (dir / "m.tbl").string());
  auto m2 = load_mobius_table((dir / "m.tbl").string());
  REQUIRE(m2.mu == m.mu);

  auto man = sieve_mangoldt(20'000);
  save_table(man, (dir / "l.tbl").string());
  auto man2 = load_mangoldt_table((dir / "l.tbl").string());
  REQUIRE(man2.lam == man.lam);

  auto tau = sieve_tau(3, 5'000);
  save_table(tau, (dir / "t.tbl").string());
  auto tau2 = load_divisor_table((dir / "t.tbl").string());
  REQUIRE(tau2.order == 3);
  REQUIRE(tau2.tau == tau.tau);

  SECTION("kind mismatch and corruption are detected") {
    REQUIRE_THROWS(load_mobius_table((dir / "p.tbl").string()));
    // flip one payload byte
    auto path = (dir / "m.tbl").string();
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    char c;
    f.seekg(40);
    f.read(&c, 1);
    c ^= 1;
    f.seekp(40);
    f.write(&c, 1);
    f.close();
    REQUIRE_THROWS(load_mobius_table(path));
  }
  fs::remove_all(dir);
}
