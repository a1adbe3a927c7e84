#include <doctest.h>

#include <cmath>
#include <set>

#include "csd/jet.hpp"
#include "csd/log_signed.hpp"
#include "csd/rng.hpp"

using namespace csd;

TEST_SUITE("jet") {
  TEST_CASE("exp of the variable gives 1/j!") {
    const TaylorJet e = exp(TaylorJet::variable(0.0, 8));
    double fact = 1.0;
    for (std::size_t j = 0; j <= 8; ++j) {
      if (j > 0) fact *= static_cast<double>(j);
      CHECK(e[j] == doctest::Approx(1.0 / fact).epsilon(1e-15));
      CHECK(e.derivative(j) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  TEST_CASE("log(1 + x) series") {
    const TaylorJet l = log(TaylorJet::variable(1.0, 7));
    CHECK(l[0] == doctest::Approx(0.0));
    for (std::size_t j = 1; j <= 7; ++j) {
      const double expected = (j % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(j);
      CHECK(l[j] == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("pow matches the binomial series") {
    const double r = -0.7;
    const TaylorJet p = pow(TaylorJet::variable(1.0, 6), r);
    double binom = 1.0;
    for (std::size_t j = 0; j <= 6; ++j) {
      CHECK(p[j] == doctest::Approx(binom).epsilon(1e-13));
      binom *= (r - static_cast<double>(j)) / static_cast<double>(j + 1);
    }
  }

  TEST_CASE("division inverts multiplication") {
    const TaylorJet x = TaylorJet::variable(0.3, 6, 0.5);
    const TaylorJet a = exp(x) + x * 2.0;
    const TaylorJet b = log(x + 1.0) + 3.0;
    const TaylorJet back = (a / b) * b;
    for (std::size_t j = 0; j <= 6; ++j) CHECK(back[j] == doctest::Approx(a[j]).epsilon(1e-13));
    const TaylorJet inv = reciprocal(b) * b;
    CHECK(inv[0] == doctest::Approx(1.0));
    for (std::size_t j = 1; j <= 6; ++j) CHECK(std::abs(inv[j]) < 1e-14);
  }

  TEST_CASE("step scales coefficients by step^j") {
    const TaylorJet a = exp(TaylorJet::variable(0.2, 5, 1.0));
    const TaylorJet b = exp(TaylorJet::variable(0.2, 5, 0.25));
    for (std::size_t j = 0; j <= 5; ++j) {
      CHECK(b[j] == doctest::Approx(a[j] * std::pow(0.25, static_cast<double>(j))).epsilon(1e-14));
    }
  }
}

TEST_SUITE("log_signed") {
  TEST_CASE("round trip and sign arithmetic") {
    const auto a = LogSignedValue::from_value(-3.0);
    const auto b = LogSignedValue::from_value(0.5);
    CHECK(a.value() == doctest::Approx(-3.0));
    CHECK((a * b).value() == doctest::Approx(-1.5));
    CHECK((a / b).value() == doctest::Approx(-6.0));
    CHECK(LogSignedValue::from_value(0.0).is_zero());
    CHECK((a * LogSignedValue{}).is_zero());
  }

  TEST_CASE("magnitudes beyond double range survive products") {
    LogSignedValue big{800.0, 1};
    LogSignedValue tiny{-795.0, -1};
    CHECK((big * tiny).value() == doctest::Approx(-std::exp(5.0)));
  }
}

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    const auto z = Philox::block({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x6627e8d5u);
    CHECK(z[1] == 0xe169c58du);
    CHECK(z[2] == 0xbc57ac4cu);
    CHECK(z[3] == 0x9b00dbd8u);
    const auto f = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f[0] == 0x408f276du);
    CHECK(f[1] == 0x41c83b0eu);
    CHECK(f[2] == 0xa20bc7c6u);
    CHECK(f[3] == 0x6d5451fdu);
    const auto p = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(p[0] == 0xd16cfe09u);
    CHECK(p[1] == 0x94fdccebu);
    CHECK(p[2] == 0x5001e420u);
    CHECK(p[3] == 0x24126ea1u);
  }

  TEST_CASE("same seed, same stream") {
    Philox a(123), b(123), c(124);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const double x = a.uniform();
      CHECK(x == b.uniform());
      if (x != c.uniform()) differs = true;
    }
    CHECK(differs);
  }

  TEST_CASE("uniform stays in the open interval with the right moments") {
    Philox rng(9);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sum2 += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  }

  TEST_CASE("normal, exponential and gamma moments") {
    Philox rng(10);
    const int n = 200000;
    double ns = 0, ns2 = 0, es = 0, gs = 0, gs2 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      ns += z;
      ns2 += z * z;
      es += rng.exponential();
      const double g = rng.gamma(0.5);
      gs += g;
      gs2 += g * g;
    }
    CHECK(std::abs(ns / n) < 0.01);
    CHECK(ns2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(es / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(gs / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(gs2 / n - (gs / n) * (gs / n) == doctest::Approx(0.5).epsilon(0.04));
    double g3 = 0;
    for (int i = 0; i < n; ++i) g3 += rng.gamma(3.5);
    CHECK(g3 / n == doctest::Approx(3.5).epsilon(0.01));
  }

  TEST_CASE("rademacher is balanced") {
    Philox rng(11);
    int sum = 0;
    for (int i = 0; i < 100000; ++i) {
      const int w = rng.rademacher();
      REQUIRE((w == 1 || w == -1));
      sum += w;
    }
    CHECK(std::abs(sum) < 1500);
  }

  TEST_CASE("derived seeds are distinct and follow the documented formula") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(5, 7) == splitmix64(5 ^ splitmix64(7 + 0x9E3779B97F4A7C15ull)));
  }
}
