#include <doctest.h>

#include <cmath>
#include <vector>

#include "csd/common.hpp"
#include "csd/finite_difference.hpp"
#include "csd/generators.hpp"
#include "csd/rng.hpp"

using namespace csd;

namespace {

struct RatioCase {
  Family family;
  double theta;
  double t;
  int d;
  double expected;
};

// psi^{(d+1)}(t) / psi^{(d)}(t) from symbolic differentiation at 25 digits.
const std::vector<RatioCase> kSymbolicRatios = {
    {Family::Gumbel, 1.7, 0.05, 1, -10.254912486916439},
    {Family::Gumbel, 1.7, 0.05, 2, -27.937953064847687},
    {Family::Gumbel, 1.7, 0.05, 3, -47.87101290905895},
    {Family::Gumbel, 1.7, 0.05, 4, -67.92414869805138},
    {Family::Gumbel, 1.7, 0.05, 5, -87.9652930034922},
    {Family::Gumbel, 1.7, 0.05, 6, -107.99507483824634},
    {Family::Gumbel, 1.7, 0.7, 1, -1.2695287833236213},
    {Family::Gumbel, 1.7, 0.7, 2, -2.2471332510286453},
    {Family::Gumbel, 1.7, 0.7, 3, -3.4990694470884196},
    {Family::Gumbel, 1.7, 0.7, 4, -4.867850074372626},
    {Family::Gumbel, 1.7, 0.7, 5, -6.275596305861539},
    {Family::Gumbel, 1.7, 0.7, 6, -7.696343439842494},
    {Family::Gumbel, 1.7, 3.0, 1, -0.5114424967470675},
    {Family::Gumbel, 1.7, 3.0, 2, -0.7013186142811311},
    {Family::Gumbel, 1.7, 3.0, 3, -0.9407984234012022},
    {Family::Gumbel, 1.7, 3.0, 4, -1.2176491472898074},
    {Family::Gumbel, 1.7, 3.0, 5, -1.5181422256107708},
    {Family::Gumbel, 1.7, 3.0, 6, -1.8321747490385796},
    {Family::Gumbel, 3.0, 0.05, 1, -15.789354332426925},
    {Family::Gumbel, 3.0, 0.05, 2, -34.75235984977958},
    {Family::Gumbel, 3.0, 0.05, 3, -54.44919959306924},
    {Family::Gumbel, 3.0, 0.05, 4, -74.29753585305252},
    {Family::Gumbel, 3.0, 0.05, 5, -94.20216770744669},
    {Family::Gumbel, 3.0, 0.05, 6, -114.13478386674515},
    {Family::Gumbel, 3.0, 0.7, 1, -1.3751923817821907},
    {Family::Gumbel, 3.0, 0.7, 2, -2.657356094187809},
    {Family::Gumbel, 3.0, 0.7, 3, -4.028330411286655},
    {Family::Gumbel, 3.0, 0.7, 4, -5.426212707170725},
    {Family::Gumbel, 3.0, 0.7, 5, -6.835211667354934},
    {Family::Gumbel, 3.0, 0.7, 6, -8.249922926647683},
    {Family::Gumbel, 3.0, 3.0, 1, -0.38247217447860093},
    {Family::Gumbel, 3.0, 3.0, 2, -0.6692516630126835},
    {Family::Gumbel, 3.0, 3.0, 3, -0.980470503230619},
    {Family::Gumbel, 3.0, 3.0, 4, -1.3011426395502452},
    {Family::Gumbel, 3.0, 3.0, 5, -1.6261754439875664},
    {Family::Gumbel, 3.0, 3.0, 6, -1.953561667393432},
    {Family::Frank, 3.0, 0.05, 1, -10.402633958772787},
    {Family::Frank, 3.0, 0.05, 2, -19.805267917545574},
    {Family::Frank, 3.0, 0.05, 3, -29.6826560678758},
    {Family::Frank, 3.0, 0.05, 4, -39.57684612761641},
    {Family::Frank, 3.0, 0.05, 5, -49.471064792537504},
    {Family::Frank, 3.0, 0.05, 6, -59.365277765647605},
    {Family::Frank, 3.0, 0.7, 1, -1.893443718062285},
    {Family::Frank, 3.0, 0.7, 2, -2.78688743612457},
    {Family::Frank, 3.0, 0.7, 3, -4.0009195304812},
    {Family::Frank, 3.0, 0.7, 4, -5.323832329695747},
    {Family::Frank, 3.0, 0.7, 5, -6.656968561400982},
    {Family::Frank, 3.0, 0.7, 6, -7.988642214477103},
    {Family::Frank, 3.0, 3.0, 1, -1.049657530337687},
    {Family::Frank, 3.0, 3.0, 2, -1.0993150606753737},
    {Family::Frank, 3.0, 3.0, 3, -1.1941439273424104},
    {Family::Frank, 3.0, 3.0, 4, -1.3612101277445172},
    {Family::Frank, 3.0, 3.0, 5, -1.6171575174965571},
    {Family::Frank, 3.0, 3.0, 6, -1.9422338909465233},
    {Family::Frank, -2.0, 0.05, 1, -0.14129366475162022},
    {Family::Frank, -2.0, 0.05, 2, 0.7174126704967595},
    {Family::Frank, -2.0, 0.7, 1, -0.23965232981814744},
    {Family::Frank, -2.0, 0.7, 2, 0.5206953403637051},
    {Family::Frank, -2.0, 3.0, 1, -0.7586721694421181},
    {Family::Frank, -2.0, 3.0, 2, -0.5173443388842364},
};

std::vector<GeneratorSpec> all_specs() {
  return {{Family::Clayton, 0.5}, {Family::Clayton, 2.0}, {Family::Clayton, 8.0}, {Family::Gumbel, 1.3},
          {Family::Gumbel, 2.0},  {Family::Gumbel, 5.0},  {Family::Frank, -3.0},  {Family::Frank, 0.7},
          {Family::Frank, 5.0},   {Family::Frank, 20.0},  {Family::Independence, 0.0}};
}

// log|psi^{(k)}(t)| for Clayton from psi^{(k)} = (-1)^k (1 + theta t)^{-1/theta - k} prod_{i<k} (1 + i theta).
double clayton_log_abs_derivative(double theta, double t, int k) {
  double s = (-1.0 / theta - k) * std::log1p(theta * t);
  for (int i = 0; i < k; ++i) s += std::log1p(i * theta);
  return s;
}

}  // namespace

TEST_SUITE("generators") {
  TEST_CASE("Clayton theta=1 closed-form values") {
    const GeneratorSpec c{Family::Clayton, 1.0};
    CHECK(phi(c, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi_d1(c, 0.5) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(phi_d2(c, 0.5) == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(psi_ratio(c, 1.0, 2) == doctest::Approx(-1.5).epsilon(1e-15));
    const TaylorJet j = jet_psi(c, 1.0, 3);
    CHECK(j[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(j[1] == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(j[2] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(j[3] == doctest::Approx(-0.0625).epsilon(1e-15));
  }

  TEST_CASE("Independence jet at zero is the exponential series") {
    const TaylorJet j = jet_psi({Family::Independence, 0.0}, 0.0, 3);
    CHECK(j[0] == doctest::Approx(1.0));
    CHECK(j[1] == doctest::Approx(-1.0));
    CHECK(j[2] == doctest::Approx(0.5));
    CHECK(j[3] == doctest::Approx(-1.0 / 6.0));
    for (double t : {0.0, 0.3, 7.0}) {
      for (int d : {1, 3, 10}) CHECK(psi_ratio({Family::Independence, 0.0}, t, d) == -1.0);
    }
  }

  TEST_CASE("Frank generator matches the textbook expression") {
    const GeneratorSpec f{Family::Frank, 2.0};
    const double expected = -std::log((std::exp(-0.6) - 1.0) / (std::exp(-2.0) - 1.0));
    CHECK(phi(f, 0.3) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("generators vanish at 1 and are strictly decreasing and convex") {
    for (const auto& g : all_specs()) {
      CAPTURE(to_string(g.family));
      CAPTURE(g.theta);
      CHECK(std::abs(phi(g, 1.0 - 1e-12)) < 1e-9);
      for (int i = 1; i < 100; ++i) {
        const double u = i / 100.0;
        CHECK(phi_d1(g, u) < 0.0);
        CHECK(phi_d2(g, u) > 0.0);
        CHECK(log_neg_phi_d1(g, u) == doctest::Approx(std::log(-phi_d1(g, u))).epsilon(1e-12));
        CHECK(phi_curvature(g, u) == doctest::Approx(phi_d2(g, u) / phi_d1(g, u)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("phi derivatives match central differences at u=0.37, theta=2.5") {
    for (Family fam : {Family::Clayton, Family::Gumbel, Family::Frank}) {
      const GeneratorSpec g{fam, 2.5};
      const double h = 1e-5;
      const double fd1 = (phi(g, 0.37 + h) - phi(g, 0.37 - h)) / (2 * h);
      const double fd2 = (phi_d1(g, 0.37 + h) - phi_d1(g, 0.37 - h)) / (2 * h);
      CHECK(std::abs(phi_d1(g, 0.37) - fd1) / std::abs(phi_d1(g, 0.37)) < 1e-7);
      CHECK(std::abs(phi_d2(g, 0.37) - fd2) / std::abs(phi_d2(g, 0.37)) < 1e-7);
    }
  }

  TEST_CASE("phi(psi(t)) = t") {
    for (const auto& g : all_specs()) {
      CAPTURE(to_string(g.family));
      CAPTURE(g.theta);
      for (double lt = -6.0; lt <= std::log10(50.0); lt += 0.25) {
        const double t = std::pow(10.0, lt);
        const double u = psi(g, t);
        if (!(u > 0.0 && u < 1.0)) continue;
        CHECK(phi(g, u) == doctest::Approx(t).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("psi derivatives alternate in sign") {
    for (const auto& g : all_specs()) {
      // Frank with theta < 0 is only 2-monotone.
      const int max_k = g.family == Family::Frank && g.theta < 0 ? 2 : 8;
      for (double t : {1e-4, 0.1, 1.0, 5.0, 30.0}) {
        for (int k = 0; k <= max_k; ++k) {
          CAPTURE(to_string(g.family));
          CAPTURE(g.theta);
          CAPTURE(t);
          CAPTURE(k);
          CHECK(psi_derivative(g, t, k).sign == (k % 2 == 0 ? 1 : -1));
        }
      }
    }
  }

  TEST_CASE("Clayton closed-form ratio agrees with the jet engine") {
    Philox rng(3);
    for (int i = 0; i < 100; ++i) {
      const double theta = rng.uniform(0.1, 10.0);
      const double t = std::exp(rng.uniform(std::log(1e-4), std::log(50.0)));
      const int d = 1 + static_cast<int>(rng.next_u32() % 12);
      const GeneratorSpec g{Family::Clayton, theta};
      const double closed = -(1.0 + d * theta) / (1.0 + theta * t);
      CAPTURE(theta);
      CAPTURE(t);
      CAPTURE(d);
      CHECK(psi_ratio(g, t, d) == doctest::Approx(closed).epsilon(1e-14));
      CHECK(std::abs(psi_ratio_jet(g, t, d) - closed) / std::abs(closed) < 1e-10);
    }
  }

  TEST_CASE("Gumbel and Frank ratios agree with symbolic references") {
    for (const auto& c : kSymbolicRatios) {
      CAPTURE(to_string(c.family));
      CAPTURE(c.theta);
      CAPTURE(c.t);
      CAPTURE(c.d);
      const double r = psi_ratio({c.family, c.theta}, c.t, c.d);
      CHECK(std::abs(r - c.expected) / std::abs(c.expected) < 1e-9);
    }
  }

  TEST_CASE("jet ratio agrees with finite differences of log|psi^(d)|") {
    for (const auto& g : all_specs()) {
      const int max_d = g.family == Family::Frank && g.theta < 0 ? 2 : 6;
      for (double t : {0.2, 1.0, 4.0}) {
        for (int d = 1; d <= max_d; ++d) {
          const double h = 1e-3 * t;
          const double fd = central_difference([&](double x) { return psi_derivative(g, x, d).log_abs; }, t, h);
          CAPTURE(to_string(g.family));
          CAPTURE(g.theta);
          CAPTURE(t);
          CAPTURE(d);
          CHECK(std::abs(psi_ratio(g, t, d) - fd) / std::abs(fd) < 1e-5);
        }
      }
    }
  }

  TEST_CASE("Gumbel jet coefficient 1 matches a finite-difference psi'") {
    const GeneratorSpec g{Family::Gumbel, 2.0};
    const double fd = central_difference([&](double x) { return psi(g, x); }, 1.0, 1e-3);
    CHECK(std::abs(jet_psi(g, 1.0, 3)[1] - fd) / std::abs(fd) < 1e-7);
  }

  TEST_CASE("high-order derivatives stay finite in log-signed form") {
    const GeneratorSpec g{Family::Clayton, 3.0};
    for (int k : {10, 30, 64}) {
      for (double t : {0.01, 1.0, 100.0}) {
        const auto v = psi_derivative(g, t, k);
        CHECK(v.sign == (k % 2 == 0 ? 1 : -1));
        CHECK(v.log_abs == doctest::Approx(clayton_log_abs_derivative(3.0, t, k)).epsilon(1e-10));
      }
    }
    for (Family fam : {Family::Gumbel, Family::Frank}) {
      const GeneratorSpec h{fam, 2.5};
      for (int d : {20, 40, 64}) CHECK(std::isfinite(psi_ratio(h, 0.5, d)));
    }
  }

  TEST_CASE("boundary parameters collapse to independence") {
    CHECK(GeneratorSpec{Family::Clayton, 5e-9}.normalized().family == Family::Independence);
    CHECK(GeneratorSpec{Family::Gumbel, 1.0}.normalized().family == Family::Independence);
    CHECK(GeneratorSpec{Family::Gumbel, 1.0 + 5e-9}.normalized().family == Family::Independence);
    CHECK(GeneratorSpec{Family::Frank, -5e-9}.normalized().family == Family::Independence);
    CHECK(GeneratorSpec{Family::Clayton, 1e-6}.normalized().family == Family::Clayton);
  }

  TEST_CASE("invalid parameters and domains are rejected") {
    CHECK_THROWS_AS(GeneratorSpec({Family::Clayton, -0.5}).validate(), ParameterError);
    CHECK_THROWS_AS(GeneratorSpec({Family::Gumbel, 0.5}).validate(), ParameterError);
    CHECK_THROWS_AS(GeneratorSpec({Family::Frank, std::nan("")}).validate(), ParameterError);
    const GeneratorSpec c{Family::Clayton, 2.0};
    CHECK_THROWS_AS(phi(c, 0.0), DomainError);
    CHECK_THROWS_AS(phi(c, 1.0), DomainError);
    CHECK_THROWS_AS(phi_d1(c, 1.5), DomainError);
    CHECK_THROWS_AS(psi_ratio(c, 1.0, kMaxDimension + 1), ParameterError);
    CHECK(family_from_string("gumbel") == Family::Gumbel);
    CHECK_THROWS(family_from_string("joe"));
  }
}
