#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mmcomp/model.hpp"
#include "test_support.hpp"

using namespace mmcomp;
using Catch::Approx;

namespace {
ModelParams competitor_case(double a, double b, double beta) {
  ModelParams p;
  p.a_tilde = a;
  p.b_tilde = b;
  p.beta = beta;
  return p;
}
}  // namespace

TEST_CASE("competitor depths follow the linear inventory rule", "[model]") {
  const auto p = competitor_case(0.1, 0.1, 0.05);

  auto d = competitor_depths(p, 0, 0.0);
  CHECK(d.ask == Approx(0.1).margin(1e-15));
  CHECK(d.bid == Approx(0.1).margin(1e-15));
  CHECK(d.ask_posted);
  CHECK(d.bid_posted);

  d = competitor_depths(p, 2, 0.0);
  CHECK(d.ask == Approx(0.0).margin(1e-15));
  CHECK(d.bid == Approx(0.2).margin(1e-15));

  d = competitor_depths(p, 0, 0.03);
  CHECK(d.ask == Approx(0.07).margin(1e-15));
  CHECK(d.bid == Approx(0.13).margin(1e-15));
}

TEST_CASE("competitor depths may go negative and keep a constant spread", "[model][property]") {
  const auto p = testing::study_params();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> qt(-200, 200);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const auto d = competitor_depths(p, qt(rng), z(rng));
    CHECK(d.ask + d.bid == Approx(p.a_tilde + p.b_tilde).margin(1e-12));
  }
  CHECK(competitor_depths(p, 10, 0.0).ask < 0.0);
}

TEST_CASE("fill probability is exponential beyond the competitor and capped at one", "[model]") {
  ModelParams p;
  p.kappa = 2.0;
  CHECK(fill_probability(p, 0.3, 0.3) == 1.0);
  CHECK(fill_probability(p, 0.6, 0.1) == Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(fill_probability(p, 0.6, 0.1) == Approx(0.367879).margin(5e-7));
  CHECK(fill_probability(p, -0.2, 0.1) == 1.0);
}

TEST_CASE("fill probability is nonincreasing, positive and one when more generous", "[model][property]") {
  ModelParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double comp = u(rng);
    const double a = u(rng), b = u(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double plo = fill_probability(p, lo, comp);
    const double phi = fill_probability(p, hi, comp);
    CHECK(phi <= plo);
    CHECK(phi > 0.0);
    CHECK(plo <= 1.0);
    if (lo <= comp) CHECK(plo == 1.0);
  }
}

TEST_CASE("terminal value marks inventory at the competitor midprice", "[model]") {
  ModelParams p;
  p.a_tilde = p.b_tilde = 0.1;
  p.beta = 0.05;
  p.gamma = 0.03;

  SimState flat;
  flat.t = p.horizon;
  flat.x = 12.5;
  flat.s = 101.0;
  flat.q_tilde = 7;
  flat.z = -0.3;
  flat.running_penalty = 0.75;
  CHECK(terminal_value(p, flat) == Approx(12.5 - 0.75).margin(1e-14));

  SimState long_one;
  long_one.t = p.horizon;
  long_one.q = 1;
  long_one.s = 100.0;
  long_one.q_tilde = 2;
  CHECK(terminal_value(p, long_one) == Approx(99.87).margin(1e-12));

  SimState short_one;
  short_one.t = p.horizon;
  short_one.x = 5.0;
  short_one.q = -1;
  short_one.s = 100.0;
  short_one.z = 0.02;
  short_one.running_penalty = 0.4;
  // 5 + (-1) * (100 - 0.02) - 0.03 * 1 - 0.4
  CHECK(terminal_value(p, short_one) == Approx(-95.41).margin(1e-12));
}

TEST_CASE("terminal value with no penalties and no inventory is the cash", "[model][property]") {
  ModelParams p;
  p.gamma = 0.0;
  p.phi = 0.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    SimState s;
    s.x = n(rng);
    s.s = 100.0 + n(rng);
    s.q_tilde = static_cast<std::int64_t>(n(rng));
    s.z = n(rng);
    CHECK(terminal_value(p, s) == s.x);
  }
}

TEST_CASE("parameter validation names every offending field", "[model]") {
  ModelParams p;
  CHECK(violations(p).empty());
  p.kappa = -1.0;
  p.q_min = 3;
  p.sigma_z = -0.1;
  const auto errs = violations(p);
  REQUIRE(errs.size() == 3);
  CHECK(errs[0].rfind("kappa", 0) == 0);
  CHECK(errs[1].rfind("sigma_z", 0) == 0);
  CHECK(errs[2].rfind("q_min", 0) == 0);
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
