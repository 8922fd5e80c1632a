#include <catch_amalgamated.hpp>

#include <algorithm>
#include <string>

#include "mmcomp/config.hpp"

using namespace mmcomp;

namespace {
bool mentions(const ConfigError& e, const std::string& key) {
  return std::any_of(e.errors().begin(), e.errors().end(),
                     [&](const std::string& s) { return s.rfind(key + ":", 0) == 0; });
}

RunConfig capture_error(const std::string& text, std::vector<std::string>& errs) {
  try {
    return parse_config_text(text);
  } catch (const ConfigError& e) {
    errs = e.errors();
  }
  return {};
}
}  // namespace

TEST_CASE("the shipped study config parses to the study parameters", "[config]") {
  const RunConfig c = parse_config(std::string(MMCOMP_SOURCE_DIR) + "/configs/study.cfg");
  const ModelParams& m = c.model;
  CHECK(m.s0 == 100.0);
  CHECK(m.sigma == 1.0);
  CHECK(m.horizon == 1.0);
  CHECK(m.lambda_a == 10.0);
  CHECK(m.lambda_b == 10.0);
  CHECK(m.q_max == 10);
  CHECK(m.q_min == -10);
  CHECK(m.a_tilde == 0.1);
  CHECK(m.b_tilde == 0.1);
  CHECK(m.beta == 0.05);
  CHECK(m.kappa == 2.0);
  CHECK(m.tick == 0.01);
  CHECK(m.phi == 0.1);
  CHECK(m.gamma == 0.03);
  CHECK(c.run.paths == 10000);
  CHECK(c.run.steps == 1000);
  CHECK(c.run.strategy.kind == StrategyKind::ClosedForm);
}

TEST_CASE("an empty config lists every required key", "[config][errors]") {
  std::vector<std::string> errs;
  capture_error("", errs);
  REQUIRE(errs.size() == model_keys().size());
  for (const auto& key : model_keys())
    CHECK(std::count_if(errs.begin(), errs.end(), [&](const std::string& s) { return s.rfind(key + ":", 0) == 0; }) == 1);
}

TEST_CASE("constraint violations and type errors name the key", "[config][errors]") {
  RunConfig good;
  std::string text = to_config_text(good);

  auto replace = [&](const std::string& key, const std::string& value) {
    std::string t = text;
    const auto at = t.find(key + " = ");
    const auto eol = t.find('\n', at);
    t.replace(at, eol - at, key + " = " + value);
    return t;
  };

  try {
    parse_config_text(replace("kappa", "-1"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.errors().size() == 1);
    CHECK(mentions(e, "kappa"));
  }
  try {
    parse_config_text(replace("sigma", "one"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.errors().size() == 1);
    CHECK(mentions(e, "sigma"));
  }
  try {
    parse_config_text(replace("q_max", "2.5") + "colour = red\nseed = 1\nseed = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "q_max"));
    CHECK(mentions(e, "colour"));
    CHECK(mentions(e, "seed"));
    // The canonical text already sets seed, so both extra lines are duplicates.
    CHECK(e.errors().size() == 4);
  }
  try {
    parse_config_text(replace("strategy", "ppo"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "strategy"));
  }
  CHECK_THROWS_AS(parse_config("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("strategy specs parse and print back", "[config]") {
  CHECK(parse_strategy("closed-form")->kind == StrategyKind::ClosedForm);
  CHECK(parse_strategy("euler")->kind == StrategyKind::Euler);
  const auto c = parse_strategy("constant:0.1:0.25");
  REQUIRE(c);
  CHECK(c->ask == 0.1);
  CHECK(c->bid == 0.25);
  CHECK(parse_strategy(to_string(*c)) == c);
  CHECK_FALSE(parse_strategy("constant:0.1"));
  CHECK_FALSE(parse_strategy("constant:x:0.1"));
  CHECK_FALSE(parse_strategy("constant:0.1:0.1z"));
}

TEST_CASE("canonical text round-trips", "[config]") {
  RunConfig c;
  c.model.sigma = 0.1 + 0.2;
  c.model.q_min = -7;
  c.model.q_max = 3;
  c.run.seed = 0xFFFFFFFFFFFFFFFFull;
  c.run.strategy = *parse_strategy("constant:0.3:0.125");
  c.run.euler_truncated = false;
  CHECK(parse_config_text(to_config_text(c)) == c);
}

TEST_CASE("config hash changes exactly when a field changes", "[config]") {
  const RunConfig base;
  const std::string h = config_hash(base);
  CHECK(h.size() == 16);
  CHECK(config_hash(parse_config_text("# comment\n" + to_config_text(base))) == h);

  std::vector<RunConfig> variants(8, base);
  variants[0].model.sigma = std::nextafter(1.0, 2.0);
  variants[1].model.q_max = 11;
  variants[2].model.sigma_z = 0.0;
  variants[3].run.seed = 8;
  variants[4].run.paths = 9999;
  variants[5].run.strategy = StrategySpec{StrategyKind::Euler};
  variants[6].run.euler_truncated = false;
  variants[7].run.confidence = 0.95;
  for (const auto& v : variants) CHECK(config_hash(v) != h);
}
