#include <cmath>
#include <string>

#include <doctest.h>

#include "trimlab/cli/config.hpp"
#include "trimlab/cli/emit.hpp"
#include "trimlab/cli/experiments.hpp"

using namespace trimlab;
using namespace trimlab::cli;
using nlohmann::json;

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.experiment = "dynamics";
  c.model.lo = {0, 0};
  c.model.hi = {6, 8};
  c.model.gamma = "gamma1:2,3";
  c.model.v0 = "stagger:0.5";
  c.model.g = 2.5;
  c.model.disorder = DisorderSpec::truncated_cauchy(0.7, 4.0, 0.5);
  c.numerics.epsilon = {0.1, 0.01};
  c.numerics.p = {2, 4};
  c.numerics.seed = 12345678901234ULL;
  c.numerics.site = {1, 2};
  c.numerics.box_sizes = {5, 7};
  c.output.formats = {"csv"};
  CHECK(parse_config(to_json(c)) == c);
  CHECK(parse_config(json::parse(to_json(c).dump())) == c);
  CHECK(parse_config(json::object()) == ExperimentConfig{});
}

TEST_CASE("config errors name the field") {
  auto msg = [](const json& j) {
    try {
      parse_config(j);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg(json{{"model", {{"colour", 1}}}}).find("model.colour") != std::string::npos);
  CHECK(msg(json{{"numerics", {{"s", "half"}}}}).find("numerics.s") != std::string::npos);
  CHECK(msg(json{{"model", {{"gamma", "gamma1:x"}}}}).find("model.gamma") != std::string::npos);
  CHECK(msg(json{{"experiment", "nothing"}}).find("experiment") != std::string::npos);
  CHECK(msg(json{{"numerics", {{"s", 1.5}}}}).find("numerics.s") != std::string::npos);
  CHECK_FALSE(msg(json{{"numerics", {{"epsilon", 0.05}}}}).size());
}

TEST_CASE("overrides") {
  ExperimentConfig c;
  Overrides o;
  o.box = "0..10";
  o.seed = 7;
  o.epsilon = std::vector<double>{0.2, 0.02};
  apply(c, o);
  CHECK(c.model.d == 1);
  CHECK(c.model.lo == std::vector<int>{0});
  CHECK(c.model.hi == std::vector<int>{10});
  CHECK(c.numerics.seed == 7);
  CHECK(c.site() == Site{5});
  Overrides bad;
  bad.box = "3..1";
  CHECK_THROWS_AS(apply(c, bad), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(1.0) == "1.0000000000000000e+00");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  Table t;
  t.header = {"a", "b"};
  t.add({1LL, std::string("x,y")});
  CHECK(to_csv(t) == "a,b\n1,\"x,y\"\n");
  CHECK_THROWS(t.add({1LL}));
}

TEST_CASE("runs are reproducible across thread counts") {
  for (std::string exp : {"verify", "localize", "dynamics", "lattice-info"}) {
    ExperimentConfig c;
    c.experiment = exp;
    c.model.lo = {1, 1};
    c.model.hi = {5, 5};
    c.model.gamma = "gamma1:2,2";
    c.model.g = 3.0;
    c.numerics.samples = 6;
    c.numerics.seed = 99;
    c.numerics.threads = 1;
    auto a = run(c);
    c.numerics.threads = 3;
    auto b = run(c);
    CHECK_MESSAGE(to_csv(a.table) == to_csv(b.table), exp);
    CHECK(a.passed);
    CHECK(a.provenance["seed"] == 99);
    CHECK(a.provenance["code_version"] == kCodeVersion);
  }
}

TEST_CASE("verify identities") {
  ExperimentConfig c;
  c.model.lo = {0, 0};
  c.model.hi = {3, 4};
  c.model.gamma = "gamma2:2";
  auto ens = ensemble_of(c);
  for (std::size_t k = 0; k < 5; ++k) CHECK(verify_instance(ens, k, cplx(0.3, 0.2)).max() <= 1e-10);
}
