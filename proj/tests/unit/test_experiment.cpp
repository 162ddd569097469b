#include <string>

#include "doctest.h"
#include "ppt/experiment.hpp"

using namespace ppt;

namespace {

const Json& find_result(const Report& r, const std::string& name) {
  for (const auto& e : r.results) {
    if (e["name"] == name) return e;
  }
  FAIL("no result named " << name);
  static const Json none;
  return none;
}

}  // namespace

TEST_CASE("minimal bound spec") {
  const ExperimentSpec spec = parse_experiment_spec_text(
      R"({"kind": "bound", "parameters": {"family": "poisson", "p": "const:2", "window": [0, 1]}})");
  const Report r = run_experiment(spec);
  CHECK(find_result(r, "bound_tv_poisson")["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.passed);
  CHECK(r.library_version == "0.1.0");
}

TEST_CASE("strict parsing names the offending field") {
  CHECK_THROWS_WITH_AS(parse_experiment_spec_text(R"({"kind": "bound", "foo": 1})"),
                       doctest::Contains("foo"), Error);
  CHECK_THROWS_WITH_AS(parse_experiment_spec_text(R"({"kind": "nope"})"), doctest::Contains("kind"), Error);
  CHECK_THROWS_WITH_AS(parse_experiment_spec_text(R"({"kind": "bound", "n_samples": -3})"),
                       doctest::Contains("n_samples"), Error);
  CHECK_THROWS_WITH_AS(parse_experiment_spec_text(R"({"kind": "bound", "seed": {"seed": 1, "x": 2}})"),
                       doctest::Contains("seed.x"), Error);
  CHECK_THROWS_AS(parse_experiment_spec_text("{not json"), Error);

  const ExperimentSpec spec = parse_experiment_spec_text(
      R"({"kind": "bound", "parameters": {"family": "poisson", "bogus": true}})");
  CHECK_THROWS_WITH_AS(run_experiment(spec), doctest::Contains("parameters.bogus"), Error);
}

TEST_CASE("downstream errors carry the spec echo") {
  const ExperimentSpec spec = parse_experiment_spec_text(
      R"({"kind": "bound", "parameters": {"family": "poisson", "p": "const:-1"}})");
  CHECK_THROWS_WITH_AS(run_experiment(spec), doctest::Contains("[spec: "), Error);
}

TEST_CASE("spec round-trip") {
  const ExperimentSpec spec = parse_experiment_spec_text(
      R"({"kind": "estimate", "parameters": {"family": "gibbs", "metric": "rho1"},
          "seed": {"seed": 9, "stream_id": 4}, "n_samples": 50, "output_path": "out.json"})");
  CHECK(parse_experiment_spec(to_json(spec)) == spec);
  CHECK(spec.seed == SeedSpec{9, 4});
  const ExperimentSpec bare = parse_experiment_spec_text(R"({"kind": "tail", "seed": 3})");
  CHECK(parse_experiment_spec(to_json(bare)) == bare);
  CHECK_FALSE(bare.n_samples.has_value());
}

TEST_CASE("identical specs give byte-identical reports") {
  const ExperimentSpec spec = parse_experiment_spec_text(
      R"({"kind": "sample", "parameters": {"process": "cox", "mixer": {"family": "gamma", "shape": 2, "scale": 0.5},
          "keep": 2}, "seed": 5, "n_samples": 2000})");
  const RunOptions opts{false};
  CHECK(serialize(run_experiment(spec, opts)) == serialize(run_experiment(spec, opts)));
}

TEST_CASE("every kind runs") {
  const char* specs[] = {
      R"({"kind": "distance", "parameters": {"omega": [[0.0], [1.0]], "eta": [[0.2], [1.1]]}})",
      R"({"kind": "sample", "parameters": {"process": "gibbs", "potential": "const:0.1"}, "n_samples": 200})",
      R"({"kind": "sample", "parameters": {"process": "superposition", "p": "poly:0,2"}, "n_samples": 200})",
      R"({"kind": "sample", "parameters": {"process": "timechange", "u": "damped:1,0.5"}, "n_samples": 200})",
      R"({"kind": "bound", "parameters": {"family": "gibbs", "potential": "exp:1,-1"}})",
      R"({"kind": "bound", "parameters": {"family": "halfline", "u": "rational:1"}})",
      R"({"kind": "bound", "parameters": {"family": "timechange",
          "marks": [{"u": "rational:1", "weight": 0.5}, {"u": "damped:1,1", "weight": 0.5}]}})",
      R"({"kind": "bound", "parameters": {"family": "cox", "mixer": {"family": "two_point", "low": 0.5, "high": 1.5}},
          "n_samples": 1000})",
      R"({"kind": "estimate", "parameters": {"family": "poisson"}, "n_samples": 40})",
      R"({"kind": "estimate", "parameters": {"family": "timechange"}, "n_samples": 40})",
      R"({"kind": "tail", "parameters": {"masses": [1], "r": [1, 2]}})",
      R"({"kind": "isoperimetry", "parameters": {"events": [{"relation": "at_most", "threshold": 1}]},
          "n_samples": 2000})",
  };
  for (const char* text : specs) {
    CAPTURE(text);
    const Report r = run_experiment(parse_experiment_spec_text(text));
    CHECK(r.passed);
    CHECK_FALSE(r.results.empty());
  }
}

TEST_CASE("distance kind") {
  const Report r = run_experiment(parse_experiment_spec_text(
      R"({"kind": "distance", "parameters": {"omega": [[0.0]], "eta": [[0.0], [1.0]]}})"));
  CHECK(find_result(r, "rho1")["value"] == Json(1.0));
  CHECK(find_result(r, "rho2")["value"] == Json("inf"));
  CHECK(find_result(r, "rho1_normalized")["value"].get<double>() == 1.0);
}

TEST_CASE("tail kind emits a CSV side table") {
  const Report r = run_experiment(parse_experiment_spec_text(
      R"({"kind": "tail", "parameters": {"csv_path": "grid.csv"}})"));
  CHECK(r.csv_path == "grid.csv");
  CHECK(r.csv.rfind("mass,r,exact", 0) == 0);
}

TEST_CASE("verify scenarios are listed and unknown ones rejected") {
  CHECK(verify_scenarios().size() == 7);
  CHECK_THROWS_WITH_AS(run_experiment(parse_experiment_spec_text(
                           R"({"kind": "verify", "parameters": {"scenario": "nope"}})")),
                       doctest::Contains("parameters.scenario"), Error);
}

TEST_CASE("isoperimetry verify flags the factor-two discrepancy") {
  const Report r = run_experiment(parse_experiment_spec_text(
      R"({"kind": "verify", "parameters": {"scenario": "isoperimetry"}, "n_samples": 5000, "seed": 1})"));
  CHECK(r.passed);
  CHECK(find_result(r, "isoperimetric_discrepancy")["type"] == "flag");
}
