#include <gtest/gtest.h>

#include "symflow/scenarios.hpp"

using namespace symflow;

namespace {

Json c2_line(double a, double b) { return Json{{"frame", {{a}, {b}}}}; }

ScenarioResult run(const Json& j) { return run_scenario(parse_scenario(j, "test")); }

ErrorKind parse_error_kind(const Json& j) {
  try {
    parse_scenario_file(j);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IdentityViolation;
}

}  // namespace

TEST(Json, MatrixEntriesRealAndComplex) {
  Mat m = parse_matrix(Json::parse("[[1, [0, 2]], [[3, -1], 4.5]]"), "m");
  EXPECT_EQ(m(0, 0), cplx(1, 0));
  EXPECT_EQ(m(0, 1), cplx(0, 2));
  EXPECT_EQ(m(1, 0), cplx(3, -1));
  EXPECT_EQ(m(1, 1), cplx(4.5, 0));
  EXPECT_EQ(matrix_json(m), Json::parse("[[1.0, [0.0, 2.0]], [[3.0, -1.0], 4.5]]"));
}

TEST(Json, RaggedMatrixIsASchemaError) {
  try {
    parse_matrix(Json::parse("[[1, 0], [0]]"), "m");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
  }
}

TEST(Json, SpaceAndLagrangianForms) {
  SpacePtr s = parse_space("standard:1", "s", 1e-9);
  EXPECT_EQ(s->n, 1);
  Lagrangian l = parse_lagrangian(Json{{"phi", {{{0, -1}}}}}, s, "l", 1e-9);
  EXPECT_LT(subspace_distance(l, parse_lagrangian(c2_line(1, 1), s, "l", 1e-9)), 1e-12);
  SpacePtr g = parse_space(Json::parse("[[[0, 1], 0], [0, [0, -1]]]"), "s", 1e-9);
  EXPECT_EQ(g->n, 1);
  EXPECT_THROW(parse_space("standard:0", "s", 1e-9), Error);
  EXPECT_THROW(parse_space("standard:2x", "s", 1e-9), Error);
  EXPECT_THROW(parse_space("nonstandard", "s", 1e-9), Error);
  EXPECT_THROW(parse_lagrangian(Json::object(), s, "l", 1e-9), Error);
  try {
    parse_lagrangian(Json{{"space", "standard:2"}, {"frame", {{1}, {0}}}}, s, "l", 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Scenario, SpaceIsTakenFromTheLagrangians) {
  Json v{{"space", "standard:1"}, {"frame", {{1}, {0}}}};
  Json j{{"op", "tsig"}, {"inputs", {{"V", v}, {"W", c2_line(1, 1)}, {"U", c2_line(0, 1)}}}};
  EXPECT_EQ(run(j).report["values"]["value"], 1);
  Json none{{"op", "tsig"}, {"inputs", {{"V", c2_line(1, 0)}, {"W", c2_line(1, 1)}, {"U", c2_line(0, 1)}}}};
  EXPECT_EQ(run(none).outcome, Outcome::InputError);
}

TEST(Scenario, TsigOfTheComplexLineTriple) {
  Json j{{"name", "c2"},
         {"op", "tsig"},
         {"inputs",
          {{"space", {{0, -1}, {1, 0}}}, {"V", c2_line(1, 0)}, {"W", c2_line(1, 1)}, {"U", c2_line(0, 1)}}}};
  ScenarioResult r = run(j);
  EXPECT_EQ(r.report["values"]["value"], 1);
  EXPECT_TRUE(r.report["pass"].get<bool>());
  EXPECT_EQ(r.outcome, Outcome::Pass);
}

TEST(Scenario, TauWAgainstIdentity) {
  Json u = Json::parse("[[[0, 1], 0], [0, -1]]");
  Json j{{"op", "tau_w"}, {"inputs", {{"U", Json::parse("[[1, 0], [0, 1]]")}, {"V", u}}}};
  ScenarioResult r = run(j);
  EXPECT_EQ(r.report["values"]["value"], 0);
  EXPECT_EQ(r.outcome, Outcome::Pass);
}

TEST(Scenario, UnknownFieldsAreRejected) {
  EXPECT_EQ(parse_error_kind(Json{{"op", "tsig"}, {"bogus", 1}}), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(Json{{"op", "no_such_op"}}), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(Json{{"op", "tsig"}, {"tolerances", {{"other", 1}}}}), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(Json{{"scenarios", Json::array()}, {"extra", true}}), ErrorKind::SchemaError);
  // Unknown inputs surface when the scenario runs.
  ScenarioResult r = run(Json{{"op", "eta"}, {"inputs", {{"h", {{1}}}, {"junk", 0}}}});
  EXPECT_EQ(r.outcome, Outcome::InputError);
  EXPECT_EQ(r.report["error"]["kind"], "SchemaError");
}

TEST(Scenario, MalformedMatrixIsAnInputError) {
  ScenarioResult r = run(Json{{"op", "eta"}, {"inputs", {{"h", Json::parse("[[1, 0], [0]]")}}}});
  EXPECT_EQ(r.outcome, Outcome::InputError);
  EXPECT_EQ(exit_code(r.outcome), 2);
}

TEST(Scenario, PreconditionFailuresAreInputErrors) {
  ScenarioResult r = run(Json{{"op", "tau_w"}, {"inputs", {{"U", {{2}}}, {"V", {{1}}}}}});
  EXPECT_EQ(r.outcome, Outcome::InputError);
  EXPECT_EQ(r.report["error"]["kind"], "NotUnitary");
}

TEST(Scenario, FileShapes) {
  Json one{{"op", "eta"}, {"inputs", {{"h", {{1}}}}}};
  EXPECT_EQ(parse_scenario_file(one).scenarios.size(), 1u);
  EXPECT_EQ(parse_scenario_file(Json::array({one, one})).scenarios.size(), 2u);
  ScenarioFile f = parse_scenario_file(Json{{"scenarios", {one}}, {"pretty", true}, {"tol", 1e-7}});
  EXPECT_TRUE(f.pretty.value_or(false));
  EXPECT_DOUBLE_EQ(f.scenarios[0].tol, 1e-7);
  // A command-line tolerance wins over the file.
  EXPECT_DOUBLE_EQ(parse_scenario_file(Json{{"scenarios", {one}}, {"tol", 1e-7}}, 1e-6).scenarios[0].tol, 1e-6);
}

TEST(Scenario, ReportsAreDeterministic) {
  Json j{{"op", "wind"},
         {"inputs",
          {{"path",
            {{"parametric",
              {{"kind", "exp-interp"}, {"start", {{1, 0}, {0, 1}}}, {"generator", {{3, 1}, {1, -2}}}, {"t1", 2.0}}}}}}}};
  EXPECT_EQ(run(j).report.dump(), run(j).report.dump());
}

TEST(Scenario, PathForms) {
  // exp(i 3 pi t) crosses -1 once, clockwise arrivals count -1.
  Json rot{{"op", "wind"}, {"inputs", {{"path", {{"parametric", {{"kind", "rotation"}, {"start", {{1}}}, {"rate", 3 * pi}}}}}}}};
  ScenarioResult r = run(rot);
  EXPECT_EQ(r.outcome, Outcome::Pass) << r.report.dump();
  const int by_rotation = r.report["values"]["value"];
  Json samples = Json::array();
  for (int k = 0; k <= 40; ++k) {
    cplx z = std::exp(cplx(0, 3 * pi * k / 40.0));
    samples.push_back(Json{k / 40.0, Json{{Json{z.real(), z.imag()}}}});
  }
  Json sam{{"op", "wind"}, {"inputs", {{"path", {{"samples", samples}}}}}};
  EXPECT_EQ(run(sam).report["values"]["value"], by_rotation);
  EXPECT_EQ(std::abs(by_rotation), 1);

  Json late = samples;
  late[0][0] = 1.5;
  EXPECT_EQ(run(Json{{"op", "wind"}, {"inputs", {{"path", {{"samples", late}}}}}}).outcome, Outcome::InputError);
  Json both{{"samples", samples}, {"parametric", {{"kind", "rotation"}, {"start", {{1}}}, {"rate", 1}}}};
  EXPECT_EQ(run(Json{{"op", "wind"}, {"inputs", {{"path", both}}}}).outcome, Outcome::InputError);
  Json odd{{"parametric", {{"kind", "spiral"}, {"start", {{1}}}}}};
  EXPECT_EQ(run(Json{{"op", "wind"}, {"inputs", {{"path", odd}}}}).outcome, Outcome::InputError);
}

TEST(Scenario, HermitianPathForms) {
  Json lin{{"parametric", {{"kind", "exp-interp"}, {"start", {{-1, 0}, {0, 2}}}, {"end", {{1, 0}, {0, -3}}}}}};
  ScenarioResult r = run(Json{{"op", "spectral_flow"}, {"inputs", {{"path", lin}}}});
  EXPECT_EQ(r.outcome, Outcome::Pass) << r.report.dump();
  EXPECT_EQ(r.report["values"]["value"], 0);
  Json arc{{"parametric", {{"kind", "rotation"}, {"start", {{-1}}}, {"end", {{1}}}}}};
  EXPECT_EQ(run(Json{{"op", "spectral_flow"}, {"inputs", {{"path", arc}}}}).report["values"]["value"], 1);
  Json sam{{"samples", Json::array({Json{0.0, {{-1}}}, Json{1.0, {{1}}}})}};
  EXPECT_EQ(run(Json{{"op", "spectral_flow"}, {"inputs", {{"path", sam}}}}).report["values"]["value"], 1);
}

TEST(Scenario, MaslovOfTheRotatedLine) {
  // gamma e^{t gamma} span(1, 0) meets span(1, 1) once, at t = 3 pi / 4.
  Json f{{"parametric", {{"kind", "rotation"}, {"start", {{"space", "standard:1"}, {"frame", {{1}, {0}}}}}, {"t1", pi}}}};
  Json g{{"parametric", {{"kind", "constant"}, {"start", {{"frame", {{1}, {1}}}}}, {"t1", pi}}}};
  ScenarioResult r = run(Json{{"op", "maslov"}, {"inputs", {{"f", f}, {"g", g}}}});
  EXPECT_EQ(r.outcome, Outcome::Pass) << r.report.dump();
  EXPECT_EQ(std::abs(r.report["values"]["value"].get<int>()), 1);
  Json short_g{{"parametric", {{"kind", "constant"}, {"start", {{"frame", {{1}, {1}}}}}}}};
  EXPECT_EQ(run(Json{{"op", "maslov"}, {"inputs", {{"f", f}, {"g", short_g}}}}).outcome, Outcome::InputError);
}

TEST(Scenario, WallTimeOnlyWhenRequested) {
  Json j{{"op", "eta"}, {"inputs", {{"h", {{1}}}}}};
  Scenario s = parse_scenario(j, "t");
  EXPECT_FALSE(run_scenario(s).report.contains("wall_time_ms"));
  EXPECT_TRUE(run_scenario(s, true).report.contains("wall_time_ms"));
}

TEST(Scenario, ModelSpectrumSymmetry) {
  Json j{{"op", "model_spectrum"},
         {"inputs",
          {{"gamma", "standard:1"},
           {"A", {{0, 0}, {0, 0}}},
           {"geometry", {{"interval", 1.0}}},
           {"boundary", {{"P", c2_line(1, 0)}, {"Q", c2_line(1, 1)}}},
           {"window", 10}}}};
  ScenarioResult r = run(j);
  EXPECT_EQ(r.outcome, Outcome::Pass) << r.report.dump();
  EXPECT_FALSE(r.report["values"]["eigenvalues"].empty());
  j["inputs"]["geometry"] = Json{{"interval", 1.0}, {"circle", 2.0}};
  EXPECT_EQ(run(j).outcome, Outcome::InputError);
  j["inputs"]["geometry"] = Json{{"circle", 2.0}};
  EXPECT_EQ(run(j).outcome, Outcome::Pass);
}

TEST(Scenario, ModelGlueOnACutCircle) {
  Json frame = Json::parse("[[1, 0], [0, 1], [1, 0], [0, 1]]");
  Json j{{"op", "model_glue"},
         {"inputs",
          {{"gamma", "standard:1"},
           {"A", {{0, 0}, {0, 0}}},
           {"geometry", {{"circle", 2.0}}},
           {"cut", 0.7},
           {"boundary", {{"P", {{"frame", frame}}}}},
           {"eta", {{"N_max", 1000}, {"tol", 1e-3}}}}}};
  ScenarioResult r = run(j);
  EXPECT_EQ(r.outcome, Outcome::Pass) << r.report.dump();
  j["inputs"]["cut"] = 2.5;
  EXPECT_EQ(run(j).outcome, Outcome::InputError);
}

TEST(Scenario, SuiteOpUsesTheSeed) {
  Json j{{"op", "suite"}, {"seed", 5}, {"inputs", {{"suite", "tauw"}, {"count", 5}}}};
  ScenarioResult r = run(j);
  EXPECT_EQ(r.outcome, Outcome::Pass);
  EXPECT_EQ(r.report["values"]["suite"]["seed"], 5);
}
