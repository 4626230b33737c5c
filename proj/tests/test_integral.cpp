#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "qhist/errors.hpp"
#include "qhist/integral.hpp"
#include "qhist/io.hpp"
#include "qhist/verify.hpp"

using namespace qhist;

namespace {

const std::string kFixtureDir = QHIST_FIXTURE_DIR;

QMeasureContext uniform_ctx() {
  return QMeasureContext(load_pipeline_file(kFixtureDir + "/two_slit_uniform.json"));
}

FunctionTable table(std::vector<double> values) {
  FunctionTable f;
  f.values = std::move(values);
  return f;
}

}  // namespace

TEST_CASE("worked two-slit integrals") {
  const QMeasureContext ctx = uniform_ctx();
  const double root2 = std::sqrt(2.0);

  const FunctionTable path_length =
      load_function_table_file(ctx.pipeline(), kFixtureDir + "/path_length_f.json");
  const IntegralResult f = integrate(ctx, path_length);
  CHECK(f.value == doctest::Approx((2.0 + 2.0 * root2) / 4.0).epsilon(1e-12));
  CHECK(f.agreement_residual < 1e-12);

  const FunctionTable staircase =
      load_function_table_file(ctx.pipeline(), kFixtureDir + "/staircase_g.json");
  const IntegralResult g = integrate(ctx, staircase);
  CHECK(g.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.by_level_set == doctest::Approx(g.by_pairwise).epsilon(1e-12));
}

TEST_CASE("constants and indicators reduce to measures") {
  const QMeasureContext ctx = uniform_ctx();
  CHECK(integrate(ctx, table({1, 1, 1, 1})).value == doctest::Approx(1.0));
  CHECK(integrate(ctx, table({0, 0, 0, 0})).value == 0.0);

  const Event constructive = Event::from_ids({0, 2});
  CHECK(integrate_level_set(ctx, indicator(ctx.pipeline(), constructive)) ==
        doctest::Approx(measure(ctx, constructive)));
  const Event destructive = Event::from_ids({1, 3});
  CHECK(std::abs(integrate_level_set(ctx, indicator(ctx.pipeline(), destructive))) <
        1e-12);
}

TEST_CASE("level sets collapse tied values") {
  const QMeasureContext ctx = uniform_ctx();
  // Two distinct levels: mu(everything) + mu({a2,b1 and a2,b2}).
  const double expected = 1.0 + measure(ctx, Event::from_ids({2, 3}));
  CHECK(integrate_level_set(ctx, table({1, 1, 2, 2})) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("signed split against hand-computed level sets") {
  const QMeasureContext ctx = uniform_ctx();
  // f = (1, -1, 2, -2): the positive part integrates to
  // mu({00,10}) + mu({10}) = 1.25, the negative part to
  // mu({01,11}) + mu({11}) = 0.25.
  const IntegralResult r = integrate(ctx, table({1, -1, 2, -2}));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.agreement_residual < 1e-12);
  CHECK(integrate_level_set(ctx, table({1, 0, 2, 0})) ==
        doctest::Approx(1.25).epsilon(1e-12));
  CHECK(integrate_level_set(ctx, table({0, 1, 0, 2})) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pairwise form requires a nonnegative function") {
  const QMeasureContext ctx = uniform_ctx();
  CHECK_THROWS_AS(integrate_pairwise(ctx, table({1, -1, 1, 1})), PreconditionError);
  CHECK(integrate_pairwise(ctx, table({0, 1, 1, 2})) == doctest::Approx(0.5));
}

TEST_CASE("tables are validated before integrating") {
  const QMeasureContext ctx = uniform_ctx();
  CHECK_THROWS_AS(integrate(ctx, table({1, 2, 3})), ShapeError);
  CHECK_THROWS_AS(integrate(ctx, table({1, 2, 3, std::nan("")})), ValidationError);
}

TEST_CASE("functional laws hold on the fixture") {
  const QMeasureContext ctx = uniform_ctx();
  const FunctionalConditionsReport report = check_functional_conditions(ctx, 20, 99);
  CHECK(report.simple_pair_form < 1e-9);
  CHECK(report.disjoint_support_additivity < 1e-9);
  CHECK(report.homogeneity < 1e-9);
  CHECK(report.signed_split < 1e-9);
  CHECK(report.simple_chain_expansion < 1e-9);
  CHECK(report.max_residual() < 1e-9);
  CHECK_THROWS_AS(check_functional_conditions(ctx, 0, 1), PreconditionError);
}

TEST_CASE("homogeneity covers both signs") {
  const QMeasureContext ctx = uniform_ctx();
  const FunctionTable f = table({0.5, 1.5, 2.5, 0.25});
  const double base = integrate(ctx, f).value;
  for (double alpha : {-2.0, -0.5, 0.0, 0.5, 3.0}) {
    FunctionTable scaled = f;
    for (double& v : scaled.values) v *= alpha;
    CHECK(integrate(ctx, scaled).value ==
          doctest::Approx(alpha * base).epsilon(1e-12));
  }
}

TEST_CASE("interference makes the integral nonlinear") {
  const QMeasureContext ctx = uniform_ctx();
  const auto witness = demonstrate_nonlinearity(ctx);
  REQUIRE(witness.has_value());
  CHECK(witness->defect > kNonlinearityThreshold);

  // Both algorithms confirm all three integrals independently.
  CHECK(witness->integral_f.agreement_residual < 1e-9);
  CHECK(witness->integral_g.agreement_residual < 1e-9);
  CHECK(witness->integral_sum.agreement_residual < 1e-9);

  // The defect is visible through either algorithm alone.
  const double by_level = std::abs(witness->integral_sum.by_level_set -
                                   witness->integral_f.by_level_set -
                                   witness->integral_g.by_level_set);
  const double by_pairwise = std::abs(witness->integral_sum.by_pairwise -
                                      witness->integral_f.by_pairwise -
                                      witness->integral_g.by_pairwise);
  CHECK(by_level > kNonlinearityThreshold);
  CHECK(by_pairwise > kNonlinearityThreshold);

  // Witness functions come from the {0, 1, 2} grid and cover every path.
  REQUIRE(witness->f.values.size() == 4);
  REQUIRE(witness->g.values.size() == 4);
  for (double v : witness->f.values) CHECK((v == 0.0 || v == 1.0 || v == 2.0));
  for (double v : witness->g.values) CHECK((v == 0.0 || v == 1.0 || v == 2.0));

  // Recomputing from scratch reproduces the reported integrals.
  FunctionTable sum;
  sum.values.resize(4);
  for (std::size_t i = 0; i < 4; ++i) {
    sum.values[i] = witness->f.values[i] + witness->g.values[i];
  }
  CHECK(integrate(ctx, sum).value ==
        doctest::Approx(witness->integral_sum.value).epsilon(1e-12));
}

TEST_CASE("classical pipelines admit no nonlinearity witness") {
  const QMeasureContext zero(
      load_pipeline_file(kFixtureDir + "/two_slit_zero.json"));
  CHECK_FALSE(demonstrate_nonlinearity(zero).has_value());

  const QMeasureContext diagonal(diagonal_classical_pipeline());
  CHECK_FALSE(demonstrate_nonlinearity(diagonal).has_value());

  // On a classical measure the integral is the plain expectation.
  const FunctionTable f = table({0.3, 1.7, 0.0, 2.2});
  double expectation = 0.0;
  const std::vector<double> mu = all_path_measures(zero);
  for (std::size_t i = 0; i < 4; ++i) expectation += f.values[i] * mu[i];
  CHECK(integrate(zero, f).value == doctest::Approx(expectation).epsilon(1e-12));
}
