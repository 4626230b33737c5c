#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "qhist/errors.hpp"
#include "qhist/io.hpp"
#include "qhist/qmeasure.hpp"

using namespace qhist;

namespace {

const std::string kFixtureDir = QHIST_FIXTURE_DIR;

QMeasureContext uniform_ctx() {
  return QMeasureContext(load_pipeline_file(kFixtureDir + "/two_slit_uniform.json"));
}

QMeasureContext zero_ctx() {
  return QMeasureContext(load_pipeline_file(kFixtureDir + "/two_slit_zero.json"));
}

}  // namespace

TEST_CASE("uniform two-slit measures") {
  const QMeasureContext ctx = uniform_ctx();
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(measure_path(ctx, j) == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK(measure(ctx, Event{}) == 0.0);
  CHECK(measure(ctx, full_event(ctx.pipeline())) == doctest::Approx(1.0));

  CHECK(measure(ctx, Event::from_ids({0, 1})) == doctest::Approx(0.5));
  CHECK(measure(ctx, Event::from_ids({0, 2})) == doctest::Approx(1.0));
  CHECK(measure(ctx, Event::from_ids({0, 3})) == doctest::Approx(0.5));
  CHECK(measure(ctx, Event::from_ids({1, 2})) == doctest::Approx(0.5));
  CHECK(std::abs(measure(ctx, Event::from_ids({1, 3}))) < 1e-12);
  CHECK(measure(ctx, Event::from_ids({2, 3})) == doctest::Approx(0.5));

  CHECK(measure(ctx, Event::from_ids({0, 1, 2})) == doctest::Approx(1.25));
  CHECK(measure(ctx, Event::from_ids({0, 1, 3})) == doctest::Approx(0.25));
  CHECK(measure(ctx, Event::from_ids({0, 2, 3})) == doctest::Approx(1.25));
  CHECK(measure(ctx, Event::from_ids({1, 2, 3})) == doctest::Approx(0.25));

  const std::vector<double> all = all_path_measures(ctx);
  REQUIRE(all.size() == 4);
  CHECK(all[2] == doctest::Approx(0.25));
}

TEST_CASE("interference terms of the uniform two-slit") {
  const QMeasureContext ctx = uniform_ctx();
  CHECK(interference_pair(ctx, 0, 2) == doctest::Approx(0.5));
  CHECK(interference_pair(ctx, 1, 3) == doctest::Approx(-0.5));
  CHECK(std::abs(interference_pair(ctx, 0, 1)) < 1e-12);
  CHECK(std::abs(interference_pair(ctx, 0, 3)) < 1e-12);
  CHECK(std::abs(interference_pair(ctx, 1, 2)) < 1e-12);
  CHECK(std::abs(interference_pair(ctx, 2, 3)) < 1e-12);
  CHECK(std::abs(total_interference(ctx)) < 1e-12);

  // The general four-term definition agrees on singletons and reduces to
  // -2 mu(A) when both arguments are the same event.
  CHECK(interference(ctx, Event::from_ids({0}), Event::from_ids({2})) ==
        doctest::Approx(0.5));
  CHECK(interference(ctx, Event::from_ids({0, 2}), Event::from_ids({0, 2})) ==
        doctest::Approx(-2.0));

  CHECK_THROWS_AS(interference_pair(ctx, 1, 1), PreconditionError);
}

TEST_CASE("measure decomposition splits diagonal and interference") {
  const QMeasureContext ctx = uniform_ctx();
  const MeasureDecomposition dec = decompose_measure(ctx, Event::from_ids({0, 2}));
  CHECK(dec.total == doctest::Approx(1.0));
  CHECK(dec.diagonal == doctest::Approx(0.5));
  CHECK(dec.interference == doctest::Approx(0.5));
  CHECK(std::abs(dec.total - dec.diagonal - dec.interference) < 1e-14);
}

TEST_CASE("zero-state two-slit is a classical measure") {
  const QMeasureContext ctx = zero_ctx();
  CHECK(measure_path(ctx, 0) == doctest::Approx(0.5));
  CHECK(measure_path(ctx, 1) == doctest::Approx(0.5));
  CHECK(std::abs(measure_path(ctx, 2)) < 1e-12);
  CHECK(std::abs(measure_path(ctx, 3)) < 1e-12);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = j + 1; k < 4; ++k) {
      CHECK(std::abs(interference_pair(ctx, j, k)) < 1e-12);
    }
  }
  // Clamping keeps vanishing events at exactly zero, never below.
  CHECK(measure(ctx, Event::from_ids({2, 3})) >= 0.0);
}

TEST_CASE("grade-2 additivity holds on disjoint triples") {
  const QMeasureContext ctx = uniform_ctx();
  CHECK(check_grade2_additivity(ctx, Event::from_ids({0}), Event::from_ids({1}),
                                Event::from_ids({2})) < 1e-14);
  CHECK(check_grade2_additivity(ctx, Event::from_ids({0, 1}), Event::from_ids({2}),
                                Event::from_ids({3})) < 1e-14);
  CHECK_THROWS_AS(check_grade2_additivity(ctx, Event::from_ids({0, 1}),
                                          Event::from_ids({1}), Event::from_ids({2})),
                  PreconditionError);
}

TEST_CASE("partition identities") {
  const QMeasureContext ctx = uniform_ctx();
  std::vector<Event> singletons;
  for (std::size_t j = 0; j < 4; ++j) singletons.push_back(Event::from_ids({j}));
  const PartitionResiduals r = check_partition_identities(ctx, singletons);
  CHECK(r.union_expansion < 1e-14);
  CHECK(r.difference_identity < 1e-14);

  const PartitionResiduals pair = check_partition_identities(
      ctx, {Event::from_ids({0, 2}), Event::from_ids({1, 3})});
  CHECK(pair.union_expansion < 1e-14);
  CHECK(pair.difference_identity < 1e-14);
}

TEST_CASE("regularity of vanishing parts and vanishing unions") {
  const QMeasureContext zero = zero_ctx();
  // mu({10}) = 0, so attaching it to any disjoint event leaves the measure.
  const RegularityReport transparent =
      check_regularity(zero, Event::from_ids({2}), Event::from_ids({0, 1}));
  CHECK(transparent.vanishing_part_fired);
  CHECK(transparent.union_residual <= transparent.derived_tolerance);
  CHECK(transparent.pass);

  // mu({10,11}) = 0 with disjoint parts, so the parts have equal measure.
  const RegularityReport split =
      check_regularity(zero, Event::from_ids({2}), Event::from_ids({3}));
  CHECK(split.vanishing_union_fired);
  CHECK(split.split_residual <= split.derived_tolerance);
  CHECK(split.pass);

  const QMeasureContext uniform = uniform_ctx();
  // mu({01}) = 1/4 > 0 and mu({01,11}) = 0: the union vanishes while the
  // parts are individually large, and regularity still forces them equal.
  const RegularityReport destructive =
      check_regularity(uniform, Event::from_ids({1}), Event::from_ids({3}));
  CHECK(destructive.vanishing_union_fired);
  CHECK_FALSE(destructive.vanishing_part_fired);
  CHECK(destructive.split_residual <= destructive.derived_tolerance);
  CHECK(destructive.pass);

  CHECK_THROWS_AS(
      check_regularity(uniform, Event::from_ids({0, 1}), Event::from_ids({1})),
      PreconditionError);
}

TEST_CASE("pair bounds brace the doubleton measures") {
  const QMeasureContext ctx = uniform_ctx();
  // Equal path measures make the bounds [0, 1]; both extremes are attained.
  const PairBoundsReport constructive = check_pair_bounds(ctx, 0, 2);
  CHECK(constructive.lower == doctest::Approx(0.0));
  CHECK(constructive.upper == doctest::Approx(1.0));
  CHECK(constructive.pair_measure == doctest::Approx(1.0));
  CHECK(constructive.pass);

  const PairBoundsReport destructive = check_pair_bounds(ctx, 1, 3);
  CHECK(destructive.pair_measure == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(destructive.pass);

  CHECK_THROWS_AS(check_pair_bounds(ctx, 2, 2), PreconditionError);
}

TEST_CASE("homogeneous events use the grouped-projector chain") {
  const QMeasureContext ctx = uniform_ctx();
  HomogeneousEvent first_slit;
  first_slit.factors = {{0}, {0, 1}};
  CHECK(measure_homogeneous(ctx, first_slit) == doctest::Approx(0.5));

  HomogeneousEvent whole;
  whole.factors = {{0, 1}, {0, 1}};
  CHECK(measure_homogeneous(ctx, whole) == doctest::Approx(1.0));

  // The grouped chain and the expanded path sum agree even when the
  // expansion carries interference.
  HomogeneousEvent constructive;
  constructive.factors = {{0, 1}, {0}};
  CHECK(measure_homogeneous(ctx, constructive) == doctest::Approx(1.0));
  CHECK(measure(ctx, expand_homogeneous(ctx.pipeline(), constructive)) ==
        doctest::Approx(1.0));

  // Mixed initial states take the expansion route and must agree too.
  Matrix half(2, 2);
  half(0, 0) = 0.5;
  half(1, 1) = 0.5;
  const QMeasureContext mixed(
      Pipeline(2, half, ctx.pipeline().steps()));
  CHECK(measure_homogeneous(mixed, constructive) ==
        doctest::Approx(measure(mixed, expand_homogeneous(mixed.pipeline(),
                                                          constructive))));
}

TEST_CASE("final-step additivity across outcome groupings") {
  const QMeasureContext ctx = uniform_ctx();
  CHECK(check_final_step_additivity(ctx, {{0}}, {{0}, {1}}) < 1e-14);
  CHECK(check_final_step_additivity(ctx, {{0, 1}}, {{0, 1}}) < 1e-14);
  CHECK_THROWS_AS(check_final_step_additivity(ctx, {}, {{0}, {1}}),
                  PreconditionError);
  CHECK_THROWS_AS(check_final_step_additivity(ctx, {{0}}, {{0}, {0}}),
                  PreconditionError);
}

TEST_CASE("context construction respects the matrix cap") {
  CHECK_THROWS_AS(
      QMeasureContext(load_pipeline_file(kFixtureDir + "/two_slit_uniform.json"),
                      kDefaultTolerance, 2),
      ResourceError);
}
