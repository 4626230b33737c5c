#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "qhist/decoherence.hpp"
#include "qhist/errors.hpp"
#include "qhist/io.hpp"
#include "qhist/verify.hpp"

using namespace qhist;

namespace {

const std::string kFixtureDir = QHIST_FIXTURE_DIR;

Pipeline load_fixture(const std::string& name) {
  return load_pipeline_file(kFixtureDir + "/" + name);
}

}  // namespace

TEST_CASE("uniform two-slit amplitudes match the worked values") {
  const Pipeline p = load_fixture("two_slit_uniform.json");
  const std::vector<Vector> amps = pure_path_amplitudes(p, p.pure_initial());
  REQUIRE(amps.size() == 4);
  // Chains end in a final projector, so each amplitude lives on one axis.
  CHECK(std::abs(amps[0][0] - Complex(0.5)) < 1e-15);
  CHECK(std::abs(amps[0][1]) < 1e-15);
  CHECK(std::abs(amps[1][1] - Complex(0.5)) < 1e-15);
  CHECK(std::abs(amps[2][0] - Complex(0.5)) < 1e-15);
  CHECK(std::abs(amps[3][1] - Complex(-0.5)) < 1e-15);
}

TEST_CASE("amplitude sharing agrees with per-path evaluation") {
  const Pipeline p = load_fixture("two_slit_uniform.json");
  const std::vector<Vector> shared = pure_path_amplitudes(p, p.pure_initial());
  for (std::size_t id = 0; id < 4; ++id) {
    const Vector direct = path_amplitude(p, p.pure_initial(), path_from_id(p, id));
    for (std::size_t i = 0; i < p.dim(); ++i) {
      CHECK(std::abs(shared[id][i] - direct[i]) == 0.0);
    }
  }
}

TEST_CASE("pairing table reproduces the worked two-slit entries") {
  const Pipeline p = load_fixture("two_slit_uniform.json");
  const DecoherenceMatrix m = decoherence_matrix(p);
  REQUIRE(m.order == 4);
  CHECK(std::abs(m(0, 0) - Complex(0.25)) < 1e-12);
  CHECK(std::abs(m(0, 2) - Complex(0.25)) < 1e-12);
  CHECK(std::abs(m(1, 3) - Complex(-0.25)) < 1e-12);
  CHECK(std::abs(m(0, 1)) < 1e-12);  // distinct final outcomes never interfere
  CHECK(std::abs(m(2, 3)) < 1e-12);

  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(m(j, k) == std::conj(m(k, j)));
      const Complex pair =
          decoherence_pair(p, path_from_id(p, j), path_from_id(p, k));
      CHECK(std::abs(m(j, k) - pair) < 1e-15);
    }
  }
}

TEST_CASE("zero-state two-slit has no interference") {
  const Pipeline p = load_fixture("two_slit_zero.json");
  const DecoherenceMatrix m = decoherence_matrix(p);
  CHECK(std::abs(m(0, 0) - Complex(0.5)) < 1e-12);
  CHECK(std::abs(m(1, 1) - Complex(0.5)) < 1e-12);
  CHECK(std::abs(m(2, 2)) < 1e-12);
  CHECK(std::abs(m(3, 3)) < 1e-12);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (j != k) CHECK(std::abs(m(j, k)) < 1e-12);
    }
  }
}

TEST_CASE("path measures equal the table diagonal without building the table") {
  const Pipeline p = load_fixture("two_slit_uniform.json");
  const std::vector<double> measures = path_measures(p);
  const DecoherenceMatrix m = decoherence_matrix(p);
  REQUIRE(measures.size() == m.order);
  for (std::size_t j = 0; j < m.order; ++j) {
    CHECK(measures[j] == doctest::Approx(m(j, j).real()).epsilon(1e-14));
    CHECK(measures[j] >= 0.0);
  }
}

TEST_CASE("initial state decomposition") {
  const Pipeline pure = load_fixture("two_slit_uniform.json");
  const std::vector<StateComponent> single = initial_components(pure);
  REQUIRE(single.size() == 1);
  CHECK(single[0].weight == doctest::Approx(1.0));

  // The maximally mixed state splits into two equal-weight components.
  Matrix half(2, 2);
  half(0, 0) = 0.5;
  half(1, 1) = 0.5;
  const Pipeline mixed(2, half, pure.steps());
  const std::vector<StateComponent> pair = initial_components(mixed);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].weight == doctest::Approx(0.5));
  CHECK(pair[1].weight == doctest::Approx(0.5));

  // A rank-1 density behaves exactly like its pure vector.
  const Matrix projector = outer_product(pure.pure_initial(), pure.pure_initial());
  const Pipeline rank1(2, projector, pure.steps());
  const DecoherenceMatrix from_density = decoherence_matrix(rank1);
  const DecoherenceMatrix from_vector = decoherence_matrix(pure);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(from_density(j, k) - from_vector(j, k)) < 1e-12);
    }
  }
}

TEST_CASE("mixed-state pairing agrees with the operator trace") {
  const Pipeline pure = load_fixture("two_slit_uniform.json");
  Matrix w(2, 2);
  w(0, 0) = 0.7;
  w(1, 1) = 0.3;
  const Pipeline mixed(2, w, pure.steps());
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      const Path a = path_from_id(mixed, j);
      const Path b = path_from_id(mixed, k);
      CHECK(std::abs(decoherence_pair(mixed, a, b) - trace_decoherence_pair(mixed, a, b)) <
            1e-12);
    }
  }
}

TEST_CASE("resource caps name the limit and the workaround") {
  const Pipeline p = load_fixture("two_slit_uniform.json");
  CHECK_THROWS_WITH_AS(decoherence_matrix(p, 2), doctest::Contains("pairs"),
                       ResourceError);
  CHECK_THROWS_AS(pure_path_amplitudes(p, p.pure_initial(), 2), ResourceError);
  CHECK_THROWS_AS(path_measures(p, 2), ResourceError);
}

TEST_CASE("amplitude evaluation validates state shape") {
  const Pipeline p = load_fixture("two_slit_uniform.json");
  Vector wrong(3);
  wrong[0] = 1.0;
  CHECK_THROWS_AS(path_amplitude(p, wrong, path_from_id(p, 0)), ShapeError);
}
