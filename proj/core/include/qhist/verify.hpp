#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qhist/pipeline.hpp"
#include "qhist/rng.hpp"

namespace qhist {

/// Hard ceilings for the random-pipeline generator; configs beyond these
/// are rejected rather than attempted.
inline constexpr std::size_t kMaxGeneratorDim = 16;
inline constexpr std::size_t kMaxGeneratorSteps = 8;
inline constexpr int kMaxGeneratorTrials = 1000000;

/// Knobs for random pipeline generation and the property suite.
struct GeneratorConfig {
  std::uint64_t seed = 1729;
  int trials = 200;
  std::size_t dim_min = 2;
  std::size_t dim_max = 8;
  std::size_t steps_min = 1;
  std::size_t steps_max = 4;
  std::size_t max_outcomes = 0;  ///< Per-step outcome cap; 0 means up to dim.
  double mixed_state_fraction = 0.3;
  std::size_t max_paths = 1024;  ///< Per-pipeline path budget (full-matrix safe).

  /// Throws ValidationError naming the out-of-range field.
  void validate() const;
};

/// Approximately Haar-distributed unitary: a matrix of independent complex
/// Gaussians orthonormalized column by column.
Matrix random_unitary(Rng& rng, std::size_t d);

/// Random k-outcome measurement: a random orthonormal basis partitioned
/// into k nonempty groups, each group summed into one projector.
/// Labels are "o1".."ok". Requires 1 <= k <= d.
Pvm random_pvm(Rng& rng, std::size_t d, std::size_t k);

/// Gaussian vector normalized to unit norm.
Vector random_unit_vector(Rng& rng, std::size_t d);

/// Random convex combination of at most d pure projectors.
Matrix random_density(Rng& rng, std::size_t d);

/// Random validated pipeline within the config ranges; the product of
/// per-step outcome counts never exceeds cfg.max_paths.
Pipeline random_pipeline(const GeneratorConfig& cfg, Rng& rng);

/// Literal operator-product evaluation of the pairing of two paths:
/// builds both chain operators as full matrices and evaluates
/// tr(W L1^dagger L2). Independent of the amplitude-based engine; kept as
/// a cross-check oracle, not a production path.
Complex trace_decoherence_pair(const Pipeline& pipeline, const Path& w1,
                               const Path& w2);

/// The minimal interferometer used by demos, fixtures and the suite:
/// dimension 2; step 1 is an identity gate with the computational-basis
/// measurement (labels "0", "1"), step 2 a Hadamard gate with the same
/// measurement. The initial state is |0> or the uniform superposition.
enum class TwoSlitState { kZero, kUniform };
Pipeline two_slit_pipeline(TwoSlitState state);

/// Interference-free reference pipeline: dimension 3, two steps of diagonal
/// phase gates with rank-1 basis measurements. Every off-diagonal pairing
/// vanishes, so its measure is classical.
Pipeline diagonal_classical_pipeline();

/// Outcome of one named property across all trials it ran in.
struct PropertyResult {
  std::string name;
  int trials = 0;
  double max_residual = 0.0;
  std::vector<std::string> failures;  ///< Replay tokens of failing trials.

  bool pass() const { return failures.empty(); }
};

/// Aggregate of a full suite run. pass is true iff no property failed.
struct SuiteReport {
  std::vector<PropertyResult> properties;
  int trials = 0;
  double max_residual = 0.0;
  bool pass = true;
};

/// Runs every property against three deterministic fixture trials (the two
/// two-slit states and the classical diagonal pipeline) plus cfg.trials
/// random pipelines. Deterministic for a fixed config; failures carry the
/// trial seed for replay. Property failures are reported, never thrown.
SuiteReport run_suite(const GeneratorConfig& cfg);

}  // namespace qhist
