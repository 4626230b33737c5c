#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qhist/linalg.hpp"

namespace qhist {

/// Paths are enumerated lazily; this caps how many a single call may expand.
inline constexpr std::size_t kDefaultPathCap = std::size_t{1} << 20;

/// Projection-valued measure: ordered outcomes, one projector per label.
/// Order is significant; it defines per-step outcome indices and therefore
/// the canonical path order.
struct Pvm {
  std::vector<std::string> labels;
  std::vector<Matrix> projectors;

  std::size_t outcome_count() const { return labels.size(); }
  std::optional<std::size_t> index_of(const std::string& label) const;

  /// Sum of the projectors for a subset of outcome indices.
  Matrix group_projector(const std::vector<std::size_t>& outcome_indices,
                         std::size_t dim) const;
};

/// One pipeline stage: a unitary gate followed by a projective measurement.
struct Step {
  Matrix gate;
  Pvm measurement;
};

/// Initial state: either a unit-norm pure state or a density matrix.
using InitialState = std::variant<Vector, Matrix>;

/// A validated measurement pipeline: initial state, then an ordered sequence
/// of gate+measurement steps on a fixed d-dimensional space.
///
/// Construction enforces every structural invariant (state normalization,
/// gate unitarity, projector validity, PVM completeness and orthogonality,
/// matching dimensions) and throws ValidationError naming the failing
/// invariant and the 1-based step index.
class Pipeline {
 public:
  Pipeline(std::size_t dim, InitialState initial, std::vector<Step> steps,
           double tolerance = kDefaultTolerance);

  std::size_t dim() const { return dim_; }
  const std::vector<Step>& steps() const { return steps_; }
  std::size_t step_count() const { return steps_.size(); }

  bool has_pure_initial() const { return std::holds_alternative<Vector>(initial_); }
  const Vector& pure_initial() const { return std::get<Vector>(initial_); }
  const Matrix& mixed_initial() const { return std::get<Matrix>(initial_); }

  /// Product of per-step outcome counts.
  std::uint64_t path_count() const { return path_count_; }

  /// Tolerance the pipeline was validated with.
  double validation_tolerance() const { return tolerance_; }

 private:
  std::size_t dim_;
  InitialState initial_;
  std::vector<Step> steps_;
  std::uint64_t path_count_;
  double tolerance_;
};

/// One outcome index per step, in step order. The canonical path id is the
/// mixed-radix value of these digits with step 0 most significant.
struct Path {
  std::vector<std::size_t> outcomes;

  bool operator==(const Path&) const = default;
};

/// Renders a path as its comma-joined outcome labels, e.g. "a1,b1".
std::string path_label(const Pipeline& pipeline, const Path& path);

/// Canonical id of a path (its rank in lexicographic enumeration order).
std::size_t path_id(const Pipeline& pipeline, const Path& path);

/// Path with the given canonical id.
Path path_from_id(const Pipeline& pipeline, std::size_t id);

/// All paths in lexicographic order of per-step outcome indices.
/// Throws ResourceError when the count exceeds cap.
std::vector<Path> enumerate_paths(const Pipeline& pipeline,
                                  std::size_t cap = kDefaultPathCap);

/// A set of paths, stored as sorted unique canonical ids.
class Event {
 public:
  Event() = default;

  /// Sorts and rejects duplicates (ValidationError).
  static Event from_ids(std::vector<std::size_t> ids);

  /// Set union of already-valid events (never produces duplicates).
  static Event union_of(const Event& a, const Event& b);
  static Event intersection_of(const Event& a, const Event& b);

  const std::vector<std::size_t>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(std::size_t id) const;

  bool operator==(const Event&) const = default;

 private:
  std::vector<std::size_t> ids_;  // sorted, unique
};

bool are_disjoint(const Event& a, const Event& b);

/// Event holding every path of the pipeline.
Event full_event(const Pipeline& pipeline);

/// A per-step choice of outcome subsets whose Cartesian product forms an
/// event. Factors hold outcome indices, one nonempty set per step.
struct HomogeneousEvent {
  std::vector<std::vector<std::size_t>> factors;
};

/// Validates factors against the pipeline (nonempty, in range, no duplicates,
/// one per step); throws ValidationError naming the offending step.
void validate_homogeneous(const Pipeline& pipeline, const HomogeneousEvent& h);

/// Expands the Cartesian product into an explicit event.
Event expand_homogeneous(const Pipeline& pipeline, const HomogeneousEvent& h);

/// Number of paths the expansion would contain.
std::uint64_t homogeneous_size(const HomogeneousEvent& h);

/// A real value per path, aligned with canonical path order.
struct FunctionTable {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Characteristic function of an event: 1 on its paths, 0 elsewhere.
FunctionTable indicator(const Pipeline& pipeline, const Event& event);

}  // namespace qhist
