#pragma once

#include <cstddef>
#include <vector>

#include "qhist/decoherence.hpp"
#include "qhist/pipeline.hpp"

namespace qhist {

/// Immutable bundle of a pipeline with its pairing table; every measure
/// query reads the table, so construction cost is paid once.
class QMeasureContext {
 public:
  explicit QMeasureContext(Pipeline pipeline, double tolerance = kDefaultTolerance,
                           std::size_t matrix_cap = kDefaultMatrixCap);

  const Pipeline& pipeline() const { return pipeline_; }
  const DecoherenceMatrix& matrix() const { return matrix_; }
  double tolerance() const { return tolerance_; }

 private:
  Pipeline pipeline_;
  double tolerance_;
  DecoherenceMatrix matrix_;
};

/// mu(A): the event paired with itself. The imaginary part must vanish and
/// the real part must be nonnegative, both within tolerance; values inside
/// the tolerance band below zero are clamped to zero, anything further out
/// raises ConsistencyError.
double measure(const QMeasureContext& ctx, const Event& a);

/// mu of a single path, read off the table diagonal with the same clamp
/// policy as measure.
double measure_path(const QMeasureContext& ctx, std::size_t id);

/// mu over all single paths in enumeration order.
std::vector<double> all_path_measures(const QMeasureContext& ctx);

/// mu of a per-step outcome product. For a pure initial state this runs one
/// chain with the summed projector of each factor; mixed states expand to an
/// explicit path set and sum the table.
double measure_homogeneous(const QMeasureContext& ctx, const HomogeneousEvent& h);

/// General interference: mu(A u B) - mu(A) - mu(B) - mu(A n B).
double interference(const QMeasureContext& ctx, const Event& a, const Event& b);

/// Interference of two distinct single paths: twice the real part of their
/// table entry. Agrees with the general definition on singleton events.
double interference_pair(const QMeasureContext& ctx, std::size_t id1, std::size_t id2);

/// Sum of interference_pair over all unordered distinct path pairs; zero
/// within tolerance for every pipeline because the total mass is 1.
double total_interference(const QMeasureContext& ctx);

/// mu(A) split into its diagonal sum and pairwise interference sum; total is
/// the clamped measure, so total - (diagonal + interference) is a residual
/// within tolerance, not an exact zero.
struct MeasureDecomposition {
  double total = 0.0;
  double diagonal = 0.0;
  double interference = 0.0;
};
MeasureDecomposition decompose_measure(const QMeasureContext& ctx, const Event& a);

/// Residual of the three-set union identity
///   mu(AuBuC) = mu(AuB) + mu(AuC) + mu(BuC) - mu(A) - mu(B) - mu(C)
/// for pairwise disjoint A, B, C. Overlap raises PreconditionError.
double check_grade2_additivity(const QMeasureContext& ctx, const Event& a,
                               const Event& b, const Event& c);

/// Residuals of the two disjoint-partition identities:
///   union_expansion:     mu(u A_i) = sum mu(A_i) + sum_{i<j} I(A_i, A_j)
///   difference_identity: mu(u A_i) - mu(u_{i>=2} A_i) = mu(A_1) + sum_{i>=2} I(A_1, A_i)
struct PartitionResiduals {
  double union_expansion = 0.0;
  double difference_identity = 0.0;
};
PartitionResiduals check_partition_identities(const QMeasureContext& ctx,
                                              const std::vector<Event>& parts);

/// Regularity of mu on a disjoint pair: a vanishing part is transparent in
/// unions, and a vanishing union forces equal parts. "Vanishing" means
/// within tolerance of zero; the implied equalities are then tested at the
/// derived tolerance 2 * sqrt(tol) * sqrt(1 + mu(B)), which absorbs the
/// cross-term error the vanishing hypothesis permits.
struct RegularityReport {
  bool vanishing_part_fired = false;
  double union_residual = 0.0;  // |mu(AuB) - mu(B)| when mu(A) vanishes
  bool vanishing_union_fired = false;
  double split_residual = 0.0;  // |mu(A) - mu(B)| when mu(AuB) vanishes
  double derived_tolerance = 0.0;
  bool pass = true;
};
RegularityReport check_regularity(const QMeasureContext& ctx, const Event& a,
                                  const Event& b);

/// Two-sided bound on a distinct pair:
///   (sqrt(mu(w)) - sqrt(mu(w')))^2 <= mu({w,w'}) <= (sqrt(mu(w)) + sqrt(mu(w')))^2
/// Slacks are signed distances into the allowed region; pass means both are
/// above -tolerance.
struct PairBoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  double pair_measure = 0.0;
  double lower_slack = 0.0;
  double upper_slack = 0.0;
  bool pass = true;
};
PairBoundsReport check_pair_bounds(const QMeasureContext& ctx, std::size_t id1,
                                   std::size_t id2);

/// Residual of additivity in the final step: for fixed earlier factors and
/// pairwise disjoint final-outcome groups B_i,
///   mu(A_1 x ... x A_{n-1} x (u B_i)) = sum_i mu(A_1 x ... x A_{n-1} x B_i).
double check_final_step_additivity(const QMeasureContext& ctx,
                                   const std::vector<std::vector<std::size_t>>& prefix,
                                   const std::vector<std::vector<std::size_t>>& parts);

}  // namespace qhist
