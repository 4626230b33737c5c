#pragma once

#include <cstdint>
#include <optional>

#include "qhist/qmeasure.hpp"

namespace qhist {

/// Nonlinearity defects above this count as a witness.
inline constexpr double kNonlinearityThreshold = 1e-6;

/// One integral evaluated by both algorithms. value carries the level-set
/// result; the residual is the absolute disagreement between the two.
struct IntegralResult {
  double value = 0.0;
  double by_level_set = 0.0;
  double by_pairwise = 0.0;
  double agreement_residual = 0.0;
};

/// Level-set integral: split f = f+ - f-, and for each nonnegative part sum
/// (lambda_j - lambda_{j-1}) * mu({part >= lambda_j}) over the sorted
/// distinct positive values lambda_j. Exact on a finite path space because
/// mu({part > lambda}) is piecewise constant in lambda.
double integrate_level_set(const QMeasureContext& ctx, const FunctionTable& f);

/// Pairwise integral: sum f(w) mu(w) + sum over unordered distinct pairs of
/// interference times min(f(w), f(w')). Requires f >= 0 everywhere
/// (PreconditionError otherwise); signed input goes through integrate().
double integrate_pairwise(const QMeasureContext& ctx, const FunctionTable& f);

/// Runs both algorithms (pairwise via the signed split) and asserts their
/// agreement within the context tolerance; disagreement means a defect in
/// one of the algorithms, reported as ConsistencyError.
IntegralResult integrate(const QMeasureContext& ctx, const FunctionTable& f);

/// Randomized residuals for the functional laws of the integral, one max
/// residual per law:
///   simple_pair_form:    integral of alpha chi_A + beta chi_B (disjoint A, B;
///                        alpha, beta >= 0) equals
///                        alpha mu(A) + beta mu(B) + min(alpha, beta) I(A, B)
///   disjoint_support_additivity: grade-2 additivity of the integral for
///                        nonnegative f, g, h with mutually disjoint supports
///   homogeneity:         integral of alpha f equals alpha times the integral,
///                        alpha of both signs
///   signed_split:        integral of f equals integral of f+ minus integral
///                        of f-, each part evaluated by both algorithms
///   simple_chain_expansion: integral of sum alpha_i chi_{A_i} for ascending
///                        alpha and disjoint A_i equals
///                        sum alpha_i mu(A_i) + sum_{i<j} alpha_i I(A_i, A_j)
struct FunctionalConditionsReport {
  double simple_pair_form = 0.0;
  double disjoint_support_additivity = 0.0;
  double homogeneity = 0.0;
  double signed_split = 0.0;
  double simple_chain_expansion = 0.0;

  double max_residual() const;
};
FunctionalConditionsReport check_functional_conditions(const QMeasureContext& ctx,
                                                       int trials,
                                                       std::uint64_t seed);

/// A function pair on which the integral fails to be additive, with all
/// three integrals dual-evaluated for independent confirmation.
struct NonlinearityWitness {
  FunctionTable f;
  FunctionTable g;
  IntegralResult integral_f;
  IntegralResult integral_g;
  IntegralResult integral_sum;
  double defect = 0.0;
};

/// Searches function pairs with values in {0, 1, 2} for an additivity
/// defect above kNonlinearityThreshold: exhaustively for small path spaces,
/// by fixed-seed sampling otherwise. Returns the first witness found, or
/// nothing (in particular for interference-free pipelines, where the
/// integral is the linear classical expectation).
std::optional<NonlinearityWitness> demonstrate_nonlinearity(const QMeasureContext& ctx);

}  // namespace qhist
