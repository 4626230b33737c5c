#include "qhist/qmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "qhist/errors.hpp"

namespace qhist {

namespace {

double clamp_measure(Complex value, double tolerance, const char* what) {
  if (std::abs(value.imag()) > tolerance) {
    throw ConsistencyError(std::string(what) + " has imaginary residual " +
                           std::to_string(std::abs(value.imag())));
  }
  const double re = value.real();
  if (re < -tolerance) {
    throw ConsistencyError(std::string(what) + " is negative: " + std::to_string(re));
  }
  return re < 0.0 ? 0.0 : re;
}

void require_pairwise_disjoint(const std::vector<const Event*>& events,
                               const char* what) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (!are_disjoint(*events[i], *events[j])) {
        throw PreconditionError(std::string(what) + ": events " + std::to_string(i) +
                                " and " + std::to_string(j) + " overlap");
      }
    }
  }
}

}  // namespace

QMeasureContext::QMeasureContext(Pipeline pipeline, double tolerance,
                                 std::size_t matrix_cap)
    : pipeline_(std::move(pipeline)), tolerance_(tolerance),
      matrix_(decoherence_matrix(pipeline_, matrix_cap)) {
  if (tolerance_ <= 0.0) {
    throw PreconditionError("measure tolerance must be positive");
  }
}

double measure(const QMeasureContext& ctx, const Event& a) {
  const Complex d = decoherence_event(ctx.matrix(), a, a);
  return clamp_measure(d, ctx.tolerance(), "event measure");
}

double measure_path(const QMeasureContext& ctx, std::size_t id) {
  return clamp_measure(ctx.matrix()(id, id), ctx.tolerance(), "path measure");
}

std::vector<double> all_path_measures(const QMeasureContext& ctx) {
  std::vector<double> out(ctx.matrix().order);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = measure_path(ctx, i);
  return out;
}

double measure_homogeneous(const QMeasureContext& ctx, const HomogeneousEvent& h) {
  const Pipeline& pipeline = ctx.pipeline();
  validate_homogeneous(pipeline, h);
  if (!pipeline.has_pure_initial()) {
    return measure(ctx, expand_homogeneous(pipeline, h));
  }
  Vector v = pipeline.pure_initial();
  for (std::size_t i = 0; i < pipeline.step_count(); ++i) {
    const Step& step = pipeline.steps()[i];
    const Matrix group = step.measurement.group_projector(h.factors[i], pipeline.dim());
    v = apply(group, apply(step.gate, v));
  }
  return v.squared_norm();
}

double interference(const QMeasureContext& ctx, const Event& a, const Event& b) {
  return measure(ctx, Event::union_of(a, b)) - measure(ctx, a) - measure(ctx, b) -
         measure(ctx, Event::intersection_of(a, b));
}

double interference_pair(const QMeasureContext& ctx, std::size_t id1, std::size_t id2) {
  if (id1 == id2) {
    throw PreconditionError("interference_pair: paths must be distinct");
  }
  return 2.0 * ctx.matrix()(id1, id2).real();
}

double total_interference(const QMeasureContext& ctx) {
  const std::size_t n = ctx.matrix().order;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      sum += 2.0 * ctx.matrix()(j, k).real();
    }
  }
  return sum;
}

MeasureDecomposition decompose_measure(const QMeasureContext& ctx, const Event& a) {
  MeasureDecomposition out;
  out.total = measure(ctx, a);
  const auto& ids = a.ids();
  for (std::size_t j : ids) out.diagonal += ctx.matrix()(j, j).real();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      out.interference += 2.0 * ctx.matrix()(ids[i], ids[j]).real();
    }
  }
  return out;
}

double check_grade2_additivity(const QMeasureContext& ctx, const Event& a,
                               const Event& b, const Event& c) {
  require_pairwise_disjoint({&a, &b, &c}, "grade-2 additivity");
  const double lhs = measure(ctx, Event::union_of(Event::union_of(a, b), c));
  const double rhs = measure(ctx, Event::union_of(a, b)) +
                     measure(ctx, Event::union_of(a, c)) +
                     measure(ctx, Event::union_of(b, c)) - measure(ctx, a) -
                     measure(ctx, b) - measure(ctx, c);
  return std::abs(lhs - rhs);
}

PartitionResiduals check_partition_identities(const QMeasureContext& ctx,
                                              const std::vector<Event>& parts) {
  std::vector<const Event*> pointers;
  pointers.reserve(parts.size());
  for (const Event& e : parts) pointers.push_back(&e);
  require_pairwise_disjoint(pointers, "partition identities");

  PartitionResiduals out;
  if (parts.empty()) return out;

  Event whole = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    whole = Event::union_of(whole, parts[i]);
  }

  double expansion = 0.0;
  for (const Event& e : parts) expansion += measure(ctx, e);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      expansion += interference(ctx, parts[i], parts[j]);
    }
  }
  out.union_expansion = std::abs(measure(ctx, whole) - expansion);

  Event rest;
  for (std::size_t i = 1; i < parts.size(); ++i) rest = Event::union_of(rest, parts[i]);
  double tail = measure(ctx, parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    tail += interference(ctx, parts[0], parts[i]);
  }
  out.difference_identity = std::abs(measure(ctx, whole) - measure(ctx, rest) - tail);
  return out;
}

RegularityReport check_regularity(const QMeasureContext& ctx, const Event& a,
                                  const Event& b) {
  require_pairwise_disjoint({&a, &b}, "regularity");
  RegularityReport report;
  const double tol = ctx.tolerance();
  const double mu_a = measure(ctx, a);
  const double mu_b = measure(ctx, b);
  const double mu_union = measure(ctx, Event::union_of(a, b));
  report.derived_tolerance = 2.0 * std::sqrt(tol) * std::sqrt(1.0 + mu_b);

  if (mu_a <= tol) {
    report.vanishing_part_fired = true;
    report.union_residual = std::abs(mu_union - mu_b);
    if (report.union_residual > report.derived_tolerance) report.pass = false;
  }
  if (mu_union <= tol) {
    report.vanishing_union_fired = true;
    report.split_residual = std::abs(mu_a - mu_b);
    if (report.split_residual > report.derived_tolerance) report.pass = false;
  }
  return report;
}

PairBoundsReport check_pair_bounds(const QMeasureContext& ctx, std::size_t id1,
                                   std::size_t id2) {
  if (id1 == id2) {
    throw PreconditionError("pair bounds: paths must be distinct");
  }
  PairBoundsReport report;
  const double root1 = std::sqrt(measure_path(ctx, id1));
  const double root2 = std::sqrt(measure_path(ctx, id2));
  report.lower = (root1 - root2) * (root1 - root2);
  report.upper = (root1 + root2) * (root1 + root2);
  report.pair_measure = measure(ctx, Event::from_ids({id1, id2}));
  report.lower_slack = report.pair_measure - report.lower;
  report.upper_slack = report.upper - report.pair_measure;
  report.pass = report.lower_slack >= -ctx.tolerance() &&
                report.upper_slack >= -ctx.tolerance();
  return report;
}

double check_final_step_additivity(
    const QMeasureContext& ctx, const std::vector<std::vector<std::size_t>>& prefix,
    const std::vector<std::vector<std::size_t>>& parts) {
  const Pipeline& pipeline = ctx.pipeline();
  if (prefix.size() + 1 != pipeline.step_count()) {
    throw PreconditionError("final-step additivity: prefix must cover all steps but the last");
  }
  if (parts.empty()) {
    throw PreconditionError("final-step additivity: no final-step groups given");
  }
  std::set<std::size_t> seen;
  for (const auto& part : parts) {
    if (part.empty()) {
      throw PreconditionError("final-step additivity: empty final-step group");
    }
    for (std::size_t k : part) {
      if (!seen.insert(k).second) {
        throw PreconditionError("final-step additivity: final-step groups overlap");
      }
    }
  }

  HomogeneousEvent whole;
  whole.factors = prefix;
  whole.factors.emplace_back(seen.begin(), seen.end());
  const double lhs = measure_homogeneous(ctx, whole);

  double rhs = 0.0;
  for (const auto& part : parts) {
    HomogeneousEvent h;
    h.factors = prefix;
    h.factors.push_back(part);
    rhs += measure_homogeneous(ctx, h);
  }
  return std::abs(lhs - rhs);
}

}  // namespace qhist
