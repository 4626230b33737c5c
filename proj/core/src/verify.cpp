#include "qhist/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "qhist/decoherence.hpp"
#include "qhist/errors.hpp"
#include "qhist/integral.hpp"
#include "qhist/io.hpp"
#include "qhist/qmeasure.hpp"

namespace qhist {

void GeneratorConfig::validate() const {
  if (trials < 1 || trials > kMaxGeneratorTrials) {
    throw ValidationError("generator config: trials " + std::to_string(trials) +
                          " outside [1, " + std::to_string(kMaxGeneratorTrials) + "]");
  }
  if (dim_min < 1 || dim_min > dim_max) {
    throw ValidationError("generator config: dimension range [" +
                          std::to_string(dim_min) + ", " + std::to_string(dim_max) +
                          "] is empty");
  }
  if (dim_max > kMaxGeneratorDim) {
    throw ValidationError("generator config: dim_max " + std::to_string(dim_max) +
                          " exceeds " + std::to_string(kMaxGeneratorDim));
  }
  if (steps_min < 1 || steps_min > steps_max) {
    throw ValidationError("generator config: step range [" +
                          std::to_string(steps_min) + ", " +
                          std::to_string(steps_max) + "] is empty");
  }
  if (steps_max > kMaxGeneratorSteps) {
    throw ValidationError("generator config: steps_max " + std::to_string(steps_max) +
                          " exceeds " + std::to_string(kMaxGeneratorSteps));
  }
  if (max_outcomes > kMaxGeneratorDim) {
    throw ValidationError("generator config: max_outcomes " +
                          std::to_string(max_outcomes) + " exceeds " +
                          std::to_string(kMaxGeneratorDim));
  }
  if (!(mixed_state_fraction >= 0.0 && mixed_state_fraction <= 1.0)) {
    throw ValidationError("generator config: mixed_state_fraction " +
                          std::to_string(mixed_state_fraction) +
                          " outside [0, 1]");
  }
  if (max_paths < 1 || max_paths > kDefaultMatrixCap) {
    throw ValidationError("generator config: max_paths " + std::to_string(max_paths) +
                          " outside [1, " + std::to_string(kDefaultMatrixCap) + "]");
  }
}

namespace {

Complex random_gaussian_complex(Rng& rng) {
  return {rng.next_gaussian(), rng.next_gaussian()};
}

}  // namespace

Vector random_unit_vector(Rng& rng, std::size_t d) {
  Vector v(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) v[i] = random_gaussian_complex(rng);
    const double norm = v.norm();
    if (norm > 1e-6) {
      for (std::size_t i = 0; i < d; ++i) v[i] /= norm;
      return v;
    }
  }
}

Matrix random_unitary(Rng& rng, std::size_t d) {
  if (d < 1) throw PreconditionError("random_unitary: dimension must be positive");
  // Gaussian columns orthonormalized in order give the unique QR factor with
  // positive diagonal, so the result is Haar-distributed.
  std::vector<Vector> cols;
  cols.reserve(d);
  while (cols.size() < d) {
    Vector candidate(d);
    for (std::size_t i = 0; i < d; ++i) candidate[i] = random_gaussian_complex(rng);
    for (const Vector& prev : cols) {
      const Complex overlap = inner_product(prev, candidate);
      for (std::size_t i = 0; i < d; ++i) candidate[i] -= overlap * prev[i];
    }
    const double norm = candidate.norm();
    if (norm < 1e-6) continue;  // retry a (measure-zero) degenerate draw
    for (std::size_t i = 0; i < d; ++i) candidate[i] /= norm;
    cols.push_back(std::move(candidate));
  }
  Matrix u(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) u(i, j) = cols[j][i];
  }
  return u;
}

Pvm random_pvm(Rng& rng, std::size_t d, std::size_t k) {
  if (k < 1 || k > d) {
    throw PreconditionError("random_pvm: outcome count " + std::to_string(k) +
                            " outside [1, " + std::to_string(d) + "]");
  }
  const Matrix basis = random_unitary(rng, d);
  // First k columns seed the k groups so none is empty; the rest land
  // uniformly.
  std::vector<std::size_t> group(d);
  for (std::size_t c = 0; c < d; ++c) {
    group[c] = c < k ? c : rng.next_below(k);
  }
  Pvm pvm;
  for (std::size_t g = 0; g < k; ++g) {
    Matrix projector(d, d);
    for (std::size_t c = 0; c < d; ++c) {
      if (group[c] != g) continue;
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          projector(i, j) += basis(i, c) * std::conj(basis(j, c));
        }
      }
    }
    pvm.labels.push_back("o" + std::to_string(g + 1));
    pvm.projectors.push_back(std::move(projector));
  }
  return pvm;
}

Matrix random_density(Rng& rng, std::size_t d) {
  const std::size_t components = 1 + rng.next_below(d);
  std::vector<double> weights(components);
  double total = 0.0;
  for (double& w : weights) {
    w = 1.0 - rng.next_double();  // strictly positive
    total += w;
  }
  Matrix density(d, d);
  for (std::size_t c = 0; c < components; ++c) {
    const Vector v = random_unit_vector(rng, d);
    const double weight = weights[c] / total;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        density(i, j) += weight * v[i] * std::conj(v[j]);
      }
    }
  }
  return density;
}

Pipeline random_pipeline(const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t d = cfg.dim_min + rng.next_below(cfg.dim_max - cfg.dim_min + 1);
  const std::size_t steps =
      cfg.steps_min + rng.next_below(cfg.steps_max - cfg.steps_min + 1);

  std::size_t budget = cfg.max_paths;
  std::vector<Step> out;
  out.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    std::size_t cap = cfg.max_outcomes == 0 ? d : std::min(cfg.max_outcomes, d);
    cap = std::min(cap, budget);
    const std::size_t k = 1 + rng.next_below(cap);
    budget /= k;
    Step step;
    step.gate = random_unitary(rng, d);
    step.measurement = random_pvm(rng, d, k);
    out.push_back(std::move(step));
  }

  InitialState initial = rng.next_double() < cfg.mixed_state_fraction
                             ? InitialState(random_density(rng, d))
                             : InitialState(random_unit_vector(rng, d));
  return Pipeline(d, std::move(initial), std::move(out));
}

namespace {

Matrix chain_operator(const Pipeline& pipeline, const Path& path) {
  Matrix chain = Matrix::identity(pipeline.dim());
  for (std::size_t i = 0; i < pipeline.step_count(); ++i) {
    const Step& step = pipeline.steps()[i];
    chain = matmul(step.measurement.projectors.at(path.outcomes[i]),
                   matmul(step.gate, chain));
  }
  return chain;
}

}  // namespace

Complex trace_decoherence_pair(const Pipeline& pipeline, const Path& w1,
                               const Path& w2) {
  const Matrix l1 = chain_operator(pipeline, w1);
  const Matrix l2 = chain_operator(pipeline, w2);
  const Matrix w = pipeline.has_pure_initial()
                       ? outer_product(pipeline.pure_initial(), pipeline.pure_initial())
                       : pipeline.mixed_initial();
  return trace(matmul(w, matmul(adjoint(l1), l2)));
}

Pipeline two_slit_pipeline(TwoSlitState state) {
  const double half_root = std::sqrt(0.5);
  Matrix hadamard(2, 2);
  hadamard(0, 0) = half_root;
  hadamard(0, 1) = half_root;
  hadamard(1, 0) = half_root;
  hadamard(1, 1) = -half_root;

  Pvm basis;
  basis.labels = {"0", "1"};
  Matrix p0(2, 2);
  p0(0, 0) = 1.0;
  Matrix p1(2, 2);
  p1(1, 1) = 1.0;
  basis.projectors = {p0, p1};

  std::vector<Step> steps(2);
  steps[0].gate = Matrix::identity(2);
  steps[0].measurement = basis;
  steps[1].gate = hadamard;
  steps[1].measurement = basis;

  Vector psi(2);
  if (state == TwoSlitState::kZero) {
    psi[0] = 1.0;
  } else {
    psi[0] = half_root;
    psi[1] = half_root;
  }
  return Pipeline(2, psi, std::move(steps));
}

Pipeline diagonal_classical_pipeline() {
  const std::size_t d = 3;
  auto diagonal_gate = [&](double a, double b, double c) {
    Matrix g(d, d);
    g(0, 0) = std::polar(1.0, a);
    g(1, 1) = std::polar(1.0, b);
    g(2, 2) = std::polar(1.0, c);
    return g;
  };
  Pvm basis;
  for (std::size_t i = 0; i < d; ++i) {
    basis.labels.push_back(std::to_string(i));
    Matrix p(d, d);
    p(i, i) = 1.0;
    basis.projectors.push_back(std::move(p));
  }
  std::vector<Step> steps(2);
  steps[0].gate = diagonal_gate(0.3, 1.1, -0.7);
  steps[0].measurement = basis;
  steps[1].gate = diagonal_gate(-1.9, 0.4, 2.2);
  steps[1].measurement = basis;

  Vector psi(3);
  psi[0] = 0.6;
  psi[1] = Complex(0.0, 0.48);
  psi[2] = -0.64;
  return Pipeline(d, psi, std::move(steps));
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Accumulates per-property trial counts, max residuals and failing trial
/// tokens. Property order is first-recorded order, so reports are stable.
class Recorder {
 public:
  explicit Recorder(double tolerance) : tolerance_(tolerance) {}

  void record(const std::string& name, const std::string& token, double residual) {
    PropertyResult& r = slot(name);
    ++r.trials;
    if (!(residual <= tolerance_)) {  // negated so NaN counts as failure
      if (r.failures.empty() || r.failures.back() != token) {
        r.failures.push_back(token);
      }
    }
    r.max_residual = std::max(r.max_residual, residual);
  }

  SuiteReport finish(int trials) {
    SuiteReport report;
    report.trials = trials;
    report.properties = std::move(results_);
    for (const PropertyResult& r : report.properties) {
      report.max_residual = std::max(report.max_residual, r.max_residual);
      if (!r.pass()) report.pass = false;
    }
    return report;
  }

 private:
  PropertyResult& slot(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      index_.emplace(name, results_.size());
      results_.push_back(PropertyResult{name, 0, 0.0, {}});
      return results_.back();
    }
    return results_[it->second];
  }

  double tolerance_;
  std::vector<PropertyResult> results_;
  std::map<std::string, std::size_t> index_;
};

enum class TrialKind { kRandom, kFixtureZero, kFixtureUniform, kClassical };

Event sample_event(Rng& rng, std::size_t n, std::size_t max_size = 8) {
  const std::size_t cap = std::min(n, max_size);
  const std::size_t size = rng.next_below(cap + 1);
  std::set<std::size_t> ids;
  while (ids.size() < size) ids.insert(rng.next_below(n));
  return Event::from_ids({ids.begin(), ids.end()});
}

/// Pairwise disjoint events (possibly empty): every path lands in one of
/// `slots` buckets or in none.
std::vector<Event> sample_disjoint_events(Rng& rng, std::size_t n,
                                          std::size_t slots) {
  std::vector<std::vector<std::size_t>> buckets(slots);
  for (std::size_t id = 0; id < n; ++id) {
    const std::size_t roll = rng.next_below(slots + 2);
    if (roll < slots) buckets[roll].push_back(id);
  }
  std::vector<Event> events;
  events.reserve(slots);
  for (auto& bucket : buckets) events.push_back(Event::from_ids(std::move(bucket)));
  return events;
}

HomogeneousEvent sample_homogeneous(Rng& rng, const Pipeline& pipeline) {
  HomogeneousEvent h;
  for (const Step& step : pipeline.steps()) {
    const std::size_t m = step.measurement.outcome_count();
    const std::size_t size = 1 + rng.next_below(m);
    std::set<std::size_t> chosen;
    while (chosen.size() < size) chosen.insert(rng.next_below(m));
    h.factors.emplace_back(chosen.begin(), chosen.end());
  }
  return h;
}

FunctionTable sample_table(Rng& rng, std::size_t n, double low, double high) {
  FunctionTable f;
  f.values.resize(n);
  for (double& v : f.values) v = low + (high - low) * rng.next_double();
  return f;
}

void check_linalg_properties(Recorder& rec, const std::string& token, Rng& rng) {
  const std::size_t d = 2 + rng.next_below(7);

  const Matrix u = random_unitary(rng, d);
  rec.record("linalg.unitary_residual", token,
             max_abs_diff(matmul(adjoint(u), u), Matrix::identity(d)));

  const Pvm pvm = random_pvm(rng, d, 1 + rng.next_below(d));
  double projector_residual = 0.0;
  for (const Matrix& p : pvm.projectors) {
    projector_residual = std::max(projector_residual, max_abs_diff(matmul(p, p), p));
    projector_residual = std::max(projector_residual, hermiticity_residual(p));
  }
  rec.record("linalg.projector_residual", token, projector_residual);

  Matrix g(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) g(i, j) = random_gaussian_complex(rng);
  }
  const Complex gram_trace = trace(matmul(adjoint(g), g));
  rec.record("linalg.gram_trace_nonnegative", token,
             std::max(std::abs(gram_trace.imag()),
                      std::max(0.0, -gram_trace.real())));

  Matrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) h(i, j) = random_gaussian_complex(rng);
  }
  h = 0.5 * (h + adjoint(h));
  const EigenDecomposition eig = hermitian_eig(h);
  Matrix reconstructed(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const Vector& v = eig.eigenvectors[k];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        reconstructed(i, j) += eig.eigenvalues[k] * v[i] * std::conj(v[j]);
      }
    }
  }
  rec.record("linalg.eig_reconstruction", token, max_abs_diff(reconstructed, h));
}

void check_pipeline_properties(Recorder& rec, const std::string& token,
                               const Pipeline& pipeline, Rng& rng) {
  const Pipeline reloaded =
      load_pipeline(pipeline_to_document(pipeline), pipeline.validation_tolerance());
  double roundtrip = 0.0;
  if (reloaded.dim() != pipeline.dim() ||
      reloaded.step_count() != pipeline.step_count() ||
      reloaded.has_pure_initial() != pipeline.has_pure_initial()) {
    roundtrip = kInfinity;
  } else {
    if (pipeline.has_pure_initial()) {
      for (std::size_t i = 0; i < pipeline.dim(); ++i) {
        roundtrip = std::max(
            roundtrip, std::abs(reloaded.pure_initial()[i] - pipeline.pure_initial()[i]));
      }
    } else {
      roundtrip = std::max(
          roundtrip, max_abs_diff(reloaded.mixed_initial(), pipeline.mixed_initial()));
    }
    for (std::size_t s = 0; s < pipeline.step_count(); ++s) {
      const Step& a = pipeline.steps()[s];
      const Step& b = reloaded.steps()[s];
      roundtrip = std::max(roundtrip, max_abs_diff(a.gate, b.gate));
      if (a.measurement.labels != b.measurement.labels) {
        roundtrip = kInfinity;
        break;
      }
      for (std::size_t k = 0; k < a.measurement.outcome_count(); ++k) {
        roundtrip = std::max(roundtrip, max_abs_diff(a.measurement.projectors[k],
                                                     b.measurement.projectors[k]));
      }
    }
  }
  rec.record("pipeline.document_roundtrip", token, roundtrip);

  const std::size_t n = static_cast<std::size_t>(pipeline.path_count());
  const std::vector<Path> paths = enumerate_paths(pipeline);
  double id_residual = paths.size() == n ? 0.0 : kInfinity;
  for (int t = 0; t < 16; ++t) {
    const std::size_t id = rng.next_below(n);
    if (path_id(pipeline, path_from_id(pipeline, id)) != id) id_residual = kInfinity;
    if (!(paths[id] == path_from_id(pipeline, id))) id_residual = kInfinity;
  }
  rec.record("pipeline.path_id_roundtrip", token, id_residual);

  const HomogeneousEvent h = sample_homogeneous(rng, pipeline);
  const bool size_ok =
      expand_homogeneous(pipeline, h).size() == homogeneous_size(h);
  rec.record("pipeline.homogeneous_expansion_size", token, size_ok ? 0.0 : kInfinity);
}

void check_decoherence_properties(Recorder& rec, const std::string& token,
                                  const QMeasureContext& ctx, Rng& rng) {
  const Pipeline& pipeline = ctx.pipeline();
  const DecoherenceMatrix& m = ctx.matrix();
  const std::size_t n = m.order;
  const std::size_t last_outcomes =
      pipeline.steps().back().measurement.outcome_count();

  double hermiticity = 0.0;
  double orthogonality = 0.0;
  double diagonal = 0.0;
  Complex total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      hermiticity = std::max(hermiticity, std::abs(m(j, k) - std::conj(m(k, j))));
      if (j % last_outcomes != k % last_outcomes) {
        orthogonality = std::max(orthogonality, std::abs(m(j, k)));
      }
      total += m(j, k);
    }
    diagonal = std::max(diagonal, std::max(-m(j, j).real(), std::abs(m(j, j).imag())));
  }
  rec.record("decoherence.hermiticity", token, hermiticity);
  rec.record("decoherence.final_outcome_orthogonality", token, orthogonality);
  rec.record("decoherence.normalization", token, std::abs(total - Complex(1.0)));
  rec.record("decoherence.diagonal_nonnegative", token, std::max(0.0, diagonal));

  if (pipeline.dim() <= 4) {
    double oracle_residual = 0.0;
    auto compare_pair = [&](std::size_t j, std::size_t k) {
      const Complex direct = trace_decoherence_pair(pipeline, path_from_id(pipeline, j),
                                                    path_from_id(pipeline, k));
      oracle_residual = std::max(oracle_residual, std::abs(m(j, k) - direct));
    };
    if (n <= 24) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) compare_pair(j, k);
      }
    } else {
      for (int t = 0; t < 64; ++t) compare_pair(rng.next_below(n), rng.next_below(n));
    }
    rec.record("decoherence.trace_formula_agreement", token, oracle_residual);
  }

  {
    const std::vector<Event> ab = sample_disjoint_events(rng, n, 2);
    const Event c = sample_event(rng, n);
    const Complex lhs = decoherence_event(m, Event::union_of(ab[0], ab[1]), c);
    const Complex rhs = decoherence_event(m, ab[0], c) + decoherence_event(m, ab[1], c);
    rec.record("decoherence.event_bilinearity", token, std::abs(lhs - rhs));
  }

  {
    double excess = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Event a = sample_event(rng, n);
      const Event b = sample_event(rng, n);
      const double cross = std::norm(decoherence_event(m, a, b));
      const double bound = decoherence_event(m, a, a).real() *
                           decoherence_event(m, b, b).real();
      excess = std::max(excess, cross - bound);
    }
    rec.record("decoherence.cauchy_schwarz", token, std::max(0.0, excess));
  }

  {
    const std::size_t d = pipeline.dim();
    const std::size_t components = 2 + rng.next_below(2);
    std::vector<double> weights(components);
    double weight_total = 0.0;
    for (double& w : weights) {
      w = 1.0 - rng.next_double();
      weight_total += w;
    }
    std::vector<Vector> states;
    Matrix density(d, d);
    for (std::size_t c = 0; c < components; ++c) {
      weights[c] /= weight_total;
      states.push_back(random_unit_vector(rng, d));
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          density(i, j) += weights[c] * states[c][i] * std::conj(states[c][j]);
        }
      }
    }
    const Pipeline mixed(d, density, pipeline.steps());
    std::vector<Pipeline> pures;
    for (const Vector& v : states) pures.emplace_back(d, v, pipeline.steps());

    double residual = 0.0;
    for (int t = 0; t < 4; ++t) {
      const Path w1 = path_from_id(pipeline, rng.next_below(n));
      const Path w2 = path_from_id(pipeline, rng.next_below(n));
      Complex combination = 0.0;
      for (std::size_t c = 0; c < components; ++c) {
        combination += weights[c] * decoherence_pair(pures[c], w1, w2);
      }
      residual =
          std::max(residual, std::abs(decoherence_pair(mixed, w1, w2) - combination));
    }
    rec.record("decoherence.mixed_state_linearity", token, residual);
  }
}

void check_qmeasure_properties(Recorder& rec, const std::string& token,
                               const QMeasureContext& ctx, Rng& rng) {
  const Pipeline& pipeline = ctx.pipeline();
  const std::size_t n = ctx.matrix().order;
  const Event full = full_event(pipeline);

  rec.record("qmeasure.empty_event_zero", token, measure(ctx, Event{}));
  rec.record("qmeasure.full_event_unit", token, std::abs(measure(ctx, full) - 1.0));

  double path_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) path_sum += measure_path(ctx, j);
  rec.record("qmeasure.path_sum_unit", token, std::abs(path_sum - 1.0));

  rec.record("qmeasure.total_interference_zero", token,
             std::abs(total_interference(ctx)));

  {
    double residual = 0.0;
    for (int t = 0; t < 5; ++t) {
      const MeasureDecomposition dec = decompose_measure(ctx, sample_event(rng, n));
      residual = std::max(residual,
                          std::abs(dec.total - dec.diagonal - dec.interference));
    }
    rec.record("qmeasure.event_decomposition", token, residual);
  }

  if (n >= 2) {
    double residual = 0.0;
    for (int t = 0; t < 8; ++t) {
      const std::size_t j = rng.next_below(n);
      std::size_t k = rng.next_below(n);
      if (j == k) k = (k + 1) % n;
      const double general = interference(ctx, Event::from_ids({j}), Event::from_ids({k}));
      residual = std::max(residual, std::abs(interference_pair(ctx, j, k) - general));
    }
    rec.record("qmeasure.interference_pair_agreement", token, residual);
  }

  {
    const std::vector<Event> abc = sample_disjoint_events(rng, n, 3);
    rec.record("qmeasure.grade2_additivity", token,
               check_grade2_additivity(ctx, abc[0], abc[1], abc[2]));
  }

  {
    const std::size_t slots = 3 + rng.next_below(3);
    const PartitionResiduals pr =
        check_partition_identities(ctx, sample_disjoint_events(rng, n, slots));
    rec.record("qmeasure.disjoint_partition_expansion", token, pr.union_expansion);
    rec.record("qmeasure.partition_difference_identity", token, pr.difference_identity);
  }

  if (n <= 64) {
    std::vector<Event> singletons;
    singletons.reserve(n);
    for (std::size_t j = 0; j < n; ++j) singletons.push_back(Event::from_ids({j}));
    const PartitionResiduals pr = check_partition_identities(ctx, singletons);
    rec.record("qmeasure.singleton_partition_expansion", token, pr.union_expansion);
  }

  {
    const HomogeneousEvent h = sample_homogeneous(rng, pipeline);
    const double fast = measure_homogeneous(ctx, h);
    const double slow = measure(ctx, expand_homogeneous(pipeline, h));
    rec.record("qmeasure.homogeneous_fast_path", token, std::abs(fast - slow));
  }

  {
    auto excess_of = [&](const Event& a, const Event& b) {
      const RegularityReport rep = check_regularity(ctx, a, b);
      double excess = 0.0;
      if (rep.vanishing_part_fired) {
        excess = std::max(excess, rep.union_residual - rep.derived_tolerance);
      }
      if (rep.vanishing_union_fired) {
        excess = std::max(excess, rep.split_residual - rep.derived_tolerance);
      }
      return std::max(0.0, excess);
    };
    double residual = excess_of(Event{}, sample_event(rng, n));
    for (std::size_t j = 0; j < n; ++j) {
      if (ctx.matrix()(j, j).real() <= ctx.tolerance()) {
        const Event sampled = sample_event(rng, n);
        std::vector<std::size_t> rest;
        for (std::size_t k : sampled.ids()) {
          if (k != j) rest.push_back(k);
        }
        residual = std::max(
            residual, excess_of(Event::from_ids({j}), Event::from_ids(std::move(rest))));
        break;
      }
    }
    {
      const std::vector<Event> ab = sample_disjoint_events(rng, n, 2);
      residual = std::max(residual, excess_of(ab[0], ab[1]));
    }
    rec.record("qmeasure.regularity", token, residual);
  }

  if (n >= 2) {
    double residual = 0.0;
    for (int t = 0; t < 8; ++t) {
      const std::size_t j = rng.next_below(n);
      std::size_t k = rng.next_below(n);
      if (j == k) k = (k + 1) % n;
      const PairBoundsReport rep = check_pair_bounds(ctx, j, k);
      residual = std::max(residual, std::max(-rep.lower_slack, -rep.upper_slack));
    }
    rec.record("qmeasure.pair_bounds", token, std::max(0.0, residual));
  }

  {
    std::vector<std::vector<std::size_t>> prefix;
    for (std::size_t s = 0; s + 1 < pipeline.step_count(); ++s) {
      const std::size_t m = pipeline.steps()[s].measurement.outcome_count();
      const std::size_t size = 1 + rng.next_below(m);
      std::set<std::size_t> chosen;
      while (chosen.size() < size) chosen.insert(rng.next_below(m));
      prefix.emplace_back(chosen.begin(), chosen.end());
    }
    const std::size_t last = pipeline.steps().back().measurement.outcome_count();
    const std::size_t groups = 1 + rng.next_below(std::min<std::size_t>(last, 3));
    std::vector<std::vector<std::size_t>> parts(groups);
    for (std::size_t k = 0; k < last; ++k) {
      const std::size_t roll = rng.next_below(groups + 1);
      if (roll < groups) parts[roll].push_back(k);
    }
    parts.erase(std::remove_if(parts.begin(), parts.end(),
                               [](const auto& p) { return p.empty(); }),
                parts.end());
    if (parts.empty()) parts.push_back({0});
    rec.record("qmeasure.final_step_additivity", token,
               check_final_step_additivity(ctx, prefix, parts));
  }
}

void check_integral_properties(Recorder& rec, const std::string& token,
                               const QMeasureContext& ctx, Rng& rng) {
  const std::size_t n = ctx.matrix().order;

  {
    const FunctionTable f = sample_table(rng, n, -2.0, 2.0);
    rec.record("integral.cross_algorithm_agreement", token,
               integrate(ctx, f).agreement_residual);
  }

  {
    double residual = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Event a = sample_event(rng, n);
      residual = std::max(
          residual, std::abs(integrate_level_set(ctx, indicator(ctx.pipeline(), a)) -
                             measure(ctx, a)));
    }
    rec.record("integral.indicator_measure_identity", token, residual);
  }

  {
    double max_interference = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        max_interference =
            std::max(max_interference, std::abs(2.0 * ctx.matrix()(j, k).real()));
      }
    }
    if (max_interference <= 1e-12) {
      const FunctionTable f = sample_table(rng, n, 0.0, 3.0);
      double classical = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        classical += f.values[j] * ctx.matrix()(j, j).real();
      }
      rec.record("integral.lebesgue_reduction", token,
                 std::abs(integrate_level_set(ctx, f) - classical));
    }
  }

  {
    // Pointwise convergence bound: the pairwise form is Lipschitz in the
    // sup norm with constant sum|mu| + sum|I|.
    double lipschitz = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      lipschitz += std::abs(ctx.matrix()(j, j).real());
      for (std::size_t k = j + 1; k < n; ++k) {
        lipschitz += std::abs(2.0 * ctx.matrix()(j, k).real());
      }
    }
    const FunctionTable f = sample_table(rng, n, 0.0, 3.0);
    const double target = integrate_level_set(ctx, f);
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, v);
    double excess = 0.0;
    for (int i = 1; i <= 5; ++i) {
      const double ceiling = peak * static_cast<double>(i) / 5.0;
      FunctionTable clipped;
      clipped.values.resize(n);
      double gap = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        clipped.values[j] = std::min(f.values[j], ceiling);
        gap = std::max(gap, f.values[j] - clipped.values[j]);
      }
      const double drift = std::abs(integrate_level_set(ctx, clipped) - target);
      excess = std::max(excess, drift - lipschitz * gap);
    }
    rec.record("integral.monotone_chain_bound", token, std::max(0.0, excess));
  }

  {
    const FunctionalConditionsReport report =
        check_functional_conditions(ctx, 2, rng.next_u64());
    rec.record("integral.simple_pair_form", token, report.simple_pair_form);
    rec.record("integral.disjoint_support_additivity", token,
               report.disjoint_support_additivity);
    rec.record("integral.homogeneity", token, report.homogeneity);
    rec.record("integral.signed_split", token, report.signed_split);
    rec.record("integral.simple_chain_expansion", token, report.simple_chain_expansion);
  }
}

void run_trial(Recorder& rec, const std::string& token, const Pipeline& pipeline,
               Rng& rng, TrialKind kind) {
  const QMeasureContext ctx(pipeline);

  check_linalg_properties(rec, token, rng);
  check_pipeline_properties(rec, token, pipeline, rng);
  check_decoherence_properties(rec, token, ctx, rng);
  check_qmeasure_properties(rec, token, ctx, rng);
  check_integral_properties(rec, token, ctx, rng);

  if (kind == TrialKind::kFixtureUniform) {
    const auto witness = demonstrate_nonlinearity(ctx);
    double residual = kInfinity;
    if (witness && witness->defect > kNonlinearityThreshold) {
      residual = std::max({witness->integral_f.agreement_residual,
                           witness->integral_g.agreement_residual,
                           witness->integral_sum.agreement_residual});
    }
    rec.record("integral.nonlinearity_witness", token, residual);
  }
  if (kind == TrialKind::kClassical) {
    const auto witness = demonstrate_nonlinearity(ctx);
    rec.record("integral.nonlinearity_absent_classical", token,
               witness ? kInfinity : 0.0);
  }
}

std::string seed_token(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seed=0x%016llx",
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

SuiteReport run_suite(const GeneratorConfig& cfg) {
  cfg.validate();
  Recorder rec(kDefaultTolerance);
  int executed = 0;

  auto guarded = [&](const std::string& token, TrialKind kind, auto&& make_pipeline,
                     Rng rng) {
    try {
      const Pipeline pipeline = make_pipeline(rng);
      run_trial(rec, token, pipeline, rng, kind);
      rec.record("suite.trial_completes", token, 0.0);
    } catch (const std::exception&) {
      rec.record("suite.trial_completes", token, kInfinity);
    }
    ++executed;
  };

  guarded("two-slit-zero", TrialKind::kFixtureZero,
          [](Rng&) { return two_slit_pipeline(TwoSlitState::kZero); },
          Rng(cfg.seed ^ 0xfead0001ULL));
  guarded("two-slit-uniform", TrialKind::kFixtureUniform,
          [](Rng&) { return two_slit_pipeline(TwoSlitState::kUniform); },
          Rng(cfg.seed ^ 0xfead0002ULL));
  guarded("classical-diagonal", TrialKind::kClassical,
          [](Rng&) { return diagonal_classical_pipeline(); },
          Rng(cfg.seed ^ 0xfead0003ULL));

  Rng master(cfg.seed);
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed = master.next_u64();
    guarded(seed_token(trial_seed), TrialKind::kRandom,
            [&cfg](Rng& rng) { return random_pipeline(cfg, rng); }, Rng(trial_seed));
  }
  return rec.finish(executed);
}

}  // namespace qhist
