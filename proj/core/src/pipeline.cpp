#include "qhist/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qhist/errors.hpp"

namespace qhist {

namespace {

std::string residual_string(double r) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << r;
  return os.str();
}

[[noreturn]] void fail_validation(const std::string& message) {
  throw ValidationError(message);
}

void validate_step(const Step& step, std::size_t step_number, std::size_t dim,
                   double tol) {
  const std::string prefix = "step " + std::to_string(step_number) + " ";

  if (step.gate.rows() != dim || step.gate.cols() != dim) {
    fail_validation(prefix + "gate is " + std::to_string(step.gate.rows()) + "x" +
                    std::to_string(step.gate.cols()) + ", pipeline dimension is " +
                    std::to_string(dim));
  }
  {
    const Matrix gram = matmul(adjoint(step.gate), step.gate);
    const double residual = max_abs_diff(gram, Matrix::identity(dim));
    if (residual > tol) {
      fail_validation(prefix + "gate unitarity residual " + residual_string(residual));
    }
  }

  const Pvm& pvm = step.measurement;
  if (pvm.labels.empty()) fail_validation(prefix + "PVM has no outcomes");
  if (pvm.labels.size() != pvm.projectors.size()) {
    fail_validation(prefix + "PVM label/projector counts differ");
  }
  std::set<std::string> seen;
  for (std::size_t k = 0; k < pvm.labels.size(); ++k) {
    const std::string& label = pvm.labels[k];
    if (label.empty()) fail_validation(prefix + "PVM outcome " + std::to_string(k) + " has an empty label");
    if (!seen.insert(label).second) {
      fail_validation(prefix + "duplicate outcome label '" + label + "'");
    }
    const Matrix& proj = pvm.projectors[k];
    if (proj.rows() != dim || proj.cols() != dim) {
      fail_validation(prefix + "projector '" + label + "' is " +
                      std::to_string(proj.rows()) + "x" + std::to_string(proj.cols()) +
                      ", pipeline dimension is " + std::to_string(dim));
    }
    const double herm = hermiticity_residual(proj);
    if (herm > tol) {
      fail_validation(prefix + "projector '" + label + "' hermiticity residual " +
                      residual_string(herm));
    }
    const double idem = max_abs_diff(matmul(proj, proj), proj);
    if (idem > tol) {
      fail_validation(prefix + "projector '" + label + "' idempotency residual " +
                      residual_string(idem));
    }
  }

  // Completeness: the outcomes must resolve the identity.
  Matrix sum(dim, dim);
  for (const Matrix& proj : pvm.projectors) sum = sum + proj;
  const double completeness = max_abs_diff(sum, Matrix::identity(dim));
  if (completeness > tol) {
    fail_validation(prefix + "PVM completeness residual " + residual_string(completeness));
  }

  for (std::size_t a = 0; a + 1 < pvm.projectors.size(); ++a) {
    for (std::size_t b = a + 1; b < pvm.projectors.size(); ++b) {
      const double cross = max_abs(matmul(pvm.projectors[a], pvm.projectors[b]));
      if (cross > tol) {
        fail_validation(prefix + "PVM orthogonality residual " + residual_string(cross) +
                        " between '" + pvm.labels[a] + "' and '" + pvm.labels[b] + "'");
      }
    }
  }
}

}  // namespace

std::optional<std::size_t> Pvm::index_of(const std::string& label) const {
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == label) return k;
  }
  return std::nullopt;
}

Matrix Pvm::group_projector(const std::vector<std::size_t>& outcome_indices,
                            std::size_t dim) const {
  Matrix sum(dim, dim);
  for (std::size_t k : outcome_indices) sum = sum + projectors.at(k);
  return sum;
}

Pipeline::Pipeline(std::size_t dim, InitialState initial, std::vector<Step> steps,
                   double tolerance)
    : dim_(dim), initial_(std::move(initial)), steps_(std::move(steps)),
      tolerance_(tolerance) {
  if (dim_ == 0) fail_validation("pipeline dimension must be positive");
  if (steps_.empty()) fail_validation("pipeline has no steps");
  if (tolerance_ <= 0.0) fail_validation("validation tolerance must be positive");

  if (has_pure_initial()) {
    const Vector& psi = pure_initial();
    if (psi.size() != dim_) {
      fail_validation("initial pure state has length " + std::to_string(psi.size()) +
                      ", pipeline dimension is " + std::to_string(dim_));
    }
    if (!psi.all_finite()) fail_validation("initial pure state has non-finite entries");
    const double residual = std::abs(psi.norm() - 1.0);
    if (residual > tolerance_) {
      fail_validation("initial pure state norm residual " + residual_string(residual));
    }
  } else {
    const Matrix& w = mixed_initial();
    if (w.rows() != dim_ || w.cols() != dim_) {
      fail_validation("initial density matrix is " + std::to_string(w.rows()) + "x" +
                      std::to_string(w.cols()) + ", pipeline dimension is " +
                      std::to_string(dim_));
    }
    if (!w.all_finite()) fail_validation("initial density matrix has non-finite entries");
    const double herm = hermiticity_residual(w);
    if (herm > tolerance_) {
      fail_validation("initial density matrix hermiticity residual " + residual_string(herm));
    }
    const double tr_residual = std::abs(trace(w) - Complex(1.0, 0.0));
    if (tr_residual > tolerance_) {
      fail_validation("initial density matrix trace residual " + residual_string(tr_residual));
    }
    const EigenDecomposition eig = hermitian_eig(w, tolerance_);
    for (double lambda : eig.eigenvalues) {
      if (lambda < -tolerance_) {
        fail_validation("initial density matrix has negative eigenvalue " +
                        residual_string(lambda));
      }
    }
  }

  std::uint64_t count = 1;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    validate_step(steps_[i], i + 1, dim_, tolerance_);
    const std::uint64_t m = steps_[i].measurement.outcome_count();
    if (count > std::numeric_limits<std::uint64_t>::max() / m) {
      fail_validation("path count overflows a 64-bit counter");
    }
    count *= m;
  }
  path_count_ = count;
}

std::string path_label(const Pipeline& pipeline, const Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.outcomes.size(); ++i) {
    if (i > 0) out += ',';
    out += pipeline.steps()[i].measurement.labels.at(path.outcomes[i]);
  }
  return out;
}

std::size_t path_id(const Pipeline& pipeline, const Path& path) {
  const auto& steps = pipeline.steps();
  if (path.outcomes.size() != steps.size()) {
    throw ValidationError("path has " + std::to_string(path.outcomes.size()) +
                          " outcomes, pipeline has " + std::to_string(steps.size()) +
                          " steps");
  }
  std::size_t id = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::size_t m = steps[i].measurement.outcome_count();
    if (path.outcomes[i] >= m) {
      throw ValidationError("step " + std::to_string(i + 1) + " outcome index " +
                            std::to_string(path.outcomes[i]) + " out of range");
    }
    id = id * m + path.outcomes[i];
  }
  return id;
}

Path path_from_id(const Pipeline& pipeline, std::size_t id) {
  const auto& steps = pipeline.steps();
  Path path;
  path.outcomes.resize(steps.size());
  std::size_t rest = id;
  for (std::size_t i = steps.size(); i-- > 0;) {
    const std::size_t m = steps[i].measurement.outcome_count();
    path.outcomes[i] = rest % m;
    rest /= m;
  }
  if (rest != 0) {
    throw ValidationError("path id " + std::to_string(id) + " out of range");
  }
  return path;
}

std::vector<Path> enumerate_paths(const Pipeline& pipeline, std::size_t cap) {
  const std::uint64_t count = pipeline.path_count();
  if (count > cap) {
    throw ResourceError("path count " + std::to_string(count) + " exceeds cap " +
                        std::to_string(cap));
  }
  std::vector<Path> paths;
  paths.reserve(count);
  for (std::size_t id = 0; id < count; ++id) {
    paths.push_back(path_from_id(pipeline, id));
  }
  return paths;
}

Event Event::from_ids(std::vector<std::size_t> ids) {
  std::sort(ids.begin(), ids.end());
  const auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end()) {
    throw ValidationError("event contains duplicate path id " + std::to_string(*dup));
  }
  Event e;
  e.ids_ = std::move(ids);
  return e;
}

Event Event::union_of(const Event& a, const Event& b) {
  Event e;
  e.ids_.reserve(a.ids_.size() + b.ids_.size());
  std::set_union(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                 std::back_inserter(e.ids_));
  return e;
}

Event Event::intersection_of(const Event& a, const Event& b) {
  Event e;
  std::set_intersection(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                        std::back_inserter(e.ids_));
  return e;
}

bool Event::contains(std::size_t id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool are_disjoint(const Event& a, const Event& b) {
  auto ia = a.ids().begin();
  auto ib = b.ids().begin();
  while (ia != a.ids().end() && ib != b.ids().end()) {
    if (*ia == *ib) return false;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return true;
}

Event full_event(const Pipeline& pipeline) {
  std::vector<std::size_t> ids(pipeline.path_count());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return Event::from_ids(std::move(ids));
}

void validate_homogeneous(const Pipeline& pipeline, const HomogeneousEvent& h) {
  const auto& steps = pipeline.steps();
  if (h.factors.size() != steps.size()) {
    throw ValidationError("homogeneous event has " + std::to_string(h.factors.size()) +
                          " factors, pipeline has " + std::to_string(steps.size()) +
                          " steps");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& factor = h.factors[i];
    const std::size_t m = steps[i].measurement.outcome_count();
    if (factor.empty()) {
      throw ValidationError("step " + std::to_string(i + 1) +
                            " factor of homogeneous event is empty");
    }
    std::set<std::size_t> seen;
    for (std::size_t k : factor) {
      if (k >= m) {
        throw ValidationError("step " + std::to_string(i + 1) + " outcome index " +
                              std::to_string(k) + " out of range");
      }
      if (!seen.insert(k).second) {
        throw ValidationError("step " + std::to_string(i + 1) +
                              " factor repeats outcome index " + std::to_string(k));
      }
    }
  }
}

std::uint64_t homogeneous_size(const HomogeneousEvent& h) {
  std::uint64_t n = 1;
  for (const auto& factor : h.factors) n *= factor.size();
  return n;
}

Event expand_homogeneous(const Pipeline& pipeline, const HomogeneousEvent& h) {
  validate_homogeneous(pipeline, h);

  std::vector<std::vector<std::size_t>> factors = h.factors;
  for (auto& factor : factors) std::sort(factor.begin(), factor.end());

  // Odometer over sorted factors emits ids in ascending order already.
  std::vector<std::size_t> ids;
  ids.reserve(homogeneous_size(h));
  std::vector<std::size_t> cursor(factors.size(), 0);
  while (true) {
    Path path;
    path.outcomes.reserve(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
      path.outcomes.push_back(factors[i][cursor[i]]);
    }
    ids.push_back(path_id(pipeline, path));

    std::size_t i = factors.size();
    while (i-- > 0) {
      if (++cursor[i] < factors[i].size()) break;
      cursor[i] = 0;
      if (i == 0) return Event::from_ids(std::move(ids));
    }
  }
}

FunctionTable indicator(const Pipeline& pipeline, const Event& event) {
  FunctionTable table;
  table.values.assign(pipeline.path_count(), 0.0);
  for (std::size_t id : event.ids()) table.values.at(id) = 1.0;
  return table;
}

}  // namespace qhist
