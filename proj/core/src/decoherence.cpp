#include "qhist/decoherence.hpp"

#include <utility>

#include "qhist/errors.hpp"

namespace qhist {

std::vector<StateComponent> initial_components(const Pipeline& pipeline) {
  std::vector<StateComponent> components;
  if (pipeline.has_pure_initial()) {
    components.push_back({1.0, pipeline.pure_initial()});
    return components;
  }
  const Matrix& w = pipeline.mixed_initial();
  const EigenDecomposition eig = hermitian_eig(w, pipeline.validation_tolerance());
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues[k];
    if (lambda < kEigenvalueCutoff) continue;
    components.push_back({lambda, eig.eigenvectors[k]});
  }
  return components;
}

Vector path_amplitude(const Pipeline& pipeline, const Vector& psi, const Path& path) {
  if (psi.size() != pipeline.dim()) {
    throw ShapeError("path_amplitude: state has length " + std::to_string(psi.size()) +
                     ", pipeline dimension is " + std::to_string(pipeline.dim()));
  }
  if (path.outcomes.size() != pipeline.step_count()) {
    throw ShapeError("path_amplitude: path has " +
                     std::to_string(path.outcomes.size()) + " outcomes, pipeline has " +
                     std::to_string(pipeline.step_count()) + " steps");
  }
  Vector v = psi;
  for (std::size_t i = 0; i < pipeline.step_count(); ++i) {
    const Step& step = pipeline.steps()[i];
    v = apply(step.measurement.projectors.at(path.outcomes[i]), apply(step.gate, v));
  }
  return v;
}

std::vector<Vector> pure_path_amplitudes(const Pipeline& pipeline, const Vector& psi,
                                         std::size_t cap) {
  if (pipeline.path_count() > cap) {
    throw ResourceError("path count " + std::to_string(pipeline.path_count()) +
                        " exceeds cap " + std::to_string(cap));
  }
  // Breadth-first over steps: level i holds one vector per outcome prefix
  // of length i, in lexicographic prefix order. The final level is then in
  // path id order.
  std::vector<Vector> level{psi};
  for (const Step& step : pipeline.steps()) {
    const std::size_t m = step.measurement.outcome_count();
    std::vector<Vector> next;
    next.reserve(level.size() * m);
    for (const Vector& v : level) {
      const Vector propagated = apply(step.gate, v);
      for (std::size_t k = 0; k < m; ++k) {
        next.push_back(apply(step.measurement.projectors[k], propagated));
      }
    }
    level = std::move(next);
  }
  return level;
}

Complex decoherence_pair(const Pipeline& pipeline, const Path& w1, const Path& w2) {
  Complex sum = 0.0;
  for (const StateComponent& component : initial_components(pipeline)) {
    const Vector a = path_amplitude(pipeline, component.vector, w1);
    const Vector b = path_amplitude(pipeline, component.vector, w2);
    sum += component.weight * inner_product(a, b);
  }
  return sum;
}

DecoherenceMatrix decoherence_matrix(const Pipeline& pipeline, std::size_t cap) {
  const std::uint64_t count = pipeline.path_count();
  if (count > cap) {
    throw ResourceError("decoherence matrix order " + std::to_string(count) +
                        " exceeds cap " + std::to_string(cap) +
                        "; query individual pairs instead of the full table");
  }
  const std::size_t n = static_cast<std::size_t>(count);
  DecoherenceMatrix matrix;
  matrix.order = n;
  matrix.entries.assign(n * n, Complex(0.0, 0.0));
  for (const StateComponent& component : initial_components(pipeline)) {
    const std::vector<Vector> amps =
        pure_path_amplitudes(pipeline, component.vector, cap);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        matrix.entries[j * n + k] +=
            component.weight * inner_product(amps[j], amps[k]);
      }
    }
  }
  return matrix;
}

Complex decoherence_event(const DecoherenceMatrix& matrix, const Event& a,
                          const Event& b) {
  Complex sum = 0.0;
  for (std::size_t j : a.ids()) {
    for (std::size_t k : b.ids()) {
      sum += matrix(j, k);
    }
  }
  return sum;
}

std::vector<double> path_measures(const Pipeline& pipeline, std::size_t cap) {
  const std::uint64_t count = pipeline.path_count();
  if (count > cap) {
    throw ResourceError("path count " + std::to_string(count) + " exceeds cap " +
                        std::to_string(cap));
  }
  std::vector<double> measures(static_cast<std::size_t>(count), 0.0);

  // Depth-first chain evaluation: one live vector per level keeps memory at
  // O(steps * dim) regardless of path count. Leaves arrive in path id order.
  for (const StateComponent& component : initial_components(pipeline)) {
    std::size_t next_id = 0;
    auto walk = [&](auto&& self, const Vector& state, std::size_t depth) -> void {
      const Step& step = pipeline.steps()[depth];
      const Vector propagated = apply(step.gate, state);
      for (std::size_t k = 0; k < step.measurement.outcome_count(); ++k) {
        const Vector branch = apply(step.measurement.projectors[k], propagated);
        if (depth + 1 == pipeline.step_count()) {
          measures[next_id++] += component.weight * branch.squared_norm();
        } else {
          self(self, branch, depth + 1);
        }
      }
    };
    walk(walk, component.vector, 0);
  }
  return measures;
}

}  // namespace qhist
