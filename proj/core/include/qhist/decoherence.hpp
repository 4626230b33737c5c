#pragma once

#include <cstddef>
#include <vector>

#include "qhist/linalg.hpp"
#include "qhist/pipeline.hpp"

namespace qhist {

/// Full |Omega| x |Omega| tables are quadratic in memory; the cap keeps a
/// single matrix under ~256 MiB of entries.
inline constexpr std::size_t kDefaultMatrixCap = 4096;

/// Spectral weights of the initial state below this are dropped.
inline constexpr double kEigenvalueCutoff = 1e-12;

/// Entry (j, k) pairs path j against path k in enumeration order.
/// Diagonal entries are the path measures.
struct DecoherenceMatrix {
  std::size_t order = 0;
  std::vector<Complex> entries;

  const Complex& operator()(std::size_t j, std::size_t k) const {
    return entries[j * order + k];
  }
};

/// One pure component of the initial state: a unit vector with its weight.
/// A pure initial state yields one component of weight 1.
struct StateComponent {
  double weight = 0.0;
  Vector vector;
};

std::vector<StateComponent> initial_components(const Pipeline& pipeline);

/// Applies the chain for one path: at each step the gate, then the projector
/// selected by the path's outcome at that step.
Vector path_amplitude(const Pipeline& pipeline, const Vector& psi, const Path& path);

/// Chain vectors for every path in enumeration order. Partial products are
/// shared across paths with a common prefix.
std::vector<Vector> pure_path_amplitudes(const Pipeline& pipeline, const Vector& psi,
                                         std::size_t cap = kDefaultPathCap);

/// Pairing of two paths through the initial state. The first argument is
/// conjugated, so the diagonal is a squared norm and never negative.
Complex decoherence_pair(const Pipeline& pipeline, const Path& w1, const Path& w2);

/// Full pairing table over the enumerated path space.
DecoherenceMatrix decoherence_matrix(const Pipeline& pipeline,
                                     std::size_t cap = kDefaultMatrixCap);

/// Bilinear extension to events: the double sum over all pairs drawn from
/// a and b, in ascending id order.
Complex decoherence_event(const DecoherenceMatrix& matrix, const Event& a,
                          const Event& b);

/// Diagonal only (one squared norm per path), computed without holding all
/// amplitudes, so it scales to path counts far above the matrix cap.
std::vector<double> path_measures(const Pipeline& pipeline,
                                  std::size_t cap = kDefaultPathCap);

}  // namespace qhist
