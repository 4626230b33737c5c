#include "qhist/integral.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "qhist/errors.hpp"
#include "qhist/rng.hpp"

namespace qhist {

namespace {

void validate_table(const QMeasureContext& ctx, const FunctionTable& f) {
  const std::size_t n = ctx.matrix().order;
  if (f.values.size() != n) {
    throw ShapeError("function table has " + std::to_string(f.values.size()) +
                     " values, path space has " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(f.values[i])) {
      throw ValidationError("function value at path " + std::to_string(i) +
                            " is not finite");
    }
  }
}

/// Raw diagonal entry, guarded but not clamped: both integral algorithms
/// use the same raw values so their disagreement measures only rounding.
double raw_measure(const QMeasureContext& ctx, std::size_t id) {
  const double value = ctx.matrix()(id, id).real();
  if (value < -ctx.tolerance()) {
    throw ConsistencyError("path measure is negative: " + std::to_string(value));
  }
  return value;
}

/// Level-set sweep for a nonnegative part. Paths are added in descending
/// value order; the running event measure is updated incrementally with the
/// cross terms of each added path, keeping the whole sweep quadratic.
double level_set_nonneg(const QMeasureContext& ctx, const std::vector<double>& part) {
  std::vector<std::pair<double, std::size_t>> items;
  for (std::size_t i = 0; i < part.size(); ++i) {
    if (part[i] > 0.0) items.emplace_back(part[i], i);
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  const DecoherenceMatrix& m = ctx.matrix();
  std::vector<std::size_t> members;
  members.reserve(items.size());
  double running_measure = 0.0;
  double total = 0.0;
  std::size_t pos = 0;
  while (pos < items.size()) {
    const double lambda = items[pos].first;
    while (pos < items.size() && items[pos].first == lambda) {
      const std::size_t x = items[pos].second;
      double cross = 0.0;
      for (std::size_t s : members) cross += m(s, x).real();
      running_measure += m(x, x).real() + 2.0 * cross;
      members.push_back(x);
      ++pos;
    }
    if (running_measure < -ctx.tolerance()) {
      throw ConsistencyError("level-set measure is negative: " +
                             std::to_string(running_measure));
    }
    const double next_lambda = pos < items.size() ? items[pos].first : 0.0;
    total += (lambda - next_lambda) * running_measure;
  }
  return total;
}

void split_signed(const FunctionTable& f, std::vector<double>& plus,
                  std::vector<double>& minus) {
  plus.resize(f.values.size());
  minus.resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    plus[i] = std::max(f.values[i], 0.0);
    minus[i] = std::max(-f.values[i], 0.0);
  }
}

double pairwise_nonneg(const QMeasureContext& ctx, const std::vector<double>& values) {
  const DecoherenceMatrix& m = ctx.matrix();
  const std::size_t n = m.order;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += values[i] * raw_measure(ctx, i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      total += 2.0 * m(i, j).real() * std::min(values[i], values[j]);
    }
  }
  return total;
}

}  // namespace

double integrate_level_set(const QMeasureContext& ctx, const FunctionTable& f) {
  validate_table(ctx, f);
  std::vector<double> plus, minus;
  split_signed(f, plus, minus);
  return level_set_nonneg(ctx, plus) - level_set_nonneg(ctx, minus);
}

double integrate_pairwise(const QMeasureContext& ctx, const FunctionTable& f) {
  validate_table(ctx, f);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] < 0.0) {
      throw PreconditionError("pairwise integral requires nonnegative values; path " +
                              std::to_string(i) + " has " +
                              std::to_string(f.values[i]));
    }
  }
  return pairwise_nonneg(ctx, f.values);
}

IntegralResult integrate(const QMeasureContext& ctx, const FunctionTable& f) {
  validate_table(ctx, f);
  std::vector<double> plus, minus;
  split_signed(f, plus, minus);

  IntegralResult out;
  out.by_level_set = level_set_nonneg(ctx, plus) - level_set_nonneg(ctx, minus);
  out.by_pairwise = pairwise_nonneg(ctx, plus) - pairwise_nonneg(ctx, minus);
  out.agreement_residual = std::abs(out.by_level_set - out.by_pairwise);
  if (out.agreement_residual > ctx.tolerance()) {
    throw ConsistencyError("integral algorithms disagree by " +
                           std::to_string(out.agreement_residual));
  }
  out.value = out.by_level_set;
  return out;
}

double FunctionalConditionsReport::max_residual() const {
  return std::max({simple_pair_form, disjoint_support_additivity, homogeneity,
                   signed_split, simple_chain_expansion});
}

namespace {

/// Assigns each path to one of `slots` disjoint events or to none.
std::vector<Event> random_disjoint_events(Rng& rng, std::size_t n, std::size_t slots) {
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

FunctionTable zero_table(std::size_t n) {
  FunctionTable t;
  t.values.assign(n, 0.0);
  return t;
}

}  // namespace

FunctionalConditionsReport check_functional_conditions(const QMeasureContext& ctx,
                                                       int trials,
                                                       std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("functional conditions need trials >= 1");
  const std::size_t n = ctx.matrix().order;
  Rng rng(seed);
  FunctionalConditionsReport report;

  for (int trial = 0; trial < trials; ++trial) {
    {
      const std::vector<Event> ab = random_disjoint_events(rng, n, 2);
      const double alpha = 3.0 * rng.next_double();
      const double beta = 3.0 * rng.next_double();
      FunctionTable h = zero_table(n);
      for (std::size_t id : ab[0].ids()) h.values[id] = alpha;
      for (std::size_t id : ab[1].ids()) h.values[id] = beta;
      const double lhs = integrate(ctx, h).value;
      const double rhs = alpha * measure(ctx, ab[0]) + beta * measure(ctx, ab[1]) +
                         std::min(alpha, beta) * interference(ctx, ab[0], ab[1]);
      report.simple_pair_form = std::max(report.simple_pair_form, std::abs(lhs - rhs));
    }

    {
      const std::vector<Event> abc = random_disjoint_events(rng, n, 3);
      std::vector<FunctionTable> parts;
      for (const Event& e : abc) {
        FunctionTable t = zero_table(n);
        for (std::size_t id : e.ids()) t.values[id] = 2.0 * rng.next_double();
        parts.push_back(std::move(t));
      }
      auto sum_tables = [&](std::initializer_list<const FunctionTable*> tables) {
        FunctionTable t = zero_table(n);
        for (const FunctionTable* src : tables) {
          for (std::size_t i = 0; i < n; ++i) t.values[i] += src->values[i];
        }
        return t;
      };
      const FunctionTable& f = parts[0];
      const FunctionTable& g = parts[1];
      const FunctionTable& h = parts[2];
      const double lhs = integrate(ctx, sum_tables({&f, &g, &h})).value;
      const double rhs = integrate(ctx, sum_tables({&f, &g})).value +
                         integrate(ctx, sum_tables({&f, &h})).value +
                         integrate(ctx, sum_tables({&g, &h})).value -
                         integrate(ctx, f).value - integrate(ctx, g).value -
                         integrate(ctx, h).value;
      report.disjoint_support_additivity =
          std::max(report.disjoint_support_additivity, std::abs(lhs - rhs));
    }

    {
      FunctionTable f = zero_table(n);
      for (std::size_t i = 0; i < n; ++i) f.values[i] = 4.0 * rng.next_double() - 2.0;
      const double base = integrate(ctx, f).value;
      for (const double alpha : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        FunctionTable scaled = zero_table(n);
        for (std::size_t i = 0; i < n; ++i) scaled.values[i] = alpha * f.values[i];
        const double lhs = integrate(ctx, scaled).value;
        report.homogeneity =
            std::max(report.homogeneity, std::abs(lhs - alpha * base));
      }

      FunctionTable plus = zero_table(n);
      FunctionTable minus = zero_table(n);
      for (std::size_t i = 0; i < n; ++i) {
        plus.values[i] = std::max(f.values[i], 0.0);
        minus.values[i] = std::max(-f.values[i], 0.0);
      }
      const double split =
          integrate(ctx, plus).value - integrate(ctx, minus).value;
      report.signed_split =
          std::max(report.signed_split, std::abs(base - split));
    }

    {
      const std::size_t slots = 2 + rng.next_below(3);
      const std::vector<Event> events = random_disjoint_events(rng, n, slots);
      std::vector<double> alphas(slots);
      for (double& a : alphas) a = 3.0 * rng.next_double();
      std::sort(alphas.begin(), alphas.end());
      FunctionTable f = zero_table(n);
      for (std::size_t i = 0; i < slots; ++i) {
        for (std::size_t id : events[i].ids()) f.values[id] = alphas[i];
      }
      const double lhs = integrate(ctx, f).value;
      double rhs = 0.0;
      for (std::size_t i = 0; i < slots; ++i) rhs += alphas[i] * measure(ctx, events[i]);
      for (std::size_t i = 0; i < slots; ++i) {
        for (std::size_t j = i + 1; j < slots; ++j) {
          rhs += alphas[i] * interference(ctx, events[i], events[j]);
        }
      }
      report.simple_chain_expansion =
          std::max(report.simple_chain_expansion, std::abs(lhs - rhs));
    }
  }
  return report;
}

namespace {

FunctionTable decode_base3(std::size_t index, std::size_t n) {
  FunctionTable t;
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.values[i] = static_cast<double>(index % 3);
    index /= 3;
  }
  return t;
}

std::optional<NonlinearityWitness> make_witness(const QMeasureContext& ctx,
                                                FunctionTable f, FunctionTable g) {
  FunctionTable sum;
  sum.values.resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    sum.values[i] = f.values[i] + g.values[i];
  }
  NonlinearityWitness w;
  w.integral_f = integrate(ctx, f);
  w.integral_g = integrate(ctx, g);
  w.integral_sum = integrate(ctx, sum);
  w.defect = std::abs(w.integral_sum.value - w.integral_f.value - w.integral_g.value);
  if (w.defect <= kNonlinearityThreshold) return std::nullopt;
  w.f = std::move(f);
  w.g = std::move(g);
  return w;
}

}  // namespace

std::optional<NonlinearityWitness> demonstrate_nonlinearity(const QMeasureContext& ctx) {
  const std::size_t n = ctx.matrix().order;

  if (n <= 6) {
    std::size_t grid = 1;
    for (std::size_t i = 0; i < n; ++i) grid *= 3;

    std::vector<FunctionTable> tables(grid);
    std::vector<double> integrals(grid);
    for (std::size_t idx = 0; idx < grid; ++idx) {
      tables[idx] = decode_base3(idx, n);
      integrals[idx] = integrate_level_set(ctx, tables[idx]);
    }
    FunctionTable sum;
    sum.values.resize(n);
    for (std::size_t fi = 0; fi < grid; ++fi) {
      for (std::size_t gi = fi; gi < grid; ++gi) {
        for (std::size_t i = 0; i < n; ++i) {
          sum.values[i] = tables[fi].values[i] + tables[gi].values[i];
        }
        const double defect =
            std::abs(integrate_level_set(ctx, sum) - integrals[fi] - integrals[gi]);
        if (defect > kNonlinearityThreshold) {
          auto witness = make_witness(ctx, tables[fi], tables[gi]);
          if (witness) return witness;
        }
      }
    }
    return std::nullopt;
  }

  Rng rng(0x8f1d2c3b4a596877ULL);
  for (int attempt = 0; attempt < 500; ++attempt) {
    FunctionTable f, g;
    f.values.resize(n);
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      f.values[i] = static_cast<double>(rng.next_below(3));
      g.values[i] = static_cast<double>(rng.next_below(3));
    }
    FunctionTable sum;
    sum.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) sum.values[i] = f.values[i] + g.values[i];
    const double defect =
        std::abs(integrate_level_set(ctx, sum) - integrate_level_set(ctx, f) -
                 integrate_level_set(ctx, g));
    if (defect > kNonlinearityThreshold) {
      auto witness = make_witness(ctx, std::move(f), std::move(g));
      if (witness) return witness;
    }
  }
  return std::nullopt;
}

}  // namespace qhist
