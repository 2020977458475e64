#pragma once

// Simultaneous approximation on R/Z. A target sequence x is "good" for the
// frequencies lambda when every integer relation among the lambdas also holds
// for the x's modulo 1; for good sequences the set of t with
// ||t lambda_j - x_j|| <= eps for all j is unbounded above, and the scan below
// finds an element of it.

#include "tfrunner/rational_structure.hpp"
#include "tfrunner/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfr {

/// Distance from x to the nearest integer.
inline double torus_norm(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("torus_norm of a non-finite value");
  return std::abs(x - std::nearbyint(x));
}

struct ExactFrequencies {
  RealBasis basis;
  std::vector<ExactReal> values;

  std::vector<double> to_doubles() const {
    std::vector<double> out;
    for (const auto& v : values) out.push_back(v.to_double(basis));
    return out;
  }
};

struct ApproxTask {
  std::vector<double> lambdas;
  std::optional<ExactFrequencies> exact;  // exact mode when present
  std::vector<double> targets;
  double epsilon = 0.05;
  double window_start = 0.0;
  std::int64_t scan_budget = std::int64_t{1} << 34;
  double relation_tolerance = 1e-9;
  std::int64_t relation_height = 64;  // heuristic mode only

  static ApproxTask from_exact(ExactFrequencies freqs, std::vector<double> targets, double epsilon,
                               double window_start = 0.0) {
    ApproxTask task;
    task.lambdas = freqs.to_doubles();
    task.exact = std::move(freqs);
    task.targets = std::move(targets);
    task.epsilon = epsilon;
    task.window_start = window_start;
    return task;
  }

  void validate() const {
    if (lambdas.empty()) throw std::invalid_argument("approximation task needs at least one frequency");
    if (lambdas.size() != targets.size()) throw std::invalid_argument("lambdas and targets differ in length");
    if (exact && exact->values.size() != lambdas.size())
      throw std::invalid_argument("exact frequencies and lambdas differ in length");
    if (!(epsilon > 0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");
    if (scan_budget < 1) throw std::invalid_argument("scan budget must be positive");
    for (double v : lambdas)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite frequency");
    for (double v : targets)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite target");
  }
};

struct SequenceVerdict {
  enum class Kind { Good, Bad };
  Kind kind = Kind::Good;
  std::optional<IntVector> violating_relation;
  std::optional<double> defect;
  bool heuristic = false;
  std::vector<IntVector> relations;  // relation basis that was checked

  bool good() const { return kind == Kind::Good; }
};

class BadSequence : public std::runtime_error {
 public:
  explicit BadSequence(SequenceVerdict verdict)
      : std::runtime_error("target sequence violates an integer relation of the frequencies"),
        verdict_(std::move(verdict)) {}
  const SequenceVerdict& verdict() const { return verdict_; }

 private:
  SequenceVerdict verdict_;
};

/// Distance of sum p_j x_j from Z.
inline double relation_defect(const IntVector& p, const std::vector<double>& x) {
  long double s = 0;
  for (std::size_t j = 0; j < p.size(); ++j) s += static_cast<long double>(p[j]) * x[j];
  s -= std::nearbyint(s);
  return static_cast<double>(std::abs(s));
}

inline SequenceVerdict classify_sequence(const ApproxTask& task) {
  task.validate();
  SequenceVerdict verdict;
  if (task.exact) {
    verdict.relations = relation_lattice(task.exact->values).basis;
  } else {
    verdict.heuristic = true;
    verdict.relations =
        float_relation_candidates(task.lambdas, {task.relation_height, task.relation_tolerance});
  }
  for (const auto& p : verdict.relations) {
    const double d = relation_defect(p, task.targets);
    if (d > task.relation_tolerance) {
      verdict.kind = SequenceVerdict::Kind::Bad;
      verdict.violating_relation = p;
      verdict.defect = d;
      break;
    }
  }
  return verdict;
}

struct ApproxWitness {
  double t;
  double achieved_error;
  std::int64_t grid_index;
};

/// max_j ||t lambda_j - x_j||.
inline double approximation_error(const std::vector<double>& lambdas, const std::vector<double>& targets,
                                  double t) {
  double worst = 0;
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    worst = std::max(worst, torus_norm(t * lambdas[j] - targets[j]));
  return worst;
}

/// Grid scan of [alpha, alpha + span) at step eps / (4 max|lambda_j|) with
/// span doubling until the budget (grid points) is spent. Throws BadSequence
/// for bad sequences; nullopt means the budget ran out, which is not a
/// disproof.
inline std::optional<ApproxWitness> kronecker_witness(const ApproxTask& task) {
  SequenceVerdict verdict = classify_sequence(task);
  if (!verdict.good()) throw BadSequence(std::move(verdict));

  const auto& lam = task.lambdas;
  const auto& x = task.targets;
  double lam_max = 0;
  for (double v : lam) lam_max = std::max(lam_max, std::abs(v));
  if (lam_max == 0) {
    double err = approximation_error(lam, x, task.window_start);
    if (err <= task.epsilon) return ApproxWitness{task.window_start, err, 0};
    return std::nullopt;
  }
  for (std::size_t j = 0; j < lam.size(); ++j)
    if (lam[j] == 0 && torus_norm(x[j]) > task.epsilon) return std::nullopt;

  const double eps = task.epsilon;
  auto probe = [&](double t) {
    double skip = 0;
    for (std::size_t j = 0; j < lam.size(); ++j) {
      if (lam[j] == 0) continue;
      const double err = torus_norm(t * lam[j] - x[j]);
      if (err > eps) skip = std::max(skip, (err - eps) / std::abs(lam[j]));
    }
    return skip;
  };
  scan::Grid grid{task.window_start, eps / (4.0 * lam_max), task.scan_budget};
  auto hit = scan::first_hit(grid, probe);
  if (!hit) return std::nullopt;
  return ApproxWitness{hit->t, approximation_error(lam, x, hit->t), hit->index};
}

}  // namespace tfr
