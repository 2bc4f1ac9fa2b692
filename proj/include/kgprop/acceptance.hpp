#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace kgprop {

/// One acceptance criterion: named metrics, a verdict and the wall time
/// against its budget. `pass` includes the budget.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double budget = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;

  double metric(const std::string& key) const;
};

/// Criteria 1-12 with their pinned parameters. `seed` drives the random modes
/// and pairs of criteria 1 and 2.
CriterionResult criterion_projection_algebra(unsigned seed = 1);
CriterionResult criterion_conservation(unsigned seed = 1);
CriterionResult criterion_evolution_accuracy();
CriterionResult criterion_causality();
CriterionResult criterion_green_function();
CriterionResult criterion_oracle_triangle();
CriterionResult criterion_inverse_residuals();
CriterionResult criterion_feynman_boundary();
CriterionResult criterion_isozaki();
CriterionResult criterion_remainder_decay();
CriterionResult criterion_wavefront();
CriterionResult criterion_invertibility();

/// All criteria in order (or only the ids in `only`); `on_result` (if set) is
/// called after each one.
std::vector<CriterionResult> run_acceptance(
    unsigned seed = 1, const std::function<void(const CriterionResult&)>& on_result = {},
    const std::vector<int>& only = {});

/// "PASS  3 evolution accuracy  ratio=15.9 ..." style line.
std::string format_line(const CriterionResult& r);

}  // namespace kgprop
