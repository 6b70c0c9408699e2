#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "netenergy/matrix.hpp"

namespace netenergy::lp {

// minimize c^T x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
// Either constraint block may be empty (0 rows, num_vars columns).
struct LinearProgram {
  std::vector<double> objective;
  Matrix a_ub;
  std::vector<double> b_ub;
  Matrix a_eq;
  std::vector<double> b_eq;

  std::size_t num_vars() const noexcept { return objective.size(); }
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;  // populated when optimal
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-11;
  double pivot_tolerance = 1e-10;
  // 0 picks a limit proportional to the problem size.
  std::size_t max_iterations = 0;
  // Consecutive degenerate pivots before falling back to Bland's rule.
  std::size_t degenerate_pivots_before_bland = 50;
  // Stop after phase one (any feasible vertex); the objective is ignored.
  bool feasibility_only = false;
};

// Two-phase dense tableau simplex. Dantzig pricing with a Bland's-rule
// fallback after a run of degenerate pivots.
LpResult lp_solve(const LinearProgram& program, const LpOptions& options = {});

}  // namespace netenergy::lp
