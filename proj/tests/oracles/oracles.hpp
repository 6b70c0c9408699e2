#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library code they are compared against.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "netenergy/ifcalc.hpp"
#include "netenergy/matrix.hpp"
#include "netenergy/rng.hpp"
#include "netenergy/scenario.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

// Solve A x = b by Gauss-Jordan with partial pivoting; nullopt if singular.
std::optional<Vec> solve_dense(Mat a, Vec b, double singular_tol = 1e-12);
// Inverse by Gauss-Jordan on [A | I]; nullopt if singular.
std::optional<Mat> invert(Mat a);

// Brute-force LP: enumerate every basis of {A_ub x <= b, A_eq x = b, x >= 0}
// and keep the best feasible vertex. Only valid for bounded problems.
struct VertexResult {
  bool feasible = false;
  double objective = 0.0;
  Vec x;
};
VertexResult vertex_enumeration(const Vec& c, const Mat& a_ub, const Vec& b_ub, const Mat& a_eq,
                                const Vec& b_eq, double tol = 1e-9);

// 1 - sum_{i=k}^{n} C(n,i) p^i (1-p)^{n-i} summed term by term in long double.
double exceedance_direct(std::size_t n, std::size_t k, double p);

// Probability by simulation: fraction of trials where F(X_{k:n}) > p, with
// X drawn from `dist` (0 uniform, 1 exponential, 2 lognormal).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
McEstimate exceedance_monte_carlo(std::size_t n, std::size_t k, double p, int dist,
                                  std::size_t trials, std::uint64_t seed);

// GP posterior with an explicit inverse: mean = k*^T K^-1 y, var = k** - k*^T K^-1 k*.
struct GpPosterior {
  Vec mean;
  Vec var;
};
GpPosterior se_posterior(const Vec& t, const Vec& y, const Vec& ts, double lengthscale,
                         double variance, double noise, double jitter);

// I_i(rho) computed from the raw scenario fields; rho has one entry per station.
Vec load_direct(const netenergy::NetworkScenario& sc, const netenergy::Matrix& x, const Vec& rho);

// Random mapping tree from concave positive leaves and the standard combinators.
netenergy::ifcalc::InterferenceMapping random_standard_mapping(std::size_t dim,
                                                               netenergy::Rng& rng, int depth);

// Random concave positive leaf: mixtures of a + B x, sqrt, log1p, saturating terms.
netenergy::ifcalc::InterferenceMapping random_concave_leaf(std::size_t dim, netenergy::Rng& rng);

}  // namespace oracle
