#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netenergy/matrix.hpp"

// Standard interference functions and mappings.
//
// A mapping J : R^M_+ -> R^M_++ is standard when every component is positive,
// scalable (a J(x) > J(a x) for a > 1) and monotone (x1 >= x2 implies
// J(x1) >= J(x2)). Concave positive functions qualify, and the class is closed
// under positive scaled sums, componentwise min/max and composition, so
// mappings here are built as immutable trees of those combinators over leaves.
namespace netenergy::ifcalc {

using Vector = std::vector<double>;

enum class NodeKind { leaf, scaled_sum, min, max, composition, cap };

class InterferenceMapping {
 public:
  // Writes J(x) into out; both spans have the mapping's dimension.
  using Function = std::function<void(std::span<const double> x, std::span<double> out)>;

  // A user-supplied component function. `upper_bound`, when given, must hold
  // for every input (checked in verification mode).
  static InterferenceMapping leaf(std::size_t dimension, Function f,
                                  std::optional<double> upper_bound = std::nullopt,
                                  std::string label = "leaf");
  static InterferenceMapping constant(Vector values);
  static InterferenceMapping constant(std::size_t dimension, double value);
  // x -> A x + b with A >= 0 and b > 0 (square A).
  static InterferenceMapping affine(Matrix coefficients, Vector offsets);

  std::size_t dimension() const;
  // B with J(x) <= B 1 for every x, if one is known.
  std::optional<double> upper_bound() const;
  NodeKind kind() const;
  const std::string& label() const;
  std::span<const InterferenceMapping> children() const;
  std::span<const double> weights() const;  // scaled_sum only
  double cap_level() const;                 // cap only

  void evaluate(std::span<const double> x, std::span<double> out) const;
  Vector operator()(std::span<const double> x) const;

 private:
  struct Node;
  explicit InterferenceMapping(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend InterferenceMapping combine_scaled_sum(std::span<const InterferenceMapping>,
                                                std::span<const double>);
  friend InterferenceMapping combine_min(std::span<const InterferenceMapping>);
  friend InterferenceMapping combine_max(std::span<const InterferenceMapping>);
  friend InterferenceMapping compose(const InterferenceMapping&, const InterferenceMapping&);
  friend InterferenceMapping cap(const InterferenceMapping&, double);
};

// sum_k w_k J_k(x); bound sum_k w_k B_k when every child has one.
InterferenceMapping combine_scaled_sum(std::span<const InterferenceMapping> maps,
                                       std::span<const double> weights);
// Componentwise min; inherits the smallest child bound that is known.
InterferenceMapping combine_min(std::span<const InterferenceMapping> maps);
// Componentwise max; bounded only if every child is.
InterferenceMapping combine_max(std::span<const InterferenceMapping> maps);
// outer(inner(x)).
InterferenceMapping compose(const InterferenceMapping& outer, const InterferenceMapping& inner);
// min(J(x), level) componentwise; bound = level.
InterferenceMapping cap(const InterferenceMapping& inner, double level);

// Verification mode re-checks positivity and declared bounds on every
// evaluation. Initialised from the NETENERGY_VERIFY environment variable.
void set_verification_mode(bool enabled);
bool verification_mode();

struct AxiomViolation {
  enum class Kind { scalability, monotonicity };
  Kind kind = Kind::scalability;
  std::size_t component = 0;
  Vector x;   // scalability: x; monotonicity: the larger point x1
  Vector x2;  // monotonicity only: the smaller point
  double alpha = 1.0;
  double lhs = 0.0;  // a J(x) or J(x1)
  double rhs = 0.0;  // J(a x) or J(x2)
};

struct AxiomReport {
  std::size_t samples = 0;
  std::size_t scalability_violations = 0;
  std::size_t monotonicity_violations = 0;
  std::vector<AxiomViolation> witnesses;  // first few violations

  bool ok() const noexcept { return scalability_violations == 0 && monotonicity_violations == 0; }
};

struct AxiomCheckOptions {
  double relative_slack = 1e-12;
  std::size_t max_witnesses = 16;
};

// Randomised test of both axioms: x in R^M_+, alpha in (1, 10], x1 >= x2.
AxiomReport check_axioms(const InterferenceMapping& map, std::size_t sample_count,
                         std::uint64_t seed, const AxiomCheckOptions& options = {});

struct IterationState {
  std::size_t iteration = 0;
  std::span<const double> lower;
  std::span<const double> upper;  // empty when uncertified
};

struct FixedPointOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 100000;
  // Called once per iteration, starting with the initial iterates.
  std::function<void(const IterationState&)> observer;
};

struct FixedPointResult {
  Vector fixed_point;
  Vector lower;
  std::optional<Vector> upper;
  std::size_t iterations = 0;
  std::optional<double> certified_gap;
  double residual = 0.0;  // ||x* - J(x*)||_inf

  bool certified() const noexcept { return certified_gap.has_value(); }
};

// Picard iteration. With a known upper bound B two sequences run from 0 and
// B 1, bracketing the fixed point; the solver stops once they are within
// tolerance in the sup norm. Without a bound a single sequence from 0 stops
// on the successive-iterate gap and carries no certificate.
FixedPointResult fixed_point(const InterferenceMapping& map, const FixedPointOptions& options = {});

// Single Picard sequence from an arbitrary nonnegative start; stops on the
// successive-iterate gap.
FixedPointResult picard_from(const InterferenceMapping& map, std::span<const double> start,
                             const FixedPointOptions& options = {});

// True iff J(x') <= x'. A fixed point exists exactly when some strictly
// positive x' passes.
bool has_fixed_point_certificate(const InterferenceMapping& map, std::span<const double> candidate);

double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace netenergy::ifcalc
