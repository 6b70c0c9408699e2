#include "netenergy/ifcalc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "netenergy/errors.hpp"
#include "netenergy/rng.hpp"

namespace netenergy::ifcalc {

namespace {

bool env_verification_default() {
  const char* v = std::getenv("NETENERGY_VERIFY");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

std::atomic<bool>& verification_flag() {
  static std::atomic<bool> flag{env_verification_default()};
  return flag;
}

}  // namespace

void set_verification_mode(bool enabled) { verification_flag().store(enabled); }
bool verification_mode() { return verification_flag().load(std::memory_order_relaxed); }

struct InterferenceMapping::Node {
  NodeKind kind = NodeKind::leaf;
  std::size_t dimension = 0;
  std::optional<double> bound;
  std::string label;
  Function fn;                               // leaf
  std::vector<InterferenceMapping> children;  // combinators
  std::vector<double> weights;                // scaled_sum
  double level = 0.0;                         // cap
};

InterferenceMapping::InterferenceMapping(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

InterferenceMapping InterferenceMapping::leaf(std::size_t dimension, Function f,
                                              std::optional<double> upper_bound, std::string label) {
  if (dimension == 0) throw DimensionError("interference mapping dimension must be >= 1");
  if (!f) throw InvalidArgument("leaf function is empty");
  if (upper_bound && !(*upper_bound > 0.0)) throw InvalidArgument("upper bound must be > 0");
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::leaf;
  node->dimension = dimension;
  node->bound = upper_bound;
  node->label = std::move(label);
  node->fn = std::move(f);
  return InterferenceMapping(std::move(node));
}

InterferenceMapping InterferenceMapping::constant(Vector values) {
  if (values.empty()) throw DimensionError("constant mapping needs at least one component");
  double hi = 0.0;
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("constant mapping values must be > 0");
    hi = std::max(hi, v);
  }
  const std::size_t dim = values.size();
  return leaf(
      dim,
      [values = std::move(values)](std::span<const double>, std::span<double> out) {
        std::copy(values.begin(), values.end(), out.begin());
      },
      hi, "constant");
}

InterferenceMapping InterferenceMapping::constant(std::size_t dimension, double value) {
  return constant(Vector(dimension, value));
}

InterferenceMapping InterferenceMapping::affine(Matrix coefficients, Vector offsets) {
  const std::size_t dim = offsets.size();
  if (coefficients.rows() != dim || coefficients.cols() != dim) {
    throw DimensionError("affine mapping needs a square coefficient matrix matching the offsets");
  }
  for (double a : coefficients.data()) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("affine coefficients must be >= 0");
  }
  bool all_zero = true;
  for (double a : coefficients.data()) all_zero = all_zero && a == 0.0;
  double hi = 0.0;
  for (double b : offsets) {
    if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("affine offsets must be > 0");
    hi = std::max(hi, b);
  }
  std::optional<double> bound;
  if (all_zero) bound = hi;
  return leaf(
      dim,
      [a = std::move(coefficients), b = std::move(offsets)](std::span<const double> x,
                                                            std::span<double> out) {
        for (std::size_t i = 0; i < b.size(); ++i) {
          double acc = b[i];
          const auto row = a.row(i);
          for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * x[k];
          out[i] = acc;
        }
      },
      bound, "affine");
}

std::size_t InterferenceMapping::dimension() const { return node_->dimension; }
std::optional<double> InterferenceMapping::upper_bound() const { return node_->bound; }
NodeKind InterferenceMapping::kind() const { return node_->kind; }
const std::string& InterferenceMapping::label() const { return node_->label; }
std::span<const InterferenceMapping> InterferenceMapping::children() const { return node_->children; }
std::span<const double> InterferenceMapping::weights() const { return node_->weights; }
double InterferenceMapping::cap_level() const { return node_->level; }

void InterferenceMapping::evaluate(std::span<const double> x, std::span<double> out) const {
  const Node& n = *node_;
  if (x.size() != n.dimension || out.size() != n.dimension) {
    throw DimensionError("evaluate: expected vectors of dimension " + std::to_string(n.dimension));
  }
  switch (n.kind) {
    case NodeKind::leaf:
      n.fn(x, out);
      break;
    case NodeKind::scaled_sum: {
      std::fill(out.begin(), out.end(), 0.0);
      Vector tmp(n.dimension);
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        n.children[k].evaluate(x, tmp);
        for (std::size_t i = 0; i < n.dimension; ++i) out[i] += n.weights[k] * tmp[i];
      }
      break;
    }
    case NodeKind::min:
    case NodeKind::max: {
      n.children.front().evaluate(x, out);
      Vector tmp(n.dimension);
      for (std::size_t k = 1; k < n.children.size(); ++k) {
        n.children[k].evaluate(x, tmp);
        for (std::size_t i = 0; i < n.dimension; ++i) {
          out[i] = n.kind == NodeKind::min ? std::min(out[i], tmp[i]) : std::max(out[i], tmp[i]);
        }
      }
      break;
    }
    case NodeKind::composition: {
      Vector inner(n.dimension);
      n.children[1].evaluate(x, inner);
      n.children[0].evaluate(inner, out);
      break;
    }
    case NodeKind::cap:
      n.children.front().evaluate(x, out);
      for (double& v : out) v = std::min(v, n.level);
      break;
  }

  if (verification_mode()) {
    for (std::size_t i = 0; i < n.dimension; ++i) {
      if (!(out[i] > 0.0) || !std::isfinite(out[i])) {
        throw MalformedMappingError("mapping '" + n.label + "' produced non-positive component " +
                                    std::to_string(i));
      }
      if (n.bound && out[i] > *n.bound * (1.0 + 1e-12)) {
        throw MalformedMappingError("mapping '" + n.label + "' exceeded its declared upper bound");
      }
    }
  }
}

Vector InterferenceMapping::operator()(std::span<const double> x) const {
  Vector out(dimension());
  evaluate(x, out);
  return out;
}

namespace {

std::size_t common_dimension(std::span<const InterferenceMapping> maps, const char* what) {
  if (maps.empty()) throw InvalidArgument(std::string(what) + ": empty mapping list");
  const std::size_t dim = maps.front().dimension();
  for (const auto& m : maps) {
    if (m.dimension() != dim) throw DimensionError(std::string(what) + ": dimension mismatch");
  }
  return dim;
}

}  // namespace

InterferenceMapping combine_scaled_sum(std::span<const InterferenceMapping> maps,
                                       std::span<const double> weights) {
  const std::size_t dim = common_dimension(maps, "combine_scaled_sum");
  if (weights.size() != maps.size()) {
    throw DimensionError("combine_scaled_sum: one weight per mapping required");
  }
  std::optional<double> bound = 0.0;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
      throw InvalidArgument("combine_scaled_sum: weights must be > 0");
    }
    if (bound && maps[k].upper_bound()) {
      *bound += weights[k] * *maps[k].upper_bound();
    } else {
      bound.reset();
    }
  }
  auto node = std::make_shared<InterferenceMapping::Node>();
  node->kind = NodeKind::scaled_sum;
  node->dimension = dim;
  node->bound = bound;
  node->label = "scaled_sum";
  node->children.assign(maps.begin(), maps.end());
  node->weights.assign(weights.begin(), weights.end());
  return InterferenceMapping(std::move(node));
}

InterferenceMapping combine_min(std::span<const InterferenceMapping> maps) {
  const std::size_t dim = common_dimension(maps, "combine_min");
  std::optional<double> bound;
  for (const auto& m : maps) {
    if (m.upper_bound()) bound = bound ? std::min(*bound, *m.upper_bound()) : *m.upper_bound();
  }
  auto node = std::make_shared<InterferenceMapping::Node>();
  node->kind = NodeKind::min;
  node->dimension = dim;
  node->bound = bound;
  node->label = "min";
  node->children.assign(maps.begin(), maps.end());
  return InterferenceMapping(std::move(node));
}

InterferenceMapping combine_max(std::span<const InterferenceMapping> maps) {
  const std::size_t dim = common_dimension(maps, "combine_max");
  std::optional<double> bound = 0.0;
  for (const auto& m : maps) {
    if (bound && m.upper_bound()) {
      bound = std::max(*bound, *m.upper_bound());
    } else {
      bound.reset();
    }
  }
  auto node = std::make_shared<InterferenceMapping::Node>();
  node->kind = NodeKind::max;
  node->dimension = dim;
  node->bound = bound;
  node->label = "max";
  node->children.assign(maps.begin(), maps.end());
  return InterferenceMapping(std::move(node));
}

InterferenceMapping compose(const InterferenceMapping& outer, const InterferenceMapping& inner) {
  if (outer.dimension() != inner.dimension()) throw DimensionError("compose: dimension mismatch");
  auto node = std::make_shared<InterferenceMapping::Node>();
  node->kind = NodeKind::composition;
  node->dimension = outer.dimension();
  node->bound = outer.upper_bound();
  node->label = "compose";
  node->children = {outer, inner};
  return InterferenceMapping(std::move(node));
}

InterferenceMapping cap(const InterferenceMapping& inner, double level) {
  if (!(level > 0.0) || !std::isfinite(level)) throw InvalidArgument("cap: level must be > 0");
  auto node = std::make_shared<InterferenceMapping::Node>();
  node->kind = NodeKind::cap;
  node->dimension = inner.dimension();
  node->bound = inner.upper_bound() ? std::min(level, *inner.upper_bound()) : level;
  node->label = "cap";
  node->children = {inner};
  node->level = level;
  return InterferenceMapping(std::move(node));
}

AxiomReport check_axioms(const InterferenceMapping& map, std::size_t sample_count,
                         std::uint64_t seed, const AxiomCheckOptions& options) {
  if (sample_count == 0) throw InvalidArgument("check_axioms: sample_count must be >= 1");
  const std::size_t dim = map.dimension();
  Rng rng(seed);
  AxiomReport report;
  report.samples = sample_count;

  auto draw_point = [&](Vector& v) {
    // Magnitudes spread over six decades; some coordinates exactly zero.
    const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    for (double& e : v) e = rng.uniform() < 0.1 ? 0.0 : scale * rng.uniform();
  };
  auto beyond_slack = [&](double lhs, double rhs) {
    return lhs - rhs < -options.relative_slack * std::max(std::abs(lhs), std::abs(rhs));
  };

  Vector x(dim), ax(dim), jx(dim), jax(dim), x1(dim), jx1(dim);
  for (std::size_t s = 0; s < sample_count; ++s) {
    draw_point(x);
    const double alpha = 1.0 + 9.0 * rng.uniform_positive();
    for (std::size_t i = 0; i < dim; ++i) ax[i] = alpha * x[i];
    map.evaluate(x, jx);
    map.evaluate(ax, jax);
    for (std::size_t i = 0; i < dim; ++i) {
      if (beyond_slack(alpha * jx[i], jax[i])) {
        ++report.scalability_violations;
        if (report.witnesses.size() < options.max_witnesses) {
          report.witnesses.push_back(
              {AxiomViolation::Kind::scalability, i, x, {}, alpha, alpha * jx[i], jax[i]});
        }
        break;
      }
    }

    // Monotonicity: x1 = x + nonnegative increment.
    Vector delta(dim);
    draw_point(delta);
    for (std::size_t i = 0; i < dim; ++i) x1[i] = x[i] + delta[i];
    map.evaluate(x1, jx1);
    for (std::size_t i = 0; i < dim; ++i) {
      if (beyond_slack(jx1[i], jx[i])) {
        ++report.monotonicity_violations;
        if (report.witnesses.size() < options.max_witnesses) {
          report.witnesses.push_back(
              {AxiomViolation::Kind::monotonicity, i, x1, x, 1.0, jx1[i], jx[i]});
        }
        break;
      }
    }
  }
  return report;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace {

void check_evaluation(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
      std::ostringstream os;
      os << "interference mapping returned " << v[i] << " in component " << i;
      throw MalformedMappingError(os.str());
    }
  }
}

// Rounding slack for the monotone-sequence checks.
double ulp_slack(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

double residual_at(const InterferenceMapping& map, std::span<const double> x) {
  const Vector jx = map(x);
  return sup_distance(x, jx);
}

}  // namespace

FixedPointResult fixed_point(const InterferenceMapping& map, const FixedPointOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidArgument("fixed_point: tolerance must be > 0");
  const std::size_t dim = map.dimension();

  if (!map.upper_bound()) {
    const Vector zero(dim, 0.0);
    return picard_from(map, zero, options);
  }

  const double bound = *map.upper_bound();
  Vector lower(dim, 0.0), upper(dim, bound), next_lower(dim), next_upper(dim);
  for (std::size_t it = 0;; ++it) {
    if (options.observer) options.observer({it, lower, upper});
    const double gap = sup_distance(upper, lower);
    if (gap <= options.tolerance) {
      FixedPointResult r;
      r.fixed_point.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) r.fixed_point[i] = 0.5 * (lower[i] + upper[i]);
      r.lower = lower;
      r.upper = upper;
      r.iterations = it;
      r.certified_gap = gap;
      r.residual = residual_at(map, r.fixed_point);
      return r;
    }
    if (it >= options.max_iterations) {
      throw ConvergenceError("certified fixed-point iteration did not reach tolerance within " +
                                 std::to_string(options.max_iterations) + " iterations",
                             lower, upper, it);
    }
    map.evaluate(lower, next_lower);
    map.evaluate(upper, next_upper);
    check_evaluation(next_lower);
    check_evaluation(next_upper);
    for (std::size_t i = 0; i < dim; ++i) {
      if (next_lower[i] < lower[i] - ulp_slack(lower[i]) ||
          next_upper[i] > upper[i] + ulp_slack(upper[i]) ||
          next_lower[i] > next_upper[i] + ulp_slack(next_upper[i])) {
        throw MalformedMappingError(
            "bracketing sequences lost monotonicity in component " + std::to_string(i) +
            "; the mapping is not a standard interference mapping or its bound is wrong");
      }
      // Clamp away last-bit rounding so the bracket never widens.
      lower[i] = std::max(lower[i], next_lower[i]);
      upper[i] = std::max(lower[i], std::min(upper[i], next_upper[i]));
    }
  }
}

FixedPointResult picard_from(const InterferenceMapping& map, std::span<const double> start,
                             const FixedPointOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidArgument("picard_from: tolerance must be > 0");
  const std::size_t dim = map.dimension();
  if (start.size() != dim) throw DimensionError("picard_from: start has wrong dimension");
  for (double v : start) {
    if (!(v >= 0.0)) throw InvalidArgument("picard_from: start must be nonnegative");
  }
  Vector x(start.begin(), start.end()), next(dim);
  for (std::size_t it = 0;; ++it) {
    if (options.observer) options.observer({it, x, {}});
    if (it >= options.max_iterations) {
      throw ConvergenceError("Picard iteration did not settle within " +
                                 std::to_string(options.max_iterations) +
                                 " iterations; the mapping may have no fixed point",
                             x, {}, it);
    }
    map.evaluate(x, next);
    check_evaluation(next);
    const double step = sup_distance(next, x);
    x.swap(next);
    if (step <= options.tolerance) {
      FixedPointResult r;
      r.fixed_point = x;
      r.lower = x;
      r.iterations = it + 1;
      r.residual = residual_at(map, x);
      return r;
    }
  }
}

bool has_fixed_point_certificate(const InterferenceMapping& map, std::span<const double> candidate) {
  if (candidate.size() != map.dimension()) {
    throw DimensionError("certificate candidate has wrong dimension");
  }
  for (double v : candidate) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("certificate candidate must be strictly positive");
    }
  }
  const Vector j = map(candidate);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] > candidate[i]) return false;
  }
  return true;
}

}  // namespace netenergy::ifcalc
