#include <cmath>
#include <vector>

#include "doctest.h"
#include "netenergy/errors.hpp"
#include "netenergy/ifcalc.hpp"
#include "oracles.hpp"

using namespace netenergy;
using namespace netenergy::ifcalc;

namespace {

InterferenceMapping scalar(std::function<double(double)> f, std::optional<double> bound = {}) {
  return InterferenceMapping::leaf(
      1, [f](std::span<const double> x, std::span<double> out) { out[0] = f(x[0]); }, bound);
}

double at(const InterferenceMapping& j, double x) {
  const Vector in{x};
  return j(in)[0];
}

}  // namespace

TEST_SUITE("ifcalc") {

TEST_CASE("scaled sum of constants") {
  const auto two = InterferenceMapping::constant(1, 2.0);
  const std::vector<InterferenceMapping> one_map{two};
  const std::vector<double> unit{1.0};
  CHECK(at(combine_scaled_sum(one_map, unit), 7.0) == 2.0);

  const std::vector<InterferenceMapping> maps{InterferenceMapping::constant(1, 1.0),
                                              InterferenceMapping::constant(1, 1.0)};
  const std::vector<double> w{2.0, 3.0};
  const auto sum = combine_scaled_sum(maps, w);
  CHECK(at(sum, 0.0) == 5.0);
  CHECK(at(sum, 100.0) == 5.0);
  REQUIRE(sum.upper_bound());
  CHECK(*sum.upper_bound() == 5.0);
}

TEST_CASE("scaled sum rejects bad weights and dimensions") {
  const std::vector<InterferenceMapping> maps{InterferenceMapping::constant(1, 1.0),
                                              InterferenceMapping::constant(2, 1.0)};
  const std::vector<double> w{1.0, 1.0};
  CHECK_THROWS_AS(combine_scaled_sum(maps, w), DimensionError);
  const std::vector<InterferenceMapping> same{InterferenceMapping::constant(1, 1.0),
                                              InterferenceMapping::constant(1, 1.0)};
  const std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(combine_scaled_sum(same, bad), InvalidArgument);
}

TEST_CASE("scaled concave leaf keeps both axioms") {
  const auto f = scalar([](double x) { return 1.0 + std::sqrt(x); });
  const std::vector<InterferenceMapping> maps{f};
  const std::vector<double> w{3.5};
  const auto report = check_axioms(combine_scaled_sum(maps, w), 1000, 11);
  CHECK(report.samples == 1000);
  CHECK(report.ok());
}

TEST_CASE("min and max") {
  const auto j = scalar([](double x) { return x + 1.0; });
  const std::vector<InterferenceMapping> twice{j, j};
  const auto self_min = combine_min(twice);
  for (double x : {0.0, 0.3, 4.0, 1e3}) CHECK(at(self_min, x) == at(j, x));

  const std::vector<InterferenceMapping> capped{j, InterferenceMapping::constant(1, 5.0)};
  const auto m = combine_min(capped);
  CHECK(at(m, 10.0) == 5.0);
  REQUIRE(m.upper_bound());
  CHECK(*m.upper_bound() == 5.0);

  const std::vector<InterferenceMapping> pair{scalar([](double x) { return 0.5 * x + 1.0; }),
                                              scalar([](double x) { return 0.2 * x + 3.0; })};
  CHECK(at(combine_max(pair), 0.0) == 3.0);
  CHECK_FALSE(combine_max(pair).upper_bound());
  CHECK_THROWS_AS(combine_min(std::vector<InterferenceMapping>{}), InvalidArgument);
  CHECK_THROWS_AS(combine_max(std::vector<InterferenceMapping>{}), InvalidArgument);
}

TEST_CASE("composition") {
  const auto j = scalar([](double x) { return 2.0 * std::sqrt(x) + 0.5; });
  const auto shift = scalar([](double x) { return x + 1.0; });
  CHECK(at(compose(j, shift), 0.0) == at(j, 1.0));

  const auto c = InterferenceMapping::constant(1, 4.0);
  for (double x : {0.0, 2.0, 50.0}) CHECK(at(compose(c, j), x) == 4.0);

  Rng rng(3);
  const auto a = oracle::random_concave_leaf(3, rng);
  const auto b = oracle::random_concave_leaf(3, rng);
  CHECK(check_axioms(compose(a, b), 1000, 5).ok());
  CHECK_THROWS_AS(compose(a, InterferenceMapping::constant(2, 1.0)), DimensionError);
}

TEST_CASE("axiom checker on known cases") {
  SUBCASE("affine positive") {
    const auto r = check_axioms(scalar([](double x) { return x + 1.0; }), 1000, 1);
    CHECK(r.ok());
  }
  SUBCASE("constant") {
    CHECK(check_axioms(InterferenceMapping::constant(1, 3.0), 1000, 2).ok());
  }
  SUBCASE("square breaks scalability") {
    const auto sq = scalar([](double x) { return x * x + 1.0; });
    const auto r = check_axioms(sq, 1000, 3);
    CHECK(r.scalability_violations > 0);
    CHECK(r.monotonicity_violations == 0);
    REQUIRE_FALSE(r.witnesses.empty());
    const auto& w = r.witnesses.front();
    CHECK(w.kind == AxiomViolation::Kind::scalability);
    CHECK(w.alpha > 1.0);
    CHECK(w.lhs < w.rhs);
    // Hand check at x = 2, alpha = 2: 2 * 5 = 10 < 17.
    CHECK(2.0 * at(sq, 2.0) < at(sq, 4.0));
  }
  SUBCASE("decreasing map breaks monotonicity") {
    const auto r = check_axioms(scalar([](double x) { return 1.0 + 1.0 / (1.0 + x); }), 1000, 4);
    CHECK(r.monotonicity_violations > 0);
  }
}

TEST_CASE("random standard trees pass the axiom checker") {
  Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    const auto map = oracle::random_standard_mapping(4, rng, 3);
    const auto r = check_axioms(map, 300, static_cast<std::uint64_t>(t));
    CHECK(r.ok());
  }
}

TEST_CASE("certified fixed point of a capped affine map") {
  const auto j = cap(scalar([](double x) { return 0.5 * x + 1.0; }), 10.0);
  REQUIRE(j.upper_bound());
  CHECK(*j.upper_bound() == 10.0);
  FixedPointOptions opt;
  opt.tolerance = 1e-10;
  const auto r = fixed_point(j, opt);
  REQUIRE(r.certified());
  CHECK(*r.certified_gap <= 1e-10);
  CHECK(r.fixed_point[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.lower[0] <= r.fixed_point[0]);
  CHECK(r.fixed_point[0] <= (*r.upper)[0]);
  CHECK(r.residual <= 10 * opt.tolerance);
}

TEST_CASE("min(x + 1, 5) reaches 5") {
  const std::vector<InterferenceMapping> maps{scalar([](double x) { return x + 1.0; }),
                                              InterferenceMapping::constant(1, 5.0)};
  const auto r = fixed_point(combine_min(maps));
  CHECK(r.fixed_point[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.certified());
}

TEST_CASE("x + 1 has no fixed point") {
  FixedPointOptions opt;
  opt.max_iterations = 500;
  const auto j = scalar([](double x) { return x + 1.0; });
  CHECK_THROWS_AS(fixed_point(j, opt), ConvergenceError);
  try {
    fixed_point(j, opt);
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 500);
    CHECK_FALSE(e.last_lower().empty());
  }
}

TEST_CASE("uncertified solve without a bound") {
  const auto j = scalar([](double x) { return 0.5 * x + 1.0; });
  const auto r = fixed_point(j);
  CHECK_FALSE(r.certified());
  CHECK_FALSE(r.upper);
  CHECK(r.fixed_point[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.residual <= 1e-8);
}

TEST_CASE("sandwich holds at every iteration") {
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    const auto j = cap(oracle::random_standard_mapping(5, rng, 2), 3.0);
    Vector prev_lower, prev_upper;
    std::size_t violations = 0, calls = 0;
    FixedPointOptions opt;
    opt.observer = [&](const IterationState& s) {
      ++calls;
      for (std::size_t i = 0; i < s.lower.size(); ++i) {
        if (s.lower[i] > s.upper[i]) ++violations;
        if (!prev_lower.empty() && s.lower[i] < prev_lower[i]) ++violations;
        if (!prev_upper.empty() && s.upper[i] > prev_upper[i]) ++violations;
      }
      prev_lower.assign(s.lower.begin(), s.lower.end());
      prev_upper.assign(s.upper.begin(), s.upper.end());
    };
    const auto r = fixed_point(j, opt);
    CHECK(calls > 1);
    CHECK(violations == 0);
    CHECK(*r.certified_gap <= opt.tolerance);
  }
}

TEST_CASE("malformed evaluations are reported") {
  const auto nan_map = scalar([](double) { return std::nan(""); }, 1.0);
  CHECK_THROWS_AS(fixed_point(nan_map), MalformedMappingError);
  const auto neg = scalar([](double) { return -1.0; });
  CHECK_THROWS_AS(fixed_point(neg), MalformedMappingError);
}

TEST_CASE("fixed-point certificate") {
  const auto j = scalar([](double x) { return 0.5 * x + 1.0; });
  CHECK(has_fixed_point_certificate(j, Vector{3.0}));
  CHECK_FALSE(has_fixed_point_certificate(scalar([](double x) { return x + 1.0; }), Vector{5.0}));
  CHECK_FALSE(has_fixed_point_certificate(scalar([](double x) { return x + 1.0; }), Vector{1e12}));
  const auto capped = cap(j, 7.0);
  CHECK(has_fixed_point_certificate(capped, Vector{7.0}));
  CHECK_THROWS_AS(has_fixed_point_certificate(j, Vector{0.0}), InvalidArgument);
}

TEST_CASE("verification mode catches a lying bound") {
  const bool before = verification_mode();
  set_verification_mode(true);
  const auto liar = scalar([](double x) { return x + 1.0; }, 2.0);
  CHECK_THROWS_AS(liar(Vector{5.0}), MalformedMappingError);
  set_verification_mode(false);
  CHECK_NOTHROW(liar(Vector{5.0}));
  set_verification_mode(before);
}

TEST_CASE("affine constructor") {
  Matrix a(2, 2, 0.0);
  a(0, 1) = 0.5;
  a(1, 0) = 0.25;
  const auto j = InterferenceMapping::affine(a, {1.0, 2.0});
  const auto y = j(Vector{2.0, 4.0});
  CHECK(y[0] == 3.0);
  CHECK(y[1] == 2.5);
  CHECK_FALSE(j.upper_bound());
  Matrix negative(1, 1, -1.0);
  CHECK_THROWS_AS(InterferenceMapping::affine(negative, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(InterferenceMapping::affine(Matrix(1, 1, 0.0), {0.0}), InvalidArgument);
}

}  // TEST_SUITE
