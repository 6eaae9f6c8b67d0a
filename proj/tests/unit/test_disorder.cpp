#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "trimlab/disorder.hpp"
#include "trimlab/errors.hpp"

using namespace trimlab;

namespace {

// Composite Simpson on [lo, hi] after the substitution v = lo + (hi - lo) u^2, which tames endpoint singularities.
template <class F>
double simpson(F f, double lo, double hi, int n = 20000) {
  auto g = [&](double u) { return f(lo + (hi - lo) * u * u) * 2.0 * u * (hi - lo); };
  double h = 1.0 / n, acc = g(0.0) + g(1.0);
  for (int i = 1; i < n; ++i) acc += g(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("sampling") {
  auto region = Region(make_box(2, {0, 0}, {4, 4}));
  SampleStream st(DisorderSpec::uniform(0, 1), 42);
  auto full = sample_potential(st, SublatticeMask::full(), region, 3);
  for (double v : full) CHECK((v > 0.0 && v < 1.0));
  CHECK(full == sample_potential(st, SublatticeMask::full(), region, 3));
  CHECK(full != sample_potential(st, SublatticeMask::full(), region, 4));

  auto trimmed = sample_potential(st, SublatticeMask::gamma1(2, 2), region, 3);
  for (Site s : {Site{1, 1}, Site{1, 3}, Site{3, 1}, Site{3, 3}}) CHECK(trimmed[*region.find(s)] == 0.0);
  CHECK(trimmed[*region.find(Site{0, 0})] != 0.0);
}

TEST_CASE("family cdf and quantile agree") {
  for (const auto& spec : {DisorderSpec::uniform(-1, 2), DisorderSpec::bernoulli_mixture(0.3, 0.2),
                           DisorderSpec::truncated_cauchy(1.0, 5.0, 0.5)}) {
    for (double u : {0.05, 0.3, 0.5, 0.77, 0.95}) CHECK(spec.cdf(spec.quantile(u)) == doctest::Approx(u).epsilon(1e-8));
    CHECK(integrate_density(spec, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("regularity and moments of the uniform law") {
  auto rep = regularity_check(DisorderSpec::uniform(0, 1), 100000, 5, 2.0);
  CHECK(rep.exact_Mq == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(std::abs(rep.empirical_Mq - 1.0 / 3.0) <= 5 * rep.empirical_Mq_stderr);
  CHECK(rep.empirical_C <= 2.0 + 5 * rep.empirical_C_stderr);
  CHECK(DisorderSpec::uniform(0, 1).moment(1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(DisorderSpec::uniform(0, 1).regularity_constant() == doctest::Approx(2.0));

  std::vector<double> sorted;
  SampleStream st(DisorderSpec::uniform(0, 1), 11);
  for (std::uint64_t i = 0; i < 50000; ++i) sorted.push_back(st.draw(i, 0));
  std::sort(sorted.begin(), sorted.end());
  auto [ratio, se] = interval_ratio(sorted, 0.5, 0.05, 1.0);
  CHECK(std::abs(ratio - 2.0) <= 5 * se);
  CHECK_THROWS_AS(regularity_check(DisorderSpec::uniform(0, 1), 100, 1), InvalidArgument);
}

TEST_CASE("decoupling inequality sides") {
  const double oracle = simpson([](double v) { return std::pow(v * v + 1.0, -0.25); }, 0.0, 1.0);
  CHECK(oracle == doctest::Approx(0.93748975074694).epsilon(1e-10));
  auto r = decoupling_ratio(DisorderSpec::uniform(0, 1), {}, {cplx(0, 1)}, 0.5, 0.5);
  CHECK(r.lhs == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(r.rhs == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  auto empty = decoupling_ratio(DisorderSpec::uniform(0, 1), {}, {}, 0.5, 0.5);
  CHECK(empty.lhs == doctest::Approx(1.0));
  CHECK(empty.rhs == doctest::Approx(1.0));

  auto lin = decoupling_ratio(DisorderSpec::uniform(0, 1), {cplx(0, 0)}, {}, 1.0, 0.5);
  CHECK(lin.lhs == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(lin.rhs == doctest::Approx(1.0));
}

TEST_CASE("decoupling trials") {
  auto spec = DisorderSpec::uniform(0, 1);
  auto same = decoupling_trial(spec, 0.5, cplx(0.3, 0.2), cplx(0.3, 0.2));
  CHECK(same.denominator == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(same.ratio == doctest::Approx(same.numerator).epsilon(1e-8));

  auto t = decoupling_trial(spec, 0.5, cplx(2, 0), cplx(0, 1));
  double num = simpson([](double v) { return std::pow(v * v + 1.0, -0.25); }, 0.0, 1.0);
  double den = simpson([](double v) { return std::sqrt(2.0 - v) * std::pow(v * v + 1.0, -0.25); }, 0.0, 1.0);
  CHECK(t.numerator == doctest::Approx(num).epsilon(1e-8));
  CHECK(t.denominator == doctest::Approx(den).epsilon(1e-8));
  CHECK(std::isfinite(t.ratio));

  CHECK_THROWS_AS(estimate_decoupling_constants(spec, 0.5, 0, 1), InvalidArgument);
  auto c1 = estimate_decoupling_constants(spec, 0.5, 50, 9);
  auto c2 = estimate_decoupling_constants(spec, 0.5, 50, 9);
  CHECK(c1.C_s == c2.C_s);
  CHECK(c1.C_s >= 1.0);
}
