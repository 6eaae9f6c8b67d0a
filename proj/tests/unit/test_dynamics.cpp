#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "trimlab/dynamics.hpp"
#include "trimlab/errors.hpp"
#include "trimlab/fracmoment.hpp"

using namespace trimlab;

TEST_CASE("evolution") {
  auto zero = eigendecompose(Eigen::MatrixXd::Zero(1, 1));
  Eigen::VectorXcd psi(1);
  psi << cplx(0.6, 0.8);
  CHECK((evolve(zero, psi, 3.7) - psi).norm() < 1e-15);

  auto d = eigendecompose(Eigen::MatrixXd(Eigen::Vector2d(1, 2).asDiagonal()));
  Eigen::VectorXcd e0(2);
  e0 << 1.0, 0.0;
  CHECK((evolve(d, e0, 0.0) - e0).norm() < 1e-15);
  auto out = evolve(d, e0, std::numbers::pi);
  CHECK(std::abs(out(0) - cplx(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(out(1)) < 1e-14);

  std::mt19937_64 rng(1);
  auto sd = eigendecompose(testing::random_symmetric(10, rng));
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(10).normalized();
  for (double t : {0.5, 3.0, 40.0}) CHECK(evolve(sd, v, t).norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("moments") {
  auto one = testing::chain(0, 0);
  Eigen::MatrixXd h(1, 1);
  h << 2.5;
  auto sd1 = eigendecompose(h);
  CHECK(moment_Mp(sd1, one, Site{0}, 2.0, 3.0) == 0.0);

  auto r = testing::box2(0, 0, 5, 5);
  std::mt19937_64 rng(2);
  std::vector<double> V(r.size());
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& v : V) v = u(rng);
  auto sd = eigendecompose(assemble(r, SublatticeMask::gamma1(2, 2), V0Spec::zero(), 3.0, testing::on_gamma(V, r, SublatticeMask::gamma1(2, 2))));
  Site x{2, 3};
  for (double t : {0.0, 0.7, 5.0}) {
    CHECK(moment_Mp(sd, r, x, t, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moment_Mp(sd, r, x, t, 2.0) == doctest::Approx(moment_Mp(sd, r, x, -t, 2.0)).epsilon(1e-12));
    for (double p : {0.5, 1.0, 2.0}) CHECK(moment_Mp(sd, r, x, t, 2.0 * p) >= moment_Mp(sd, r, x, t, p));
  }
  CHECK_THROWS_AS(moment_Mp(sd, r, x, 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(moment_Mp(sd, r, Site{9, 9}, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("ballistic spreading on the free chain") {
  // sum_n n^2 J_n(2t)^2 = 2 t^2 on Z; the box edge is far beyond the light cone
  auto r = testing::chain(-150, 150);
  auto sd = eigendecompose(assemble_free(r, SublatticeMask::full(), V0Spec::zero()));
  std::vector<double> ts{5, 10, 20, 30}, m;
  for (double t : ts) {
    m.push_back(moment_Mp(sd, r, Site{0}, t, 2.0));
    CHECK(m.back() == doctest::Approx(2.0 * t * t).epsilon(1e-8));
  }
  CHECK(loglog_slope(ts, m) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("moment curve is thread independent") {
  auto ens = testing::ensemble(testing::box2(0, 0, 4, 4), SublatticeMask::gamma1(2, 2), 2.0, 12);
  auto a = moment_curve(ens, Site{2, 2}, {0.0, 1.0, 3.0}, {0.0, 2.0}, 1);
  auto b = moment_curve(ens, Site{2, 2}, {0.0, 1.0, 3.0}, {0.0, 2.0}, 3);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].Mp.mean == b[i].Mp.mean);
  for (const auto& pt : a)
    if (pt.p == 0.0) CHECK(pt.Mp.mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("laplace inequality") {
  Eigen::MatrixXd h(1, 1);
  h << 3.0;
  HamiltonianMatrix one{testing::chain(0, 0), h, 0.0, V0Spec::zero(), {0.0}, SublatticeMask::full()};
  auto c = laplace_moment_check(one, Site{0}, 2.0, 0.5, 0.0);
  CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.rhs == doctest::Approx(0.25 / (1.0 + 0.25)).epsilon(1e-14));
  CHECK(c.holds);
  auto c2 = laplace_moment_check(one, Site{0}, 2.0, 0.5, 2.0);
  CHECK(c2.lhs == 0.0);
  CHECK(c2.rhs == 0.0);
  CHECK(c2.holds);

  auto ens = testing::ensemble(testing::box2(1, 1, 7, 7), SublatticeMask::gamma1(2, 2), 5.0, 8);
  for (double lambda : {0.0, 4.0}) {
    auto e = laplace_moment_check(ens, Site{4, 4}, lambda, 0.05, 4.0);
    CHECK(e.holds);
    CHECK(e.failures == 0);
    CHECK(e.realizations == 8);
  }
}

TEST_CASE("p-moment probe") {
  auto r = testing::box2(0, 0, 6, 6);
  auto h0 = assemble_free(r, SublatticeMask::full(), V0Spec::zero());
  // lambda = -1 is off the spectrum: S decays like eps^2
  auto off = pmoment_probe(h0, -1.0, {1e-1, 1e-2, 1e-3}, {2.0}, Site{3, 3});
  REQUIRE(off.slopes.size() == 1);
  CHECK(off.slopes[0] >= 1.9);

  // lambda = 4 is an eigenvalue: S tends to sum_y |P(x, y)|^2 |x - y|^p
  auto sd = eigendecompose(h0);
  auto P = spectral_projection_point(sd, 4.0, 1e-9).P;
  Site x{1, 1};
  std::size_t xi = *r.find(x);
  double limit = 0.0;
  for (std::size_t y = 0; y < r.size(); ++y) limit += P(xi, y) * P(xi, y) * std::pow(graph_distance(x, r.site(y)), 4.0);
  REQUIRE(limit > 0.0);
  auto on = pmoment_probe(h0, 4.0, {1e-3, 1e-4, 1e-5}, {4.0}, x);
  CHECK(on.rows.back().S.mean == doctest::Approx(limit).epsilon(1e-3));
  CHECK(std::abs(on.slopes[0]) < 0.01);

  CHECK_THROWS_AS(pmoment_probe(h0, 4.0, {1e-3, 1e-2}, {4.0}, x), InvalidArgument);
  CHECK_THROWS_AS(pmoment_probe(h0, 4.0, {}, {4.0}, x), InvalidArgument);
  CHECK_THROWS_AS(pmoment_probe(h0, 4.0, {1e-2}, {-1.0}, x), InvalidArgument);
}

TEST_CASE("paired increments") {
  auto ens = testing::ensemble(testing::box2(1, 1, 7, 7), SublatticeMask::gamma1(2, 2), 5.0, 10);
  auto pr = pmoment_probe(ens, 4.0, {1e-1, 1e-2}, {4.0}, Site{1, 1});
  REQUIRE(pr.rows.size() == 2);
  CHECK(pr.rows[0].increment.mean == 0.0);
  CHECK(pr.rows[1].increment.mean == doctest::Approx(pr.rows[1].S.mean - pr.rows[0].S.mean).epsilon(1e-10));
}

TEST_CASE("moment growth and saturation") {
  auto r = testing::chain(-60, 60);
  EnsembleSpec ens = testing::ensemble(r, SublatticeMask::full(), 0.0, 1);
  std::vector<double> ts{0, 2, 4, 8, 16, 64, 256};
  auto curve = moment_curve(ens, Site{0}, ts, {2.0});
  auto g = moment_growth(curve, 2.0, r, Site{0});
  CHECK(g.plateau == doctest::Approx(60.0 * 61.0 / 3.0));  // sum_{n=-60}^{60} n^2 / 121
  CHECK(g.saturation_time == 64.0);  // 2 t^2 passes 610 between t = 16 and t = 64
  CHECK(g.fit_points == 4);
  CHECK(g.exponent == doctest::Approx(2.0).epsilon(0.02));
}
