#include <cmath>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "trimlab/errors.hpp"
#include "trimlab/fracmoment.hpp"

using namespace trimlab;

TEST_CASE("chi of simple kernels") {
  auto one = testing::chain(0, 0);
  CHECK(chi_kernel(Eigen::MatrixXd(Eigen::MatrixXd::Identity(1, 1)), one, DecayMetric{0.0}, 1.0).value == doctest::Approx(1.0));

  auto r = testing::box2(0, 0, 4, 4);
  auto h = assemble_free(r, SublatticeMask::full(), V0Spec::zero());
  Eigen::MatrixXd off = h.H;
  off.diagonal().setZero();
  for (double s : {0.3, 0.5, 1.0})
    CHECK(chi_kernel(off, r, DecayMetric{0.1}, s).value == doctest::Approx(4.0 * std::exp(0.1)).epsilon(1e-14));
  CHECK(chi_kernel(Eigen::MatrixXd(Eigen::MatrixXd::Zero(25, 25)), r, DecayMetric{0.1}, 0.5).value == 0.0);
  CHECK_THROWS_AS(chi_kernel(Eigen::MatrixXd(Eigen::MatrixXd::Zero(3, 3)), r, DecayMetric{0.1}, 0.5), InvalidArgument);
}

TEST_CASE("chi is monotone in eta and in the kernel") {
  std::mt19937_64 rng(8);
  auto r = testing::box2(0, 0, 3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(16, 16);
    Eigen::MatrixXcd B = A;
    B(trial % 16, (trial * 7) % 16) *= 2.0;
    double lo = chi_kernel(A, r, DecayMetric{0.1}, 0.5).value;
    CHECK(chi_kernel(A, r, DecayMetric{0.3}, 0.5).value >= lo);
    CHECK(chi_kernel(B, r, DecayMetric{0.1}, 0.5).value >= lo);
  }
}

TEST_CASE("one-site fractional moment") {
  auto ens = testing::ensemble(testing::chain(0, 0), SublatticeMask::full(), 4.0, 20000, 3);
  auto m = mc_fractional_moment(ens, cplx(2.0, 0.0), 0.5, Site{0}, Site{0});
  CHECK(std::abs(m.estimate.mean - 1.0) <= 4.0 * m.estimate.stderr_);
  ens.g = 8.0;
  auto m2 = mc_fractional_moment(ens, cplx(2.0, 0.0), 0.5, Site{0}, Site{0});
  CHECK(std::abs(m2.estimate.mean - 1.0 / std::sqrt(2.0)) <= 4.0 * m2.estimate.stderr_);
}

TEST_CASE("zero-hopping chi matches the decoupling integral") {
  auto ens = testing::ensemble(testing::chain(0, 0), SublatticeMask::full(), 1.0, 20000, 4);
  // diagonal 2d + v, so z = 2 + i gives E|v - i|^{-1/2}
  auto c = mc_chi_green(ens, cplx(2.0, 1.0), 0.5, DecayMetric{0.0});
  CHECK(std::abs(c.value - 0.93748975074694) <= 4.0 * c.stderr_);
  auto m = mc_fractional_moment(ens, cplx(2.0, 1.0), 0.5, Site{0}, Site{0});
  CHECK(m.estimate.mean == doctest::Approx(c.value).epsilon(1e-12));
}

TEST_CASE("monte carlo is independent of the thread count") {
  auto ens = testing::ensemble(testing::box2(0, 0, 4, 4), SublatticeMask::gamma1(2, 2), 3.0, 40, 5);
  auto a = mc_chi_green(ens, cplx(0.5, 0.05), 0.4, DecayMetric{0.2}, 1);
  auto b = mc_chi_green(ens, cplx(0.5, 0.05), 0.4, DecayMetric{0.2}, 3);
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
  auto c = mc_fractional_moment(ens, cplx(0.5, 0.05), 0.4, Site{0, 0}, Site{2, 2}, 1);
  auto d = mc_fractional_moment(ens, cplx(0.5, 0.05), 0.4, Site{0, 0}, Site{2, 2}, 4);
  CHECK(c.estimate.mean == d.estimate.mean);
}

TEST_CASE("contraction bound at strong disorder") {
  auto ens = testing::ensemble(testing::chain(0, 14), SublatticeMask::full(), 30.0, 200, 6);
  cplx z(2.0, 0.01);
  auto pts = am_decoupling_points(ens);
  CHECK(pts.size() == 1);  // every diagonal entry is 2
  auto C = estimate_decoupling_constants(ens.disorder, 0.5, 100, 7, pts);
  auto rep = am_contraction_check(ens, z, 0.5, DecayMetric{0.1}, C.C_s);
  REQUIRE(rep.applicable);
  CHECK(rep.threshold < std::sqrt(30.0));
  CHECK(rep.holds);
  CHECK(rep.lhs.value <= rep.rhs + 3.0 * rep.lhs.stderr_);

  ens.g = 1e-3;
  auto weak = am_contraction_check(ens, z, 0.5, DecayMetric{0.1}, C.C_s);
  CHECK_FALSE(weak.applicable);
  CHECK_FALSE(weak.reason.empty());
}

TEST_CASE("resolvent chi inequalities") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  auto r = testing::box2(0, 0, 4, 4);
  // corrected forms on 100 instances, half with X = Gamma, half with a random X, weak to strong coupling
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> V(r.size());
    for (auto& v : V) v = u(rng);
    auto h = assemble(r, SublatticeMask::gamma1(2, 2), V0Spec::zero(), 0.5 + 40.0 * u(rng),
                      testing::on_gamma(V, r, SublatticeMask::gamma1(2, 2)));
    std::vector<std::size_t> X;
    if (trial % 2 == 0) {
      X = gamma_indices(h);
    } else {
      for (std::size_t i = 0; i < r.size(); ++i)
        if (u(rng) < 0.3) X.push_back(i);
      if (X.empty()) X.push_back(7);
    }
    auto rep = chi_resolvent_inequalities(h, X, cplx(4.0 * u(rng), 0.05 + u(rng)), DecayMetric{trial % 3 ? 0.1 : 0.0});
    CHECK(rep.kappa == 4.0);
    CHECK(rep.star_corrected.holds());
    CHECK(rep.plain_corrected.holds());
  }
  std::vector<double> V(r.size(), 0.5);
  auto h = assemble(r, SublatticeMask::full(), V0Spec::zero(), 1.0, V);
  std::vector<std::size_t> all(r.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto whole = chi_resolvent_inequalities(h, all, cplx(0.7, 0.3), DecayMetric{0.1});
  CHECK(whole.plain_literal.holds());
  CHECK(whole.chi_G == doctest::Approx(whole.chi_GX));
}

TEST_CASE("kernel K identity") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  auto r = testing::box2(1, 1, 3, 3);
  std::vector<double> V(r.size());
  for (auto& v : V) v = u(rng);
  auto h = assemble(r, SublatticeMask::gamma1(2, 2), V0Spec::zero(), 2.0, testing::on_gamma(V, r, SublatticeMask::gamma1(2, 2)));
  auto k = kernel_K(h, cplx(0.0, 0.0));
  CHECK(k.sites.size() == 5);
  CHECK(k.identity_residual <= 1e-10);
  CHECK(k.K.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(kernel_K(h, cplx(4.0, 0.0)), NumericError);

  auto hf = assemble(r, SublatticeMask::full(), V0Spec::zero(), 2.0, V);
  auto kf = kernel_K(hf, cplx(0.3, 0.1));
  CHECK(kf.identity_residual <= 1e-10);
  Eigen::MatrixXd adj = -hf.H;
  for (std::size_t i = 0; i < r.size(); ++i) adj(i, i) = 0.0;
  CHECK((kf.K - adj.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((kf.D.array() + 4.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("trimmed-spectrum threshold") {
  auto r = testing::box2(0, 0, 6, 6);
  auto ok = loc1_threshold(r, SublatticeMask::gamma1(2, 2), V0Spec::zero(), 0.0, 0.5, DecayMetric{0.1}, 2.0);
  CHECK(ok.applicable);
  CHECK(std::isfinite(ok.g0));
  CHECK(ok.distance_to_trimmed_spectrum == doctest::Approx(4.0));
  auto bad = loc1_threshold(r, SublatticeMask::gamma1(2, 2), V0Spec::zero(), 4.0, 0.5, DecayMetric{0.1}, 2.0);
  CHECK_FALSE(bad.applicable);
  auto full = loc1_threshold(r, SublatticeMask::full(), V0Spec::zero(), 0.0, 0.5, DecayMetric{0.1}, 2.0);
  CHECK(full.applicable);
  CHECK(full.chi_K == doctest::Approx(4.0 * std::exp(0.1)));
  CHECK(full.g0 == doctest::Approx(std::pow(2.0 * 4.0 * std::exp(0.1), 2.0)));
}

TEST_CASE("gamma mass") {
  auto r = testing::box2(1, 1, 3, 3);
  Eigen::VectorXd uni = Eigen::VectorXd::Constant(9, 1.0 / 3.0);
  CHECK(eigenvector_gamma_mass(uni, r, SublatticeMask::gamma1(2, 2)) == doctest::Approx(std::sqrt(5.0 / 9.0)));
  Eigen::VectorXd corner = Eigen::VectorXd::Zero(9);
  corner(0) = 1.0;
  CHECK(eigenvector_gamma_mass(corner, r, SublatticeMask::gamma1(2, 2)) == 0.0);
}

TEST_CASE("wegner counting") {
  auto ens = testing::ensemble(Region(make_box(2, {1, 1}, {3, 5})), SublatticeMask::gamma1(2, 2), 0.0, 20, 12);
  auto none = wegner_count(ens, 4.0, {0.1, 0.01}, 0.5);
  CHECK(none.mult == 1);
  for (const auto& row : none.rows) CHECK(row.p_exceed.mean == 0.0);

  ens.g = 10.0;
  auto rep = wegner_count(ens, 4.0, {0.1, 0.01}, 0.5);
  CHECK(rep.lemma_violations == 0);
  CHECK(rep.rows[0].p_exceed.mean >= rep.rows[1].p_exceed.mean);
  CHECK_THROWS_AS(wegner_count(ens, 4.0, {rep.gap}, 0.5), InvalidArgument);

  auto sq = testing::ensemble(testing::box2(1, 1, 3, 3), SublatticeMask::gamma1(2, 2), 10.0, 10);
  CHECK_THROWS_AS(wegner_count(sq, 4.0, {0.01}, 0.5), InvalidArgument);
}

TEST_CASE("uniform bound probe") {
  auto ens = testing::ensemble(testing::box2(0, 0, 4, 4), SublatticeMask::gamma1(2, 2), 5.0, 30);
  auto rep = wegner_uniform_bound_probe(ens, {0.0, 4.0}, {0.1, 0.001}, 0.3);
  CHECK(rep.cells.size() == 4);
  for (const auto& c : rep.cells) CHECK(std::isfinite(c.norm_moment.mean));
  auto bad = testing::ensemble(testing::box2(1, 1, 3, 3), SublatticeMask::gamma1(2, 2), 5.0, 10);
  CHECK_THROWS_AS(wegner_uniform_bound_probe(bad, {0.0}, {0.1}, 0.3), InvalidArgument);
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), InvalidArgument);
}
