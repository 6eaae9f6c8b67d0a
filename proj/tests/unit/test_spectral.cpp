#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "trimlab/errors.hpp"
#include "trimlab/spectral.hpp"

using namespace trimlab;

TEST_CASE("eigendecomposition") {
  Eigen::MatrixXd D = Eigen::Vector2d(1, 2).asDiagonal();
  auto sd = eigendecompose(D);
  CHECK(sd.values(0) == doctest::Approx(1.0));
  CHECK(sd.values(1) == doctest::Approx(2.0));
  CHECK(std::abs(sd.vectors(0, 0)) == doctest::Approx(1.0));

  // path graph: 2 - 2 cos(pi j / (n + 1))
  const int n = 12;
  auto chain = assemble_free(testing::chain(1, n), SublatticeMask::full(), V0Spec::zero());
  auto cs = eigendecompose(chain);
  for (int j = 1; j <= n; ++j)
    CHECK(cs.values(j - 1) == doctest::Approx(2.0 - 2.0 * std::cos(std::numbers::pi * j / (n + 1))).epsilon(1e-12));
  CHECK((cs.vectors.transpose() * cs.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid spectrum at lambda = 4") {
  auto h = assemble_free(testing::box2(1, 1, 3, 3), SublatticeMask::full(), V0Spec::zero());
  auto sd = eigendecompose(h);
  auto gm = gap_and_mult(sd, 4.0);
  CHECK(gm.mult == 3);
  CHECK(gm.gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(spectral_projection(sd, 4.0, 4.0).rank == 3);
  CHECK(spectral_projection(sd, -100, 100).rank == 9);
  auto P = spectral_projection(sd, 4.0 - 1e-9, 4.0 + 1e-9).P;
  CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-12);

  auto d = eigendecompose(Eigen::MatrixXd(Eigen::Vector2d(1, 2).asDiagonal()));
  auto g1 = gap_and_mult(d, 1.0);
  CHECK(g1.mult == 1);
  CHECK(g1.gap == doctest::Approx(1.0));
  auto g100 = gap_and_mult(d, 100.0);
  CHECK(g100.mult == 0);
  CHECK(g100.gap == doctest::Approx(98.0));
  auto Pd = spectral_projection(d, 0.5, 1.5).P;
  CHECK(Pd(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(Pd(1, 1)) < 1e-14);
}

TEST_CASE("green function") {
  Eigen::MatrixXd one(1, 1);
  one << 2.0;
  auto G = green(one, cplx(0, 1));
  CHECK(G(0, 0).real() == doctest::Approx(0.4));
  CHECK(G(0, 0).imag() == doctest::Approx(0.2));
  CHECK_THROWS_AS(green(one, cplx(2.0, 0.0)), SpectralParameterOnSpectrum);

  std::mt19937_64 rng(1);
  auto H = testing::random_symmetric(7, rng);
  cplx z(0.2, 0.1);
  auto Gz = green(H, z);
  CHECK(((H.cast<cplx>() - z * Eigen::MatrixXcd::Identity(7, 7)) * Gz - Eigen::MatrixXcd::Identity(7, 7))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  auto col = green_column(H, z, 3);
  CHECK((col - Gz.col(3)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((green_general(H.cast<cplx>(), z) - Gz).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("schur complement") {
  Eigen::Matrix2d H;
  H << 2, -1, -1, 2;
  auto S = schur_green(H, {0}, 0.0);
  CHECK(S(0, 0).real() == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(green(H, 0.0)(0, 0) - S(0, 0)) < 1e-15);
  CHECK((schur_green(H, {0, 1}, cplx(0.1, 0.2)) - green(H, cplx(0.1, 0.2))).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    auto A = testing::random_symmetric(8, rng);
    std::vector<std::size_t> X{0, 2, 3, 7};
    cplx z(0.3, 0.1);
    CHECK((schur_green(A, X, z) - submatrix(green(A, z), X, X)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("resolvent identity") {
  auto h = assemble_free(testing::box2(1, 1, 4, 4), SublatticeMask::full(), V0Spec::zero());
  std::vector<std::size_t> left;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h.region.site(i)[0] <= 2) left.push_back(i);
  cplx z(0.5, 0.2);
  for (auto c : {ResolventCase::InOut, ResolventCase::OutIn, ResolventCase::OutOut})
    CHECK(resolvent_identity_residual(h.H, left, z, c) <= 1e-10);

  std::mt19937_64 rng(4);
  std::vector<double> V(h.size());
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& v : V) v = u(rng);
  auto hr = assemble(h.region, SublatticeMask::full(), V0Spec::zero(), 3.0, V);
  for (auto c : {ResolventCase::InOut, ResolventCase::OutIn, ResolventCase::OutOut})
    CHECK(resolvent_identity_residual(hr.H, {1, 5, 6, 10}, cplx(1.0, 0.05), c) <= 1e-10);

  auto Ad = decoupled(h.H, left);
  CHECK(Ad(0, 8) == 0.0);  // (1,1) and (3,1) are not neighbours anyway
  CHECK(Ad(4, 8) == 0.0);  // (2,1) -- (3,1) edge cut
  CHECK(Ad(0, 4) == -1.0);
  CHECK(Ad(8, 8) == h.H(8, 8));
}

TEST_CASE("combes-thomas rate") {
  auto h = assemble_free(testing::chain(0, 400), SublatticeMask::full(), V0Spec::zero());
  auto fit = combes_thomas_rate(h, cplx(-1.0, 0.0), Site{200});
  double oracle = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(fit.c == doctest::Approx(oracle).epsilon(0.02));
  auto far = combes_thomas_rate(h, cplx(-2.0, 0.0), Site{200});
  CHECK(far.c > fit.c);
  auto single = assemble_free(testing::chain(0, 0), SublatticeMask::full(), V0Spec::zero());
  CHECK_THROWS_AS(combes_thomas_rate(single, cplx(-1.0, 0.0), Site{0}), InvalidArgument);
}

TEST_CASE("cluster tolerance") {
  CHECK(cluster_tolerance(1.0) == doctest::Approx(1e-9));
  CHECK(cluster_tolerance(1e5) == doctest::Approx(1e-7));
}
