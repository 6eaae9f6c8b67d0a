#include <cmath>

#include <doctest.h>

#include "support.hpp"
#include "trimlab/anomalous.hpp"
#include "trimlab/errors.hpp"
#include "trimlab/spectral.hpp"

using namespace trimlab;

TEST_CASE("compact eigenfunctions on the 3x3 box") {
  auto r = testing::box2(1, 1, 3, 3);
  auto rep = compact_eigenfunctions(assemble_free(r, SublatticeMask::gamma1(2, 2), V0Spec::zero()), 4.0);
  CHECK(rep.full_mult == 3);
  CHECK(rep.supported_dim == 1);
  CHECK_FALSE(rep.assumption3);
  CHECK(rep.max_residual < 1e-12);
  REQUIRE(rep.basis.cols() == 1);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(9);
  expect(*r.find(Site{1, 1})) = 0.5;
  expect(*r.find(Site{1, 3})) = -0.5;
  expect(*r.find(Site{3, 1})) = -0.5;
  expect(*r.find(Site{3, 3})) = 0.5;
  CHECK((rep.basis.col(0) - expect).cwiseAbs().maxCoeff() < 1e-10);

  auto full = compact_eigenfunctions(assemble_free(r, SublatticeMask::full(), V0Spec::zero()), 4.0);
  CHECK(full.supported_dim == 0);
  CHECK(full.full_mult == 3);

  auto single = compact_eigenfunctions(
      assemble_free(Region(std::vector<Site>{{1, 1}}), SublatticeMask::gamma1(2, 2), V0Spec::zero()), 4.0);
  CHECK(single.supported_dim == 1);
  CHECK(single.assumption3);
  CHECK(std::abs(single.basis(0, 0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(compact_eigenfunctions(assemble_free(r, SublatticeMask::full(), V0Spec::zero()), 4.5),
                  InvalidArgument);
}

TEST_CASE("supported dimension never exceeds the multiplicity") {
  for (std::string g : {"gamma1:2,2", "gamma1:3,2", "gamma2:2", "bernoulli:0.5:3"}) {
    auto h = assemble_free(testing::box2(0, 0, 6, 6), SublatticeMask::parse(g), V0Spec::zero());
    auto sd = eigendecompose(h);
    for (Eigen::Index j = 0; j < sd.values.size(); j += 5) {
      auto rep = compact_eigenfunctions(h, sd.values(j));
      CHECK(rep.supported_dim <= rep.full_mult);
      CHECK(rep.assumption3 == (rep.supported_dim == rep.full_mult));
    }
  }
}

TEST_CASE("gamma1 eigenfunctions") {
  auto psi = gamma1_eigenfunction(2, 2, 1, 1);
  CHECK(psi.lambda() == doctest::Approx(4.0));
  CHECK(psi(Site{1, 1}) == doctest::Approx(1.0));
  CHECK(psi(Site{1, 3}) == doctest::Approx(-1.0));
  CHECK(psi(Site{3, 1}) == doctest::Approx(-1.0));
  CHECK(psi(Site{3, 3}) == doctest::Approx(1.0));
  for (int a = -5; a <= 5; a += 2)
    for (int b = -5; b <= 5; b += 2)
      CHECK(psi(Site{a, b}) == doctest::Approx(std::pow(-1.0, ((a - 1) + (b - 1)) / 2)));
  auto w = window_check(psi, SublatticeMask::gamma1(2, 2), make_box(2, {-6, -6}, {6, 6}));
  CHECK(w.max_residual <= 1e-12);
  CHECK(w.max_on_gamma == 0.0);

  CHECK(gamma1_energy(3, 2, 1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  for (int k = 2; k <= 5; ++k)
    for (int m = 2; m <= 5; ++m)
      for (int a = 1; a < k; ++a)
        for (int b = 1; b < m; ++b) {
          CHECK(gamma1_energy(k, m, a, b) == gamma1_energy(m, k, b, a));
          auto f = gamma1_eigenfunction(k, m, a, b);
          auto wc = window_check(f, SublatticeMask::gamma1(k, m), make_box(2, {-7, -7}, {7, 7}));
          CHECK(wc.max_residual <= 1e-12);
          CHECK(wc.max_on_gamma <= 1e-12);
        }
  CHECK_THROWS_AS(gamma1_eigenfunction(2, 2, 2, 1), InvalidArgument);

  auto levels = gamma1_energies(3, 3);
  std::size_t total = 0;
  for (const auto& e : levels) total += e.multiplicity;
  CHECK(total == 4);
}

TEST_CASE("gamma2 eigenfunctions") {
  REQUIRE(gamma2_eigenfunction_count(2) >= 1);
  auto psi = gamma2_eigenfunction(2, 0);
  CHECK(psi.lambda() == doctest::Approx(4.0));
  auto w = window_check(psi, SublatticeMask::gamma2(2), make_box(2, {-8, -8}, {8, 8}));
  CHECK(w.max_residual <= 1e-12);
  CHECK(w.max_on_gamma <= 1e-12);
  CHECK(w.max_abs > 0.1);
  CHECK_THROWS_AS(gamma2_eigenfunction(2, gamma2_eigenfunction_count(2)), InvalidArgument);
}

TEST_CASE("assumption scan") {
  auto reps = assumption_scan(SublatticeMask::gamma1(2, 2), Site{1, 1}, 4.0, {{Site{1, 1}}}, 1.0, 0.5);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].mult == 1);
  CHECK(reps[0].a3);
  CHECK_FALSE(reps[0].a2_applicable);
  CHECK(reps[0].R == 0);
  CHECK_THROWS_AS(assumption_scan(SublatticeMask::gamma1(2, 2), Site{1, 1}, 4.0, {{Site{1, 1}, Site{3, 3}}}, 1.0, 0.5),
                  InvalidArgument);
  CHECK(is_connected({Site{0, 0}, Site{0, 1}, Site{1, 1}}));
  CHECK_FALSE(is_connected({Site{0, 0}, Site{1, 1}}));
}
