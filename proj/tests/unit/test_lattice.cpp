#include <cstdlib>

#include <doctest.h>

#include "trimlab/errors.hpp"
#include "trimlab/lattice.hpp"

using namespace trimlab;

TEST_CASE("box sizes and indexing") {
  CHECK(make_box(1, {0}, {0}).size() == 1);
  CHECK(make_box(2, {1, 1}, {3, 3}).size() == 9);
  LatticeBox b = make_box(2, {0, 0}, {20, 20});
  CHECK(b.size() == 441);
  for (std::size_t i = 0; i < b.size(); i += 37) CHECK(b.index(b.site(i)) == i);
  CHECK(b.site(0) == Site{0, 0});
  CHECK(b.site(1) == Site{0, 1});
  CHECK(b.depth(Site{0, 5}) == 0);
  CHECK(b.depth(Site{10, 10}) == 10);
  CHECK_THROWS_AS(make_box(2, {1, 1}, {0, 3}), InvalidArgument);
}

TEST_CASE("graph distance") {
  CHECK(graph_distance({0, 0}, {0, 0}) == 0);
  CHECK(graph_distance({0, 0}, {2, -1}) == 3);
  CHECK(graph_distance({1, 1}, {3, 3}) == 4);
}

TEST_CASE("balls") {
  CHECK(ball({0, 0}, 0).size() == 1);
  CHECK(ball({0, 0}, 1).size() == 5);
  // enumerate |y1| + |y2| <= 2 by hand
  std::size_t n = 0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) n += (std::abs(a) + std::abs(b) <= 2);
  CHECK(ball({0, 0}, 2).size() == n);
  CHECK(n == 13);
  // 2R^2 + 2R + 1 in two dimensions
  for (int R = 0; R < 8; ++R) CHECK(ball({3, -4}, R).size() == static_cast<std::size_t>(2 * R * R + 2 * R + 1));
}

TEST_CASE("boundary") {
  std::vector<Site> one{{0, 0}};
  auto b = boundary(one);
  CHECK(b.edges.size() == 4);
  CHECK(b.inner.size() == 1);
  CHECK(b.outer.size() == 4);

  std::vector<Site> pair{{0}, {1}};
  auto p = boundary(pair);
  CHECK(p.edges.size() == 2);
  CHECK(p.outer == std::vector<Site>{{-1}, {2}});

  auto sq = boundary(make_box(2, {1, 1}, {3, 3}).sites());
  CHECK(sq.inner.size() == 8);
  CHECK(sq.edges.size() == 12);
  CHECK(sq.outer.size() == 12);
}

TEST_CASE("complement components") {
  auto comps = components_of_complement(SublatticeMask::gamma1(2, 2), make_box(2, {0, 0}, {4, 4}));
  REQUIRE(comps.size() == 4);
  std::vector<Site> expect{{1, 1}, {1, 3}, {3, 1}, {3, 3}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(comps[i].sites == std::vector<Site>{expect[i]});
    CHECK_FALSE(comps[i].touches_window_boundary);
  }
  CHECK(components_of_complement(SublatticeMask::full(), make_box(2, {0, 0}, {6, 6})).empty());

  auto g2 = components_of_complement(SublatticeMask::gamma2(2), make_box(2, {0, 0}, {4, 4}));
  REQUIRE_FALSE(g2.empty());
  for (const auto& c : g2) {
    REQUIRE(c.sites.size() == 1);
    CHECK(c.sites[0][0] % 2 != 0);
    CHECK(c.sites[0][1] % 2 == 0);
  }
}

TEST_CASE("double insulation") {
  auto r = is_doubly_insulated(SublatticeMask::gamma1(2, 2), make_box(2, {0, 0}, {8, 8}));
  CHECK_FALSE(r.insulated);
  CHECK(r.witness_distance == 2);
  REQUIRE(r.witness.has_value());
  CHECK(graph_distance(r.witness->first, r.witness->second) == 2);

  std::vector<bool> cell(9, true);
  cell[0] = false;  // complement is 3Z x 3Z
  auto spaced = SublatticeMask::periodic_cell({3, 3}, cell);
  CHECK(is_doubly_insulated(spaced, make_box(2, {0, 0}, {8, 8})).insulated);
  CHECK(is_doubly_insulated(SublatticeMask::full(), make_box(2, {0, 0}, {5, 5})).insulated);
}

TEST_CASE("relative density") {
  CHECK(relative_density(SublatticeMask::full(), 7, {0, 0}).value() == 1.0);
  double d1 = relative_density(SublatticeMask::gamma1(2, 2), 60, {0, 0}).value();
  CHECK(d1 == doctest::Approx(0.75).epsilon(0.01));
  std::vector<bool> cell(9, true);
  cell[0] = false;
  double d3 = relative_density(SublatticeMask::periodic_cell({3, 3}, cell), 60, {0, 0}).value();
  CHECK(d3 == doctest::Approx(8.0 / 9.0).epsilon(0.01));
}

TEST_CASE("mask descriptors") {
  for (std::string s : {"full", "gamma1:2,3", "gamma2:2", "cell:3x3:011111111"}) {
    auto m = SublatticeMask::parse(s);
    auto back = SublatticeMask::parse(m.descriptor());
    for (const auto& x : make_box(2, {-3, -3}, {3, 3}).sites()) CHECK(m.contains(x) == back.contains(x));
  }
  CHECK_THROWS_AS(SublatticeMask::parse("gamma1:x"), InvalidArgument);
  CHECK_THROWS_AS(SublatticeMask::parse("triangle"), InvalidArgument);
}

TEST_CASE("periods leave membership invariant") {
  for (std::string s : {"gamma1:2,3", "gamma2:3", "cell:3x3:011111111"}) {
    auto m = SublatticeMask::parse(s);
    for (const auto& p : m.periods(2))
      for (const auto& x : make_box(2, {-4, -4}, {4, 4}).sites())
        CHECK(m.contains(x) == m.contains(Site{x[0] + p[0], x[1] + p[1]}));
  }
}

TEST_CASE("bernoulli mask is deterministic in its seed") {
  auto a = SublatticeMask::bernoulli(0.5, 7), b = SublatticeMask::bernoulli(0.5, 7);
  std::size_t in = 0, n = 0;
  for (const auto& x : make_box(2, {0, 0}, {30, 30}).sites()) {
    CHECK(a.contains(x) == b.contains(x));
    in += a.contains(x);
    ++n;
  }
  CHECK(static_cast<double>(in) / n == doctest::Approx(0.5).epsilon(0.1));
}
