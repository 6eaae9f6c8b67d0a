#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace trimlab {

/// A point of Z^d. Ordering is lexicographic in the coordinates.
struct Site {
  std::vector<int> coords;

  Site() = default;
  explicit Site(std::vector<int> c) : coords(std::move(c)) {}
  Site(std::initializer_list<int> c) : coords(c) {}

  int dim() const { return static_cast<int>(coords.size()); }
  int operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site& a, const Site& b) { return a.coords <=> b.coords; }
};

std::string to_string(const Site& s);

/// l1 (graph) distance on Z^d.
long graph_distance(const Site& x, const Site& y);

/// Nearest neighbours x +- e_i, sorted lexicographically.
std::vector<Site> neighbors(const Site& x);

/// Axis-aligned box [lo, hi] in Z^d with lexicographic site indexing.
class LatticeBox {
 public:
  LatticeBox(int dim, std::vector<int> lo, std::vector<int> hi);

  int dim() const { return dim_; }
  const std::vector<int>& lo() const { return lo_; }
  const std::vector<int>& hi() const { return hi_; }
  std::size_t size() const { return size_; }
  int extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }

  bool contains(const Site& s) const;
  std::size_t index(const Site& s) const;
  Site site(std::size_t index) const;
  std::vector<Site> sites() const;

  /// Smallest distance from s to a site outside the box, minus one (0 on the boundary layer).
  int depth(const Site& s) const;

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;

 private:
  int dim_;
  std::vector<int> lo_, hi_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

LatticeBox make_box(int dim, std::vector<int> lo, std::vector<int> hi);

/// A finite set of sites with a stable (sorted) indexing.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Site> sites);
  explicit Region(const LatticeBox& box);

  int dim() const { return dim_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(std::size_t i) const { return sites_[i]; }
  std::optional<std::size_t> find(const Site& s) const;
  bool contains(const Site& s) const { return find(s).has_value(); }
  const std::optional<LatticeBox>& box() const { return box_; }

  /// Index pairs (i, j), i < j, of nearest-neighbour sites inside the region.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend bool operator==(const Region& a, const Region& b) { return a.sites_ == b.sites_; }

 private:
  int dim_ = 0;
  std::vector<Site> sites_;
  std::optional<LatticeBox> box_;
};

/// The trimming set Gamma: sites carrying the random potential.
class SublatticeMask {
 public:
  struct Full {};
  /// x1 in kZ or x2 in mZ (d = 2).
  struct Gamma1 {
    int k, m;
  };
  /// x1 in kZ or x2 - x1 even (d = 2).
  struct Gamma2 {
    int k;
  };
  /// Membership read off a bitmap over residues modulo a diagonal period.
  struct PeriodicCell {
    std::vector<int> period;
    std::vector<bool> cell;  // lexicographic over residues, true = in Gamma
  };
  /// Independent site percolation with retention probability p.
  struct Bernoulli {
    double p;
    std::uint64_t seed;
  };
  using Kind = std::variant<Full, Gamma1, Gamma2, PeriodicCell, Bernoulli>;

  SublatticeMask() : kind_(Full{}) {}
  static SublatticeMask full() { return SublatticeMask(Full{}); }
  static SublatticeMask gamma1(int k, int m);
  static SublatticeMask gamma2(int k);
  static SublatticeMask periodic_cell(std::vector<int> period, std::vector<bool> cell);
  static SublatticeMask bernoulli(double p, std::uint64_t seed);

  /// Parses "full", "gamma1:k,m", "gamma2:k", "cell:3x3:011111111", "bernoulli:p[:seed]".
  static SublatticeMask parse(const std::string& descriptor);
  std::string descriptor() const;

  const Kind& kind() const { return kind_; }
  bool is_full() const { return std::holds_alternative<Full>(kind_); }

  bool contains(const Site& s) const;

  /// Generators of a translation group leaving membership invariant; empty for Bernoulli.
  std::vector<std::vector<int>> periods(int dim) const;

 private:
  explicit SublatticeMask(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

struct BoundaryEdge {
  Site inside;
  Site outside;
  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
  friend auto operator<=>(const BoundaryEdge&, const BoundaryEdge&) = default;
};

struct BoundaryData {
  std::vector<BoundaryEdge> edges;
  std::vector<Site> inner;
  std::vector<Site> outer;
};

/// All sites y with |y - x|_1 <= radius, sorted.
std::vector<Site> ball(const Site& x, int radius);

BoundaryData boundary(std::span<const Site> set);

struct Component {
  std::vector<Site> sites;         // sorted
  bool touches_window_boundary;    // possibly part of an infinite component of Z^d
};

/// Nearest-neighbour connected components of Gamma^c within the window, ordered by first site.
std::vector<Component> components_of_complement(const SublatticeMask& gamma, const LatticeBox& window);

struct InsulationReport {
  bool insulated = true;
  bool possibly_infinite = false;   // some component touches the window boundary
  std::size_t component_count = 0;
  std::optional<std::pair<Site, Site>> witness;
  long witness_distance = 0;
};

/// Double insulation: components of Gamma^c pairwise at l1 distance >= 3.
InsulationReport is_doubly_insulated(const SublatticeMask& gamma, const LatticeBox& window);

struct Density {
  long in_gamma = 0;
  long total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(in_gamma) / static_cast<double>(total); }
};

Density relative_density(const SublatticeMask& gamma, int radius, const Site& center);

}  // namespace trimlab
