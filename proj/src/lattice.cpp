#include "trimlab/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <sstream>

#include "trimlab/errors.hpp"
#include "trimlab/random.hpp"

namespace trimlab {

namespace {

int floor_mod(int a, int m) {
  int r = a % m;
  return r < 0 ? r + m : r;
}

std::vector<int> parse_ints(const std::string& text, char sep, const std::string& field) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidArgument("gamma: malformed integer '" + item + "' in " + field);
    }
  }
  return out;
}

}  // namespace

std::string to_string(const Site& s) {
  std::string out = "(";
  for (int i = 0; i < s.dim(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

long graph_distance(const Site& x, const Site& y) {
  if (x.dim() != y.dim()) throw InvalidArgument("graph_distance: dimension mismatch");
  long d = 0;
  for (int i = 0; i < x.dim(); ++i) d += std::labs(static_cast<long>(x[i]) - y[i]);
  return d;
}

std::vector<Site> neighbors(const Site& x) {
  std::vector<Site> out;
  out.reserve(2 * static_cast<std::size_t>(x.dim()));
  for (int i = 0; i < x.dim(); ++i) {
    for (int step : {-1, 1}) {
      Site y = x;
      y.coords[i] += step;
      out.push_back(std::move(y));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// LatticeBox

LatticeBox::LatticeBox(int dim, std::vector<int> lo, std::vector<int> hi)
    : dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (dim_ < 1) throw InvalidArgument("make_box: dimension must be >= 1");
  if (lo_.size() != static_cast<std::size_t>(dim_) || hi_.size() != static_cast<std::size_t>(dim_))
    throw InvalidArgument("make_box: dimension mismatch");
  for (int i = 0; i < dim_; ++i)
    if (lo_[i] > hi_[i]) throw InvalidArgument("make_box: empty box (lo > hi on axis " + std::to_string(i) + ")");
  strides_.assign(dim_, 1);
  for (int i = dim_ - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * static_cast<std::size_t>(extent(i + 1));
  size_ = strides_[0] * static_cast<std::size_t>(extent(0));
}

LatticeBox make_box(int dim, std::vector<int> lo, std::vector<int> hi) {
  return LatticeBox(dim, std::move(lo), std::move(hi));
}

bool LatticeBox::contains(const Site& s) const {
  if (s.dim() != dim_) return false;
  for (int i = 0; i < dim_; ++i)
    if (s[i] < lo_[i] || s[i] > hi_[i]) return false;
  return true;
}

std::size_t LatticeBox::index(const Site& s) const {
  if (!contains(s)) throw InvalidArgument("LatticeBox::index: site " + to_string(s) + " outside box");
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) idx += strides_[i] * static_cast<std::size_t>(s[i] - lo_[i]);
  return idx;
}

Site LatticeBox::site(std::size_t index) const {
  if (index >= size_) throw InvalidArgument("LatticeBox::site: index out of range");
  std::vector<int> c(dim_);
  for (int i = 0; i < dim_; ++i) {
    c[i] = lo_[i] + static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return Site(std::move(c));
}

std::vector<Site> LatticeBox::sites() const {
  std::vector<Site> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(site(i));
  return out;
}

int LatticeBox::depth(const Site& s) const {
  int d = hi_[0] - lo_[0];
  for (int i = 0; i < dim_; ++i) d = std::min({d, s[i] - lo_[i], hi_[i] - s[i]});
  return d;
}

// ---------------------------------------------------------------------------
// Region

Region::Region(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  if (!sites_.empty()) {
    dim_ = sites_.front().dim();
    for (const auto& s : sites_)
      if (s.dim() != dim_) throw InvalidArgument("Region: mixed site dimensions");
  }
}

Region::Region(const LatticeBox& box) : dim_(box.dim()), sites_(box.sites()), box_(box) {}

std::optional<std::size_t> Region::find(const Site& s) const {
  if (box_) {
    if (!box_->contains(s)) return std::nullopt;
    return box_->index(s);
  }
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

std::vector<std::pair<std::size_t, std::size_t>> Region::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (int axis = 0; axis < dim_; ++axis) {
      Site y = sites_[i];
      y.coords[axis] += 1;
      if (auto j = find(y)) out.emplace_back(i, *j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// SublatticeMask

SublatticeMask SublatticeMask::gamma1(int k, int m) {
  if (k < 2 || m < 2) throw InvalidArgument("gamma1: k, m must be >= 2");
  return SublatticeMask(Gamma1{k, m});
}

SublatticeMask SublatticeMask::gamma2(int k) {
  if (k < 2) throw InvalidArgument("gamma2: k must be >= 2");
  return SublatticeMask(Gamma2{k});
}

SublatticeMask SublatticeMask::periodic_cell(std::vector<int> period, std::vector<bool> cell) {
  if (period.empty()) throw InvalidArgument("cell: empty period");
  std::size_t n = 1;
  for (int p : period) {
    if (p < 1) throw InvalidArgument("cell: period entries must be >= 1");
    n *= static_cast<std::size_t>(p);
  }
  if (cell.size() != n) throw InvalidArgument("cell: bitmap length does not match the period");
  return SublatticeMask(PeriodicCell{std::move(period), std::move(cell)});
}

SublatticeMask SublatticeMask::bernoulli(double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("bernoulli: p must lie in [0,1]");
  return SublatticeMask(Bernoulli{p, seed});
}

SublatticeMask SublatticeMask::parse(const std::string& descriptor) {
  auto colon = descriptor.find(':');
  std::string head = descriptor.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : descriptor.substr(colon + 1);
  if (head == "full") {
    if (!rest.empty()) throw InvalidArgument("gamma: 'full' takes no parameters");
    return full();
  }
  if (head == "gamma1") {
    auto v = parse_ints(rest, ',', "gamma1");
    if (v.size() != 2) throw InvalidArgument("gamma: gamma1 expects 'gamma1:k,m'");
    return gamma1(v[0], v[1]);
  }
  if (head == "gamma2") {
    auto v = parse_ints(rest, ',', "gamma2");
    if (v.size() != 1) throw InvalidArgument("gamma: gamma2 expects 'gamma2:k'");
    return gamma2(v[0]);
  }
  if (head == "cell") {
    auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw InvalidArgument("gamma: cell expects 'cell:<p1>x<p2>...:<bits>'");
    auto period = parse_ints(rest.substr(0, c2), 'x', "cell period");
    std::vector<bool> bits;
    for (char ch : rest.substr(c2 + 1)) {
      if (ch != '0' && ch != '1') throw InvalidArgument("gamma: cell bitmap must be 0/1 characters");
      bits.push_back(ch == '1');
    }
    return periodic_cell(std::move(period), std::move(bits));
  }
  if (head == "bernoulli") {
    auto c2 = rest.find(':');
    try {
      std::size_t used = 0;
      std::string ptext = rest.substr(0, c2);
      double p = std::stod(ptext, &used);
      if (used != ptext.size()) throw std::invalid_argument(ptext);
      std::uint64_t seed = 0;
      if (c2 != std::string::npos) seed = std::stoull(rest.substr(c2 + 1));
      return bernoulli(p, seed);
    } catch (const InvalidArgument&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidArgument("gamma: bernoulli expects 'bernoulli:p[:seed]'");
    }
  }
  throw InvalidArgument("gamma: unknown descriptor '" + descriptor + "'");
}

std::string SublatticeMask::descriptor() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Full>) {
          return "full";
        } else if constexpr (std::is_same_v<T, Gamma1>) {
          return "gamma1:" + std::to_string(k.k) + "," + std::to_string(k.m);
        } else if constexpr (std::is_same_v<T, Gamma2>) {
          return "gamma2:" + std::to_string(k.k);
        } else if constexpr (std::is_same_v<T, PeriodicCell>) {
          std::string out = "cell:";
          for (std::size_t i = 0; i < k.period.size(); ++i) out += (i ? "x" : "") + std::to_string(k.period[i]);
          out += ":";
          for (bool b : k.cell) out += b ? '1' : '0';
          return out;
        } else {
          std::ostringstream os;
          os.precision(17);
          os << "bernoulli:" << k.p << ":" << k.seed;
          return os.str();
        }
      },
      kind_);
}

bool SublatticeMask::contains(const Site& s) const {
  return std::visit(
      [&](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Full>) {
          return true;
        } else if constexpr (std::is_same_v<T, Gamma1>) {
          if (s.dim() != 2) throw InvalidArgument("gamma1 is defined on Z^2 only");
          return floor_mod(s[0], k.k) == 0 || floor_mod(s[1], k.m) == 0;
        } else if constexpr (std::is_same_v<T, Gamma2>) {
          if (s.dim() != 2) throw InvalidArgument("gamma2 is defined on Z^2 only");
          return floor_mod(s[0], k.k) == 0 || floor_mod(s[1] - s[0], 2) == 0;
        } else if constexpr (std::is_same_v<T, PeriodicCell>) {
          if (static_cast<std::size_t>(s.dim()) != k.period.size())
            throw InvalidArgument("cell mask: site dimension does not match the period");
          std::size_t idx = 0;
          for (int i = 0; i < s.dim(); ++i) idx = idx * static_cast<std::size_t>(k.period[i]) + floor_mod(s[i], k.period[i]);
          return k.cell[idx];
        } else {
          std::uint64_t h = mix64(k.seed ^ 0x5851f42d4c957f2dULL);
          for (int c : s.coords) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
          return to_unit_open(h) < k.p;
        }
      },
      kind_);
}

std::vector<std::vector<int>> SublatticeMask::periods(int dim) const {
  auto unit = [dim](int axis, int len) {
    std::vector<int> v(dim, 0);
    v[axis] = len;
    return v;
  };
  return std::visit(
      [&](const auto& k) -> std::vector<std::vector<int>> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Full>) {
          std::vector<std::vector<int>> out;
          for (int i = 0; i < dim; ++i) out.push_back(unit(i, 1));
          return out;
        } else if constexpr (std::is_same_v<T, Gamma1>) {
          return {{k.k, 0}, {0, k.m}};
        } else if constexpr (std::is_same_v<T, Gamma2>) {
          return {{k.k, k.k}, {0, 2}};
        } else if constexpr (std::is_same_v<T, PeriodicCell>) {
          std::vector<std::vector<int>> out;
          for (int i = 0; i < static_cast<int>(k.period.size()); ++i) out.push_back(unit(i, k.period[i]));
          return out;
        } else {
          return {};
        }
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Geometry

std::vector<Site> ball(const Site& x, int radius) {
  if (radius < 0) throw InvalidArgument("ball: radius must be >= 0");
  std::vector<Site> out;
  std::vector<int> offset(x.dim(), 0);
  // Depth-first enumeration of offsets with |offset|_1 <= radius.
  auto rec = [&](auto&& self, int axis, int budget) -> void {
    if (axis == x.dim()) {
      Site y = x;
      for (int i = 0; i < x.dim(); ++i) y.coords[i] += offset[i];
      out.push_back(std::move(y));
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      offset[axis] = v;
      self(self, axis + 1, budget - std::abs(v));
    }
    offset[axis] = 0;
  };
  rec(rec, 0, radius);
  std::sort(out.begin(), out.end());
  return out;
}

BoundaryData boundary(std::span<const Site> set) {
  std::vector<Site> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto member = [&](const Site& s) { return std::binary_search(sorted.begin(), sorted.end(), s); };

  BoundaryData out;
  for (const auto& x : sorted)
    for (auto& y : neighbors(x))
      if (!member(y)) out.edges.push_back({x, y});
  std::sort(out.edges.begin(), out.edges.end());
  for (const auto& e : out.edges) {
    out.inner.push_back(e.inside);
    out.outer.push_back(e.outside);
  }
  for (auto* v : {&out.inner, &out.outer}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return out;
}

std::vector<Component> components_of_complement(const SublatticeMask& gamma, const LatticeBox& window) {
  const std::size_t n = window.size();
  std::vector<char> free(n, 0);
  for (std::size_t i = 0; i < n; ++i) free[i] = !gamma.contains(window.site(i));

  std::vector<char> seen(n, 0);
  std::vector<Component> out;
  for (std::size_t start = 0; start < n; ++start) {
    if (!free[start] || seen[start]) continue;
    Component comp{{}, false};
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      Site s = window.site(i);
      if (window.depth(s) == 0) comp.touches_window_boundary = true;
      for (const auto& y : neighbors(s)) {
        if (!window.contains(y)) continue;
        std::size_t j = window.index(y);
        if (free[j] && !seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
      }
      comp.sites.push_back(std::move(s));
    }
    std::sort(comp.sites.begin(), comp.sites.end());
    out.push_back(std::move(comp));
  }
  return out;
}

InsulationReport is_doubly_insulated(const SublatticeMask& gamma, const LatticeBox& window) {
  auto comps = components_of_complement(gamma, window);
  InsulationReport rep;
  rep.component_count = comps.size();
  std::map<Site, std::size_t> label;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    rep.possibly_infinite = rep.possibly_infinite || comps[c].touches_window_boundary;
    for (const auto& s : comps[c].sites) label.emplace(s, c);
  }
  // Any two components closer than 3 have a pair of sites within the radius-2 ball.
  long best = 3;
  for (const auto& [s, c] : label) {
    for (const auto& y : ball(s, 2)) {
      auto it = label.find(y);
      if (it == label.end() || it->second == c) continue;
      long d = graph_distance(s, y);
      if (d < best) {
        best = d;
        rep.witness = std::make_pair(s, y);
      }
    }
  }
  if (rep.witness) {
    rep.insulated = false;
    rep.witness_distance = best;
  }
  return rep;
}

Density relative_density(const SublatticeMask& gamma, int radius, const Site& center) {
  Density d;
  for (const auto& y : ball(center, radius)) {
    ++d.total;
    if (gamma.contains(y)) ++d.in_gamma;
  }
  return d;
}

}  // namespace trimlab
