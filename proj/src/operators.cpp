#include "trimlab/operators.hpp"

#include <algorithm>
#include <sstream>

#include "trimlab/errors.hpp"

namespace trimlab {

V0Spec V0Spec::parse(const std::string& descriptor) {
  if (descriptor == "zero" || descriptor.empty()) return zero();
  auto colon = descriptor.find(':');
  std::string head = descriptor.substr(0, colon);
  if (colon == std::string::npos || (head != "const" && head != "stagger"))
    throw InvalidArgument("v0: unknown descriptor '" + descriptor + "'");
  std::string rest = descriptor.substr(colon + 1);
  double c = 0.0;
  try {
    std::size_t used = 0;
    c = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(rest);
  } catch (const std::exception&) {
    throw InvalidArgument("v0: malformed number in '" + descriptor + "'");
  }
  return head == "const" ? constant(c) : stagger(c);
}

std::string V0Spec::descriptor() const {
  if (kind == Kind::Zero) return "zero";
  std::ostringstream os;
  os.precision(17);
  os << (kind == Kind::Constant ? "const:" : "stagger:") << value;
  return os.str();
}

double V0Spec::at(const Site& x) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return value;
    case Kind::Stagger: {
      long parity = 0;
      for (int c : x.coords) parity += c;
      return (parity % 2 == 0) ? value : -value;
    }
  }
  return 0.0;
}

HamiltonianMatrix assemble(const Region& region, const SublatticeMask& gamma, const V0Spec& v0, double g,
                           std::span<const double> V, std::size_t dense_limit) {
  const std::size_t n = region.size();
  if (n == 0) throw InvalidArgument("assemble: empty region");
  if (n > dense_limit)
    throw InvalidArgument("assemble: " + std::to_string(n) + " sites exceed the dense limit " +
                          std::to_string(dense_limit));
  if (V.size() != n) throw InvalidArgument("assemble: potential length does not match the region");
  if (!(g >= 0.0)) throw InvalidArgument("assemble: coupling g must be >= 0");

  HamiltonianMatrix h;
  h.region = region;
  h.g = g;
  h.v0 = v0;
  h.gamma = gamma;
  h.V.assign(V.begin(), V.end());

  const double degree = 2.0 * region.dim();
  h.H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Site& x = region.site(i);
    if (V[i] != 0.0 && !gamma.contains(x))
      throw InvalidArgument("assemble: potential nonzero off Gamma at " + to_string(x));
    h.H(i, i) = degree + v0.at(x) + g * V[i];
  }
  for (auto [i, j] : region.edges()) {
    h.H(i, j) = -1.0;
    h.H(j, i) = -1.0;
  }
  return h;
}

HamiltonianMatrix assemble_free(const Region& region, const SublatticeMask& gamma, const V0Spec& v0,
                                std::size_t dense_limit) {
  std::vector<double> zero(region.size(), 0.0);
  return assemble(region, gamma, v0, 0.0, zero, dense_limit);
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& idx, std::size_t n) {
  std::vector<char> in(n, 0);
  for (auto i : idx) {
    if (i >= n) throw InvalidArgument("index set out of range");
    in[i] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

HamiltonianMatrix restrict_to(const HamiltonianMatrix& h, const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> idx = indices;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<Site> sites;
  HamiltonianMatrix out;
  out.g = h.g;
  out.v0 = h.v0;
  out.gamma = h.gamma;
  for (auto i : idx) {
    if (i >= h.size()) throw InvalidArgument("restrict_to: index out of range");
    sites.push_back(h.region.site(i));
    out.V.push_back(h.V[i]);
  }
  out.region = Region(std::move(sites));
  out.H = submatrix(h.H, idx, idx);
  return out;
}

std::vector<std::size_t> gamma_indices(const HamiltonianMatrix& h) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h.gamma.contains(h.region.site(i))) out.push_back(i);
  return out;
}

std::vector<std::size_t> complement_indices(const HamiltonianMatrix& h) {
  return complement_of(gamma_indices(h), h.size());
}

HamiltonianMatrix trimmed_restriction(const HamiltonianMatrix& h) {
  auto idx = complement_indices(h);
  if (idx.empty()) throw InvalidArgument("trimmed_restriction: empty complement");
  return restrict_to(h, idx);
}

AdjacencyOperator adjacency_operator(const std::vector<Site>& X, const Region& ambient) {
  Region rows(X);
  for (const auto& x : rows.sites())
    if (!ambient.contains(x)) throw InvalidArgument("adjacency_operator: X is not contained in the ambient region");
  std::vector<Site> rest;
  for (const auto& y : ambient.sites())
    if (!rows.contains(y)) rest.push_back(y);
  AdjacencyOperator T{rows, Region(std::move(rest)), {}};
  T.T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T.rows.size()), static_cast<Eigen::Index>(T.cols.size()));
  for (std::size_t i = 0; i < T.rows.size(); ++i)
    for (const auto& y : neighbors(T.rows.site(i)))
      if (auto j = T.cols.find(y)) T.T(i, *j) = 1.0;
  return T;
}

HedgehogOperator hedgehog_assemble(const Eigen::MatrixXd& H0, const Eigen::VectorXcd& U) {
  const Eigen::Index n = H0.rows();
  if (H0.cols() != n) throw InvalidArgument("hedgehog_assemble: H0 must be square");
  if (U.size() != n) throw InvalidArgument("hedgehog_assemble: size mismatch between U and H0");
  HedgehogOperator out;
  out.n = static_cast<std::size_t>(n);
  out.M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  out.M.topLeftCorner(n, n).diagonal() = U;
  out.M.topRightCorner(n, n).diagonal().setConstant(-1.0);
  out.M.bottomLeftCorner(n, n).diagonal().setConstant(-1.0);
  out.M.bottomRightCorner(n, n) = H0.cast<std::complex<double>>();
  return out;
}

}  // namespace trimlab
