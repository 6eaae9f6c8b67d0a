#include "trimlab/anomalous.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <tuple>

#include <Eigen/SVD>

#include "trimlab/errors.hpp"
#include "trimlab/spectral.hpp"

namespace trimlab {

namespace {

int floor_mod(long a, long m) {
  long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

// Normalises the sign so that the first entry of magnitude above 1e-8 is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-8) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

}  // namespace

CompactEigenReport compact_eigenfunctions(const HamiltonianMatrix& h0, double lambda, double tol) {
  SpectralData sd = eigendecompose(h0.H);
  if (tol <= 0.0) tol = cluster_tolerance(sd.norm);
  std::vector<Eigen::Index> cluster;
  for (Eigen::Index j = 0; j < sd.values.size(); ++j)
    if (std::abs(sd.values(j) - lambda) <= tol) cluster.push_back(j);
  if (cluster.empty()) throw InvalidArgument("compact_eigenfunctions: lambda is not in the spectrum");

  const Eigen::Index n = sd.values.size(), m = static_cast<Eigen::Index>(cluster.size());
  Eigen::MatrixXd E(n, m);
  for (Eigen::Index k = 0; k < m; ++k) E.col(k) = sd.vectors.col(cluster[k]);

  auto gidx = gamma_indices(h0);
  CompactEigenReport rep;
  rep.lambda = lambda;
  rep.full_mult = static_cast<std::size_t>(m);

  Eigen::MatrixXd C;  // coefficient vectors in the cluster basis
  if (gidx.empty()) {
    C = Eigen::MatrixXd::Identity(m, m);
  } else {
    Eigen::MatrixXd EG(static_cast<Eigen::Index>(gidx.size()), m);
    for (std::size_t r = 0; r < gidx.size(); ++r) EG.row(static_cast<Eigen::Index>(r)) = E.row(gidx[r]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(EG, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<Eigen::Index> null;
    for (Eigen::Index k = 0; k < m; ++k) {
      double sigma = k < sv.size() ? sv(k) : 0.0;
      if (sigma <= kSupportTolerance) null.push_back(k);
    }
    C.resize(m, static_cast<Eigen::Index>(null.size()));
    for (std::size_t k = 0; k < null.size(); ++k) C.col(static_cast<Eigen::Index>(k)) = svd.matrixV().col(null[k]);
  }
  rep.basis = E * C;
  for (Eigen::Index k = 0; k < rep.basis.cols(); ++k) fix_sign(rep.basis.col(k));
  rep.supported_dim = static_cast<std::size_t>(rep.basis.cols());
  rep.assumption3 = rep.supported_dim == rep.full_mult;

  for (Eigen::Index k = 0; k < rep.basis.cols(); ++k) {
    double mass = 0.0;
    for (auto i : gidx) mass += rep.basis(static_cast<Eigen::Index>(i), k) * rep.basis(static_cast<Eigen::Index>(i), k);
    rep.max_gamma_mass = std::max(rep.max_gamma_mass, std::sqrt(mass));
    Eigen::VectorXd r = h0.H * rep.basis.col(k) - lambda * rep.basis.col(k);
    rep.max_residual = std::max(rep.max_residual, r.cwiseAbs().maxCoeff());
  }
  return rep;
}

double PeriodicEigenfunction::operator()(const Site& x) const {
  if (x.dim() != 2) throw InvalidArgument("eigenfunction sampler is defined on Z^2 only");
  return values_[static_cast<std::size_t>(floor_mod(x[0], px_)) * static_cast<std::size_t>(py_) +
                 static_cast<std::size_t>(floor_mod(x[1], py_))];
}

double gamma1_energy(int k, int m, int a, int b) {
  using std::numbers::pi;
  return 4.0 - 2.0 * (std::cos(pi * a / k) + std::cos(pi * b / m));
}

PeriodicEigenfunction gamma1_eigenfunction(int k, int m, int a, int b) {
  if (k < 2 || m < 2) throw InvalidArgument("gamma1_eigenfunction: k, m must be >= 2");
  if (a < 1 || a > k - 1 || b < 1 || b > m - 1) throw InvalidArgument("gamma1_eigenfunction: index out of range");
  using std::numbers::pi;
  // sin(pi a x / k) has period 2k in x; reduce the argument first and keep exact zeros.
  auto factor = [](int a, int x, int k) {
    int r = floor_mod(static_cast<long>(a) * x, 2L * k);
    if (r == 0 || r == k) return 0.0;
    if (2 * r == k) return 1.0;
    if (2 * r == 3 * k) return -1.0;
    return std::sin(pi * r / k);
  };
  const int px = 2 * k, py = 2 * m;
  std::vector<double> vals(static_cast<std::size_t>(px) * py);
  for (int x = 0; x < px; ++x)
    for (int y = 0; y < py; ++y) vals[static_cast<std::size_t>(x) * py + y] = factor(a, x, k) * factor(b, y, m);
  return PeriodicEigenfunction(gamma1_energy(k, m, a, b), px, py, std::move(vals));
}

std::vector<AnomalousEnergy> gamma1_energies(int k, int m) {
  if (k < 2 || m < 2) throw InvalidArgument("gamma1_energies: k, m must be >= 2");
  std::vector<std::tuple<double, int, int>> all;
  for (int a = 1; a < k; ++a)
    for (int b = 1; b < m; ++b) all.emplace_back(gamma1_energy(k, m, a, b), a, b);
  std::sort(all.begin(), all.end());
  std::vector<AnomalousEnergy> out;
  for (auto& [lam, a, b] : all) {
    if (!out.empty() && std::abs(out.back().lambda - lam) <= 1e-12) {
      ++out.back().multiplicity;
      out.back().modes.emplace_back(a, b);
    } else {
      out.push_back({lam, 1, {{a, b}}});
    }
  }
  return out;
}

namespace {

struct Gamma2Basis {
  int L;
  std::vector<std::size_t> free_sites;  // torus indices of Gamma^c
  Eigen::MatrixXd null;                 // columns over free_sites
};

// Gamma2(k)^c sites are pairwise non-adjacent, so any eigenfunction supported there has lambda = 4
// and must satisfy sum over Gamma^c neighbours = 0 at every Gamma site: a null space of the
// Gamma x Gamma^c adjacency on a torus compatible with the pattern.
Gamma2Basis gamma2_basis(int k) {
  if (k < 2) throw InvalidArgument("gamma2_eigenfunction: k must be >= 2");
  const int L = 4 * k;
  SublatticeMask mask = SublatticeMask::gamma2(k);
  auto id = [L](int x, int y) { return static_cast<std::size_t>(floor_mod(x, L)) * L + floor_mod(y, L); };
  std::vector<std::size_t> gamma_sites, free_sites;
  std::vector<long> column(static_cast<std::size_t>(L) * L, -1);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) {
      if (mask.contains(Site{x, y})) {
        gamma_sites.push_back(id(x, y));
      } else {
        column[id(x, y)] = static_cast<long>(free_sites.size());
        free_sites.push_back(id(x, y));
      }
    }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gamma_sites.size()),
                                            static_cast<Eigen::Index>(free_sites.size()));
  for (std::size_t r = 0; r < gamma_sites.size(); ++r) {
    int x = static_cast<int>(gamma_sites[r] / L), y = static_cast<int>(gamma_sites[r] % L);
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      long c = column[id(x + dx, y + dy)];
      if (c >= 0) M(static_cast<Eigen::Index>(r), c) += 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M);
  std::vector<Eigen::Index> null;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()(j) <= 1e-10) null.push_back(j);
  Gamma2Basis out{L, std::move(free_sites), Eigen::MatrixXd(M.cols(), static_cast<Eigen::Index>(null.size()))};
  for (std::size_t j = 0; j < null.size(); ++j) {
    out.null.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(null[j]);
    fix_sign(out.null.col(static_cast<Eigen::Index>(j)));
  }
  return out;
}

}  // namespace

std::size_t gamma2_eigenfunction_count(int k) { return static_cast<std::size_t>(gamma2_basis(k).null.cols()); }

PeriodicEigenfunction gamma2_eigenfunction(int k, std::size_t index) {
  Gamma2Basis basis = gamma2_basis(k);
  if (index >= static_cast<std::size_t>(basis.null.cols()))
    throw InvalidArgument("gamma2_eigenfunction: index out of range (" + std::to_string(basis.null.cols()) +
                          " available)");
  std::vector<double> vals(static_cast<std::size_t>(basis.L) * basis.L, 0.0);
  for (std::size_t c = 0; c < basis.free_sites.size(); ++c)
    vals[basis.free_sites[c]] = basis.null(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(index));
  return PeriodicEigenfunction(4.0, basis.L, basis.L, std::move(vals));
}

WindowCheck window_check(const PeriodicEigenfunction& psi, const SublatticeMask& gamma, const LatticeBox& window) {
  WindowCheck out;
  for (const auto& x : window.sites()) {
    double v = psi(x);
    double h = 4.0 * v;
    for (const auto& y : neighbors(x)) h -= psi(y);
    out.max_residual = std::max(out.max_residual, std::abs(h - psi.lambda() * v));
    out.max_abs = std::max(out.max_abs, std::abs(v));
    if (gamma.contains(x)) out.max_on_gamma = std::max(out.max_on_gamma, std::abs(v));
  }
  return out;
}

bool is_connected(const std::vector<Site>& sites) {
  if (sites.empty()) return false;
  Region r(sites);
  std::vector<char> seen(r.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& y : neighbors(r.site(i))) {
      auto j = r.find(y);
      if (j && !seen[*j]) {
        seen[*j] = 1;
        ++count;
        queue.push_back(*j);
      }
    }
  }
  return count == r.size();
}

std::vector<AssumptionReport> assumption_scan(const SublatticeMask& gamma, const Site& x, double lambda,
                                              const std::vector<std::vector<Site>>& candidates, double C, double c,
                                              const V0Spec& v0) {
  if (!(C > 0.0 && c > 0.0)) throw InvalidArgument("assumption_scan: constants C, c must be > 0");
  std::vector<AssumptionReport> out;
  for (const auto& cand : candidates) {
    Region region(cand);
    if (!region.contains(x)) throw InvalidArgument("assumption_scan: candidate does not contain x");
    if (!is_connected(cand)) throw InvalidArgument("assumption_scan: candidate disconnected");

    AssumptionReport rep;
    rep.sites = region.size();
    for (const auto& y : region.sites()) rep.outer_radius = std::max<int>(rep.outer_radius, graph_distance(x, y));
    int R = 0;
    for (;;) {
      bool inside = true;
      for (const auto& y : ball(x, R + 1))
        if (!region.contains(y)) {
          inside = false;
          break;
        }
      if (!inside) break;
      ++R;
    }
    rep.R = R;
    rep.a1 = R >= 1 && rep.outer_radius <= std::pow(static_cast<double>(R), C);

    HamiltonianMatrix h0 = assemble_free(region, gamma, v0);
    SpectralData sd = eigendecompose(h0.H);
    double tol = cluster_tolerance(sd.norm);
    ProjectionPair proj = spectral_projection_point(sd, lambda, tol);
    rep.mult = proj.rank;

    if (rep.mult == 0) {
      rep.note = "lambda not in the spectrum of the candidate";
    } else {
      auto rep3 = compact_eigenfunctions(h0, lambda, tol);
      rep.supported_dim = rep3.supported_dim;
      rep.a3 = rep3.assumption3;
    }
    if (R < 1) {
      rep.a2_applicable = false;
      if (rep.note.empty()) rep.note = "radius R = 0: distance condition |x - y| >= R^c cannot be evaluated";
    } else if (rep.mult > 0) {
      rep.a2_applicable = true;
      double threshold = std::pow(static_cast<double>(R), c);
      std::size_t xi = *region.find(x);
      for (std::size_t j = 0; j < region.size(); ++j) {
        if (static_cast<double>(graph_distance(x, region.site(j))) < threshold) continue;
        double v = std::abs(proj.P(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(j)));
        if (!rep.a2_witness || v > rep.a2_value) {
          rep.a2_value = v;
          rep.a2_witness = region.site(j);
        }
      }
      rep.a2 = rep.a2_witness && rep.a2_value >= std::pow(static_cast<double>(R), -C);
    }
    if (rep.mult > 0 && rep.mult < region.size()) {
      rep.gap = gap_and_mult(sd, lambda, tol).gap;
      rep.a4 = R >= 1 && rep.gap >= std::pow(static_cast<double>(R), -C);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace trimlab
