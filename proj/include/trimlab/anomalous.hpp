#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimlab/operators.hpp"

namespace trimlab {

/// Gamma-mass threshold below which a vector counts as vanishing on Gamma.
inline constexpr double kSupportTolerance = 1e-10;

struct CompactEigenReport {
  double lambda = 0.0;
  Eigen::MatrixXd basis;  // columns: orthonormal eigenvectors vanishing on Gamma
  std::size_t full_mult = 0;
  std::size_t supported_dim = 0;
  bool assumption3 = false;
  double max_gamma_mass = 0.0;  // over the basis
  double max_residual = 0.0;    // max |(H - lambda) v|
};

/// Intersects Ker(H0 - lambda) with the vectors vanishing on Gamma. tol <= 0 selects the cluster default.
CompactEigenReport compact_eigenfunctions(const HamiltonianMatrix& h0, double lambda, double tol = 0.0);

/// A formal eigenfunction of -Delta on Z^2, periodic with the stored period, exactly zero on Gamma.
class PeriodicEigenfunction {
 public:
  PeriodicEigenfunction(double lambda, int px, int py, std::vector<double> values)
      : lambda_(lambda), px_(px), py_(py), values_(std::move(values)) {}

  double lambda() const { return lambda_; }
  int period_x() const { return px_; }
  int period_y() const { return py_; }
  double operator()(const Site& x) const;

 private:
  double lambda_;
  int px_, py_;
  std::vector<double> values_;  // row-major over [0, px) x [0, py)
};

/// sin(pi a x1 / k) sin(pi b x2 / m): the reflected Dirichlet eigenfunction of the k x m cell.
PeriodicEigenfunction gamma1_eigenfunction(int k, int m, int a, int b);

double gamma1_energy(int k, int m, int a, int b);

struct AnomalousEnergy {
  double lambda;
  std::size_t multiplicity;
  std::vector<std::pair<int, int>> modes;  // (a, b)
};

/// Distinct lambda_{a,b}(k, m), ascending, with their multiplicities in the fundamental cell.
std::vector<AnomalousEnergy> gamma1_energies(int k, int m);

/// Number of independent Gamma2(k)-vanishing eigenfunctions available to gamma2_eigenfunction.
std::size_t gamma2_eigenfunction_count(int k);

/// index-th basis vector of the Gamma2(k)-vanishing eigenspace on the periodic 4k x 4k torus.
PeriodicEigenfunction gamma2_eigenfunction(int k, std::size_t index);

struct WindowCheck {
  double max_residual = 0.0;  // max over window sites of |(H0 psi)(x) - lambda psi(x)|
  double max_on_gamma = 0.0;  // max |psi| over Gamma in the window
  double max_abs = 0.0;
};

/// Eigen-equation and vanishing check of a sampler over a window (V0 = 0 on Z^d).
WindowCheck window_check(const PeriodicEigenfunction& psi, const SublatticeMask& gamma, const LatticeBox& window);

struct AssumptionReport {
  std::size_t sites = 0;
  int R = 0;             // largest R with B(x, R) inside the candidate
  int outer_radius = 0;  // max distance from x inside the candidate
  bool a1 = false;
  bool a2_applicable = false;
  bool a2 = false;
  std::optional<Site> a2_witness;
  double a2_value = 0.0;
  std::size_t mult = 0;
  std::size_t supported_dim = 0;
  bool a3 = false;
  double gap = 0.0;
  bool a4 = false;
  std::string note;
};

/// Checks assumptions 1-4 of the divergence theorem on each user-supplied candidate subgraph.
std::vector<AssumptionReport> assumption_scan(const SublatticeMask& gamma, const Site& x, double lambda,
                                              const std::vector<std::vector<Site>>& candidates, double C, double c,
                                              const V0Spec& v0 = V0Spec::zero());

/// Nearest-neighbour connectivity of a finite site set.
bool is_connected(const std::vector<Site>& sites);

}  // namespace trimlab
