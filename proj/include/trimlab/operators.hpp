#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimlab/lattice.hpp"

namespace trimlab {

inline constexpr std::size_t kDefaultDenseLimit = 6000;

/// Deterministic background potential V0.
struct V0Spec {
  enum class Kind { Zero, Constant, Stagger };
  Kind kind = Kind::Zero;
  double value = 0.0;

  static V0Spec zero() { return {}; }
  static V0Spec constant(double c) { return {Kind::Constant, c}; }
  /// value * (-1)^{x_1 + ... + x_d}
  static V0Spec stagger(double a) { return {Kind::Stagger, a}; }

  /// "zero", "const:c", "stagger:a"
  static V0Spec parse(const std::string& descriptor);
  std::string descriptor() const;

  double at(const Site& x) const;

  friend bool operator==(const V0Spec&, const V0Spec&) = default;
};

/// Finite-volume restriction P_B H(g) P_B^* of -Delta + V0 + gV.
struct HamiltonianMatrix {
  Region region;
  Eigen::MatrixXd H;
  double g = 0.0;
  V0Spec v0;
  std::vector<double> V;  // realized potential, zero off Gamma
  SublatticeMask gamma;

  std::size_t size() const { return region.size(); }
  int dim() const { return region.dim(); }
};

HamiltonianMatrix assemble(const Region& region, const SublatticeMask& gamma, const V0Spec& v0, double g,
                           std::span<const double> V, std::size_t dense_limit = kDefaultDenseLimit);

/// g = 0 operator -Delta + V0 restricted to the region.
HamiltonianMatrix assemble_free(const Region& region, const SublatticeMask& gamma, const V0Spec& v0,
                                std::size_t dense_limit = kDefaultDenseLimit);

/// P_X H P_X^* for X given by region indices (kept sorted). Diagonal unchanged.
HamiltonianMatrix restrict_to(const HamiltonianMatrix& h, const std::vector<std::size_t>& indices);

/// Indices of region sites in Gamma / in Gamma^c.
std::vector<std::size_t> gamma_indices(const HamiltonianMatrix& h);
std::vector<std::size_t> complement_indices(const HamiltonianMatrix& h);

/// H_Gamma = P_{Gamma^c} H P_{Gamma^c}^* on Gamma^c within the region.
HamiltonianMatrix trimmed_restriction(const HamiltonianMatrix& h);

/// T_X(x, y) = 1 iff x ~ y, rows x in X, columns y in ambient \ X.
struct AdjacencyOperator {
  Region rows;
  Region cols;
  Eigen::MatrixXd T;
};

AdjacencyOperator adjacency_operator(const std::vector<Site>& X, const Region& ambient);

/// Block operator [[diag U, -I], [-I, H0]]: indices 0..N-1 are the pendant sites Lambda x {1},
/// N..2N-1 are Lambda x {0}.
struct HedgehogOperator {
  std::size_t n = 0;
  Eigen::MatrixXcd M;
};

HedgehogOperator hedgehog_assemble(const Eigen::MatrixXd& H0, const Eigen::VectorXcd& U);

/// Select rows and columns of a matrix by index lists.
template <class Mat>
Mat submatrix(const Mat& A, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Mat out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          A(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return out;
}

/// Complement of a sorted index list in {0..n-1}.
std::vector<std::size_t> complement_of(const std::vector<std::size_t>& idx, std::size_t n);

}  // namespace trimlab
