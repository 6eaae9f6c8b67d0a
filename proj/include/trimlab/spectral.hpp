#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "trimlab/operators.hpp"

namespace trimlab {

using cplx = std::complex<double>;

struct SpectralData {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  double norm = 0.0;        // max |lambda_j|

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

SpectralData eigendecompose(const Eigen::MatrixXd& H);
inline SpectralData eigendecompose(const HamiltonianMatrix& h) { return eigendecompose(h.H); }

/// Default cluster tolerance max(1e-9, 1e-12 ||H||).
double cluster_tolerance(double norm);

/// (H - z)^{-1} by partial-pivoting LU. Throws SpectralParameterOnSpectrum for real z on the spectrum.
Eigen::MatrixXcd green(const Eigen::MatrixXd& H, cplx z);
inline Eigen::MatrixXcd green(const HamiltonianMatrix& h, cplx z) { return green(h.H, z); }

/// (A - z)^{-1} for a general complex matrix; throws NumericError when singular.
Eigen::MatrixXcd green_general(const Eigen::MatrixXcd& A, cplx z);

/// Column G_z[H](., y).
Eigen::VectorXcd green_column(const Eigen::MatrixXd& H, cplx z, std::size_t y);

/// Schur-Banachiewicz evaluation of P_X G_z[H] P_X^*.
Eigen::MatrixXcd schur_green(const Eigen::MatrixXd& H, const std::vector<std::size_t>& X, cplx z);

enum class ResolventCase { InOut, OutIn, OutOut };

/// The decoupled operator A_X: edges between X and X^c removed, diagonal kept.
Eigen::MatrixXd decoupled(const Eigen::MatrixXd& A, const std::vector<std::size_t>& X);

/// Maximum deviation of the boundary-sum expansion from G_z[H](x, y) over all (x, y) of the case.
/// For x, y outside X the expansion includes the direct term G_z[H_X](x, y).
double resolvent_identity_residual(const Eigen::MatrixXd& H, const std::vector<std::size_t>& X, cplx z,
                                   ResolventCase which);

struct ProjectionPair {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  std::size_t rank = 0;
};

/// Projection onto eigenvalues in the closed interval [lo, hi], each end widened by the cluster tolerance.
ProjectionPair spectral_projection(const SpectralData& sd, double lo, double hi);
/// Projection onto the eigenvalue cluster |lambda_j - lambda| <= tol.
ProjectionPair spectral_projection_point(const SpectralData& sd, double lambda, double tol);

struct GapMult {
  std::size_t mult = 0;
  double gap = 0.0;
};

/// Throws InvalidArgument when every eigenvalue lies in the cluster.
GapMult gap_and_mult(const SpectralData& sd, double lambda, double tol);
GapMult gap_and_mult(const SpectralData& sd, double lambda);

struct CombesThomasFit {
  double C = 0.0;
  double c = 0.0;
  double residual = 0.0;  // rms of the log fit
  std::size_t points = 0;
};

/// Least-squares fit of log|G_z(x0, y)| = log C - c |x0 - y| over sites with |x0 - y| >= 2
/// at depth >= 2 inside the box.
CombesThomasFit combes_thomas_rate(const HamiltonianMatrix& h, cplx z, const Site& x0);

}  // namespace trimlab
