#include "trimlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "trimlab/errors.hpp"

namespace trimlab {

namespace {

using Idx = Eigen::Index;

void check_square(const Eigen::MatrixXd& H, const char* who) {
  if (H.rows() != H.cols() || H.rows() == 0) throw InvalidArgument(std::string(who) + ": matrix must be square and non-empty");
}

// Real z on the spectrum is detected from eigenvalues only; the solve itself never uses them.
void check_off_spectrum(const Eigen::MatrixXd& H, cplx z) {
  if (z.imag() != 0.0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue solver failed to converge");
  const auto& ev = es.eigenvalues();
  double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  double dist = (ev.array() - z.real()).abs().minCoeff();
  if (dist <= 1e-12 * std::max(norm, 1.0))
    throw SpectralParameterOnSpectrum("spectral parameter z = " + std::to_string(z.real()) +
                                      " lies on the spectrum (distance " + std::to_string(dist) + ")");
}

}  // namespace

SpectralData eigendecompose(const Eigen::MatrixXd& H) {
  check_square(H, "eigendecompose");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw NumericError("eigendecompose: failure to converge");
  SpectralData sd;
  sd.values = es.eigenvalues();
  sd.vectors = es.eigenvectors();
  sd.norm = std::max(std::abs(sd.values(0)), std::abs(sd.values(sd.values.size() - 1)));
  return sd;
}

double cluster_tolerance(double norm) { return std::max(1e-9, 1e-12 * norm); }

Eigen::MatrixXcd green(const Eigen::MatrixXd& H, cplx z) {
  check_square(H, "green");
  check_off_spectrum(H, z);
  const Idx n = H.rows();
  Eigen::MatrixXcd A = H.cast<cplx>();
  A.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  return lu.solve(Eigen::MatrixXcd::Identity(n, n));
}

Eigen::MatrixXcd green_general(const Eigen::MatrixXcd& A, cplx z) {
  if (A.rows() != A.cols() || A.rows() == 0) throw InvalidArgument("green: matrix must be square and non-empty");
  const Idx n = A.rows();
  Eigen::MatrixXcd B = A;
  B.diagonal().array() -= z;
  Eigen::FullPivLU<Eigen::MatrixXcd> check(B);
  if (!check.isInvertible()) throw NumericError("green: singular matrix (z on the spectrum)");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
  return lu.solve(Eigen::MatrixXcd::Identity(n, n));
}

Eigen::VectorXcd green_column(const Eigen::MatrixXd& H, cplx z, std::size_t y) {
  check_square(H, "green_column");
  if (y >= static_cast<std::size_t>(H.rows())) throw InvalidArgument("green_column: index out of range");
  check_off_spectrum(H, z);
  Eigen::MatrixXcd A = H.cast<cplx>();
  A.diagonal().array() -= z;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(H.rows());
  e(static_cast<Idx>(y)) = 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(A).solve(e);
}

Eigen::MatrixXcd schur_green(const Eigen::MatrixXd& H, const std::vector<std::size_t>& X, cplx z) {
  check_square(H, "schur_green");
  const std::size_t n = static_cast<std::size_t>(H.rows());
  auto Xc = complement_of(X, n);
  Eigen::MatrixXcd A = H.cast<cplx>();
  A.diagonal().array() -= z;
  Eigen::MatrixXcd AXX = submatrix(A, X, X);
  if (Xc.empty()) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(AXX);
    return lu.solve(Eigen::MatrixXcd::Identity(AXX.rows(), AXX.rows()));
  }
  Eigen::MatrixXcd AXY = submatrix(A, X, Xc);
  Eigen::MatrixXcd AYX = submatrix(A, Xc, X);
  Eigen::MatrixXcd AYY = submatrix(A, Xc, Xc);
  Eigen::FullPivLU<Eigen::MatrixXcd> inner(AYY);
  if (!inner.isInvertible()) throw NumericError("schur_green: inner block singular");
  Eigen::MatrixXcd S = AXX - AXY * inner.solve(AYX);
  Eigen::FullPivLU<Eigen::MatrixXcd> outer(S);
  if (!outer.isInvertible()) throw NumericError("schur_green: Schur complement singular");
  return outer.inverse();
}

Eigen::MatrixXd decoupled(const Eigen::MatrixXd& A, const std::vector<std::size_t>& X) {
  const std::size_t n = static_cast<std::size_t>(A.rows());
  std::vector<char> in(n, 0);
  for (auto i : X) in[i] = 1;
  Eigen::MatrixXd out = A;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (in[i] != in[j]) out(i, j) = 0.0;
  return out;
}

double resolvent_identity_residual(const Eigen::MatrixXd& H, const std::vector<std::size_t>& X, cplx z,
                                   ResolventCase which) {
  check_square(H, "resolvent_identity_residual");
  const std::size_t n = static_cast<std::size_t>(H.rows());
  auto Xc = complement_of(X, n);
  Eigen::MatrixXd HX = decoupled(H, X);
  Eigen::MatrixXcd G = green(H, z);
  Eigen::MatrixXcd GX;
  try {
    GX = green(HX, z);
  } catch (const SpectralParameterOnSpectrum&) {
    throw NumericError("resolvent_identity_residual: restricted resolvent singular");
  }
  // Boundary hopping pattern: E(u', u) = 1 for u' in X ~ u in X^c (and symmetric), i.e. -(H - H_X).
  Eigen::MatrixXcd E = (HX - H).cast<cplx>();

  Eigen::MatrixXcd expansion;
  const std::vector<std::size_t>*rows = nullptr, *cols = nullptr;
  switch (which) {
    case ResolventCase::InOut:
      expansion = G * E * GX;
      rows = &X;
      cols = &Xc;
      break;
    case ResolventCase::OutIn:
      expansion = GX * E * G;
      rows = &Xc;
      cols = &X;
      break;
    case ResolventCase::OutOut:
      expansion = GX + GX * E * G * E * GX;
      rows = &Xc;
      cols = &Xc;
      break;
  }
  double worst = 0.0;
  for (auto i : *rows)
    for (auto j : *cols) worst = std::max(worst, std::abs(expansion(i, j) - G(i, j)));
  return worst;
}

namespace {

ProjectionPair project_window(const SpectralData& sd, double lo, double hi) {
  const Idx n = sd.values.size();
  std::vector<Idx> pick;
  for (Idx j = 0; j < n; ++j)
    if (sd.values(j) >= lo && sd.values(j) <= hi) pick.push_back(j);
  Eigen::MatrixXd V(n, static_cast<Idx>(pick.size()));
  for (std::size_t k = 0; k < pick.size(); ++k) V.col(static_cast<Idx>(k)) = sd.vectors.col(pick[k]);
  ProjectionPair out;
  out.P = V * V.transpose();
  out.Q = Eigen::MatrixXd::Identity(n, n) - out.P;
  out.rank = pick.size();
  return out;
}

}  // namespace

ProjectionPair spectral_projection(const SpectralData& sd, double lo, double hi) {
  const double tol = cluster_tolerance(sd.norm);
  return project_window(sd, lo - tol, hi + tol);
}

ProjectionPair spectral_projection_point(const SpectralData& sd, double lambda, double tol) {
  return project_window(sd, lambda - tol, lambda + tol);
}

GapMult gap_and_mult(const SpectralData& sd, double lambda, double tol) {
  GapMult out;
  double gap = std::numeric_limits<double>::infinity();
  for (Idx j = 0; j < sd.values.size(); ++j) {
    double d = std::abs(sd.values(j) - lambda);
    if (d <= tol)
      ++out.mult;
    else
      gap = std::min(gap, d);
  }
  if (!std::isfinite(gap)) throw InvalidArgument("gap_and_mult: all eigenvalues inside the cluster, gap undefined");
  out.gap = gap;
  return out;
}

GapMult gap_and_mult(const SpectralData& sd, double lambda) {
  return gap_and_mult(sd, lambda, cluster_tolerance(sd.norm));
}

CombesThomasFit combes_thomas_rate(const HamiltonianMatrix& h, cplx z, const Site& x0) {
  auto x_idx = h.region.find(x0);
  if (!x_idx) throw InvalidArgument("combes_thomas_rate: base site outside the region");
  if (h.size() < 2) throw InvalidArgument("combes_thomas_rate: insufficient range for fit");
  if (z.imag() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.H, Eigen::EigenvaluesOnly);
    double dist = (es.eigenvalues().array() - z.real()).abs().minCoeff();
    if (dist < 1e-6) throw InvalidArgument("combes_thomas_rate: z too close to the spectrum");
  }
  Eigen::VectorXcd col = green_column(h.H, z, *x_idx);

  const auto& box = h.region.box();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Site& y = h.region.site(i);
    long r = graph_distance(x0, y);
    if (r < 2) continue;
    if (box && box->depth(y) < 2) continue;
    double v = std::abs(col(static_cast<Idx>(i)));
    if (!(v > 0.0)) continue;
    xs.push_back(static_cast<double>(r));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 2) throw InvalidArgument("combes_thomas_rate: insufficient range for fit");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("combes_thomas_rate: insufficient range for fit");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double e = ys[k] - (intercept + slope * xs[k]);
    ss += e * e;
  }
  CombesThomasFit fit;
  fit.c = -slope;
  fit.C = std::exp(intercept);
  fit.residual = std::sqrt(ss / xs.size());
  fit.points = xs.size();
  if (!(fit.c > 0.0)) throw NumericError("combes_thomas_rate: fitted decay rate is not positive");
  return fit;
}

}  // namespace trimlab
