#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimlab/ensemble.hpp"
#include "trimlab/montecarlo.hpp"
#include "trimlab/spectral.hpp"

namespace trimlab {

/// rho(x, y) = eta |x - y|_1; the norm sup_{x~y} rho(x, y) equals eta.
struct DecayMetric {
  double eta = 0.1;

  double operator()(const Site& x, const Site& y) const { return eta * static_cast<double>(graph_distance(x, y)); }
  double norm() const { return eta; }
};

struct ChiReport {
  enum class Mode { Deterministic, MonteCarlo };
  double value = 0.0;
  Mode mode = Mode::Deterministic;
  std::size_t samples = 0;
  double stderr_ = 0.0;
  std::size_t column = 0;  // maximizing column index
  double s = 1.0;
  double eta = 0.0;
  cplx z = 0.0;
  std::size_t resampled = 0;

  double ci_lo() const { return value - 1.96 * stderr_; }
  double ci_hi() const { return value + 1.96 * stderr_; }
};

/// sup_x sum_y e^{rho(y,x)} W(y, x) for a nonnegative weight matrix on the region's sites.
ChiReport chi_weights(const Eigen::MatrixXd& W, const Region& region, const DecayMetric& rho);

/// chi_rho(|A|^s) for a kernel indexed by the region's sites.
ChiReport chi_kernel(const Eigen::MatrixXcd& A, const Region& region, const DecayMetric& rho, double s);
ChiReport chi_kernel(const Eigen::MatrixXd& A, const Region& region, const DecayMetric& rho, double s);

/// e^{rho(y, x)} over the region's sites.
Eigen::MatrixXd decay_weights(const Region& region, const DecayMetric& rho);

/// chi of the averaged kernel from per-sample column sums, with the standard error at the maximizing column.
ChiReport chi_from_column_sums(const std::vector<Eigen::VectorXd>& sums, double s, const DecayMetric& rho, cplx z,
                               std::size_t resampled);

/// Pointwise |A|^s.
Eigen::MatrixXd abs_pow(const Eigen::MatrixXcd& A, double s);

/// E |G_z[H(g)|_B](x, y)|^s by Monte Carlo.
struct MomentEstimate {
  Estimate estimate;
  std::size_t resampled = 0;
};

MomentEstimate mc_fractional_moment(const EnsembleSpec& ens, cplx z, double s, const Site& x, const Site& y,
                                    unsigned threads = 1);

/// chi_rho(E |G_z[H(g)|_B]|^s): per-sample column sums averaged in sample order, sup over columns.
ChiReport mc_chi_green(const EnsembleSpec& ens, cplx z, double s, const DecayMetric& rho, unsigned threads = 1);

struct AMReport {
  bool applicable = false;
  std::string reason;
  double C_s = 0.0;
  double chi_offdiag = 0.0;  // chi_rho(|A^off-diag|^s)
  double chi_full = 0.0;     // chi_rho(|A|^s), diagonal included
  double threshold = 0.0;    // C_s chi_offdiag, compared with g^s
  ChiReport lhs;
  double rhs = 0.0;          // C_s / (g^s - C_s chi_offdiag)
  double rhs_literal = 0.0;  // C_s / (g^s - C_s chi_full); NaN when that denominator is <= 0
  double margin = 0.0;       // rhs - lhs
  bool holds = false;        // lhs <= rhs + 3 stderr
};

/// Aizenman-Molchanov contraction check for A = -Delta + V0 with iid potential on the whole box.
AMReport am_contraction_check(const EnsembleSpec& ens, cplx z, double s, const DecayMetric& rho, double C_s,
                              unsigned threads = 1);

/// Decoupling arguments a = -A(y, y)/g seen by the contraction argument, one per site.
std::vector<cplx> am_decoupling_points(const EnsembleSpec& ens);

struct ChiInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs * (1.0 + 1e-12) + 1e-14; }
};

struct ChiResolventReport {
  double kappa = 0.0;
  double chi_G = 0.0;        // chi(G)
  double chi_XX = 0.0;       // chi(P_X G P_X^*)
  double chi_CC = 0.0;       // chi(P_{X^c} G P_{X^c}^*)
  double chi_GX = 0.0;       // chi(G_z[A_X]), whole decoupled operator
  double chi_R = 0.0;        // chi(G_z[P_{X^c} A P_{X^c}^*])
  ChiInequality star_literal;     // chi_CC <= k^2 e^{2|rho|} chi_GX^2 chi_XX
  ChiInequality star_corrected;   // chi_CC <= chi_R + k^2 e^{2|rho|} chi_R^2 chi_XX
  ChiInequality plain_literal;    // chi_G <= k e^{|rho|} chi_GX (1 + k e^{|rho|} chi_GX chi_XX)
  ChiInequality plain_corrected;  // chi_G <= max over column types of the expansion bound
};

/// Evaluates both chi-inequalities implied by the resolvent identity, with kappa = 2d.
ChiResolventReport chi_resolvent_inequalities(const HamiltonianMatrix& h, const std::vector<std::size_t>& X, cplx z,
                                              const DecayMetric& rho, double s = 1.0, double kappa = 0.0);

struct KernelK {
  Region sites;           // Gamma within the region
  Eigen::MatrixXcd K;     // off-diagonal part
  Eigen::VectorXcd D;     // diagonal part
  double identity_residual = 0.0;  // max |P_G G_z[H] P_G^* - G_z[gV|_G - D - K]|
};

/// K and D with D + K = P_G Delta P_G^* - V0|_G + T_G G_z[H_G] T_G^*, Delta with off-diagonal +1 and diagonal -2d.
/// The identity is evaluated on the realization carried by h.
KernelK kernel_K(const HamiltonianMatrix& h, cplx z);

struct Loc1Threshold {
  bool applicable = false;
  std::string reason;
  double chi_K = 0.0;
  double g0 = 0.0;
  double distance_to_trimmed_spectrum = 0.0;
};

/// Finite-volume proxy of the contraction threshold g0 = (C_s chi_rho(|K|^s))^{1/s} at z = lambda.
Loc1Threshold loc1_threshold(const Region& region, const SublatticeMask& gamma, const V0Spec& v0, double lambda,
                             double s, const DecayMetric& rho, double C_s, double delta = 1e-6);

/// |phi restricted to Gamma|_2.
double eigenvector_gamma_mass(const Eigen::VectorXd& phi, const Region& region, const SublatticeMask& gamma);

struct WegnerRow {
  double epsilon = 0.0;
  Estimate p_exceed;               // P{N >= 1}
  std::vector<std::size_t> histogram;  // histogram[n] = #samples with N = n
  double bound = 0.0;              // eps^s g^s / gap^{2s} (#B cap Gamma)^2, C = 1
};

struct WegnerReport {
  double lambda = 0.0;
  std::size_t mult = 0;
  double gap = 0.0;
  double s = 0.0;
  std::size_t gamma_sites = 0;
  std::vector<WegnerRow> rows;
  double slope = 0.0;  // log-log slope of P{N >= 1} against eps over rows with P > 0
  std::size_t qualifying_eigenvectors = 0;
  std::size_t lemma_violations = 0;
  double min_lemma_ratio = 0.0;  // min over qualifying phi of |phi|_Gamma| / (gap / (3 g |V|_inf))
};

/// Eigenvalue counting N = tr P_[lambda-eps, lambda+eps] - mult_lambda over the ensemble, every eps on the
/// same realizations, together with the eigenvector lower bound on qualifying eigenvectors.
WegnerReport wegner_count(const EnsembleSpec& ens, double lambda, const std::vector<double>& epsilons, double s,
                          double cluster_tol = 0.0, unsigned threads = 1);

struct WegnerProbeCell {
  double lambda = 0.0;
  double epsilon = 0.0;
  Estimate norm_moment;  // E ||G_z[H(g)|_B]||^s
};

struct WegnerProbeReport {
  std::vector<WegnerProbeCell> cells;
  std::optional<Site> diagonal_site;  // x in Gamma used for the g-doubling run
  Estimate diag_g;                    // E |G(x, x)|^s at g
  Estimate diag_2g;                   // at 2g
  double doubling_ratio = 0.0;        // diag_2g / diag_g, expected near 2^{-s}
};

/// Table of E||G_z||^s over the (lambda, eps) grid plus a g-doubling run at a Gamma site.
WegnerProbeReport wegner_uniform_bound_probe(const EnsembleSpec& ens, const std::vector<double>& lambdas,
                                             const std::vector<double>& epsilons, double s, unsigned threads = 1);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace trimlab
