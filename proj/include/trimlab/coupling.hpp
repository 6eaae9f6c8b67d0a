#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimlab/ensemble.hpp"
#include "trimlab/fracmoment.hpp"
#include "trimlab/spectral.hpp"

namespace trimlab {

/// U_z^# = (z - U)^{-1} pointwise.
struct SharpPotential {
  cplx z;
  Eigen::VectorXcd U;
  Eigen::VectorXcd values;
};

SharpPotential u_sharp(const Eigen::VectorXcd& U, cplx z);

struct S2WResidual {
  double residual0 = 0.0;  // |P0 G[H^sh] P0^* - G[H0 + U_z^#]|_max
  double residual1 = 0.0;  // |P1 G[H^sh] P1^* - G[-G[H0] + U]|_max
};

/// Both block identities of the hedgehog resolvent. U may be complex.
S2WResidual s2w_identity_check(const Eigen::MatrixXd& H0, const Eigen::VectorXcd& U, cplx z);

/// Decoupling constant of W = -1/V for V ~ spec: same construction as estimate_decoupling_constants,
/// integrals taken against mu through v -> -1/v.
DecouplingTrial reciprocal_decoupling_trial(const DisorderSpec& spec, double s, cplx a, cplx b);
DecouplingConstants estimate_reciprocal_decoupling_constants(const DisorderSpec& spec, double s, std::size_t trials,
                                                             std::uint64_t seed, const std::vector<cplx>& fixed_a = {});

struct WeakDisorderReport {
  bool applicable = false;
  std::string reason;
  double lambda = 0.0;
  double epsilon = 0.0;
  double s = 0.0;
  double g = 0.0;
  double eta = 0.0;
  double C_mu = 0.0;
  double kappa = 0.0;
  double chi = 0.0;        // chi_rho(|G_z[H(0)]|^s), diagonal included
  double threshold = 0.0;  // C_mu chi, compared with g^{-s}

  // audit line 1: AM contraction for the pendant block -G_z[H(0)] + U
  ChiReport pendant;      // chi_rho(E|P1 G[H^sh] P1^*|^s)
  double pendant_bound = 0.0;  // C_mu / (g^{-s} - C_mu chi)
  bool pendant_holds = false;

  // audit line 2: the step from the pendant block to the base block on the hedgehog
  ChiReport base;             // chi_rho(E|P0 G[H^sh] P0^*|^s)
  double step_bound = 0.0;    // chi + kappa^2 e^{2 eta} chi^2 chi(E|P1 G P1^*|^s)
  bool step_holds = false;

  // audit line 3: the final moment against the stated and the corrected bound
  ChiReport lhs;               // chi_rho(E|G_z[H(0) + gV]|^s)
  double bound_literal = 0.0;  // C_mu kappa^2 e^{2 eta} chi^2 / (g^{-s} - C_mu chi)
  double bound = 0.0;          // chi + C_mu kappa^2 e^{2 eta} chi^2 / (g^{-s} - C_mu chi)
  bool holds = false;          // against the corrected bound, within 3 standard errors
  bool holds_literal = false;
  double margin = 0.0;         // bound - lhs
  double identity_residual = 0.0;  // max over samples of |P0 G[H^sh] P0^* - G[H(0)+gV]|_max
};

/// Weak-disorder bound at z = lambda + i eps for H(0) + gV on the whole box (Gamma must be full).
WeakDisorderReport weak_disorder_bound_check(const EnsembleSpec& ens, double lambda, double eps, double s,
                                             const DecayMetric& rho, double C_mu, unsigned threads = 1);

/// Exploratory: H(0) + (gV)_z^# with z = lambda + i eps.
struct CoupledWeakOperator {
  cplx z;
  Eigen::MatrixXcd M;
  Eigen::VectorXcd potential;     // (gV)_z^#
  double effective_strength = 0.0;  // sup_x |(gV)_z^#(x)|
  double reciprocal_reference = 0.0;  // 1 / (g min V), with min over the realization
  double g = 0.0;

  Eigen::MatrixXcd green(cplx w) const { return green_general(M, w); }
};

CoupledWeakOperator coupled_weak_operator(const Eigen::MatrixXd& H0, const Eigen::VectorXd& gV, double g,
                                          double lambda, double eps);

}  // namespace trimlab
