#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "trimlab/ensemble.hpp"
#include "trimlab/montecarlo.hpp"
#include "trimlab/spectral.hpp"

namespace trimlab {

/// e^{itH} psi0 through the eigen-expansion.
Eigen::VectorXcd evolve(const SpectralData& sd, const Eigen::VectorXcd& psi0, double t);

/// Row x of e^{itH}: amplitudes e^{itH}(x, y) over y.
Eigen::VectorXcd propagator_row(const SpectralData& sd, std::size_t x, double t);

/// M_p(x, t) = sum_y |e^{itH}(x, y)|^2 |x - y|^p for a fixed operator.
double moment_Mp(const SpectralData& sd, const Region& region, const Site& x, double t, double p);

struct MomentPoint {
  double t = 0.0;
  double p = 0.0;
  Estimate Mp;
};

/// Ensemble-averaged M_p(x, t) over a time grid and a list of orders.
std::vector<MomentPoint> moment_curve(const EnsembleSpec& ens, const Site& x, const std::vector<double>& times,
                                      const std::vector<double>& ps, unsigned threads = 1);

/// In a finite box M_p levels off near its equidistributed value mean_y |x - y|^p. The curve counts as
/// saturated from the first time M_p reaches half that plateau; the growth exponent is fitted on the
/// earlier positive times only.
struct MomentGrowth {
  double p = 0.0;
  double plateau = 0.0;
  double saturation_time = 0.0;  // +inf when the grid never saturates
  double exponent = 0.0;         // log-log slope of M_p against t; NaN with fewer than two points
  std::size_t fit_points = 0;
};

MomentGrowth moment_growth(const std::vector<MomentPoint>& curve, double p, const Region& region, const Site& x);

struct LaplaceCheck {
  double lhs = 0.0;  // int_0^inf eps e^{-eps t} M_p(x, t) dt, closed form
  double rhs = 0.0;  // sum_y eps^2 |G_{lambda + i eps}(x, y)|^2 |x - y|^p
  bool holds = false;
  double margin = 0.0;  // lhs - rhs
};

/// Laplace-transform inequality for one operator; holds means lhs >= rhs - 1e-9.
LaplaceCheck laplace_moment_check(const HamiltonianMatrix& h, const Site& x, double lambda, double eps, double p);

struct LaplaceEnsembleCheck {
  Estimate lhs;
  Estimate rhs;
  std::size_t realizations = 0;
  std::size_t failures = 0;
  double min_margin = 0.0;
  bool holds = false;  // every realization holds and the averages hold
};

LaplaceEnsembleCheck laplace_moment_check(const EnsembleSpec& ens, const Site& x, double lambda, double eps, double p,
                                          unsigned threads = 1);

struct PMomentRow {
  double p = 0.0;
  double epsilon = 0.0;
  Estimate S;
  /// Paired difference S(eps) - S(previous, larger eps) on common realizations; zero for the first eps.
  Estimate increment;
};

struct PMomentProbe {
  std::vector<PMomentRow> rows;  // grouped by p, eps in the given (decreasing) order
  std::vector<double> slopes;    // per p, log-log slope of S against eps
};

/// S(eps) = sum_y eps^2 E|G_{lambda + i eps}(x, y)|^2 |x - y|^p for a decreasing eps sequence.
PMomentProbe pmoment_probe(const EnsembleSpec& ens, double lambda, const std::vector<double>& epsilons,
                           const std::vector<double>& ps, const Site& x, unsigned threads = 1);

/// The same probe for one fixed operator (no averaging).
PMomentProbe pmoment_probe(const HamiltonianMatrix& h, double lambda, const std::vector<double>& epsilons,
                           const std::vector<double>& ps, const Site& x);

}  // namespace trimlab
