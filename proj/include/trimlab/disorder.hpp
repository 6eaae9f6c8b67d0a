#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "trimlab/lattice.hpp"

namespace trimlab {

using cplx = std::complex<double>;

/// Single-site distribution mu of the random potential.
struct DisorderSpec {
  struct Uniform {
    double a = 0.0, b = 1.0;
  };
  /// Atoms at 0 and 1 (weights 1-p, p), each smeared uniformly over a window of width w.
  struct BernoulliMixture {
    double p = 0.5, w = 0.2;
  };
  /// Cauchy density of the given scale, truncated to [-cutoff, cutoff].
  struct TruncatedCauchy {
    double scale = 1.0, cutoff = 10.0;
  };
  using Family = std::variant<Uniform, BernoulliMixture, TruncatedCauchy>;

  Family family = Uniform{};
  double declared_alpha = 1.0;
  double declared_q = 64.0;

  static DisorderSpec uniform(double a = 0.0, double b = 1.0);
  static DisorderSpec bernoulli_mixture(double p, double w);
  static DisorderSpec truncated_cauchy(double scale, double cutoff, double declared_q);

  std::string name() const;
  void validate() const;

  double support_lo() const;
  double support_hi() const;
  double density(double t) const;
  double cdf(double t) const;
  double quantile(double u) const;
  /// Points where the density is not smooth (support ends, window edges).
  std::vector<double> breakpoints() const;
  /// sup_{t, eps} mu[t-eps, t+eps] / eps^alpha for the declared alpha (alpha = 1 for every family).
  double regularity_constant() const;
  /// Exact moment int |t|^q dmu by quadrature.
  double moment(double q) const;

  friend bool operator==(const DisorderSpec& a, const DisorderSpec& b);
};

/// Counter-based draws: a pure function of (seed, site, sample, attempt).
class SampleStream {
 public:
  SampleStream(DisorderSpec spec, std::uint64_t master_seed) : spec_(std::move(spec)), seed_(master_seed) {}

  const DisorderSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  double draw(std::uint64_t site, std::uint64_t sample, std::uint64_t attempt = 0) const;

 private:
  DisorderSpec spec_;
  std::uint64_t seed_;
};

/// Potential on the region's sites: iid draws on Gamma, exact zeros on Gamma^c.
std::vector<double> sample_potential(const SampleStream& stream, const SublatticeMask& gamma, const Region& region,
                                     std::uint64_t sample, std::uint64_t attempt = 0);

struct RegularityCell {
  double t, eps;
  double empirical;  // mu_n[t-eps, t+eps] / eps^alpha
  double stderr_;
  double exact;
};

struct RegularityReport {
  double empirical_C = 0.0;
  double empirical_C_stderr = 0.0;
  double exact_C = 0.0;
  double q = 0.0;
  double empirical_Mq = 0.0;
  double empirical_Mq_stderr = 0.0;
  double exact_Mq = 0.0;
  std::vector<RegularityCell> cells;
};

/// Empirical alpha-regularity constant and q-moment from n draws. Requires n >= 10^4.
/// q <= 0 selects the declared q.
RegularityReport regularity_check(const DisorderSpec& spec, std::size_t n, std::uint64_t seed, double q = 0.0);

/// Empirical mu[t-eps, t+eps] / eps^alpha with its standard error, from sorted samples.
std::pair<double, double> interval_ratio(const std::vector<double>& sorted, double t, double eps, double alpha);

/// int f dmu, split at the given extra points; absolute tolerance 1e-9.
double integrate_density(const DisorderSpec& spec, const std::function<double(double)>& f,
                         std::vector<double> singular_points = {});

struct DecouplingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double error_estimate = 0.0;
};

/// Both sides of the rational-function decoupling inequality for mu.
DecouplingResult decoupling_ratio(const DisorderSpec& spec, const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  double s, double r);

struct DecouplingTrial {
  cplx a, b;
  double numerator;    // E |V - b|^{-s}
  double denominator;  // E |V - a|^s |V - b|^{-s}
  double ratio;
};

struct DecouplingConstants {
  double C_s = 0.0;
  std::size_t argmax = 0;
  std::vector<DecouplingTrial> trials;
};

/// Empirical decoupling constant: max over random (a, b) of E|V-b|^{-s} / E(|V-a|^s |V-b|^{-s}).
/// When fixed_a is non-empty, trial t uses a = fixed_a[t % size] and only b is random.
DecouplingConstants estimate_decoupling_constants(const DisorderSpec& spec, double s, std::size_t trials,
                                                  std::uint64_t seed, const std::vector<cplx>& fixed_a = {});

/// One decoupling trial at a given (a, b).
DecouplingTrial decoupling_trial(const DisorderSpec& spec, double s, cplx a, cplx b);

}  // namespace trimlab
