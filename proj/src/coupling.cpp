#include "trimlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trimlab/random.hpp"

namespace trimlab {

namespace {

using Idx = Eigen::Index;

double max_abs(const Eigen::MatrixXcd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd column_sums(const Eigen::MatrixXd& E, const Eigen::MatrixXcd& G, double s) {
  return E.cwiseProduct(abs_pow(G, s)).colwise().sum().transpose();
}

std::vector<double> reciprocal_cuts(cplx a, cplx b) {
  std::vector<double> cuts{0.0};
  if (a.real() != 0.0) cuts.push_back(-1.0 / a.real());
  if (b.real() != 0.0) cuts.push_back(-1.0 / b.real());
  return cuts;
}

}  // namespace

SharpPotential u_sharp(const Eigen::VectorXcd& U, cplx z) {
  SharpPotential out{z, U, Eigen::VectorXcd(U.size())};
  for (Idx i = 0; i < U.size(); ++i) {
    if (z == U(i)) throw NumericError("u_sharp: z equals U at site " + std::to_string(i));
    out.values(i) = 1.0 / (z - U(i));
  }
  return out;
}

S2WResidual s2w_identity_check(const Eigen::MatrixXd& H0, const Eigen::VectorXcd& U, cplx z) {
  HedgehogOperator hh = hedgehog_assemble(H0, U);
  const Idx n = static_cast<Idx>(hh.n);
  Eigen::MatrixXcd G = green_general(hh.M, z);

  Eigen::MatrixXcd base = H0.cast<cplx>();
  base.diagonal() += u_sharp(U, z).values;
  Eigen::MatrixXcd pendant = -green_general(H0.cast<cplx>(), z);
  pendant.diagonal() += U;

  S2WResidual out;
  out.residual0 = max_abs(G.bottomRightCorner(n, n) - green_general(base, z));
  out.residual1 = max_abs(G.topLeftCorner(n, n) - green_general(pendant, z));
  return out;
}

DecouplingTrial reciprocal_decoupling_trial(const DisorderSpec& spec, double s, cplx a, cplx b) {
  auto cuts = reciprocal_cuts(a, b);
  double num = integrate_density(
      spec, [&](double v) { return std::pow(std::abs(cplx(-1.0 / v) - b), -s); }, cuts);
  double den = integrate_density(
      spec,
      [&](double v) {
        cplx w(-1.0 / v);
        return std::pow(std::abs(w - a), s) * std::pow(std::abs(w - b), -s);
      },
      cuts);
  return {a, b, num, den, num / den};
}

DecouplingConstants estimate_reciprocal_decoupling_constants(const DisorderSpec& spec, double s, std::size_t trials,
                                                             std::uint64_t seed, const std::vector<cplx>& fixed_a) {
  spec.validate();
  if (trials == 0) throw InvalidArgument("estimate_reciprocal_decoupling_constants: no trials");
  if (!(s > 0.0 && s < spec.declared_alpha))
    throw InvalidArgument("estimate_reciprocal_decoupling_constants: s must lie in (0, alpha)");

  const double lo = spec.support_lo(), hi = spec.support_hi();
  auto u = [&](std::uint64_t t, std::uint64_t k) { return to_unit_open(hash_key(seed, t, k, 0x7ec1)); };
  // Real parts are images -1/v of points v spread over the support of mu.
  auto image = [&](double r) { return -1.0 / (lo + (hi - lo) * r); };

  DecouplingConstants out;
  for (std::size_t t = 0; t < trials; ++t) {
    cplx a;
    if (!fixed_a.empty()) {
      a = fixed_a[t % fixed_a.size()];
    } else {
      a = cplx(image(u(t, 0)), u(t, 1) < 0.5 ? 0.0 : std::pow(10.0, -4.0 + 4.0 * u(t, 2)));
    }
    double im = std::pow(10.0, -4.0 + 4.0 * u(t, 4));
    cplx b(image(u(t, 3)), u(t, 5) < 0.5 ? im : -im);
    out.trials.push_back(reciprocal_decoupling_trial(spec, s, a, b));
    if (out.trials.back().ratio > out.C_s) {
      out.C_s = out.trials.back().ratio;
      out.argmax = t;
    }
  }
  return out;
}

WeakDisorderReport weak_disorder_bound_check(const EnsembleSpec& ens, double lambda, double eps, double s,
                                             const DecayMetric& rho, double C_mu, unsigned threads) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("weak_disorder_bound_check: s must lie in (0, 1)");
  if (!(C_mu > 0.0)) throw InvalidArgument("weak_disorder_bound_check: C_mu must be > 0");
  if (!(ens.g > 0.0)) throw InvalidArgument("weak_disorder_bound_check: g must be > 0");
  if (ens.samples == 0) throw InvalidArgument("weak_disorder_bound_check: no samples");

  WeakDisorderReport rep;
  rep.lambda = lambda;
  rep.epsilon = eps;
  rep.s = s;
  rep.g = ens.g;
  rep.eta = rho.eta;
  rep.C_mu = C_mu;
  const cplx z(lambda, eps);
  if (!ens.gamma.is_full()) {
    rep.reason = "bound not applicable: U = z - 1/(gV) needs the potential on every site (Gamma = full)";
    return rep;
  }

  HamiltonianMatrix h0 = assemble_free(ens.region, ens.gamma, ens.v0, ens.dense_limit);
  // Every hedgehog site sees its 2d lattice neighbours plus the pendant edge.
  rep.kappa = 2.0 * h0.dim() + 1.0;
  rep.chi = chi_kernel(green(h0.H, z), h0.region, rho, s).value;
  rep.threshold = C_mu * rep.chi;
  const double gms = std::pow(ens.g, -s);
  if (!(gms > rep.threshold)) {
    rep.reason = "bound not applicable: g^-s = " + std::to_string(gms) + " <= C_mu chi = " +
                 std::to_string(rep.threshold) + " (chi = " + std::to_string(rep.chi) + ")";
    return rep;
  }
  rep.applicable = true;

  const double k2e = rep.kappa * rep.kappa * std::exp(2.0 * rho.norm());
  const double chi2 = rep.chi * rep.chi;
  rep.pendant_bound = C_mu / (gms - rep.threshold);
  rep.bound_literal = k2e * chi2 * rep.pendant_bound;
  rep.bound = rep.chi + rep.bound_literal;

  const Eigen::MatrixXd E = decay_weights(ens.region, rho);
  const Idx n = static_cast<Idx>(ens.region.size());
  struct Sample {
    Eigen::VectorXd pendant, base, direct;
    double residual = 0.0;
  };
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    return with_resampling([&](std::uint64_t attempt) {
      HamiltonianMatrix h = realize(ens, k, attempt);
      Eigen::VectorXcd U(n);
      for (Idx i = 0; i < n; ++i) {
        double gv = ens.g * h.V[static_cast<std::size_t>(i)];
        if (gv == 0.0) throw SpectralParameterOnSpectrum("weak_disorder_bound_check: V vanishes at a site");
        U(i) = z - 1.0 / gv;
      }
      Eigen::MatrixXcd G = green_general(hedgehog_assemble(h0.H, U).M, z);
      Eigen::MatrixXcd direct = green(h.H, z);
      Sample smp;
      smp.pendant = column_sums(E, G.topLeftCorner(n, n), s);
      smp.base = column_sums(E, G.bottomRightCorner(n, n), s);
      smp.direct = column_sums(E, direct, s);
      smp.residual = max_abs(G.bottomRightCorner(n, n) - direct);
      return smp;
    });
  });

  std::vector<Eigen::VectorXd> pend, base, direct;
  std::size_t redraws = 0;
  for (auto& [smp, r] : per_sample) {
    pend.push_back(std::move(smp.pendant));
    base.push_back(std::move(smp.base));
    direct.push_back(std::move(smp.direct));
    rep.identity_residual = std::max(rep.identity_residual, smp.residual);
    redraws += r;
  }
  check_resampling(redraws, ens.samples);
  rep.pendant = chi_from_column_sums(pend, s, rho, z, redraws);
  rep.base = chi_from_column_sums(base, s, rho, z, redraws);
  rep.lhs = chi_from_column_sums(direct, s, rho, z, redraws);

  rep.pendant_holds = rep.pendant.value <= rep.pendant_bound + 3.0 * rep.pendant.stderr_;
  rep.step_bound = rep.chi + k2e * chi2 * rep.pendant.value;
  rep.step_holds = rep.base.value <= rep.step_bound + 3.0 * (rep.base.stderr_ + k2e * chi2 * rep.pendant.stderr_);
  rep.margin = rep.bound - rep.lhs.value;
  rep.holds = rep.lhs.value <= rep.bound + 3.0 * rep.lhs.stderr_;
  rep.holds_literal = rep.lhs.value <= rep.bound_literal + 3.0 * rep.lhs.stderr_;
  return rep;
}

CoupledWeakOperator coupled_weak_operator(const Eigen::MatrixXd& H0, const Eigen::VectorXd& gV, double g,
                                          double lambda, double eps) {
  if (H0.rows() != H0.cols() || H0.rows() != gV.size())
    throw InvalidArgument("coupled_weak_operator: size mismatch");
  CoupledWeakOperator out;
  out.z = cplx(lambda, eps);
  out.g = g;
  out.potential = u_sharp(gV.cast<cplx>(), out.z).values;
  out.M = H0.cast<cplx>();
  out.M.diagonal() += out.potential;
  out.effective_strength = out.potential.cwiseAbs().maxCoeff();
  double vmin = std::numeric_limits<double>::infinity();
  for (Idx i = 0; i < gV.size(); ++i) vmin = std::min(vmin, std::abs(gV(i)) / (g > 0.0 ? g : 1.0));
  out.reciprocal_reference = g > 0.0 && vmin > 0.0 ? 1.0 / (g * vmin) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace trimlab
