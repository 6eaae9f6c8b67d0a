#include "trimlab/fracmoment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trimlab/anomalous.hpp"

namespace trimlab {

namespace {

using Idx = Eigen::Index;

ChiReport column_sup(const Eigen::VectorXd& sums) {
  ChiReport rep;
  Idx arg = 0;
  rep.value = sums.size() ? sums.maxCoeff(&arg) : 0.0;
  rep.column = static_cast<std::size_t>(arg);
  return rep;
}

Idx index_of(const Region& region, const Site& x, const char* who) {
  auto i = region.find(x);
  if (!i) throw InvalidArgument(std::string(who) + ": site " + to_string(x) + " outside the region");
  return static_cast<Idx>(*i);
}

}  // namespace

Eigen::MatrixXd decay_weights(const Region& region, const DecayMetric& rho) {
  const Idx n = static_cast<Idx>(region.size());
  Eigen::MatrixXd E(n, n);
  for (Idx y = 0; y < n; ++y)
    for (Idx x = 0; x < n; ++x) E(y, x) = std::exp(rho(region.site(y), region.site(x)));
  return E;
}

ChiReport chi_from_column_sums(const std::vector<Eigen::VectorXd>& sums, double s, const DecayMetric& rho, cplx z,
                               std::size_t resampled) {
  if (sums.empty()) throw InvalidArgument("chi_from_column_sums: no samples");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(sums.front().size());
  for (const auto& v : sums) mean += v;
  mean /= static_cast<double>(sums.size());
  ChiReport rep = column_sup(mean);
  std::vector<double> at_column;
  for (const auto& v : sums) at_column.push_back(v(static_cast<Idx>(rep.column)));
  rep.stderr_ = summarize(at_column).stderr_;
  rep.mode = ChiReport::Mode::MonteCarlo;
  rep.samples = sums.size();
  rep.s = s;
  rep.eta = rho.eta;
  rep.z = z;
  rep.resampled = resampled;
  return rep;
}

Eigen::MatrixXd abs_pow(const Eigen::MatrixXcd& A, double s) {
  Eigen::MatrixXd out(A.rows(), A.cols());
  for (Idx j = 0; j < A.cols(); ++j)
    for (Idx i = 0; i < A.rows(); ++i) out(i, j) = s == 1.0 ? std::abs(A(i, j)) : std::pow(std::abs(A(i, j)), s);
  return out;
}

ChiReport chi_weights(const Eigen::MatrixXd& W, const Region& region, const DecayMetric& rho) {
  if (W.rows() != static_cast<Idx>(region.size()) || W.cols() != W.rows())
    throw InvalidArgument("chi: kernel size does not match the region");
  Eigen::MatrixXd E = decay_weights(region, rho);
  ChiReport rep = column_sup(E.cwiseProduct(W).colwise().sum().transpose());
  rep.eta = rho.eta;
  return rep;
}

ChiReport chi_kernel(const Eigen::MatrixXcd& A, const Region& region, const DecayMetric& rho, double s) {
  if (!(s > 0.0)) throw InvalidArgument("chi_kernel: s must be > 0");
  ChiReport rep = chi_weights(abs_pow(A, s), region, rho);
  rep.s = s;
  return rep;
}

ChiReport chi_kernel(const Eigen::MatrixXd& A, const Region& region, const DecayMetric& rho, double s) {
  return chi_kernel(Eigen::MatrixXcd(A.cast<cplx>()), region, rho, s);
}

MomentEstimate mc_fractional_moment(const EnsembleSpec& ens, cplx z, double s, const Site& x, const Site& y,
                                    unsigned threads) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("mc_fractional_moment: s must lie in (0, 1)");
  const Idx ix = index_of(ens.region, x, "mc_fractional_moment");
  const std::size_t iy = static_cast<std::size_t>(index_of(ens.region, y, "mc_fractional_moment"));
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    return with_resampling([&](std::uint64_t attempt) {
      HamiltonianMatrix h = realize(ens, k, attempt);
      Eigen::VectorXcd col = green_column(h.H, z, iy);
      return std::pow(std::abs(col(ix)), s);
    });
  });
  std::vector<double> vals(per_sample.size());
  std::size_t redraws = 0;
  for (std::size_t k = 0; k < per_sample.size(); ++k) {
    vals[k] = per_sample[k].first;
    redraws += per_sample[k].second;
  }
  check_resampling(redraws, ens.samples);
  return {summarize(vals), redraws};
}

ChiReport mc_chi_green(const EnsembleSpec& ens, cplx z, double s, const DecayMetric& rho, unsigned threads) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("mc_chi_green: s must lie in (0, 1)");
  if (ens.samples == 0) throw InvalidArgument("mc_chi_green: no samples");
  const Eigen::MatrixXd E = decay_weights(ens.region, rho);
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    return with_resampling([&](std::uint64_t attempt) {
      HamiltonianMatrix h = realize(ens, k, attempt);
      Eigen::VectorXd sums = E.cwiseProduct(abs_pow(green(h.H, z), s)).colwise().sum().transpose();
      return sums;
    });
  });
  std::vector<Eigen::VectorXd> sums;
  std::size_t redraws = 0;
  for (auto& [v, r] : per_sample) {
    sums.push_back(std::move(v));
    redraws += r;
  }
  check_resampling(redraws, ens.samples);
  return chi_from_column_sums(sums, s, rho, z, redraws);
}

std::vector<cplx> am_decoupling_points(const EnsembleSpec& ens) {
  if (!(ens.g > 0.0)) throw InvalidArgument("am_decoupling_points: g must be > 0");
  HamiltonianMatrix a = assemble_free(ens.region, SublatticeMask::full(), ens.v0, ens.dense_limit);
  std::vector<cplx> out;
  for (Idx i = 0; i < a.H.rows(); ++i) out.emplace_back(-a.H(i, i) / ens.g, 0.0);
  std::sort(out.begin(), out.end(), [](cplx p, cplx q) { return p.real() < q.real(); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AMReport am_contraction_check(const EnsembleSpec& ens, cplx z, double s, const DecayMetric& rho, double C_s,
                              unsigned threads) {
  if (!(C_s > 0.0)) throw InvalidArgument("am_contraction_check: C_s must be > 0");
  AMReport rep;
  rep.C_s = C_s;
  if (!ens.gamma.is_full()) {
    rep.reason = "bound not applicable: the contraction argument needs an iid potential on every site (Gamma = full)";
    return rep;
  }
  HamiltonianMatrix a = assemble_free(ens.region, ens.gamma, ens.v0, ens.dense_limit);
  Eigen::MatrixXd off = a.H;
  off.diagonal().setZero();
  rep.chi_offdiag = chi_kernel(off, a.region, rho, s).value;
  rep.chi_full = chi_kernel(a.H, a.region, rho, s).value;
  rep.threshold = C_s * rep.chi_offdiag;
  const double gs = std::pow(ens.g, s);
  double literal_den = gs - C_s * rep.chi_full;
  rep.rhs_literal = literal_den > 0.0 ? C_s / literal_den : std::numeric_limits<double>::quiet_NaN();
  if (!(gs > rep.threshold)) {
    rep.reason = "bound not applicable: g^s = " + std::to_string(gs) + " <= C_s chi = " + std::to_string(rep.threshold);
    return rep;
  }
  rep.applicable = true;
  rep.rhs = C_s / (gs - rep.threshold);
  rep.lhs = mc_chi_green(ens, z, s, rho, threads);
  rep.margin = rep.rhs - rep.lhs.value;
  rep.holds = rep.lhs.value <= rep.rhs + 3.0 * rep.lhs.stderr_;
  return rep;
}

ChiResolventReport chi_resolvent_inequalities(const HamiltonianMatrix& h, const std::vector<std::size_t>& X, cplx z,
                                              const DecayMetric& rho, double s, double kappa) {
  const std::size_t n = h.size();
  std::vector<std::size_t> Xs = X;
  std::sort(Xs.begin(), Xs.end());
  Xs.erase(std::unique(Xs.begin(), Xs.end()), Xs.end());
  auto Xc = complement_of(Xs, n);

  ChiResolventReport rep;
  rep.kappa = kappa > 0.0 ? kappa : 2.0 * h.dim();
  const double ke = rep.kappa * std::exp(rho.norm());

  Eigen::MatrixXcd G = green(h.H, z);
  Eigen::MatrixXcd GX;
  try {
    GX = green(decoupled(h.H, Xs), z);
  } catch (const SpectralParameterOnSpectrum&) {
    throw NumericError("chi_resolvent_inequalities: restricted resolvent singular");
  }
  auto sub_region = [&](const std::vector<std::size_t>& idx) {
    std::vector<Site> sites;
    for (auto i : idx) sites.push_back(h.region.site(i));
    return Region(std::move(sites));
  };
  auto chi_sub = [&](const Eigen::MatrixXcd& M, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    return chi_kernel(Eigen::MatrixXcd(submatrix(M, idx, idx)), sub_region(idx), rho, s).value;
  };
  rep.chi_G = chi_kernel(G, h.region, rho, s).value;
  rep.chi_GX = chi_kernel(GX, h.region, rho, s).value;
  rep.chi_XX = chi_sub(G, Xs);
  rep.chi_CC = chi_sub(G, Xc);
  // G_z[A_X] restricted to X^c is the resolvent of the restriction P_{X^c} A P_{X^c}^*.
  rep.chi_R = chi_sub(GX, Xc);

  rep.star_literal = {rep.chi_CC, ke * ke * rep.chi_GX * rep.chi_GX * rep.chi_XX};
  rep.star_corrected = {rep.chi_CC, rep.chi_R + ke * ke * rep.chi_R * rep.chi_R * rep.chi_XX};
  rep.plain_literal = {rep.chi_G, ke * rep.chi_GX * (1.0 + ke * rep.chi_GX * rep.chi_XX)};
  double in_columns = rep.chi_XX * (1.0 + ke * rep.chi_R);
  double out_columns = rep.chi_R + ke * rep.chi_R * rep.chi_XX + ke * ke * rep.chi_R * rep.chi_R * rep.chi_XX;
  rep.plain_corrected = {rep.chi_G, std::max(Xs.empty() ? 0.0 : in_columns, Xc.empty() ? 0.0 : out_columns)};
  return rep;
}

KernelK kernel_K(const HamiltonianMatrix& h, cplx z) {
  auto gidx = gamma_indices(h);
  if (gidx.empty()) throw InvalidArgument("kernel_K: Gamma does not meet the region");
  auto cidx = complement_of(gidx, h.size());

  Eigen::MatrixXd H0 = h.H;
  for (std::size_t i = 0; i < h.size(); ++i) H0(static_cast<Idx>(i), static_cast<Idx>(i)) -= h.g * h.V[i];

  // P_G Delta P_G^* - V0|_G = -P_G H(0) P_G^*, and T_G = -P_G H(0) P_{G^c}^*.
  Eigen::MatrixXcd M = -submatrix(H0, gidx, gidx).cast<cplx>();
  if (!cidx.empty()) {
    Eigen::MatrixXd HC = submatrix(H0, cidx, cidx);
    Eigen::MatrixXcd GC = green(HC, z);
    Eigen::MatrixXcd T = -submatrix(H0, gidx, cidx).cast<cplx>();
    M += T * GC * T.transpose();
  }
  KernelK out;
  std::vector<Site> sites;
  for (auto i : gidx) sites.push_back(h.region.site(i));
  out.sites = Region(std::move(sites));
  out.D = M.diagonal();
  out.K = M;
  out.K.diagonal().setZero();

  Eigen::MatrixXcd lhs = submatrix(green(h.H, z), gidx, gidx);
  Eigen::MatrixXcd A = -M;
  for (std::size_t r = 0; r < gidx.size(); ++r) A(static_cast<Idx>(r), static_cast<Idx>(r)) += h.g * h.V[gidx[r]];
  Eigen::MatrixXcd rhs = green_general(A, z);
  out.identity_residual = (lhs - rhs).cwiseAbs().maxCoeff();
  return out;
}

Loc1Threshold loc1_threshold(const Region& region, const SublatticeMask& gamma, const V0Spec& v0, double lambda,
                             double s, const DecayMetric& rho, double C_s, double delta) {
  if (!(C_s > 0.0)) throw InvalidArgument("loc1_threshold: C_s must be > 0");
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("loc1_threshold: s must lie in (0, 1)");
  HamiltonianMatrix h0 = assemble_free(region, gamma, v0);
  Loc1Threshold out;
  auto cidx = complement_indices(h0);
  out.distance_to_trimmed_spectrum = std::numeric_limits<double>::infinity();
  if (!cidx.empty()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(submatrix(h0.H, cidx, cidx), Eigen::EigenvaluesOnly);
    out.distance_to_trimmed_spectrum = (es.eigenvalues().array() - lambda).abs().minCoeff();
  }
  if (out.distance_to_trimmed_spectrum < delta) {
    out.reason = "lambda lies within " + std::to_string(delta) + " of the spectrum of the trimmed restriction";
    return out;
  }
  KernelK k = kernel_K(h0, cplx(lambda, 0.0));
  out.chi_K = chi_kernel(k.K, k.sites, rho, s).value;
  out.g0 = std::pow(C_s * out.chi_K, 1.0 / s);
  out.applicable = true;
  return out;
}

double eigenvector_gamma_mass(const Eigen::VectorXd& phi, const Region& region, const SublatticeMask& gamma) {
  if (phi.size() != static_cast<Idx>(region.size())) throw InvalidArgument("eigenvector_gamma_mass: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i)
    if (gamma.contains(region.site(i))) m += phi(static_cast<Idx>(i)) * phi(static_cast<Idx>(i));
  return std::sqrt(m);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need at least two points");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw InvalidArgument("loglog_slope: degenerate abscissae");
  return sxy / sxx;
}

WegnerReport wegner_count(const EnsembleSpec& ens, double lambda, const std::vector<double>& epsilons, double s,
                          double cluster_tol, unsigned threads) {
  if (epsilons.empty()) throw InvalidArgument("wegner_count: empty epsilon list");
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("wegner_count: s must lie in (0, 1)");
  HamiltonianMatrix h0 = assemble_free(ens.region, ens.gamma, ens.v0, ens.dense_limit);
  SpectralData sd0 = eigendecompose(h0.H);
  const double tol = cluster_tol > 0.0 ? cluster_tol : cluster_tolerance(sd0.norm);
  GapMult gm = gap_and_mult(sd0, lambda, tol);
  if (gm.mult > 0) {
    auto ce = compact_eigenfunctions(h0, lambda, tol);
    if (!ce.assumption3)
      throw InvalidArgument("wegner_count: support precondition fails: only " + std::to_string(ce.supported_dim) +
                            " of " + std::to_string(ce.full_mult) +
                            " eigenvectors at lambda are supported off Gamma");
  }
  for (double e : epsilons)
    if (!(e > 0.0 && e <= gm.gap / 3.0))
      throw InvalidArgument("wegner_count: epsilon " + std::to_string(e) + " violates 0 < eps <= gap/3 = " +
                            std::to_string(gm.gap / 3.0));

  Eigen::MatrixXd kernel(sd0.values.size(), static_cast<Idx>(gm.mult));
  {
    Idx c = 0;
    for (Idx j = 0; j < sd0.values.size(); ++j)
      if (std::abs(sd0.values(j) - lambda) <= tol) kernel.col(c++) = sd0.vectors.col(j);
  }
  const auto gidx = gamma_indices(h0);

  struct Sample {
    std::vector<long> N;
    std::size_t qualifying = 0, violations = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
  };
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    HamiltonianMatrix h = realize(ens, k);
    SpectralData sd = eigendecompose(h.H);
    Sample out;
    for (double e : epsilons) {
      long count = 0;
      for (Idx j = 0; j < sd.values.size(); ++j)
        if (sd.values(j) >= lambda - e && sd.values(j) <= lambda + e) ++count;
      out.N.push_back(count - static_cast<long>(gm.mult));
    }
    double vmax = 0.0;
    for (double v : h.V) vmax = std::max(vmax, std::abs(v));
    if (ens.g > 0.0 && vmax > 0.0) {
      const double bound = gm.gap / (3.0 * ens.g * vmax);
      for (Idx j = 0; j < sd.values.size(); ++j) {
        if (std::abs(sd.values(j) - lambda) > gm.gap / 3.0) continue;
        Eigen::VectorXd phi = sd.vectors.col(j);
        if (gm.mult > 0 && (kernel.transpose() * phi).norm() > 1e-8) continue;
        double mass = 0.0;
        for (auto i : gidx) mass += phi(static_cast<Idx>(i)) * phi(static_cast<Idx>(i));
        mass = std::sqrt(mass);
        ++out.qualifying;
        if (mass < bound) ++out.violations;
        out.min_ratio = std::min(out.min_ratio, mass / bound);
      }
    }
    return out;
  });

  WegnerReport rep;
  rep.lambda = lambda;
  rep.mult = gm.mult;
  rep.gap = gm.gap;
  rep.s = s;
  rep.gamma_sites = gidx.size();
  rep.min_lemma_ratio = std::numeric_limits<double>::infinity();
  for (const auto& smp : per_sample) {
    rep.qualifying_eigenvectors += smp.qualifying;
    rep.lemma_violations += smp.violations;
    rep.min_lemma_ratio = std::min(rep.min_lemma_ratio, smp.min_ratio);
  }
  std::vector<double> xs, ys;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    WegnerRow row;
    row.epsilon = epsilons[e];
    std::vector<double> ind;
    for (const auto& smp : per_sample) {
      long n = std::max<long>(0, smp.N[e]);
      if (row.histogram.size() <= static_cast<std::size_t>(n)) row.histogram.resize(n + 1, 0);
      ++row.histogram[n];
      ind.push_back(n >= 1 ? 1.0 : 0.0);
    }
    row.p_exceed = summarize(ind);
    row.bound = std::pow(row.epsilon, s) * std::pow(ens.g, s) / std::pow(gm.gap, 2.0 * s) *
                static_cast<double>(gidx.size() * gidx.size());
    if (row.p_exceed.mean > 0.0) {
      xs.push_back(row.epsilon);
      ys.push_back(row.p_exceed.mean);
    }
    rep.rows.push_back(std::move(row));
  }
  rep.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

WegnerProbeReport wegner_uniform_bound_probe(const EnsembleSpec& ens, const std::vector<double>& lambdas,
                                             const std::vector<double>& epsilons, double s, unsigned threads) {
  if (lambdas.empty() || epsilons.empty()) throw InvalidArgument("wegner_uniform_bound_probe: empty grid");
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("wegner_uniform_bound_probe: s must lie in (0, 1)");
  for (double e : epsilons)
    if (!(e > 0.0)) throw InvalidArgument("wegner_uniform_bound_probe: epsilon must be > 0");
  for (const auto& x : boundary(ens.region.sites()).inner)
    if (!ens.gamma.contains(x))
      throw InvalidArgument("wegner_uniform_bound_probe: hypothesis violated, inner boundary site " + to_string(x) +
                            " is not in Gamma");

  const std::size_t nl = lambdas.size(), ne = epsilons.size();
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    HamiltonianMatrix h = realize(ens, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.H, Eigen::EigenvaluesOnly);
    std::vector<double> vals(nl * ne);
    for (std::size_t a = 0; a < nl; ++a)
      for (std::size_t b = 0; b < ne; ++b) {
        double d2 = ((es.eigenvalues().array() - lambdas[a]).square()).minCoeff() + epsilons[b] * epsilons[b];
        vals[a * ne + b] = std::pow(1.0 / std::sqrt(d2), s);
      }
    return vals;
  });

  WegnerProbeReport rep;
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t b = 0; b < ne; ++b) {
      std::vector<double> col;
      for (const auto& v : per_sample) col.push_back(v[a * ne + b]);
      rep.cells.push_back({lambdas[a], epsilons[b], summarize(col)});
    }

  // g-doubling at the Gamma site nearest the centre of the region.
  std::vector<double> centre(ens.region.dim(), 0.0);
  for (const auto& x : ens.region.sites())
    for (int i = 0; i < x.dim(); ++i) centre[i] += x[i];
  for (auto& c : centre) c /= static_cast<double>(ens.region.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : ens.region.sites()) {
    if (!ens.gamma.contains(x)) continue;
    double d = 0.0;
    for (int i = 0; i < x.dim(); ++i) d += std::abs(x[i] - centre[i]);
    if (d < best - 1e-12) {
      best = d;
      rep.diagonal_site = x;
    }
  }
  if (rep.diagonal_site && ens.g > 0.0) {
    cplx z(lambdas.front(), epsilons.front());
    EnsembleSpec doubled = ens;
    doubled.g = 2.0 * ens.g;
    rep.diag_g = mc_fractional_moment(ens, z, s, *rep.diagonal_site, *rep.diagonal_site, threads).estimate;
    rep.diag_2g = mc_fractional_moment(doubled, z, s, *rep.diagonal_site, *rep.diagonal_site, threads).estimate;
    rep.doubling_ratio = rep.diag_2g.mean / rep.diag_g.mean;
  }
  return rep;
}

}  // namespace trimlab
