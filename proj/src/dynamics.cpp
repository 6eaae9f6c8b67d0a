#include "trimlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trimlab/fracmoment.hpp"

namespace trimlab {

namespace {

using Idx = Eigen::Index;

std::size_t site_index(const Region& region, const Site& x) {
  auto i = region.find(x);
  if (!i) throw InvalidArgument("site " + to_string(x) + " outside the region");
  return *i;
}

// |x - y|^p per site, with 0^0 = 1.
Eigen::VectorXd distance_powers(const Region& region, const Site& x, double p) {
  if (!(p >= 0.0)) throw InvalidArgument("moment order p must be >= 0");
  Eigen::VectorXd w(static_cast<Idx>(region.size()));
  for (std::size_t i = 0; i < region.size(); ++i)
    w(static_cast<Idx>(i)) = std::pow(static_cast<double>(graph_distance(x, region.site(i))), p);
  return w;
}

// S(eps) for every (p, eps) from one eigendecomposition; row-major over p then eps.
std::vector<double> pmoment_values(const SpectralData& sd, std::size_t xi, double lambda,
                                   const std::vector<double>& epsilons, const std::vector<Eigen::VectorXd>& weights) {
  std::vector<double> out;
  out.reserve(weights.size() * epsilons.size());
  std::vector<Eigen::VectorXd> mods;
  for (double eps : epsilons) {
    Eigen::VectorXcd c(sd.values.size());
    for (Idx j = 0; j < sd.values.size(); ++j)
      c(j) = sd.vectors(static_cast<Idx>(xi), j) / (sd.values(j) - cplx(lambda, eps));
    Eigen::VectorXcd g = sd.vectors.cast<cplx>() * c;
    mods.push_back(eps * eps * g.cwiseAbs2());
  }
  for (const auto& w : weights)
    for (const auto& m : mods) out.push_back(w.dot(m));
  return out;
}

void check_epsilons(const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw InvalidArgument("pmoment_probe: empty epsilon sequence");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw InvalidArgument("pmoment_probe: epsilon must be > 0");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InvalidArgument("pmoment_probe: epsilon sequence must decrease");
  }
}

PMomentProbe assemble_probe(const std::vector<std::vector<double>>& per_sample, const std::vector<double>& epsilons,
                            const std::vector<double>& ps) {
  PMomentProbe probe;
  const std::size_t ne = epsilons.size();
  for (std::size_t a = 0; a < ps.size(); ++a) {
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < ne; ++b) {
      PMomentRow row;
      row.p = ps[a];
      row.epsilon = epsilons[b];
      std::vector<double> vals, diffs;
      for (const auto& smp : per_sample) {
        vals.push_back(smp[a * ne + b]);
        diffs.push_back(b == 0 ? 0.0 : smp[a * ne + b] - smp[a * ne + b - 1]);
      }
      row.S = summarize(vals);
      row.increment = summarize(diffs);
      if (row.S.mean > 0.0) {
        xs.push_back(row.epsilon);
        ys.push_back(row.S.mean);
      }
      probe.rows.push_back(row);
    }
    probe.slopes.push_back(xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN());
  }
  return probe;
}

}  // namespace

Eigen::VectorXcd evolve(const SpectralData& sd, const Eigen::VectorXcd& psi0, double t) {
  if (psi0.size() != sd.values.size()) throw InvalidArgument("evolve: size mismatch");
  Eigen::VectorXcd c = sd.vectors.transpose().cast<cplx>() * psi0;
  for (Idx j = 0; j < c.size(); ++j) c(j) *= std::exp(cplx(0.0, t * sd.values(j)));
  return sd.vectors.cast<cplx>() * c;
}

Eigen::VectorXcd propagator_row(const SpectralData& sd, std::size_t x, double t) {
  Eigen::VectorXcd w(sd.values.size());
  for (Idx j = 0; j < w.size(); ++j) w(j) = std::exp(cplx(0.0, t * sd.values(j))) * sd.vectors(static_cast<Idx>(x), j);
  return sd.vectors.cast<cplx>() * w;
}

double moment_Mp(const SpectralData& sd, const Region& region, const Site& x, double t, double p) {
  Eigen::VectorXd w = distance_powers(region, x, p);
  return w.dot(propagator_row(sd, site_index(region, x), t).cwiseAbs2());
}

std::vector<MomentPoint> moment_curve(const EnsembleSpec& ens, const Site& x, const std::vector<double>& times,
                                      const std::vector<double>& ps, unsigned threads) {
  const std::size_t xi = site_index(ens.region, x);
  std::vector<Eigen::VectorXd> weights;
  for (double p : ps) weights.push_back(distance_powers(ens.region, x, p));
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    SpectralData sd = eigendecompose(realize(ens, k).H);
    std::vector<double> vals;
    for (double t : times) {
      Eigen::VectorXd a = propagator_row(sd, xi, t).cwiseAbs2();
      for (const auto& w : weights) vals.push_back(w.dot(a));
    }
    return vals;
  });
  std::vector<MomentPoint> out;
  for (std::size_t a = 0; a < times.size(); ++a)
    for (std::size_t b = 0; b < ps.size(); ++b) {
      std::vector<double> col;
      for (const auto& v : per_sample) col.push_back(v[a * ps.size() + b]);
      out.push_back({times[a], ps[b], summarize(col)});
    }
  return out;
}

MomentGrowth moment_growth(const std::vector<MomentPoint>& curve, double p, const Region& region, const Site& x) {
  MomentGrowth g;
  g.p = p;
  for (const auto& y : region.sites()) g.plateau += std::pow(graph_distance(x, y), p);
  g.plateau /= static_cast<double>(region.size());
  g.saturation_time = std::numeric_limits<double>::infinity();
  std::vector<MomentPoint> pts;
  for (const auto& m : curve)
    if (m.p == p) pts.push_back(m);
  std::sort(pts.begin(), pts.end(), [](const MomentPoint& a, const MomentPoint& b) { return a.t < b.t; });
  std::vector<double> ts, ms;
  for (const auto& m : pts) {
    if (m.Mp.mean >= 0.5 * g.plateau) {
      g.saturation_time = m.t;
      break;
    }
    if (m.t > 0.0 && m.Mp.mean > 0.0) {
      ts.push_back(m.t);
      ms.push_back(m.Mp.mean);
    }
  }
  g.fit_points = ts.size();
  g.exponent = ts.size() >= 2 ? loglog_slope(ts, ms) : std::numeric_limits<double>::quiet_NaN();
  return g;
}

LaplaceCheck laplace_moment_check(const HamiltonianMatrix& h, const Site& x, double lambda, double eps, double p) {
  if (!(eps > 0.0)) throw InvalidArgument("laplace_moment_check: eps must be > 0");
  const std::size_t xi = site_index(h.region, x);
  Eigen::VectorXd w = distance_powers(h.region, x, p);
  SpectralData sd = eigendecompose(h.H);
  const Idx n = sd.values.size();

  // |e^{itH}(x,y)|^2 = sum_{jk} a_j a_k e^{it(l_j - l_k)} with a_j = psi_j(x) psi_j(y); the Laplace
  // transform of each term is eps^2 / (eps^2 + (l_j - l_k)^2).
  Eigen::MatrixXd L(n, n);
  for (Idx j = 0; j < n; ++j)
    for (Idx k = 0; k < n; ++k) {
      double d = sd.values(j) - sd.values(k);
      L(j, k) = eps * eps / (eps * eps + d * d);
    }
  Eigen::MatrixXd A = sd.vectors * sd.vectors.row(static_cast<Idx>(xi)).asDiagonal();
  Eigen::VectorXd per_y = (A * L).cwiseProduct(A).rowwise().sum();

  LaplaceCheck out;
  out.lhs = w.dot(per_y);
  Eigen::VectorXcd g = green_column(h.H, cplx(lambda, eps), xi);
  out.rhs = eps * eps * w.dot(g.cwiseAbs2());
  out.margin = out.lhs - out.rhs;
  out.holds = out.lhs >= out.rhs - 1e-9;
  return out;
}

LaplaceEnsembleCheck laplace_moment_check(const EnsembleSpec& ens, const Site& x, double lambda, double eps, double p,
                                          unsigned threads) {
  auto per_sample = parallel_map(ens.samples, threads,
                                 [&](std::size_t k) { return laplace_moment_check(realize(ens, k), x, lambda, eps, p); });
  LaplaceEnsembleCheck out;
  out.realizations = per_sample.size();
  out.min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> l, r;
  for (const auto& c : per_sample) {
    l.push_back(c.lhs);
    r.push_back(c.rhs);
    if (!c.holds) ++out.failures;
    out.min_margin = std::min(out.min_margin, c.margin);
  }
  out.lhs = summarize(l);
  out.rhs = summarize(r);
  out.holds = out.failures == 0 && out.lhs.mean >= out.rhs.mean - 1e-9;
  return out;
}

PMomentProbe pmoment_probe(const EnsembleSpec& ens, double lambda, const std::vector<double>& epsilons,
                           const std::vector<double>& ps, const Site& x, unsigned threads) {
  check_epsilons(epsilons);
  const std::size_t xi = site_index(ens.region, x);
  std::vector<Eigen::VectorXd> weights;
  for (double p : ps) weights.push_back(distance_powers(ens.region, x, p));
  auto per_sample = parallel_map(ens.samples, threads, [&](std::size_t k) {
    return pmoment_values(eigendecompose(realize(ens, k).H), xi, lambda, epsilons, weights);
  });
  return assemble_probe(per_sample, epsilons, ps);
}

PMomentProbe pmoment_probe(const HamiltonianMatrix& h, double lambda, const std::vector<double>& epsilons,
                           const std::vector<double>& ps, const Site& x) {
  check_epsilons(epsilons);
  const std::size_t xi = site_index(h.region, x);
  std::vector<Eigen::VectorXd> weights;
  for (double p : ps) weights.push_back(distance_powers(h.region, x, p));
  std::vector<std::vector<double>> one{pmoment_values(eigendecompose(h.H), xi, lambda, epsilons, weights)};
  return assemble_probe(one, epsilons, ps);
}

}  // namespace trimlab
