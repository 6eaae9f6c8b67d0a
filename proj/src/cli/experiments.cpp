#include "trimlab/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "trimlab/anomalous.hpp"
#include "trimlab/coupling.hpp"
#include "trimlab/dynamics.hpp"
#include "trimlab/fracmoment.hpp"
#include "trimlab/random.hpp"

namespace trimlab::cli {

using nlohmann::json;

namespace {

using Idx = Eigen::Index;

constexpr double kIdentityTolerance = 1e-10;

// Sub-streams of the master seed for the auxiliary random choices of each experiment.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t tag) { return hash_key(seed, tag, 0x5eed); }

json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json estimate_json(const Estimate& e) {
  return {{"mean", number(e.mean)}, {"stderr", number(e.stderr_)}, {"samples", e.samples}};
}

json chi_json(const ChiReport& r) {
  return {{"value", number(r.value)}, {"stderr", number(r.stderr_)}, {"samples", r.samples},
          {"column", r.column},       {"resampled", r.resampled}};
}

json site_json(const Site& s) { return s.coords; }

long long box_side(const ExperimentConfig& c) {
  int side = 0;
  for (std::size_t i = 0; i < c.model.lo.size(); ++i) side = std::max(side, c.model.hi[i] - c.model.lo[i] + 1);
  return side;
}

// C_s for the potential of the ensemble: the configured value, else the empirical constant.
std::pair<double, json> decoupling_constant(const ExperimentConfig& c, const EnsembleSpec& ens, bool fixed_points) {
  if (c.numerics.C_s > 0.0) return {c.numerics.C_s, json{{"C_s", c.numerics.C_s}, {"source", "config"}}};
  std::vector<cplx> fixed;
  if (fixed_points && ens.g > 0.0) fixed = am_decoupling_points(ens);
  auto dc = estimate_decoupling_constants(ens.disorder, c.numerics.s, c.numerics.decoupling_trials,
                                          derived_seed(c.numerics.seed, 1), fixed);
  json j{{"C_s", dc.C_s},
         {"source", fixed.empty() ? "empirical" : "empirical, a fixed to -A(y,y)/g"},
         {"trials", dc.trials.size()},
         {"argmax_a", {dc.trials[dc.argmax].a.real(), dc.trials[dc.argmax].a.imag()}},
         {"argmax_b", {dc.trials[dc.argmax].b.real(), dc.trials[dc.argmax].b.imag()}}};
  return {dc.C_s, j};
}

ResultRecord run_verify(const ExperimentConfig& c, unsigned threads) {
  EnsembleSpec ens = ensemble_of(c);
  const cplx z(c.numerics.energy, c.numerics.epsilon.front());
  auto per = parallel_map(ens.samples, threads, [&](std::size_t k) { return verify_instance(ens, k, z); });

  ResultRecord rec;
  rec.table.header = {"instance", "identity", "residual"};
  json maxima = json::object();
  double worst = 0.0;
  for (std::size_t k = 0; k < per.size(); ++k)
    for (const auto& [name, r] : per[k].named()) {
      rec.table.add({static_cast<long long>(k), name, r});
      double prev = maxima.contains(name) ? maxima[name].get<double>() : 0.0;
      maxima[name] = std::max(prev, r);
      worst = std::max(worst, r);
    }
  rec.passed = worst <= kIdentityTolerance;
  if (!rec.passed) rec.diagnostic = "identity residual " + std::to_string(worst) + " exceeds 1e-10";
  rec.summary = {{"instances", per.size()}, {"max_residual", maxima}, {"tolerance", kIdentityTolerance},
                 {"passed", rec.passed}};
  return rec;
}

ResultRecord run_localize(const ExperimentConfig& c, unsigned threads) {
  EnsembleSpec ens = ensemble_of(c);
  DecayMetric rho{c.numerics.eta};
  ResultRecord rec;
  rec.table.header = {"box_size", "s", "eta", "epsilon", "chi_estimate", "stderr", "samples"};
  json scans = json::array();
  std::vector<std::pair<long long, EnsembleSpec>> boxes;
  if (c.numerics.box_sizes.empty()) {
    boxes.emplace_back(box_side(c), ens);
  } else {
    const Site x = c.site();
    for (int L : c.numerics.box_sizes) {
      std::vector<int> lo(x.coords), hi(x.coords);
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] -= (L - 1) / 2;
        hi[i] += L / 2;
      }
      EnsembleSpec e = ens;
      e.region = Region(make_box(c.model.d, lo, hi));
      boxes.emplace_back(L, std::move(e));
    }
  }
  for (const auto& [side, e] : boxes) {
    for (double eps : c.numerics.epsilon) {
      ChiReport r = mc_chi_green(e, cplx(c.numerics.energy, eps), c.numerics.s, rho, threads);
      rec.table.add({side, c.numerics.s, c.numerics.eta, eps, r.value, r.stderr_, static_cast<long long>(r.samples)});
      scans.push_back({{"box_size", side}, {"epsilon", eps}, {"chi", chi_json(r)}});
    }
  }
  rec.summary["scan"] = scans;

  if (ens.gamma.is_full()) {
    if (ens.g > 0.0) {
      auto [C_s, dc] = decoupling_constant(c, ens, true);
      AMReport am = am_contraction_check(ens, cplx(c.numerics.energy, c.numerics.epsilon.back()), c.numerics.s, rho,
                                         C_s, threads);
      rec.summary["decoupling"] = dc;
      rec.summary["contraction"] = {{"applicable", am.applicable}, {"reason", am.reason},
                                    {"chi_offdiag", am.chi_offdiag}, {"chi_full", am.chi_full},
                                    {"threshold", am.threshold}, {"lhs", chi_json(am.lhs)},
                                    {"rhs", number(am.rhs)},     {"rhs_literal", number(am.rhs_literal)},
                                    {"margin", number(am.margin)}, {"holds", am.holds}};
      if (am.applicable && !am.holds) {
        rec.passed = false;
        rec.diagnostic = "contraction bound violated beyond 3 standard errors";
      }
    }
  } else {
    auto [C_s, dc] = decoupling_constant(c, ens, false);
    Loc1Threshold t = loc1_threshold(ens.region, ens.gamma, ens.v0, c.numerics.energy, c.numerics.s, rho, C_s);
    rec.summary["decoupling"] = dc;
    rec.summary["threshold"] = {{"applicable", t.applicable},
                                {"reason", t.reason},
                                {"chi_K", number(t.chi_K)},
                                {"g0", number(t.g0)},
                                {"distance_to_trimmed_spectrum", number(t.distance_to_trimmed_spectrum)},
                                {"g_above_g0", t.applicable && ens.g > t.g0}};
  }
  return rec;
}

ResultRecord run_wegner(const ExperimentConfig& c, unsigned threads) {
  EnsembleSpec ens = ensemble_of(c);
  auto eps = c.numerics.epsilon;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  WegnerReport w = wegner_count(ens, c.numerics.energy, eps, c.numerics.s, 0.0, threads);
  ResultRecord rec;
  rec.table.header = {"epsilon", "p_exceed", "stderr", "bound", "samples"};
  for (const auto& r : w.rows)
    rec.table.add({r.epsilon, r.p_exceed.mean, r.p_exceed.stderr_, r.bound, static_cast<long long>(r.p_exceed.samples)});
  json rows = json::array();
  for (const auto& r : w.rows) rows.push_back({{"epsilon", r.epsilon}, {"histogram", r.histogram}});
  rec.passed = w.lemma_violations == 0;
  if (!rec.passed) rec.diagnostic = "eigenvector lower bound violated";
  rec.summary = {{"lambda", w.lambda},
                 {"mult", w.mult},
                 {"gap", w.gap},
                 {"gamma_sites", w.gamma_sites},
                 {"slope", number(w.slope)},
                 {"qualifying_eigenvectors", w.qualifying_eigenvectors},
                 {"lemma_violations", w.lemma_violations},
                 {"min_lemma_ratio", number(w.min_lemma_ratio)},
                 {"histograms", rows}};
  return rec;
}

ResultRecord run_anomalous(const ExperimentConfig& c, unsigned threads) {
  EnsembleSpec ens = ensemble_of(c);
  ResultRecord rec;
  HamiltonianMatrix h0 = assemble_free(ens.region, ens.gamma, ens.v0, ens.dense_limit);
  try {
    CompactEigenReport ce = compact_eigenfunctions(h0, c.numerics.energy);
    rec.summary["compact"] = {{"lambda", ce.lambda},           {"full_mult", ce.full_mult},
                              {"supported_dim", ce.supported_dim}, {"assumption3", ce.assumption3},
                              {"max_gamma_mass", ce.max_gamma_mass}, {"max_residual", ce.max_residual}};
  } catch (const InvalidArgument& e) {
    rec.summary["compact"] = {{"lambda", c.numerics.energy}, {"note", e.what()}};
  }
  if (const auto* g1 = std::get_if<SublatticeMask::Gamma1>(&ens.gamma.kind())) {
    json energies = json::array();
    for (const auto& e : gamma1_energies(g1->k, g1->m)) energies.push_back({{"lambda", e.lambda}, {"multiplicity", e.multiplicity}});
    rec.summary["gamma1_energies"] = energies;
    WindowCheck wc = window_check(gamma1_eigenfunction(g1->k, g1->m, 1, 1), ens.gamma, c.box());
    rec.summary["gamma1_window_check"] = {
        {"max_residual", wc.max_residual}, {"max_on_gamma", wc.max_on_gamma}, {"max_abs", wc.max_abs}};
  } else if (const auto* g2 = std::get_if<SublatticeMask::Gamma2>(&ens.gamma.kind())) {
    rec.summary["gamma2_eigenfunctions"] = gamma2_eigenfunction_count(g2->k);
  }

  auto eps = c.numerics.epsilon;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  PMomentProbe probe = pmoment_probe(ens, c.numerics.energy, eps, c.numerics.p, c.site(), threads);
  rec.table.header = {"p", "epsilon", "S", "stderr", "increment", "increment_stderr"};
  for (const auto& r : probe.rows)
    rec.table.add({r.p, r.epsilon, r.S.mean, r.S.stderr_, r.increment.mean, r.increment.stderr_});
  json slopes = json::array();
  for (std::size_t i = 0; i < c.numerics.p.size(); ++i)
    slopes.push_back({{"p", c.numerics.p[i]}, {"slope", number(probe.slopes[i])}});
  rec.summary["site"] = site_json(c.site());
  rec.summary["slopes"] = slopes;
  return rec;
}

ResultRecord run_dynamics(const ExperimentConfig& c, unsigned threads) {
  EnsembleSpec ens = ensemble_of(c);
  ResultRecord rec;
  auto curve = moment_curve(ens, c.site(), c.numerics.times, c.numerics.p, threads);
  rec.table.header = {"t", "p", "Mp", "stderr"};
  for (const auto& m : curve) rec.table.add({m.t, m.p, m.Mp.mean, m.Mp.stderr_});

  LaplaceEnsembleCheck lc = laplace_moment_check(ens, c.site(), c.numerics.energy, c.numerics.epsilon.front(),
                                                 c.numerics.p.front(), threads);
  rec.passed = lc.holds;
  if (!rec.passed) rec.diagnostic = "Laplace moment inequality failed on " + std::to_string(lc.failures) + " realizations";
  json growth = json::array();
  for (double p : c.numerics.p) {
    MomentGrowth g = moment_growth(curve, p, ens.region, c.site());
    growth.push_back({{"p", p},
                      {"plateau", number(g.plateau)},
                      {"saturation_time", number(g.saturation_time)},
                      {"exponent", number(g.exponent)},
                      {"fit_points", g.fit_points}});
  }
  rec.summary = {{"site", site_json(c.site())},
                 {"growth", growth},
                 {"laplace",
                  {{"lambda", c.numerics.energy},
                   {"epsilon", c.numerics.epsilon.front()},
                   {"p", c.numerics.p.front()},
                   {"lhs", estimate_json(lc.lhs)},
                   {"rhs", estimate_json(lc.rhs)},
                   {"realizations", lc.realizations},
                   {"failures", lc.failures},
                   {"min_margin", number(lc.min_margin)},
                   {"holds", lc.holds}}}};
  return rec;
}

ResultRecord run_couple(const ExperimentConfig& c, unsigned threads) {
  EnsembleSpec ens = ensemble_of(c);
  DecayMetric rho{c.numerics.eta};
  const double lambda = c.numerics.energy, eps = c.numerics.epsilon.front();
  ResultRecord rec;

  double C_mu = c.numerics.C_s;
  json dc{{"C_mu", C_mu}, {"source", "config"}};
  if (C_mu <= 0.0) {
    auto est = estimate_reciprocal_decoupling_constants(ens.disorder, c.numerics.s, c.numerics.decoupling_trials,
                                                        derived_seed(c.numerics.seed, 2));
    C_mu = est.C_s;
    dc = {{"C_mu", C_mu}, {"source", "empirical, for -1/V"}, {"trials", est.trials.size()}};
  }
  rec.summary["decoupling"] = dc;

  WeakDisorderReport w = weak_disorder_bound_check(ens, lambda, eps, c.numerics.s, rho, C_mu, threads);
  rec.table.header = {"line", "quantity", "value", "stderr", "bound", "holds"};
  if (w.applicable) {
    rec.table.add({1LL, "pendant_chi", w.pendant.value, w.pendant.stderr_, w.pendant_bound,
                   static_cast<long long>(w.pendant_holds)});
    rec.table.add({2LL, "base_chi", w.base.value, w.base.stderr_, w.step_bound, static_cast<long long>(w.step_holds)});
    rec.table.add({3LL, "chi_literal", w.lhs.value, w.lhs.stderr_, w.bound_literal,
                   static_cast<long long>(w.holds_literal)});
    rec.table.add({3LL, "chi_corrected", w.lhs.value, w.lhs.stderr_, w.bound, static_cast<long long>(w.holds)});
  }
  rec.summary["bound"] = {{"applicable", w.applicable},
                          {"reason", w.reason},
                          {"chi", w.chi},
                          {"threshold", w.threshold},
                          {"g_pow_minus_s", std::pow(ens.g, -c.numerics.s)},
                          {"kappa", w.kappa},
                          {"margin", number(w.margin)},
                          {"holds", w.holds},
                          {"holds_literal", w.holds_literal},
                          {"identity_residual", w.identity_residual}};

  // Identity audit and the exploratory coupled operator on realization 0.
  HamiltonianMatrix h = realize(ens, 0);
  HamiltonianMatrix h0 = assemble_free(ens.region, ens.gamma, ens.v0, ens.dense_limit);
  const cplx z(lambda, eps);
  Eigen::VectorXd gV(static_cast<Idx>(h.size()));
  for (std::size_t i = 0; i < h.size(); ++i) gV(static_cast<Idx>(i)) = ens.g * h.V[i];
  json audit{{"realization", 0}};
  if (gV.cwiseAbs().minCoeff() > 0.0) {
    Eigen::VectorXcd U = (-gV.cwiseInverse()).cast<cplx>().array() + z;
    S2WResidual r = s2w_identity_check(h0.H, U, z);
    audit["residual0"] = r.residual0;
    audit["residual1"] = r.residual1;
    if (std::max(r.residual0, r.residual1) > kIdentityTolerance) {
      rec.passed = false;
      rec.diagnostic = "hedgehog identity residual exceeds 1e-10";
    }
  }
  rec.summary["s2w"] = audit;
  try {
    CoupledWeakOperator op = coupled_weak_operator(h0.H, gV, ens.g, lambda, eps);
    rec.summary["coupled_operator"] = {{"exploratory", true},
                                       {"effective_strength", op.effective_strength},
                                       {"reciprocal_reference", number(op.reciprocal_reference)},
                                       {"g", ens.g}};
  } catch (const NumericError& e) {
    rec.summary["coupled_operator"] = {{"exploratory", true}, {"note", e.what()}};
  }
  return rec;
}

ResultRecord run_lattice_info(const ExperimentConfig& c) {
  ResultRecord rec;
  SublatticeMask gamma = c.gamma();
  LatticeBox box = c.box();
  Site centre = c.site();
  int R = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < c.model.lo.size(); ++i)
    R = std::min({R, centre.coords[i] - c.model.lo[i], c.model.hi[i] - centre.coords[i]});
  rec.table.header = {"radius", "in_gamma", "total", "density"};
  for (int r = 0; r <= R; ++r) {
    Density d = relative_density(gamma, r, centre);
    rec.table.add({static_cast<long long>(r), static_cast<long long>(d.in_gamma), static_cast<long long>(d.total),
                   d.value()});
  }
  InsulationReport ins = is_doubly_insulated(gamma, box);
  json witness = nullptr;
  if (ins.witness) witness = {site_json(ins.witness->first), site_json(ins.witness->second)};
  auto comps = components_of_complement(gamma, box);
  std::size_t interior = 0, largest = 0;
  for (const auto& comp : comps) {
    if (!comp.touches_window_boundary) ++interior;
    largest = std::max(largest, comp.sites.size());
  }
  rec.summary = {{"gamma", gamma.descriptor()},
                 {"centre", site_json(centre)},
                 {"sites", box.size()},
                 {"insulated", ins.insulated},
                 {"possibly_infinite", ins.possibly_infinite},
                 {"component_count", ins.component_count},
                 {"interior_components", interior},
                 {"largest_component", largest},
                 {"witness", witness},
                 {"witness_distance", ins.witness_distance}};
  return rec;
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != header.size()) throw InvalidArgument("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::vector<std::pair<std::string, double>> IdentityResiduals::named() const {
  return {{"schur", schur},
          {"resolvent_in_out", resolvent_in_out},
          {"resolvent_out_in", resolvent_out_in},
          {"resolvent_out_out", resolvent_out_out},
          {"kernel_K", kernel_K},
          {"s2w_real_0", s2w_real_0},
          {"s2w_real_1", s2w_real_1},
          {"s2w_complex_0", s2w_complex_0},
          {"s2w_complex_1", s2w_complex_1}};
}

double IdentityResiduals::max() const {
  double m = 0.0;
  for (const auto& [_, v] : named()) m = std::max(m, v);
  return m;
}

EnsembleSpec ensemble_of(const ExperimentConfig& c) {
  EnsembleSpec ens;
  ens.region = Region(c.box());
  ens.gamma = c.gamma();
  ens.v0 = c.v0();
  ens.g = c.model.g;
  ens.disorder = c.model.disorder;
  ens.seed = c.numerics.seed;
  ens.samples = c.numerics.samples;
  ens.dense_limit = c.numerics.dense_limit;
  return ens;
}

IdentityResiduals verify_instance(const EnsembleSpec& ens, std::size_t sample, cplx z) {
  const std::size_t n = ens.region.size();
  if (n < 2) throw InvalidArgument("verify: the box needs at least two sites");
  HamiltonianMatrix h = realize(ens, sample);

  std::vector<std::size_t> X;
  for (std::size_t i = 0; i < n; ++i)
    if (to_unit_open(hash_key(ens.seed, sample, i, 0x1d)) < 0.5) X.push_back(i);
  if (X.empty()) X.push_back(0);
  if (X.size() == n) X.pop_back();

  IdentityResiduals r;
  Eigen::MatrixXcd G = green(h.H, z);
  r.schur = (schur_green(h.H, X, z) - submatrix(G, X, X)).cwiseAbs().maxCoeff();
  r.resolvent_in_out = resolvent_identity_residual(h.H, X, z, ResolventCase::InOut);
  r.resolvent_out_in = resolvent_identity_residual(h.H, X, z, ResolventCase::OutIn);
  r.resolvent_out_out = resolvent_identity_residual(h.H, X, z, ResolventCase::OutOut);

  // The kernel identity needs a trimming set that is a proper, non-empty part of the box.
  auto proper = [&](const HamiltonianMatrix& m) {
    std::size_t k = gamma_indices(m).size();
    return k > 0 && k < n;
  };
  HamiltonianMatrix hk = h;
  for (std::uint64_t attempt = 0; !proper(hk); ++attempt) {
    if (attempt == 64) throw NumericError("verify: no proper trimming set found");
    EnsembleSpec e = ens;
    e.gamma = SublatticeMask::bernoulli(0.5, hash_key(ens.seed, sample, attempt, 0x2d));
    hk = realize(e, sample);
  }
  r.kernel_K = kernel_K(hk, z).identity_residual;

  HamiltonianMatrix h0 = assemble_free(ens.region, ens.gamma, ens.v0, ens.dense_limit);
  Eigen::VectorXcd Ur(static_cast<Idx>(n)), Uc(static_cast<Idx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double v = ens.g * h.V[i];
    Ur(static_cast<Idx>(i)) = v;
    Uc(static_cast<Idx>(i)) = z - 1.0 / (v + 1.0);
  }
  S2WResidual sr = s2w_identity_check(h0.H, Ur, z);
  S2WResidual sc = s2w_identity_check(h0.H, Uc, z);
  r.s2w_real_0 = sr.residual0;
  r.s2w_real_1 = sr.residual1;
  r.s2w_complex_0 = sc.residual0;
  r.s2w_complex_1 = sc.residual1;
  return r;
}

ResultRecord run(const ExperimentConfig& config) {
  validate(config);
  const unsigned threads = effective_threads(config);
  auto t0 = std::chrono::steady_clock::now();
  ResultRecord rec;
  const std::string& e = config.experiment;
  if (e == "verify")
    rec = run_verify(config, threads);
  else if (e == "localize")
    rec = run_localize(config, threads);
  else if (e == "wegner")
    rec = run_wegner(config, threads);
  else if (e == "anomalous")
    rec = run_anomalous(config, threads);
  else if (e == "dynamics")
    rec = run_dynamics(config, threads);
  else if (e == "couple")
    rec = run_couple(config, threads);
  else
    rec = run_lattice_info(config);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.config = config;
  rec.provenance = {{"code_version", kCodeVersion},
                    {"seed", config.numerics.seed},
                    {"threads", threads},
                    {"wall_time_s", wall}};
  return rec;
}

}  // namespace trimlab::cli
