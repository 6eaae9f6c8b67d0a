#include "trimlab/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "trimlab/montecarlo.hpp"

namespace trimlab::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(section + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
}

template <class T>
void read(const json& j, const std::string& section, const std::string& key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + section + "." + key + "' has the wrong type: " + e.what());
  }
}

template <class Fn>
void guarded(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("field '" + field + "': " + e.what());
  }
}

std::vector<int> parse_range_list(const std::string& text, std::vector<int>& lo) {
  std::vector<int> hi;
  lo.clear();
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto dots = part.find("..");
    if (dots == std::string::npos) throw ConfigError("field 'box': expected lo..hi per dimension, got '" + part + "'");
    try {
      lo.push_back(std::stoi(part.substr(0, dots)));
      hi.push_back(std::stoi(part.substr(dots + 2)));
    } catch (const std::exception&) {
      throw ConfigError("field 'box': malformed range '" + part + "'");
    }
  }
  if (lo.empty()) throw ConfigError("field 'box': empty");
  return hi;
}

}  // namespace

json disorder_to_json(const DisorderSpec& spec) {
  json j = std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, DisorderSpec::Uniform>)
          return {{"family", "uniform"}, {"a", f.a}, {"b", f.b}};
        else if constexpr (std::is_same_v<F, DisorderSpec::BernoulliMixture>)
          return {{"family", "bernoulli"}, {"p", f.p}, {"w", f.w}};
        else
          return {{"family", "cauchy"}, {"scale", f.scale}, {"cutoff", f.cutoff}};
      },
      spec.family);
  j["alpha"] = spec.declared_alpha;
  j["q"] = spec.declared_q;
  return j;
}

DisorderSpec disorder_from_json(const json& j) {
  const std::string sec = "model.disorder";
  if (!j.is_object()) throw ConfigError(sec + ": expected an object");
  std::string family = "uniform";
  read(j, sec, "family", family);
  DisorderSpec spec;
  if (family == "uniform") {
    only_keys(j, sec, {"family", "a", "b", "alpha", "q"});
    DisorderSpec::Uniform u;
    read(j, sec, "a", u.a);
    read(j, sec, "b", u.b);
    spec.family = u;
  } else if (family == "bernoulli") {
    only_keys(j, sec, {"family", "p", "w", "alpha", "q"});
    DisorderSpec::BernoulliMixture m;
    read(j, sec, "p", m.p);
    read(j, sec, "w", m.w);
    spec.family = m;
  } else if (family == "cauchy") {
    only_keys(j, sec, {"family", "scale", "cutoff", "alpha", "q"});
    DisorderSpec::TruncatedCauchy c;
    read(j, sec, "scale", c.scale);
    read(j, sec, "cutoff", c.cutoff);
    spec.family = c;
    spec.declared_q = 0.5;
  } else {
    throw ConfigError("field 'model.disorder.family': unknown family '" + family + "'");
  }
  read(j, sec, "alpha", spec.declared_alpha);
  read(j, sec, "q", spec.declared_q);
  guarded(sec, [&] { spec.validate(); });
  return spec;
}

Site ExperimentConfig::site() const {
  if (!numerics.site.empty()) return Site{numerics.site};
  std::vector<int> c(model.lo.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = model.lo[i] + (model.hi[i] - model.lo[i]) / 2;
  return Site{c};
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  only_keys(j, "", {"experiment", "model", "numerics", "output"});
  read(j, "", "experiment", c.experiment);

  if (auto it = j.find("model"); it != j.end()) {
    const json& m = *it;
    only_keys(m, "model", {"d", "lo", "hi", "gamma", "v0", "g", "disorder"});
    read(m, "model", "d", c.model.d);
    read(m, "model", "lo", c.model.lo);
    read(m, "model", "hi", c.model.hi);
    if (!m.contains("lo") && !m.contains("hi") && m.contains("d")) {
      c.model.lo.assign(static_cast<std::size_t>(std::max(c.model.d, 0)), 1);
      c.model.hi.assign(static_cast<std::size_t>(std::max(c.model.d, 0)), 5);
    }
    read(m, "model", "gamma", c.model.gamma);
    read(m, "model", "v0", c.model.v0);
    read(m, "model", "g", c.model.g);
    if (auto d = m.find("disorder"); d != m.end()) c.model.disorder = disorder_from_json(*d);
  }

  if (auto it = j.find("numerics"); it != j.end()) {
    const json& n = *it;
    const std::string sec = "numerics";
    only_keys(n, sec,
              {"s", "eta", "energy", "epsilon", "p", "times", "samples", "seed", "threads", "dense_limit", "site",
               "box_sizes", "decoupling_trials", "C_s"});
    read(n, sec, "s", c.numerics.s);
    read(n, sec, "eta", c.numerics.eta);
    read(n, sec, "energy", c.numerics.energy);
    if (auto e = n.find("epsilon"); e != n.end() && e->is_number())
      c.numerics.epsilon = {e->get<double>()};
    else
      read(n, sec, "epsilon", c.numerics.epsilon);
    if (auto p = n.find("p"); p != n.end() && p->is_number())
      c.numerics.p = {p->get<double>()};
    else
      read(n, sec, "p", c.numerics.p);
    read(n, sec, "times", c.numerics.times);
    read(n, sec, "samples", c.numerics.samples);
    read(n, sec, "seed", c.numerics.seed);
    read(n, sec, "threads", c.numerics.threads);
    read(n, sec, "dense_limit", c.numerics.dense_limit);
    read(n, sec, "site", c.numerics.site);
    read(n, sec, "box_sizes", c.numerics.box_sizes);
    read(n, sec, "decoupling_trials", c.numerics.decoupling_trials);
    read(n, sec, "C_s", c.numerics.C_s);
  }

  if (auto it = j.find("output"); it != j.end()) {
    only_keys(*it, "output", {"path", "formats"});
    read(*it, "output", "path", c.output.path);
    read(*it, "output", "formats", c.output.formats);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["model"] = {{"d", c.model.d},         {"lo", c.model.lo}, {"hi", c.model.hi},
                {"gamma", c.model.gamma}, {"v0", c.model.v0}, {"g", c.model.g},
                {"disorder", disorder_to_json(c.model.disorder)}};
  const auto& n = c.numerics;
  j["numerics"] = {{"s", n.s},
                   {"eta", n.eta},
                   {"energy", n.energy},
                   {"epsilon", n.epsilon},
                   {"p", n.p},
                   {"times", n.times},
                   {"samples", n.samples},
                   {"seed", n.seed},
                   {"threads", n.threads},
                   {"dense_limit", n.dense_limit},
                   {"site", n.site},
                   {"box_sizes", n.box_sizes},
                   {"decoupling_trials", n.decoupling_trials},
                   {"C_s", n.C_s}};
  j["output"] = {{"path", c.output.path}, {"formats", c.output.formats}};
  return j;
}

void apply(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.numerics.seed = *o.seed;
  if (o.threads) c.numerics.threads = *o.threads;
  if (o.out) c.output.path = *o.out;
  if (o.g) c.model.g = *o.g;
  if (o.s) c.numerics.s = *o.s;
  if (o.eta) c.numerics.eta = *o.eta;
  if (o.energy) c.numerics.energy = *o.energy;
  if (o.epsilon) c.numerics.epsilon = *o.epsilon;
  if (o.samples) c.numerics.samples = *o.samples;
  if (o.gamma) c.model.gamma = *o.gamma;
  if (o.box) {
    c.model.hi = parse_range_list(*o.box, c.model.lo);
    c.model.d = static_cast<int>(c.model.lo.size());
    if (!c.numerics.site.empty() && c.numerics.site.size() != c.model.lo.size()) c.numerics.site.clear();
  }
  validate(c);
}

void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("field 'experiment': unknown experiment '" + c.experiment + "'");

  const auto& m = c.model;
  if (m.d < 1) throw ConfigError("field 'model.d': dimension must be >= 1");
  if (m.lo.size() != static_cast<std::size_t>(m.d) || m.hi.size() != static_cast<std::size_t>(m.d))
    throw ConfigError("field 'model.lo'/'model.hi': need one bound per dimension");
  for (int i = 0; i < m.d; ++i)
    if (m.lo[static_cast<std::size_t>(i)] > m.hi[static_cast<std::size_t>(i)])
      throw ConfigError("field 'model.lo': lo > hi in dimension " + std::to_string(i));
  guarded("model.gamma", [&] {
    auto g = SublatticeMask::parse(m.gamma);
    g.periods(m.d);
  });
  guarded("model.v0", [&] { V0Spec::parse(m.v0); });
  if (!(m.g >= 0.0)) throw ConfigError("field 'model.g': must be >= 0");
  guarded("model.disorder", [&] { m.disorder.validate(); });

  const auto& n = c.numerics;
  if (!(n.s > 0.0 && n.s < 1.0)) throw ConfigError("field 'numerics.s': must lie in (0, 1)");
  if (!(n.eta >= 0.0)) throw ConfigError("field 'numerics.eta': must be >= 0");
  if (n.epsilon.empty()) throw ConfigError("field 'numerics.epsilon': empty list");
  for (double e : n.epsilon)
    if (!(e > 0.0)) throw ConfigError("field 'numerics.epsilon': entries must be > 0");
  if (n.p.empty()) throw ConfigError("field 'numerics.p': empty list");
  for (double p : n.p)
    if (!(p >= 0.0)) throw ConfigError("field 'numerics.p': entries must be >= 0");
  for (double t : n.times)
    if (!std::isfinite(t)) throw ConfigError("field 'numerics.times': entries must be finite");
  for (int L : n.box_sizes)
    if (L < 1) throw ConfigError("field 'numerics.box_sizes': entries must be >= 1");
  if (n.samples == 0) throw ConfigError("field 'numerics.samples': must be >= 1");
  if (n.dense_limit == 0) throw ConfigError("field 'numerics.dense_limit': must be >= 1");
  if (n.decoupling_trials == 0) throw ConfigError("field 'numerics.decoupling_trials': must be >= 1");
  if (!(n.C_s >= 0.0)) throw ConfigError("field 'numerics.C_s': must be >= 0");
  if (!n.site.empty()) {
    if (n.site.size() != static_cast<std::size_t>(m.d))
      throw ConfigError("field 'numerics.site': need one coordinate per dimension");
    if (!c.box().contains(Site{n.site})) throw ConfigError("field 'numerics.site': outside the box");
  }
  if (c.box().size() > n.dense_limit)
    throw ConfigError("field 'model': box has " + std::to_string(c.box().size()) + " sites, over the dense limit " +
                      std::to_string(n.dense_limit));

  for (const auto& f : c.output.formats)
    if (f != "csv" && f != "json") throw ConfigError("field 'output.formats': unknown format '" + f + "'");
  if (c.output.path.empty()) throw ConfigError("field 'output.path': empty");
}

unsigned effective_threads(const ExperimentConfig& c) {
  if (c.numerics.threads > 0) return c.numerics.threads;
  if (const char* env = std::getenv("TRIMLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return resolve_threads(0);
}

}  // namespace trimlab::cli
