#include "trimlab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "trimlab/errors.hpp"
#include "trimlab/random.hpp"

namespace trimlab {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

boost::math::quadrature::tanh_sinh<double>& quadrature_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

// Accept either an absolute error of 1e-9 or a relative one of 1e-10 for large integrals.
bool converged(double value, double error) { return error <= std::max(1e-9, 1e-10 * std::abs(value)); }

}  // namespace

DisorderSpec DisorderSpec::uniform(double a, double b) {
  DisorderSpec s;
  s.family = Uniform{a, b};
  s.validate();
  return s;
}

DisorderSpec DisorderSpec::bernoulli_mixture(double p, double w) {
  DisorderSpec s;
  s.family = BernoulliMixture{p, w};
  s.validate();
  return s;
}

DisorderSpec DisorderSpec::truncated_cauchy(double scale, double cutoff, double declared_q) {
  DisorderSpec s;
  s.family = TruncatedCauchy{scale, cutoff};
  s.declared_q = declared_q;
  s.validate();
  return s;
}

std::string DisorderSpec::name() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const Uniform& u) { os << "uniform(" << u.a << "," << u.b << ")"; },
                        [&](const BernoulliMixture& m) { os << "bernoulli_mixture(" << m.p << "," << m.w << ")"; },
                        [&](const TruncatedCauchy& c) {
                          os << "truncated_cauchy(" << c.scale << "," << c.cutoff << ")";
                        }},
             family);
  return os.str();
}

void DisorderSpec::validate() const {
  if (!(declared_alpha > 0.0)) throw InvalidArgument("disorder: declared alpha must be > 0");
  if (!(declared_q > 0.0)) throw InvalidArgument("disorder: declared q must be > 0");
  // Every family has a bounded density, hence is 1-regular and no better.
  if (declared_alpha > 1.0) throw InvalidArgument("disorder: declared alpha exceeds 1 for a bounded density");
  std::visit(overloaded{[](const Uniform& u) {
                          if (!(u.b > u.a)) throw InvalidArgument("disorder: uniform requires a < b");
                        },
                        [](const BernoulliMixture& m) {
                          if (!(m.p > 0.0 && m.p < 1.0)) throw InvalidArgument("disorder: mixture p must lie in (0,1)");
                          if (!(m.w > 0.0)) throw InvalidArgument("disorder: mixture width must be > 0");
                        },
                        [this](const TruncatedCauchy& c) {
                          if (!(c.scale > 0.0 && c.cutoff > 0.0))
                            throw InvalidArgument("disorder: cauchy scale and cutoff must be > 0");
                          if (!(declared_q < 1.0))
                            throw InvalidArgument("disorder: truncated cauchy requires declared q < 1");
                        }},
             family);
}

double DisorderSpec::support_lo() const {
  return std::visit(overloaded{[](const Uniform& u) { return u.a; },
                               [](const BernoulliMixture& m) { return std::min(-m.w / 2, 1.0 - m.w / 2); },
                               [](const TruncatedCauchy& c) { return -c.cutoff; }},
                    family);
}

double DisorderSpec::support_hi() const {
  return std::visit(overloaded{[](const Uniform& u) { return u.b; },
                               [](const BernoulliMixture& m) { return std::max(m.w / 2, 1.0 + m.w / 2); },
                               [](const TruncatedCauchy& c) { return c.cutoff; }},
                    family);
}

double DisorderSpec::density(double t) const {
  return std::visit(overloaded{[t](const Uniform& u) { return (t >= u.a && t <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
                               [t](const BernoulliMixture& m) {
                                 double d = 0.0;
                                 if (std::abs(t) <= m.w / 2) d += (1.0 - m.p) / m.w;
                                 if (std::abs(t - 1.0) <= m.w / 2) d += m.p / m.w;
                                 return d;
                               },
                               [t](const TruncatedCauchy& c) {
                                 if (std::abs(t) > c.cutoff) return 0.0;
                                 double z = 2.0 / kPi * std::atan(c.cutoff / c.scale);
                                 return c.scale / (kPi * (t * t + c.scale * c.scale)) / z;
                               }},
                    family);
}

double DisorderSpec::cdf(double t) const {
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return std::visit(overloaded{[&](const Uniform& u) { return clamp01((t - u.a) / (u.b - u.a)); },
                               [&](const BernoulliMixture& m) {
                                 return (1.0 - m.p) * clamp01((t + m.w / 2) / m.w) +
                                        m.p * clamp01((t - 1.0 + m.w / 2) / m.w);
                               },
                               [&](const TruncatedCauchy& c) {
                                 double tc = std::clamp(t, -c.cutoff, c.cutoff);
                                 double ac = std::atan(c.cutoff / c.scale);
                                 return clamp01((std::atan(tc / c.scale) + ac) / (2.0 * ac));
                               }},
                    family);
}

double DisorderSpec::quantile(double u) const {
  return std::visit(overloaded{[u](const Uniform& f) { return f.a + (f.b - f.a) * u; },
                               [u](const BernoulliMixture& m) {
                                 if (u < 1.0 - m.p) return -m.w / 2 + m.w * u / (1.0 - m.p);
                                 return 1.0 - m.w / 2 + m.w * (u - (1.0 - m.p)) / m.p;
                               },
                               [u](const TruncatedCauchy& c) {
                                 double ac = std::atan(c.cutoff / c.scale);
                                 return c.scale * std::tan((2.0 * u - 1.0) * ac);
                               }},
                    family);
}

std::vector<double> DisorderSpec::breakpoints() const {
  std::vector<double> pts = std::visit(
      overloaded{[](const Uniform& u) { return std::vector<double>{u.a, u.b}; },
                 [](const BernoulliMixture& m) {
                   return std::vector<double>{-m.w / 2, m.w / 2, 1.0 - m.w / 2, 1.0 + m.w / 2};
                 },
                 [](const TruncatedCauchy& c) { return std::vector<double>{-c.cutoff, 0.0, c.cutoff}; }},
      family);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double DisorderSpec::regularity_constant() const {
  return std::visit(overloaded{[](const Uniform& u) { return 2.0 / (u.b - u.a); },
                               [](const BernoulliMixture& m) {
                                 // Overlapping windows add their densities.
                                 double peak = std::max(m.p, 1.0 - m.p) / m.w;
                                 if (m.w > 1.0) peak = 1.0 / m.w;
                                 return 2.0 * peak;
                               },
                               [](const TruncatedCauchy& c) {
                                 double z = 2.0 / kPi * std::atan(c.cutoff / c.scale);
                                 return 2.0 / (kPi * c.scale * z);
                               }},
                    family);
}

double DisorderSpec::moment(double q) const {
  return integrate_density(*this, [q](double t) { return std::pow(std::abs(t), q); }, {0.0});
}

bool operator==(const DisorderSpec& a, const DisorderSpec& b) {
  if (a.declared_alpha != b.declared_alpha || a.declared_q != b.declared_q) return false;
  if (a.family.index() != b.family.index()) return false;
  return std::visit(
      overloaded{[&](const DisorderSpec::Uniform& u) {
                   auto& v = std::get<DisorderSpec::Uniform>(b.family);
                   return u.a == v.a && u.b == v.b;
                 },
                 [&](const DisorderSpec::BernoulliMixture& u) {
                   auto& v = std::get<DisorderSpec::BernoulliMixture>(b.family);
                   return u.p == v.p && u.w == v.w;
                 },
                 [&](const DisorderSpec::TruncatedCauchy& u) {
                   auto& v = std::get<DisorderSpec::TruncatedCauchy>(b.family);
                   return u.scale == v.scale && u.cutoff == v.cutoff;
                 }},
      a.family);
}

// ---------------------------------------------------------------------------

double SampleStream::draw(std::uint64_t site, std::uint64_t sample, std::uint64_t attempt) const {
  return spec_.quantile(to_unit_open(hash_key(seed_, site, sample, attempt)));
}

std::vector<double> sample_potential(const SampleStream& stream, const SublatticeMask& gamma, const Region& region,
                                     std::uint64_t sample, std::uint64_t attempt) {
  std::vector<double> v(region.size(), 0.0);
  for (std::size_t i = 0; i < region.size(); ++i)
    if (gamma.contains(region.site(i))) v[i] = stream.draw(i, sample, attempt);
  return v;
}

std::pair<double, double> interval_ratio(const std::vector<double>& sorted, double t, double eps, double alpha) {
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), t - eps);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), t + eps);
  double n = static_cast<double>(sorted.size());
  double p = static_cast<double>(hi - lo) / n;
  double scale = std::pow(eps, alpha);
  return {p / scale, std::sqrt(p * (1.0 - p) / n) / scale};
}

RegularityReport regularity_check(const DisorderSpec& spec, std::size_t n, std::uint64_t seed, double q) {
  spec.validate();
  if (n < 10000) throw InvalidArgument("regularity_check: n must be >= 10^4");
  if (q <= 0.0) q = spec.declared_q;

  SampleStream stream(spec, seed);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = stream.draw(i, 0);

  RegularityReport rep;
  rep.q = q;
  rep.exact_C = spec.regularity_constant();

  double sum = 0.0, sum2 = 0.0;
  for (double x : xs) {
    double m = std::pow(std::abs(x), q);
    sum += m;
    sum2 += m * m;
  }
  double dn = static_cast<double>(n);
  rep.empirical_Mq = sum / dn;
  rep.empirical_Mq_stderr = std::sqrt(std::max(0.0, sum2 / dn - rep.empirical_Mq * rep.empirical_Mq) / (dn - 1.0));
  rep.exact_Mq = spec.moment(q);

  std::sort(xs.begin(), xs.end());
  const double lo = spec.support_lo(), hi = spec.support_hi(), width = hi - lo;
  const double alpha = spec.declared_alpha;
  for (int k = 0; k <= 20; ++k) {
    double t = lo + width * k / 20.0;
    for (double rel : {0.25, 0.1, 0.05, 0.02, 0.01}) {
      double eps = rel * width;
      auto [emp, se] = interval_ratio(xs, t, eps, alpha);
      double exact = (spec.cdf(t + eps) - spec.cdf(t - eps)) / std::pow(eps, alpha);
      rep.cells.push_back({t, eps, emp, se, exact});
      if (emp > rep.empirical_C) {
        rep.empirical_C = emp;
        rep.empirical_C_stderr = se;
      }
    }
  }
  return rep;
}

double integrate_density(const DisorderSpec& spec, const std::function<double(double)>& f,
                         std::vector<double> singular_points) {
  const double lo = spec.support_lo(), hi = spec.support_hi();
  std::vector<double> cuts = spec.breakpoints();
  for (double p : singular_points)
    if (p > lo && p < hi) cuts.push_back(p);
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    double mid = 0.5 * (a + b);
    if (spec.density(mid) == 0.0) continue;
    double err = 0.0, l1 = 0.0;
    double val = quadrature_rule().integrate([&](double v) { return f(v) * spec.density(v); }, a, b, 1e-12, &err, &l1);
    if (!std::isfinite(val) || !converged(val, err))
      throw NumericError("quadrature failed to converge on panel [" + std::to_string(a) + ", " + std::to_string(b) +
                         "] (error estimate " + std::to_string(err) + ")");
    total += val;
  }
  return total;
}

DecouplingResult decoupling_ratio(const DisorderSpec& spec, const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  double s, double r) {
  spec.validate();
  const double alpha = spec.declared_alpha;
  const double l = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  if (!a.empty() && !(s > 0.0)) throw InvalidArgument("decoupling_ratio: s must be > 0");
  if (!b.empty() && !(r > 0.0)) throw InvalidArgument("decoupling_ratio: r must be > 0");
  double rm = r * m, sl = a.empty() ? 0.0 : s * l;
  if (!(rm < alpha)) throw InvalidArgument("decoupling_ratio: parameter constraint rm < alpha violated");
  if (spec.declared_q < (sl + rm) * alpha / (alpha - rm))
    throw InvalidArgument("decoupling_ratio: parameter constraint q >= (sl+rm) alpha/(alpha-rm) violated");
  for (const auto& bi : b)
    if (bi.imag() == 0.0 && bi.real() >= spec.support_lo() && bi.real() <= spec.support_hi())
      throw InvalidArgument("decoupling_ratio: real b lies in the support of mu");

  DecouplingResult res;
  res.rhs = 1.0;
  for (const auto& aj : a) res.rhs *= std::pow(1.0 + std::abs(aj), s);
  for (const auto& bi : b) res.rhs /= std::pow(1.0 + std::abs(bi), r);

  if (a.empty() && b.empty()) {
    res.lhs = 1.0;
  } else {
    std::vector<double> cuts;
    for (const auto& aj : a) cuts.push_back(aj.real());
    for (const auto& bi : b) cuts.push_back(bi.real());
    auto f = [&](double v) {
      double num = 1.0, den = 1.0;
      for (const auto& aj : a) num *= std::pow(std::abs(cplx(v) - aj), s);
      for (const auto& bi : b) den *= std::pow(std::abs(cplx(v) - bi), r);
      return num / den;
    };
    res.lhs = integrate_density(spec, f, cuts);
  }
  res.ratio = res.lhs / res.rhs;
  return res;
}

DecouplingTrial decoupling_trial(const DisorderSpec& spec, double s, cplx a, cplx b) {
  std::vector<double> cuts{a.real(), b.real()};
  double num = integrate_density(
      spec, [&](double v) { return std::pow(std::abs(cplx(v) - b), -s); }, cuts);
  double den = integrate_density(
      spec, [&](double v) { return std::pow(std::abs(cplx(v) - a), s) * std::pow(std::abs(cplx(v) - b), -s); }, cuts);
  return {a, b, num, den, num / den};
}

DecouplingConstants estimate_decoupling_constants(const DisorderSpec& spec, double s, std::size_t trials,
                                                  std::uint64_t seed, const std::vector<cplx>& fixed_a) {
  spec.validate();
  if (trials == 0) throw InvalidArgument("estimate_decoupling_constants: no trials");
  if (!(s > 0.0 && s < spec.declared_alpha))
    throw InvalidArgument("estimate_decoupling_constants: s must lie in (0, alpha)");

  const double lo = spec.support_lo() - 1.0, hi = spec.support_hi() + 1.0;
  auto u = [&](std::uint64_t t, std::uint64_t k) { return to_unit_open(hash_key(seed, t, k, 0xdec0)); };

  DecouplingConstants out;
  for (std::size_t t = 0; t < trials; ++t) {
    cplx a;
    if (!fixed_a.empty()) {
      a = fixed_a[t % fixed_a.size()];
    } else {
      a = cplx(lo + (hi - lo) * u(t, 0), u(t, 1) < 0.5 ? 0.0 : std::pow(10.0, -4.0 + 4.0 * u(t, 2)));
    }
    double im = std::pow(10.0, -4.0 + 4.0 * u(t, 4));
    cplx b(lo + (hi - lo) * u(t, 3), u(t, 5) < 0.5 ? im : -im);
    out.trials.push_back(decoupling_trial(spec, s, a, b));
    if (out.trials.back().ratio > out.C_s) {
      out.C_s = out.trials.back().ratio;
      out.argmax = t;
    }
  }
  return out;
}

}  // namespace trimlab
