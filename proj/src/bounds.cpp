#include "opgrowth/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "json.hpp"
#include "opgrowth/error.hpp"
#include "opgrowth/scale.hpp"

namespace opgrowth::bounds {

namespace {

constexpr long long kTailCutoff = 1000000;
constexpr int kCachedLevels = 20;  // j0 = 2^0 .. 2^19
const double kLn2 = std::numbers::ln2;

struct PowerSums {
  // Sums over m in [2^l, M] of m^{1-2a} and m^{-2a}.
  std::vector<double> s1, s0;
};

const PowerSums& cached_power_sums(double alpha) {
  static std::mutex mu;
  static std::unordered_map<double, PowerSums> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  PowerSums ps;
  ps.s1.assign(kCachedLevels, 0.0);
  ps.s0.assign(kCachedLevels, 0.0);
  double a1 = 0.0, a0 = 0.0;
  int level = kCachedLevels - 1;
  for (long long m = kTailCutoff; m >= 1; --m) {
    const double md = static_cast<double>(m);
    const double v0 = std::pow(md, -2.0 * alpha);
    a0 += v0;
    a1 += v0 * md;
    while (level >= 0 && m == (1LL << level)) {
      ps.s1[level] = a1;
      ps.s0[level] = a0;
      --level;
    }
  }
  return cache.emplace(alpha, std::move(ps)).first->second;
}

double remainder_integral(double alpha, long long j0, long long M) {
  const double m = static_cast<double>(M);
  const double a2 = 2.0 * alpha;
  return std::pow(m, 2.0 - a2) / (a2 - 2.0) - static_cast<double>(j0 - 1) * std::pow(m, 1.0 - a2) / (a2 - 1.0);
}

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

double entropy_term(double p) {
  if (p <= 0.0) return 0.0;
  return p * (1.0 - 0.5 * std::log(p));
}

double printed_closed_form(double alpha, int qs, double C) {
  if (alpha == 2.0) return C * (qs + 1) * (4.0 + (1.0 + qs / 2.0) * kLn2);
  const double y = std::pow(2.0, 2.0 - alpha);
  const double yq = std::pow(y, qs);
  return C / ((1.0 - y) * (1.0 - y)) *
         ((4.0 + kLn2) * (y - 1.0) * (yq - 1.0) + kLn2 * (yq + qs - (1.0 + qs) * y));
}

}  // namespace

TailSum pair_tail_sum(double alpha, long long j0) {
  if (!(alpha > 1.0)) throw ContractError("tail sums diverge for alpha <= 1");
  if (j0 < 1) throw ContractError("j0 must be positive");
  TailSum t;
  if (is_power_of_two(j0) && j0 < (1LL << kCachedLevels) && 4 * j0 <= kTailCutoff) {
    const auto& ps = cached_power_sums(alpha);
    const int l = std::countr_zero(static_cast<unsigned long long>(j0));
    t.cutoff = kTailCutoff;
    t.partial = ps.s1[l] - static_cast<double>(j0 - 1) * ps.s0[l];
  } else {
    t.cutoff = std::max(kTailCutoff, 4 * j0);
    double acc = 0.0;
    for (long long m = t.cutoff; m >= j0; --m) {
      const double md = static_cast<double>(m);
      acc += static_cast<double>(m - j0 + 1) * std::pow(md, -2.0 * alpha);
    }
    t.partial = acc;
  }
  t.remainder_bound = remainder_integral(alpha, j0, t.cutoff);
  return t;
}

RateConstant scale_rate_constant(double alpha, int q) {
  if (!(alpha > 1.0)) throw ContractError("rate constant needs alpha > 1");
  if (q < 0) throw ContractError("negative scale");
  RateConstant rc;
  rc.j0 = q == 0 ? 1 : (1LL << (q - 1));
  rc.tail = pair_tail_sum(alpha, rc.j0);
  rc.value = 36.0 * std::numbers::e * std::pow(2.0, q * (alpha - 1.0)) * std::sqrt(rc.tail.upper());
  return rc;
}

std::string frobenius_regime(double alpha) {
  if (alpha > 2.0) return "alpha>2";
  if (alpha == 2.0) return "alpha=2";
  return "1<alpha<2";
}

namespace {

void check_frobenius_inputs(double alpha, int R) {
  if (!(alpha > 1.0)) throw ContractError("Frobenius bound needs alpha > 1");
  scale::max_scale(R);
}

RateBound rate_bound_impl(double alpha, int R, const Profile* profile) {
  check_frobenius_inputs(alpha, R);
  RateBound rb;
  rb.q_star = scale::max_scale(R);
  double cmax = 0.0;
  for (int q = 0; q <= rb.q_star; ++q) {
    const double C = scale_rate_constant(alpha, q).value;
    cmax = std::max(cmax, C);
    rb.constants.push_back(C);
    double inner;
    if (profile) {
      if (static_cast<int>(profile->size()) <= q) throw DimensionError("profile misses a scale");
      inner = 0.0;
      for (double p : (*profile)[q]) inner += entropy_term(p);
    } else {
      inner = 2.0 + (rb.q_star - q) * kLn2;
    }
    const double term = 2.0 * C * inner * std::pow(2.0, -q * (alpha - 2.0));
    rb.per_scale.push_back(term);
    rb.value += term;
  }
  rb.printed_closed_form = printed_closed_form(alpha, rb.q_star, cmax);
  return rb;
}

}  // namespace

RateBound frobenius_front_rate_bound(double alpha, int R) { return rate_bound_impl(alpha, R, nullptr); }

RateBound frobenius_front_rate_bound(double alpha, int R, const Profile& profile) {
  return rate_bound_impl(alpha, R, &profile);
}

double frobenius_lightcone_time(double alpha, int R, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ContractError("delta must lie in (0, 1]");
  return delta * delta * R / frobenius_front_rate_bound(alpha, R).value;
}

BoundReport frobenius_report(double alpha, int R, double delta) {
  BoundReport rep;
  rep.kind = "frobenius";
  rep.regime = frobenius_regime(alpha);
  rep.inputs = {{"alpha", alpha}, {"d", 1}, {"R", R}, {"r", R}, {"delta", delta}};
  RateBound rb = frobenius_front_rate_bound(alpha, R);
  rep.bound = frobenius_lightcone_time(alpha, R, delta);
  rep.constants["q_star"] = rb.q_star;
  rep.constants["rate_bound"] = rb.value;
  rep.constants["printed_closed_form_rate"] = rb.printed_closed_form;
  double growth = alpha > 2.0 ? std::log(R) : alpha == 2.0 ? std::pow(std::log(R), 2) : std::pow(R, 2.0 - alpha);
  rep.constants["K_alpha_effective"] = rb.value / growth;
  rep.tables["C_q"] = rb.constants;
  rep.tables["rate_per_scale"] = rb.per_scale;
  std::vector<double> partial, remainder;
  for (int q = 0; q <= rb.q_star; ++q) {
    auto rc = scale_rate_constant(alpha, q);
    partial.push_back(rc.tail.partial);
    remainder.push_back(rc.tail.remainder_bound);
  }
  rep.tables["tail_partial"] = partial;
  rep.tables["tail_remainder_bound"] = remainder;
  rep.notes.push_back("rate bound uses the uniform worst-case occupancy profile with per-scale constants C_q");
  rep.notes.push_back("printed_closed_form_rate is reported for comparison and is not a valid upper bound");
  return rep;
}

int pnorm_q_star(double r) {
  if (!(r >= 4.0)) throw ContractError("p-norm constants need r >= 4");
  int q = 0;
  while (std::ldexp(1.0, q + 1) < r) ++q;
  return q;
}

double script_R(double alpha, double r) {
  if (!(alpha > 1.5)) throw ContractError("p-norm light cone needs alpha > 3/2");
  if (std::abs(alpha - 2.5) < 1e-12) return r / std::pow(std::log(r), 1.5);
  if (alpha > 2.5) return r;
  return std::pow(r, alpha - 1.5);
}

PnormConstants pnorm_constants(double alpha, double r) { return pnorm_constants(alpha, r, pnorm_q_star(r)); }

PnormConstants pnorm_constants(double alpha, double r, int q_star) {
  if (!(alpha > 1.5)) throw ContractError("p-norm constants need alpha > 3/2");
  if (!(r >= 4.0)) throw ContractError("p-norm constants need r >= 4");
  PnormConstants pc;
  pc.q_star = q_star;
  const double expo = (alpha - 2.5) * 2.0 / 3.0;
  for (int q = 0; q <= q_star; ++q) pc.weights.push_back(std::pow(2.0, -q * expo));
  for (double w : pc.weights) pc.M += w;
  for (int q = 0; q <= q_star; ++q)
    pc.N.push_back(static_cast<long long>(std::ceil(0.5 * pc.weights[q] / pc.M * r / std::ldexp(1.0, q + 1))));
  pc.q1 = -1;
  for (int q = 0; q < 4096; ++q)
    if (pc.M / r >= 0.25 * std::pow(2.0, -q * (alpha - 1.0) * 2.0 / 3.0)) {
      pc.q1 = q;
      break;
    }
  pc.script_R = script_R(alpha, r);
  pc.regime = std::abs(alpha - 2.5) < 1e-12 ? "alpha=5/2" : alpha > 2.5 ? "alpha>5/2" : "3/2<alpha<5/2";
  return pc;
}

double pnorm_lightcone_time(double alpha, double r, double p, double delta, double c_prime) {
  if (!(p >= 2.0)) throw ContractError("p-norm light cone needs p >= 2");
  if (!(delta >= 0.0)) throw ContractError("delta must be non-negative");
  return delta * std::sqrt(p) * c_prime * script_R(alpha, r);
}

BoundReport pnorm_report(double alpha, double r, double p, double delta, double c_prime) {
  BoundReport rep;
  rep.kind = "pnorm";
  PnormConstants pc = pnorm_constants(alpha, r);
  rep.regime = pc.regime;
  rep.inputs = {{"alpha", alpha}, {"d", 1}, {"r", r}, {"p", p}, {"delta", delta}};
  rep.bound = pnorm_lightcone_time(alpha, r, p, delta, c_prime);
  rep.constants = {{"q_star", pc.q_star}, {"M", pc.M}, {"q1", pc.q1}, {"script_R", pc.script_R},
                   {"c_prime", c_prime}, {"k_window", 1.0}};
  std::vector<double> N(pc.N.begin(), pc.N.end());
  rep.tables["N_q"] = N;
  rep.structural = {"c_prime", "k_window"};
  rep.notes.push_back("validity window t <= k * script_R(r) reported with k = 1");
  return rep;
}

double concentration_exponent(double alpha, double delta_exp) {
  if (!(alpha > 2.0 && alpha < 3.0)) throw ContractError("concentration bound needs 2 < alpha < 3");
  return std::min(1.0, 6.0 - 2.0 * alpha) - delta_exp;
}

double concentration_bound(double alpha, double r, double epsilon, double C, double delta_exp) {
  if (epsilon < 0.0) throw ContractError("epsilon must be non-negative");
  const double beta = concentration_exponent(alpha, delta_exp);
  const double v = std::exp(2.0 - epsilon * epsilon * C * std::pow(r, beta));
  return std::clamp(v, 0.0, 1.0);
}

BoundReport concentration_report(double alpha, double r, double epsilon, double C, double delta_exp) {
  BoundReport rep;
  rep.kind = "concentration";
  rep.regime = "2<alpha<3";
  rep.inputs = {{"alpha", alpha}, {"d", 1}, {"r", r}, {"epsilon", epsilon}};
  rep.bound = concentration_bound(alpha, r, epsilon, C, delta_exp);
  rep.constants = {{"beta", concentration_exponent(alpha, delta_exp)}, {"C", C}, {"delta_exp", delta_exp}};
  rep.structural = {"C"};
  return rep;
}

double typical_state_tail(double pnorm_value, double a, double p) {
  if (!(a > 0.0)) throw ContractError("threshold must be positive");
  if (!(p >= 1.0)) throw ContractError("p must be at least 1");
  if (pnorm_value < 0.0) throw ContractError("norm must be non-negative");
  return std::clamp(std::pow(pnorm_value / a, p), 0.0, 1.0);
}

std::string BoundReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["regime"] = regime;
  j["inputs"] = inputs;
  j["bound"] = bound;
  j["constants"] = constants;
  j["tables"] = tables;
  j["structural"] = structural;
  j["notes"] = notes;
  return j.dump(indent);
}

std::string BoundReport::csv_header() const {
  std::string h = "alpha,d,r,regime,bound";
  for (const auto& [k, v] : constants) h += "," + k;
  return h;
}

std::string BoundReport::csv_row() const {
  auto get = [this](const char* k) {
    auto it = inputs.find(k);
    return it == inputs.end() ? 0.0 : it->second;
  };
  char buf[64];
  std::string row;
  std::snprintf(buf, sizeof buf, "%.17g,%g,%.17g,", get("alpha"), get("d"), get("r"));
  row += buf;
  row += regime;
  std::snprintf(buf, sizeof buf, ",%.17g", bound);
  row += buf;
  for (const auto& [k, v] : constants) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    row += buf;
  }
  return row;
}

}  // namespace opgrowth::bounds
