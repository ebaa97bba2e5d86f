#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "opgrowth/bounds.hpp"
#include "opgrowth/protocol.hpp"
#include "opgrowth/reduced.hpp"
#include "opgrowth/verifier.hpp"
#include "oracles.hpp"

using namespace opgrowth;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_budget = secs < budget_s;
  const bool pass = o.pass && in_budget;
  failures += !pass;
  std::printf("[%s] criterion %d: %s | %s | %.2fs (budget %.0fs%s)\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs, budget_s, in_budget ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

WeightedPauliSum random_sum(int n, Rng& rng) {
  std::uniform_int_distribution<int> letter(0, 3), count(1, 6);
  std::normal_distribution<double> g(0.0, 1.0);
  WeightedPauliSum s(n);
  const int terms = count(rng);
  for (int t = 0; t < terms; ++t) {
    PauliString p(n);
    for (int i = 0; i < n; ++i) p.set_letter_code(i, letter(rng));
    s.add(p, cplx(g(rng), g(rng)));
  }
  return s;
}

Outcome depolarizer() {
  auto rep = verifier::check_depolarizer_group();
  const bool order = depolarizer_group().size() == 48;
  return {rep.pass && order && rep.max_slack < 1e-12,
          "|G|=" + std::to_string(depolarizer_group().size()) + " max_dev=" + fmt(rep.max_slack)};
}

Outcome flip_probabilities() {
  bool ok = true;
  double worst_z = 0.0;
  const double cases[][3] = {{1.0, 1.0, 1.5}, {16.0, 16.0, 1.5}, {40.0, 8.0, 2.0}, {3.0, 4.0, 2.5}, {1e3, 21.0, 1.5}};
  std::uint64_t seed = 1;
  for (const auto& c : cases) {
    const double p = reduced::p1(c[0], c[1], c[2]);
    auto mc = oracle::p1_monte_carlo(c[0], c[1], c[2], 1000000, seed++);
    const double z = std::abs(mc.mean - p) / mc.sigma;
    worst_z = std::max(worst_z, z);
    ok = ok && z <= 3.0;
  }
  double worst_markov = 0.0;
  for (double q : {0.0, 0.013, 0.1, 0.25, 0.4, 0.5})
    for (int ell = 0; ell <= 64; ++ell)
      worst_markov = std::max(worst_markov, std::abs(reduced::p_ell(q, ell) - oracle::p_ell_markov(q, ell)));
  ok = ok && worst_markov <= 1e-14;
  int sandwich_bad = 0, points = 0;
  for (double tau = 0.0; tau <= 8.0; tau += 0.01) {
    auto b = reduced::sinc_bounds(4.0 * tau / std::pow(4.0, 1.5));
    sandwich_bad += b.F < b.lower - 1e-15 || b.F > b.upper + 1e-15;
    ++points;
  }
  ok = ok && sandwich_bad == 0;
  return {ok, "max_z=" + fmt(worst_z) + " markov_dev=" + fmt(worst_markov) + " sandwich_violations=" +
                  std::to_string(sandwich_bad) + "/" + std::to_string(points)};
}

Outcome inequality_suites() {
  const std::uint64_t seed = 2024;
  std::vector<verifier::CheckReport> reps;
  reps.push_back(verifier::check_uniform_smoothness(0, 0, {2.0, 3.0, 4.0, 6.0}, 10000, seed));
  reps.push_back(verifier::check_holder(10000, seed));
  reps.push_back(verifier::check_riesz_thorin(10000, seed));
  reps.push_back(verifier::check_nc_convexity(0, 0, {2.0, 3.0, 4.0, 6.0}, 10000, seed));
  reps.push_back(verifier::check_submultiplicativity(8, 2.0, 1000, seed, 2));
  reps.push_back(verifier::check_submultiplicativity(8, 2.0, 1000, seed, 3, {2.0, 4.0}));
  bool ok = true;
  std::string detail;
  for (const auto& r : reps) {
    ok = ok && r.pass;
    detail += r.name + "(" + std::to_string(r.trials) + ")=" + fmt(r.max_slack) + " ";
  }
  return {ok, detail + "tol=" + fmt(verifier::kRelTol)};
}

Outcome oracle_equivalence() {
  struct Shape {
    int d, m, q;
  };
  const Shape shapes[] = {{1, 2, 1}, {1, 3, 1}, {1, 2, 2}, {2, 2, 1}, {1, 5, 1}, {1, 6, 1}};
  Rng rng(77);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  double max_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto& sh = shapes[k % 6];
    auto p = protocol::make_params(sh.d, sh.d + frac(rng), sh.m, sh.q, derive_seed(5, "c4/" + std::to_string(k)));
    auto s = protocol::assemble(p);
    protocol::materialize(s);
    const int n = static_cast<int>(p.site_count());
    auto a = random_sum(n, rng);
    auto exact = protocol::simulate_exact(s, a);
    auto br = protocol::simulate_pauli_branching(s, a, 0.0);
    max_err = std::max(max_err, br.op.max_abs_difference(exact));
  }

  auto p = protocol::make_params(1, 1.5, 2, 2, 41);
  auto s = protocol::assemble(p);
  auto exact = oracle::exact_occupancy_distribution(s);
  const long long trials = 100000;
  std::map<unsigned, double> sampled;
  for (long long k = 0; k < trials; ++k) {
    Rng r = make_rng(p.seed, "tv/" + std::to_string(k));
    auto st = reduced::ReducedState::seeded(p.d, p.m, p.q_star);
    for (const auto& layer : s.layers) {
      if (layer.kind == protocol::LayerKind::ZZGrow)
        reduced::apply_zz_reduced(st, layer.q, layer.duration, p.alpha, r);
      else
        reduced::apply_depolarizer_reduced(st, r);
    }
    unsigned mask = 0;
    for (const auto& [i, l] : st.occupied()) mask |= 1u << st.coord(i).first;
    sampled[mask] += 1.0 / trials;
  }
  const double tv = oracle::total_variation(exact, sampled);
  return {max_err < 1e-9 && tv < 0.02,
          "schedules=100 max_coeff_err=" + fmt(max_err) + " tv=" + fmt(tv) + " (trials=" + std::to_string(trials) + ")"};
}

Outcome markov_front() {
  std::vector<double> grid;
  for (int k = 0; k < 20; ++k) grid.push_back(2.0 * k / 19.0);
  const std::pair<double, int> plan[] = {{1.5, 7}, {2.0, 7}, {3.0, 6}};
  bool ok = true;
  int hamiltonians = 0;
  double markov = -kInf, rate = -kInf, ratio = 0.0;
  for (const auto& [alpha, count] : plan) {
    auto rep = verifier::check_markov_front(10, alpha, grid, count, 31);
    ok = ok && rep.pass;
    hamiltonians += count;
    markov = std::max(markov, rep.extras.at("markov_max_slack"));
    rate = std::max(rate, rep.extras.at("rate_max_slack"));
    ratio = std::max(ratio, rep.extras.at("max_rate_ratio"));
  }
  return {ok, "hamiltonians=" + std::to_string(hamiltonians) + " points=20 markov_slack=" + fmt(markov) +
                  " rate_slack=" + fmt(rate) + " max_rate/bound=" + fmt(ratio)};
}

Outcome branch_exponents() {
  std::vector<double> Rs, t15, t25c;
  for (int k = 7; k <= 13; ++k) {
    const int R = (1 << k) - 1;
    Rs.push_back(R);
    t15.push_back(bounds::frobenius_lightcone_time(1.5, R, 0.5));
    t25c.push_back(bounds::frobenius_lightcone_time(2.5, R, 0.5) * std::log(static_cast<double>(R)));
  }
  const double s15 = protocol::fit_loglog_slope(Rs, t15);
  const double s25 = protocol::fit_loglog_slope(Rs, t25c);
  bool table = true;
  for (double r : {16.0, 1e3, 1e4, 1e6}) {
    table = table && bounds::script_R(3.0, r) == r;
    table = table && std::abs(bounds::script_R(2.0, r) - std::sqrt(r)) <= 1e-12 * std::sqrt(r);
    const double e25 = r / std::pow(std::log(r), 1.5);
    table = table && std::abs(bounds::script_R(2.5, r) - e25) <= 1e-12 * e25;
  }
  const bool ok = std::abs(s15 - 0.5) <= 0.05 && std::abs(s25 - 1.0) <= 0.05 && table;
  return {ok, "slope(alpha=1.5)=" + fmt(s15) + " target 0.5+-0.05; compensated slope(alpha=2.5)=" + fmt(s25) +
                  " target 1+-0.05; script_R table " + (table ? "exact" : "mismatch")};
}

Outcome runtime_scaling() {
  auto grid = protocol::geometric_grid(1e3, 1e6, 31);
  auto pts = protocol::runtime_scaling(1.5, 1, grid);
  std::vector<double> r, t;
  bool bounded = true;
  for (const auto& p : pts) {
    r.push_back(p.r);
    t.push_back(p.t);
    bounded = bounded && p.t < std::pow(2.0, p.q_star + 1) * p.tau_top;
  }
  const double slope = protocol::fit_loglog_slope(r, t);
  return {std::abs(slope - 0.5) <= 0.1 && bounded,
          "slope=" + fmt(slope) + " target 0.5+-0.1; t<2^(q*+1)tau " + (bounded ? "holds" : "violated")};
}

Outcome protocol_growth() {
  auto p = protocol::make_params(1, 1.5, 21, 4, 2025);
  const auto table = reduced::analytic_recursion(p);
  const double lambda = table.at(4).lambda1;
  const double eta = table.at(4).eta1;
  const double min_diam = p.R(4) / p.m;
  const long long trials = 1000;
  auto mc = reduced::run_monte_carlo(p, trials, lambda, min_diam, threads());
  bool increasing = true;
  std::string levels;
  for (int q = 0; q <= 4; ++q) {
    double mean = 0.0;
    for (const auto& tr : mc.trajectories) mean += static_cast<double>(tr[reduced::level_end_index(q)].occupancy);
    levels += fmt(mean / trials) + (q < 4 ? "," : "");
  }
  double worst_lower = kInf;
  for (int q = 0; q < 4; ++q) {
    const auto a = static_cast<std::size_t>(reduced::level_end_index(q));
    const auto b = static_cast<std::size_t>(reduced::level_end_index(q + 1));
    double sum = 0.0, sum2 = 0.0;
    for (const auto& tr : mc.trajectories) {
      const double d = static_cast<double>(tr[b].occupancy - tr[a].occupancy);
      sum += d;
      sum2 += d * d;
    }
    const double mean = sum / trials;
    const double var = std::max(0.0, (sum2 - trials * mean * mean) / (trials - 1));
    const double lower = mean - 1.959963984540054 * std::sqrt(var / trials);
    worst_lower = std::min(worst_lower, lower);
    increasing = increasing && lower > 0.0;
  }
  const bool success = mc.success.estimate >= eta;
  return {success && increasing, "success=" + fmt(mc.success.estimate) + " [" + fmt(mc.success.lower) + "," +
                                     fmt(mc.success.upper) + "] eta_1,4=" + fmt(eta) +
                                     (table.at(4).vacuous ? " (vacuous)" : "") + " mean_occupancy=" + levels +
                                     " min_increase_lower95=" + fmt(worst_lower)};
}

Outcome inclusion_exclusion() {
  bool ok = true;
  int cases = 0;
  for (int N = 1; N <= 12; ++N)
    for (int M = N; M <= 12; ++M) {
      ok = ok && verifier::inclusion_exclusion_count(N, M) == 1;
      ++cases;
    }
  for (int N = 1; N <= 12; ++N) ok = ok && verifier::check_inclusion_exclusion(N, 12).pass;
  return {ok, "cases=" + std::to_string(cases) + " all equal 1"};
}

}  // namespace

int main() {
  criterion(1, "depolarizer group identities", 1.0, depolarizer);
  criterion(2, "flip probability formulas", 10.0, flip_probabilities);
  criterion(3, "inequality suites", 300.0, inequality_suites);
  criterion(4, "oracle equivalence", 600.0, oracle_equivalence);
  criterion(5, "Markov step and front rate bound", 900.0, markov_front);
  criterion(6, "bound branch exponents", 1.0, branch_exponents);
  criterion(7, "protocol runtime scaling", 1.0, runtime_scaling);
  criterion(8, "protocol growth Monte Carlo", 300.0, protocol_growth);
  criterion(9, "inclusion-exclusion identity", 1.0, inclusion_exclusion);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
