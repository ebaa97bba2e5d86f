#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "opgrowth/error.hpp"
#include "opgrowth/reduced.hpp"
#include "oracles.hpp"

using namespace opgrowth;
using namespace opgrowth::reduced;

namespace {

std::map<unsigned, double> reduced_occupancy_distribution(const protocol::ProtocolSchedule& s, long long trials,
                                                          std::uint64_t seed) {
  const auto& p = s.params;
  std::map<unsigned, double> dist;
  for (long long k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, "tv/" + std::to_string(k)));
    ReducedState st = ReducedState::seeded(p.d, p.m, p.q_star);
    for (const auto& layer : s.layers) {
      if (layer.kind == protocol::LayerKind::ZZGrow)
        apply_zz_reduced(st, layer.q, layer.duration, p.alpha, rng);
      else
        apply_depolarizer_reduced(st, rng);
    }
    unsigned mask = 0;
    for (const auto& [i, l] : st.occupied()) mask |= 1u << st.coord(i).first;
    dist[mask] += 1.0 / static_cast<double>(trials);
  }
  return dist;
}

}  // namespace

TEST_CASE("sinc sandwich") {
  for (double x = 0.0; x <= 4.4; x += 0.01) {
    auto b = sinc_bounds(x);
    CHECK(b.lower <= b.F + 1e-15);
    CHECK(b.F <= b.upper + 1e-15);
  }
  CHECK(sinc_bounds(0.0).F == 1.0);
  CHECK_THROWS_AS(sinc_bounds(-1.0), ContractError);
}

TEST_CASE("flip probability against quadrature and sampling") {
  const double cases[][3] = {{1.0, 1.0, 1.5}, {16.0, 16.0, 1.5}, {0.3, 2.0, 1.2}, {500.0, 4.0, 2.5}, {1e-4, 1.0, 1.0}};
  for (const auto& c : cases) {
    const double v = p1(c[0], c[1], c[2]);
    CHECK(v >= 0.0);
    CHECK(v <= 0.5 * (1.0 + 0.2173));
    CHECK(v == doctest::Approx(oracle::p1_quadrature(c[0], c[1], c[2])).epsilon(1e-9));
    auto mc = oracle::p1_monte_carlo(c[0], c[1], c[2], 200000, 99);
    CHECK(std::abs(mc.mean - v) <= 3.0 * mc.sigma + 1e-12);
  }
  CHECK(p1(0.0, 3.0, 1.5) == 0.0);
}

TEST_CASE("multi-neighbour flip probability matches the Markov chain") {
  for (double q : {0.0, 0.01, 0.2, 0.37, 0.5})
    for (int ell : {0, 1, 2, 5, 17, 60}) CHECK(std::abs(p_ell(q, ell) - oracle::p_ell_markov(q, ell)) < 1e-14);
  CHECK(p_ell(0.5, 1) == doctest::Approx(0.5));
  CHECK(p_ell(0.6, 2) == doctest::Approx(oracle::p_ell_markov(0.6, 2)));
  CHECK_THROWS_AS(p_ell(1.2, 2), ContractError);
  CHECK_THROWS_AS(p_ell(0.2, -1), ContractError);
  CHECK(p_star(0.1, 1.0) == doctest::Approx(0.1));
  CHECK(p_star(0.1, 2.0) == doctest::Approx(0.19));
}

TEST_CASE("analytic recursion at m = 21") {
  auto lam = analytic_lambda(21, 1, 4);
  REQUIRE(lam.size() == 4);
  const double eta11 = 1.0 - std::exp(-21.0 / 120.0);
  CHECK(lam[0] == doctest::Approx(1.0 / 30.0));
  CHECK(lam[1] == doctest::Approx(eta11 / 1800.0));
  CHECK(lam[2] == 0.0);
  CHECK(lam[3] == 0.0);

  auto t = analytic_recursion(protocol::make_params(1, 1.5, 21, 4));
  REQUIRE(t.rows.size() == 4);
  CHECK(t.at(1).eta1 == doctest::Approx(eta11));
  CHECK(t.at(1).eta1 == doctest::Approx(0.1605).epsilon(1e-3));
  CHECK(t.at(1).s == 1.0);
  CHECK(t.at(2).vacuous);
  for (const auto& r : t.rows) {
    CHECK(r.eta1 >= 0.0);
    CHECK(r.eta1 <= 1.0);
    CHECK(r.p1 >= 0.0);
    CHECK(r.p1 <= 0.5 * (1.0 + 0.2173));
    CHECK(r.p_star >= 0.0);
    CHECK(r.p_star <= 1.0);
  }
  CHECK(t.floor_eta == 0.0);
  CHECK(t.floor_product >= 0.0);
  CHECK(t.floor_product <= 1.0);
}

TEST_CASE("analytic recursion in the non-vacuous regime") {
  auto lam = analytic_lambda(50000, 1, 3);
  CHECK(lam[0] == doctest::Approx(1.0 / 30.0));
  CHECK(lam[1] > 0.0);
  CHECK(lam[2] > 0.0);
  CHECK(lam[1] < lam[0]);
  auto t = analytic_recursion(protocol::make_params(1, 1.5, 50000, 2));
  CHECK_FALSE(t.at(2).vacuous);
  CHECK(t.floor_eta > 0.99);
}

TEST_CASE("hierarchical coordinates") {
  for (int d : {1, 2}) {
    ReducedState st(d, 3, 2);
    const long long side = 9;
    CHECK(st.site_count() == (d == 1 ? side : side * side));
    std::set<std::pair<long long, long long>> seen;
    for (long long i = 0; i < st.site_count(); ++i) {
      auto c = st.coord(i);
      CHECK(st.index_of(c.first, c.second) == i);
      seen.insert(c);
    }
    CHECK(static_cast<long long>(seen.size()) == st.site_count());
    const long long block = d == 1 ? 3 : 9;
    for (long long b = 0; b < st.site_count() / block; ++b) {
      auto c0 = st.coord(b * block);
      for (long long i = b * block; i < (b + 1) * block; ++i) {
        auto c = st.coord(i);
        CHECK(c.first / 3 == c0.first / 3);
        CHECK(c.second / 3 == c0.second / 3);
      }
    }
  }
}

TEST_CASE("state bookkeeping") {
  auto st = ReducedState::seeded(1, 4, 2);
  CHECK(st.occupancy() == 1);
  CHECK(st.nu_count() == 1);
  CHECK(st.diameter() == 0);
  CHECK(st.label(0) == SiteLabel::NuXY);
  CHECK(st.label(3) == SiteLabel::Identity);
  st.set_occupied({{9, SiteLabel::ZOnly}, {2, SiteLabel::NuXY}});
  CHECK(st.occupancy() == 2);
  CHECK(st.nu_count() == 1);
  CHECK(st.diameter() == 9);
  CHECK(st.occupied().front().first == 2);
  CHECK_THROWS(st.set_occupied({{16, SiteLabel::NuXY}}));

  ReducedState sq(2, 3, 1);
  sq.set_occupied({{sq.index_of(2, 2), SiteLabel::NuXY}});
  CHECK(sq.diameter() == 4);
}

TEST_CASE("depolarizer assigns NuXY with probability two thirds") {
  ReducedState st(1, 10, 3);
  std::vector<std::pair<long long, SiteLabel>> occ;
  for (long long i = 0; i < 1000; ++i) occ.push_back({i, SiteLabel::ZOnly});
  Rng rng(3);
  std::vector<long long> counts{0, 0};
  for (int rep = 0; rep < 30; ++rep) {
    st.set_occupied(occ);
    apply_depolarizer_reduced(st, rng);
    CHECK(st.occupancy() == 1000);
    counts[0] += st.nu_count();
    counts[1] += 1000 - st.nu_count();
  }
  CHECK(oracle::chi_square(counts, {2.0 / 3.0, 1.0 / 3.0}) < 10.83);
}

TEST_CASE("ZZ layer leaves a lone NuXY site unchanged") {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    auto st = ReducedState::seeded(1, 4, 2);
    apply_zz_reduced(st, 2, 1e6, 1.5, rng);
    CHECK(st.occupancy() >= 1);
    CHECK(st.label(0) == SiteLabel::NuXY);
    for (const auto& [i, l] : st.occupied())
      if (i != 0) CHECK(l == SiteLabel::ZOnly);
  }
  auto st = ReducedState::seeded(1, 4, 2);
  st.set_occupied({{0, SiteLabel::ZOnly}});
  apply_zz_reduced(st, 2, 1e6, 1.5, rng);
  CHECK(st.occupancy() == 1);
}

TEST_CASE("reduced process matches the exact averaged channel") {
  auto p = protocol::make_params(1, 1.5, 2, 2, 41);
  auto s = protocol::assemble(p);
  auto exact = oracle::exact_occupancy_distribution(s);
  double total = 0.0;
  for (const auto& [k, v] : exact) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  auto sampled = reduced_occupancy_distribution(s, 100000, 43);
  CHECK(oracle::total_variation(exact, sampled) < 0.02);
}

TEST_CASE("trial trajectory layout") {
  auto p = protocol::make_params(1, 1.5, 5, 3, 8);
  Rng rng(1);
  auto traj = run_trial(p, rng);
  CHECK(traj.size() == (1u << 4) - 1);
  CHECK(traj[0].occupancy == 1);
  CHECK(traj[0].nu == 1);
  CHECK(level_end_index(0) == 0);
  CHECK(level_end_index(1) == 2);
  CHECK(level_end_index(3) == 14);
  CHECK(level_end_index(3) == static_cast<int>(traj.size()) - 1);
  for (std::size_t k = 1; k < traj.size(); k += 2)
    if (k + 1 < traj.size()) CHECK(traj[k + 1].occupancy == traj[k].occupancy);
}

TEST_CASE("Wilson interval") {
  auto w = wilson_interval(8, 10);
  CHECK(w.estimate == doctest::Approx(0.8));
  CHECK(w.lower == doctest::Approx(0.4902).epsilon(1e-3));
  CHECK(w.upper == doctest::Approx(0.9433).epsilon(1e-3));
  auto z = wilson_interval(0, 10);
  CHECK(z.lower == 0.0);
  CHECK(z.upper > 0.0);
  CHECK(wilson_interval(10, 10).upper == doctest::Approx(1.0));
  CHECK_THROWS_AS(wilson_interval(0, 0), ContractError);
}

TEST_CASE("Monte Carlo is independent of the thread count") {
  auto p = protocol::make_params(1, 1.5, 6, 3, 12);
  auto a = run_monte_carlo(p, 40, 0.0, 0.0, 1);
  auto b = run_monte_carlo(p, 40, 0.0, 0.0, 3);
  REQUIRE(a.trajectories.size() == b.trajectories.size());
  for (std::size_t k = 0; k < a.trajectories.size(); ++k)
    for (std::size_t i = 0; i < a.trajectories[k].size(); ++i) {
      CHECK(a.trajectories[k][i].occupancy == b.trajectories[k][i].occupancy);
      CHECK(a.trajectories[k][i].diameter == b.trajectories[k][i].diameter);
    }
  CHECK(a.success.successes == b.success.successes);
  CHECK(a.success.successes == 40);
  auto e = estimate_success(p, 40, 2.0, 0.0, 2);
  CHECK(e.successes == 0);
}
