#include "opgrowth/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "opgrowth/error.hpp"

namespace opgrowth::reduced {

SincBounds sinc_bounds(double x) {
  if (x < 0.0) throw ContractError("sinc bounds need x >= 0");
  SincBounds b;
  b.F = x == 0.0 ? 1.0 : std::sin(x) / x;
  const double x2 = x * x;
  b.lower = 1.0 - x2 / 6.0;
  b.upper = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  if (x2 <= 20.0 && (b.F < b.lower - 1e-15 || b.F > b.upper + 1e-15))
    throw ContractError("Taylor sandwich violated");
  return b;
}

double p1(double tau, double length, double alpha) {
  if (tau < 0.0) throw ContractError("tau must be non-negative");
  if (!(length > 0.0)) throw ContractError("length must be positive");
  const double x = 4.0 * tau / std::pow(length, alpha);
  const double F = x == 0.0 ? 1.0 : std::sin(x) / x;
  return 0.5 * (1.0 - F);
}

double p_ell(double p1v, long long ell) {
  if (p1v < 0.0 || p1v > 1.0) throw ContractError("p1 must be a probability");
  if (ell < 0) throw ContractError("ell must be non-negative");
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 * p1v, static_cast<double>(ell)));
}

namespace {

double p_ell_real(double p1v, double ell) { return 0.5 * (1.0 - std::pow(1.0 - 2.0 * p1v, ell)); }

struct CoreRow {
  double lambda1, eta1, eta2, eta3, s;
  bool vacuous;
};

double clamp01(double v, bool& vacuous) {
  if (v <= 0.0) vacuous = true;
  return std::clamp(v, 0.0, 1.0);
}

// Rows for q = 1..q_max; s_of(q, lambda_{1,q-1}) gives the occupancy assumed at scale q.
std::vector<CoreRow> recursion_core(int m, int d, int q_max, const std::function<double(int, double)>& s_of) {
  const double md = std::pow(static_cast<double>(m), d);
  std::vector<CoreRow> rows;
  CoreRow r1{};
  r1.lambda1 = 1.0 / 30.0;
  r1.vacuous = false;
  r1.eta1 = clamp01(1.0 - std::exp(-md / 120.0), r1.vacuous);
  r1.s = s_of(1, 0.0);
  rows.push_back(r1);
  for (int q = 1; q <= q_max; ++q) {
    CoreRow& prev = rows.back();
    // eta_{2,q} and eta_{3,q} close row q and feed scale q+1.
    const double s_next = s_of(q + 1, prev.lambda1);
    prev.eta2 = clamp01(1.0 - std::exp(-md / 120.0) - std::exp(-s_next / 72.0), prev.vacuous);
    prev.eta3 = clamp01(1.0 - std::exp(-(md / 30.0) * prev.eta1 / 8.0), prev.vacuous);
    if (q == q_max) break;
    CoreRow next{};
    next.vacuous = false;
    next.lambda1 = prev.eta1 * prev.lambda1 / 60.0;
    next.eta1 = clamp01(prev.eta1 * prev.eta2 * prev.eta3, next.vacuous);
    next.s = s_next;
    rows.push_back(next);
  }
  return rows;
}

}  // namespace

double p_star(double p_ellv, double cube_size) {
  if (!(cube_size >= 1.0)) throw ContractError("cube size must be at least 1");
  if (p_ellv < 0.0 || p_ellv > 1.0) throw ContractError("p_ell must be a probability");
  return 1.0 - std::pow(1.0 - p_ellv, cube_size);
}

std::vector<double> analytic_lambda(int m, int d, int q_max) {
  if (q_max < 1) throw ContractError("q must be at least 1");
  auto default_s = [m, d](int q, double lambda_prev) {
    if (q == 1) return 1.0;
    return std::max(1.0, lambda_prev * std::pow(static_cast<double>(m), static_cast<double>(d) * (q - 1)));
  };
  auto rows = recursion_core(m, d, q_max, default_s);
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.lambda1);
  return out;
}

RecursionTable analytic_recursion(const protocol::ProtocolParams& params) {
  const int m = params.m, d = params.d, qs = params.q_star;
  auto s_of = [&params](int q, double lambda_prev) {
    if (q <= params.q_star) return protocol::occupancy_assumption(params, q);
    return std::max(1.0, lambda_prev * params.cube_volume(q - 1));
  };
  auto core = recursion_core(m, d, qs, s_of);
  RecursionTable t;
  for (int q = 1; q <= qs; ++q) {
    const CoreRow& c = core[q - 1];
    RecursionRow row;
    row.q = q;
    row.lambda1 = c.lambda1;
    row.eta1 = c.eta1;
    row.eta2 = c.eta2;
    row.eta3 = c.eta3;
    row.s = c.s;
    row.vacuous = c.vacuous;
    row.tau = protocol::tau(params, q, c.s);
    row.p1 = p1(row.tau, d * params.R(q), params.alpha);
    row.p_star = p_star(p_ell_real(row.p1, c.s / 2.0), params.cube_volume(q - 1));
    t.rows.push_back(row);
  }
  const double md = std::pow(static_cast<double>(m), d);
  t.floor_eta = std::max(0.0, 1.0 - 3.0 * qs * std::exp(-md / 2160.0));
  t.floor_product =
      std::pow(std::max(0.0, 1.0 - std::exp(-md / 480.0) - std::exp(-md / 120.0) - std::exp(-md / 2160.0)), qs);
  return t;
}

ReducedState::ReducedState(int d, int m, int q_star) : d_(d), m_(m), q_star_(q_star) {
  if (d != 1 && d != 2) throw ContractError("dimension must be 1 or 2");
  if (m < 2 || q_star < 1) throw ContractError("invalid branching or depth");
  const double v = std::pow(static_cast<double>(m), static_cast<double>(d) * q_star);
  if (v > 4.0e15) throw ResourceError("top cube too large");
  sites_ = std::llround(v);
}

ReducedState ReducedState::seeded(int d, int m, int q_star) {
  ReducedState s(d, m, q_star);
  s.occupied_.push_back({0, SiteLabel::NuXY});
  return s;
}

long long ReducedState::nu_count() const {
  long long c = 0;
  for (const auto& [i, l] : occupied_) c += l == SiteLabel::NuXY;
  return c;
}

SiteLabel ReducedState::label(long long index) const {
  auto it = std::lower_bound(occupied_.begin(), occupied_.end(), index,
                             [](const auto& e, long long v) { return e.first < v; });
  if (it != occupied_.end() && it->first == index) return it->second;
  return SiteLabel::Identity;
}

void ReducedState::set_occupied(std::vector<std::pair<long long, SiteLabel>> occ) {
  auto by_site = [](const auto& a, const auto& b) { return a.first < b.first; };
  if (!std::is_sorted(occ.begin(), occ.end(), by_site)) std::sort(occ.begin(), occ.end(), by_site);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i].first < 0 || occ[i].first >= sites_) throw DimensionError("site outside the top cube");
    if (occ[i].second == SiteLabel::Identity) throw ContractError("occupied list holds an identity label");
    if (i && occ[i].first == occ[i - 1].first) throw ContractError("duplicate site");
  }
  occupied_ = std::move(occ);
}

std::pair<long long, long long> ReducedState::coord(long long index) const {
  if (d_ == 1) return {index, 0};
  long long x = 0, y = 0, scale = 1;
  const long long base = static_cast<long long>(m_) * m_;
  while (index > 0) {
    const long long digit = index % base;
    x += (digit % m_) * scale;
    y += (digit / m_) * scale;
    index /= base;
    scale *= m_;
  }
  return {x, y};
}

long long ReducedState::index_of(long long x, long long y) const {
  if (d_ == 1) return x;
  long long index = 0, scale = 1;
  const long long base = static_cast<long long>(m_) * m_;
  while (x > 0 || y > 0) {
    index += ((x % m_) + m_ * (y % m_)) * scale;
    x /= m_;
    y /= m_;
    scale *= base;
  }
  return index;
}

long long ReducedState::diameter() const {
  if (occupied_.empty()) return 0;
  if (d_ == 1) return occupied_.back().first;
  long long lo_s = 0, hi_s = 0, lo_d = 0, hi_d = 0;
  for (const auto& [i, l] : occupied_) {
    auto [x, y] = coord(i);
    lo_s = std::min(lo_s, x + y);
    hi_s = std::max(hi_s, x + y);
    lo_d = std::min(lo_d, x - y);
    hi_d = std::max(hi_d, x - y);
  }
  return std::max(hi_s - lo_s, hi_d - lo_d);
}

namespace {

void apply_zz_impl(ReducedState& state, int q, double alpha, Rng& rng,
                   const std::function<double(long long occupied_in_cube)>& tau_of) {
  if (q < 1 || q > state.q_star()) throw ContractError("scale outside [1, q*]");
  const double side = std::pow(static_cast<double>(state.m()), q);
  const long long volume = std::llround(std::pow(side, state.d()));
  const double length = state.d() * side;
  const auto& occ = state.occupied();
  std::vector<std::pair<long long, SiteLabel>> next;
  next.reserve(occ.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t i = 0;
  while (i < occ.size()) {
    const long long cube = occ[i].first / volume;
    std::size_t j = i;
    long long ell = 0;
    while (j < occ.size() && occ[j].first / volume == cube) {
      ell += occ[j].second == SiteLabel::NuXY;
      ++j;
    }
    if (ell == 0) {
      next.insert(next.end(), occ.begin() + i, occ.begin() + j);
      i = j;
      continue;
    }
    const double pl = p_ell(p1(tau_of(static_cast<long long>(j - i)), length, alpha), ell);
    std::vector<std::pair<long long, SiteLabel>> kept;
    for (std::size_t k = i; k < j; ++k) {
      if (occ[k].second == SiteLabel::ZOnly && u(rng) < pl) continue;
      kept.push_back(occ[k]);
    }
    std::vector<std::pair<long long, SiteLabel>> fresh;
    if (pl > 0.0) {
      const long long start = cube * volume, end = start + volume;
      std::geometric_distribution<long long> gap(pl);
      std::size_t k = i;
      for (long long pos = start + gap(rng); pos < end; pos += 1 + gap(rng)) {
        while (k < j && occ[k].first < pos) ++k;
        if (k < j && occ[k].first == pos) continue;
        fresh.push_back({pos, SiteLabel::ZOnly});
      }
    }
    std::size_t a = 0, b = 0;
    while (a < kept.size() || b < fresh.size()) {
      if (b == fresh.size() || (a < kept.size() && kept[a].first < fresh[b].first))
        next.push_back(kept[a++]);
      else
        next.push_back(fresh[b++]);
    }
    i = j;
  }
  state.set_occupied(std::move(next));
}

}  // namespace

void apply_zz_reduced(ReducedState& state, int q, double tau_q, double alpha, Rng& rng) {
  apply_zz_impl(state, q, alpha, rng, [tau_q](long long) { return tau_q; });
}

void apply_depolarizer_reduced(ReducedState& state, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto occ = state.occupied();
  for (auto& [i, l] : occ) l = u(rng) < 2.0 / 3.0 ? SiteLabel::NuXY : SiteLabel::ZOnly;
  state.set_occupied(std::move(occ));
}

std::vector<TrajectoryPoint> run_trial(const protocol::ProtocolSchedule& schedule, Rng& rng) {
  const auto& p = schedule.params;
  ReducedState state = ReducedState::seeded(p.d, p.m, p.q_star);
  std::vector<TrajectoryPoint> traj;
  traj.reserve(schedule.layers.size() + 1);
  auto record = [&] { traj.push_back({state.occupancy(), state.nu_count(), state.diameter()}); };
  record();
  for (const auto& layer : schedule.layers) {
    if (layer.kind == protocol::LayerKind::ZZGrow) {
      if (p.adaptive_tau) {
        const int q = layer.q;
        apply_zz_impl(state, q, p.alpha, rng,
                      [&p, q](long long occ) { return protocol::tau(p, q, std::max(1.0, static_cast<double>(occ))); });
      } else {
        apply_zz_reduced(state, layer.q, layer.duration, p.alpha, rng);
      }
    } else {
      apply_depolarizer_reduced(state, rng);
    }
    record();
  }
  return traj;
}

std::vector<TrajectoryPoint> run_trial(const protocol::ProtocolParams& params, Rng& rng) {
  return run_trial(protocol::assemble(params), rng);
}

int level_end_index(int q) { return 2 * ((1 << q) - 1); }

SuccessEstimate wilson_interval(long long successes, long long trials, double z) {
  if (trials < 1) throw ContractError("need at least one trial");
  SuccessEstimate e;
  e.trials = trials;
  e.successes = successes;
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  e.estimate = ph;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (ph + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  e.lower = std::max(0.0, center - half);
  e.upper = std::min(1.0, center + half);
  return e;
}

MonteCarloResult run_monte_carlo(const protocol::ProtocolParams& params, long long trials, double lambda,
                                 double min_diameter, unsigned threads) {
  if (trials < 1) throw ContractError("need at least one trial");
  const protocol::ProtocolSchedule schedule = protocol::assemble(params);
  MonteCarloResult res;
  res.trajectories.resize(static_cast<std::size_t>(trials));
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  auto worker = [&](unsigned w) {
    for (long long k = w; k < trials; k += threads) {
      Rng rng = make_rng(params.seed, "trial/" + std::to_string(k));
      res.trajectories[static_cast<std::size_t>(k)] = run_trial(schedule, rng);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  const double volume = params.cube_volume(params.q_star);
  long long ok = 0;
  for (const auto& tr : res.trajectories) {
    const auto& last = tr.back();
    if (static_cast<double>(last.occupancy) >= lambda * volume && static_cast<double>(last.diameter) >= min_diameter)
      ++ok;
  }
  res.success = wilson_interval(ok, trials);
  return res;
}

SuccessEstimate estimate_success(const protocol::ProtocolParams& params, long long trials, double lambda,
                                 double min_diameter, unsigned threads) {
  return run_monte_carlo(params, trials, lambda, min_diameter, threads).success;
}

}  // namespace opgrowth::reduced
