#include "opgrowth/protocol.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "opgrowth/dense.hpp"
#include "opgrowth/error.hpp"
#include "opgrowth/reduced.hpp"

namespace opgrowth::protocol {

double ProtocolParams::R(int q) const { return std::pow(static_cast<double>(m), q); }

double ProtocolParams::cube_volume(int q) const { return std::pow(R(q), d); }

long long ProtocolParams::site_count() const {
  const double v = cube_volume(q_star);
  if (v > 9.0e15) throw ResourceError("top cube too large to index");
  return static_cast<long long>(std::llround(v));
}

Lattice ProtocolParams::lattice() const {
  const long long side = std::llround(R(q_star));
  if (side > (1LL << 20)) throw ResourceError("lattice too large");
  return d == 1 ? Lattice::chain(static_cast<int>(side)) : Lattice::square(static_cast<int>(side), static_cast<int>(side));
}

ProtocolParams make_params(int d, double alpha, int m, int q_star, std::uint64_t seed) {
  if (d != 1 && d != 2) throw ContractError("dimension must be 1 or 2");
  if (m < 2) throw ContractError("branching m must be at least 2");
  if (q_star < 1) throw ContractError("depth q* must be at least 1");
  if (!(alpha > 0.0)) throw ContractError("alpha must be positive");
  ProtocolParams p;
  p.d = d;
  p.alpha = alpha;
  p.m = m;
  p.q_star = q_star;
  p.seed = seed;
  if (std::pow(static_cast<double>(m), d) <= 120.0)
    p.warnings.push_back("m^d <= 120: analytic success bounds are vacuous, use Monte Carlo estimates");
  return p;
}

ProtocolParams derive_params(double r, double alpha, int d, std::uint64_t seed) {
  if (!(r >= std::numbers::e - 1e-12) || !std::isfinite(r)) throw ContractError("target distance must be at least e");
  const double s = std::sqrt(std::log(r));
  const double eps = 1e-12;
  const int m = static_cast<int>(std::ceil(std::exp(s) * (1.0 - eps)));
  const int q = static_cast<int>(std::ceil(s * (1.0 - eps)));
  ProtocolParams p = make_params(d, alpha, std::max(2, m), std::max(1, q), seed);
  p.r = r;
  return p;
}

double occupancy_assumption(const ProtocolParams& p, int q) {
  if (q < 1 || q > p.q_star) throw ContractError("scale outside [1, q*]");
  if (!p.s.empty()) {
    if (static_cast<int>(p.s.size()) < q) throw ContractError("occupancy override misses a scale");
    return p.s[q - 1];
  }
  if (q == 1) return 1.0;
  const double lambda = reduced::analytic_lambda(p.m, p.d, q - 1).back();
  return std::max(1.0, lambda * p.cube_volume(q - 1));
}

double tau_limit(const ProtocolParams& p, int q) {
  return std::pow(120.0, q) * std::pow(static_cast<double>(p.m), p.d) * std::pow(p.R(q), p.alpha - p.d);
}

double tau(const ProtocolParams& p, int q, double s) {
  if (!(s >= 1.0)) throw ContractError("occupancy assumption must be at least 1");
  const double t = std::pow(p.R(q), p.alpha) / std::sqrt(2.0 * s * p.cube_volume(q - 1));
  if (!(t < tau_limit(p, q))) throw ContractError("growth time exceeds 120^q m^d R_q^(alpha-d)");
  return t;
}

double tau(const ProtocolParams& p, int q) { return tau(p, q, occupancy_assumption(p, q)); }

double zz_prefactor(const ProtocolParams& p, int q) { return std::pow(p.d * p.R(q), -p.alpha); }

int ProtocolSchedule::zz_layer_count() const {
  int c = 0;
  for (const auto& l : layers) c += l.kind == LayerKind::ZZGrow;
  return c;
}

int ProtocolSchedule::depolarize_layer_count() const {
  return static_cast<int>(layers.size()) - zz_layer_count();
}

std::string ProtocolSchedule::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["params"] = {{"d", params.d},
                 {"alpha", params.alpha},
                 {"m", params.m},
                 {"q_star", params.q_star},
                 {"r", params.r},
                 {"seed", params.seed},
                 {"t_D", params.t_D},
                 {"adaptive_tau", params.adaptive_tau},
                 {"s", params.s},
                 {"warnings", params.warnings}};
  j["tau"] = tau;
  j["runtime"] = runtime;
  j["total_runtime"] = total_runtime;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& l : layers)
    arr.push_back({{"kind", l.kind == LayerKind::ZZGrow ? "ZZGrow" : "Depolarize"},
                   {"q", l.q},
                   {"duration", l.duration},
                   {"seed_path", l.seed_path}});
  j["layers"] = arr;
  return j.dump(indent);
}

std::vector<std::vector<int>> cube_partition(const ProtocolParams& p, int q) {
  if (q < 0 || q > p.q_star) throw ContractError("scale outside [0, q*]");
  const Lattice lat = p.lattice();
  const int side = static_cast<int>(std::llround(p.R(q)));
  const int per_axis = lat.lx / side;
  std::vector<std::vector<int>> cubes(static_cast<std::size_t>(p.d == 1 ? per_axis : per_axis * per_axis));
  for (int s = 0; s < lat.size(); ++s) {
    auto [x, y] = lat.coord(s);
    const int c = p.d == 1 ? x / side : (y / side) * per_axis + x / side;
    cubes[c].push_back(s);
  }
  return cubes;
}

Layer sample_depolarizer(int sites, Rng& rng) {
  Layer l;
  l.kind = LayerKind::Depolarize;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(depolarizer_group().size()) - 1);
  l.elements.resize(static_cast<std::size_t>(sites));
  for (auto& e : l.elements) e = pick(rng);
  l.materialized = true;
  return l;
}

Layer sample_zz_layer(const ProtocolParams& p, int q, const std::vector<std::vector<int>>& cubes, double s,
                      Rng& rng) {
  Layer l;
  l.kind = LayerKind::ZZGrow;
  l.q = q;
  l.duration = tau(p, q, s);
  l.prefactor = zz_prefactor(p, q);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& cube : cubes)
    for (std::size_t a = 0; a < cube.size(); ++a)
      for (std::size_t b = a + 1; b < cube.size(); ++b) l.couplings.push_back({cube[a], cube[b], u(rng)});
  l.materialized = true;
  return l;
}

ProtocolSchedule assemble(const ProtocolParams& p) {
  ProtocolSchedule s;
  s.params = p;
  for (int q = 1; q <= p.q_star; ++q) s.tau.push_back(tau(p, q));
  s.runtime.assign(static_cast<std::size_t>(p.q_star) + 1, 0.0);
  for (int q = 1; q <= p.q_star; ++q) s.runtime[q] = 2.0 * s.runtime[q - 1] + p.t_D + s.tau[q - 1];
  s.total_runtime = s.runtime[p.q_star];

  std::function<void(int, const std::string&)> build = [&](int q, const std::string& prefix) {
    if (q == 0) return;
    build(q - 1, prefix + "/L");
    Layer v;
    v.kind = LayerKind::ZZGrow;
    v.q = q;
    v.duration = s.tau[q - 1];
    v.prefactor = zz_prefactor(p, q);
    v.seed_path = prefix + "/V" + std::to_string(q);
    v.seed = derive_seed(p.seed, v.seed_path);
    s.layers.push_back(std::move(v));
    Layer dl;
    dl.kind = LayerKind::Depolarize;
    dl.q = q;
    dl.duration = p.t_D;
    dl.seed_path = prefix + "/D";
    dl.seed = derive_seed(p.seed, dl.seed_path);
    s.layers.push_back(std::move(dl));
    build(q - 1, prefix + "/R");
  };
  build(p.q_star, "U" + std::to_string(p.q_star));
  return s;
}

void materialize(ProtocolSchedule& schedule, long long max_sites) {
  const ProtocolParams& p = schedule.params;
  const long long n = p.site_count();
  if (n > max_sites) throw ResourceError("schedule too large to materialize");
  std::vector<std::vector<std::vector<int>>> cubes(static_cast<std::size_t>(p.q_star) + 1);
  for (int q = 1; q <= p.q_star; ++q) cubes[q] = cube_partition(p, q);
  for (auto& layer : schedule.layers) {
    Rng rng(layer.seed);
    Layer sampled = layer.kind == LayerKind::ZZGrow
                        ? sample_zz_layer(p, layer.q, cubes[layer.q], occupancy_assumption(p, layer.q), rng)
                        : sample_depolarizer(static_cast<int>(n), rng);
    layer.elements = std::move(sampled.elements);
    layer.couplings = std::move(sampled.couplings);
    layer.materialized = true;
  }
}

std::vector<RuntimePoint> runtime_scaling(double alpha, int d, const std::vector<double>& r_values) {
  if (!(alpha > d && alpha < d + 1)) throw ContractError("runtime scaling needs d < alpha < d + 1");
  std::vector<RuntimePoint> out;
  for (double r : r_values) {
    ProtocolParams p = derive_params(r, alpha, d);
    double t = 0.0, top = 0.0;
    for (int q = 1; q <= p.q_star; ++q) {
      top = tau(p, q);
      t = 2.0 * t + p.t_D + top;
    }
    out.push_back({r, p.m, p.q_star, t, top});
  }
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw ContractError("invalid geometric grid");
  std::vector<double> g;
  for (int i = 0; i < points; ++i)
    g.push_back(points == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  return g;
}

namespace {

void require_materialized(const ProtocolSchedule& s) {
  for (const auto& l : s.layers)
    if (!l.materialized) throw ContractError("schedule randomness not materialized");
}

}  // namespace

WeightedPauliSum simulate_exact(const ProtocolSchedule& schedule, const WeightedPauliSum& initial, int cap) {
  require_materialized(schedule);
  const long long n = schedule.params.site_count();
  if (n > cap) throw ResourceError("exact simulation limited to " + std::to_string(cap) + " sites");
  if (initial.size() != n) throw DimensionError("initial operator does not match the lattice");
  const int nn = static_cast<int>(n);
  DenseOperator a = to_matrix(initial, nn);
  const double norm_in = frobenius_norm(initial);
  const auto& group = depolarizer_group();
  for (const auto& layer : schedule.layers) {
    if (layer.kind == LayerKind::ZZGrow) {
      HamiltonianTerms h;
      h.n = nn;
      for (const auto& c : layer.couplings) {
        PauliString zz(nn);
        zz.set_letter(c.i, 'Z');
        zz.set_letter(c.j, 'Z');
        h.add_pauli(zz, layer.prefactor * c.J);
      }
      a = evolve_heisenberg(a, h, layer.duration);
    } else {
      Matrix u = Matrix(group[layer.elements[0]]);
      for (int s = 1; s < nn; ++s) u = kron(u, Matrix(group[layer.elements[s]]));
      a.m = u.adjoint() * a.m * u;
    }
  }
  WeightedPauliSum out = to_pauli_sum(a, 1e-15);
  if (std::abs(frobenius_norm(out) - norm_in) > 1e-10 * std::max(1.0, norm_in))
    throw ContractError("exact simulation lost Frobenius norm");
  return out;
}

BranchingResult simulate_pauli_branching(const ProtocolSchedule& schedule, const WeightedPauliSum& initial,
                                         double truncation) {
  if (truncation < 0.0) throw ContractError("truncation must be non-negative");
  require_materialized(schedule);
  const int n = initial.size();
  if (n != schedule.params.site_count()) throw DimensionError("initial operator does not match the lattice");
  const auto& table = depolarizer_conjugation_table();
  BranchingResult res;
  res.op = initial;
  auto truncate = [&](WeightedPauliSum& op) {
    if (truncation <= 0.0) return;
    WeightedPauliSum kept(n);
    for (const auto& [p, c] : op.terms()) {
      if (std::abs(c) < truncation)
        res.discarded_weight += std::norm(c);
      else
        kept.add(p, c);
    }
    op = std::move(kept);
  };
  for (const auto& layer : schedule.layers) {
    if (layer.kind == LayerKind::Depolarize) {
      WeightedPauliSum next(n);
      for (const auto& [p, c] : res.op.terms()) {
        PauliString img(n);
        int sign = 1;
        for (int s : p.support()) {
          const auto& e = table[layer.elements[s]][p.letter_code(s)];
          img.set_letter_code(s, e.code);
          sign *= e.sign;
        }
        next.add(img, c * double(sign));
      }
      res.op = std::move(next);
      continue;
    }
    for (const auto& cp : layer.couplings) {
      const double theta = layer.duration * layer.prefactor * cp.J;
      const double cs = std::cos(2.0 * theta), sn = std::sin(2.0 * theta);
      PauliString zz(n);
      zz.set_letter(cp.i, 'Z');
      zz.set_letter(cp.j, 'Z');
      WeightedPauliSum next(n);
      for (const auto& [p, c] : res.op.terms()) {
        if (p.x_bit(cp.i) == p.x_bit(cp.j)) {
          next.add(p, c);
          continue;
        }
        next.add(p, c * cs);
        next.add(multiply(p, zz), c * cplx(0.0, -sn));
      }
      res.op = std::move(next);
      truncate(res.op);
    }
  }
  return res;
}

}  // namespace opgrowth::protocol
