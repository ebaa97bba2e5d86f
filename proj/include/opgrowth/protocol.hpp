#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "opgrowth/pauli.hpp"
#include "opgrowth/seed.hpp"

namespace opgrowth::protocol {

struct ProtocolParams {
  int d = 1;
  double alpha = 1.5;
  int m = 2;
  int q_star = 1;
  double r = 0.0;               // target distance when derived from r, else 0
  std::vector<double> s;        // optional occupancy assumption per scale, s[q-1] for q = 1..q*
  bool adaptive_tau = false;
  std::uint64_t seed = 0;
  double t_D = 1.5707963267948966;
  std::vector<std::string> warnings;

  double R(int q) const;             // m^q
  double cube_volume(int q) const;   // R_q^d
  long long site_count() const;      // R_{q*}^d, throws if it does not fit
  Lattice lattice() const;
};

ProtocolParams make_params(int d, double alpha, int m, int q_star, std::uint64_t seed = 0);
ProtocolParams derive_params(double r, double alpha, int d, std::uint64_t seed = 0);

// Occupancy assumption s_q and growth time tau_q.
double occupancy_assumption(const ProtocolParams& p, int q);
double tau(const ProtocolParams& p, int q, double s);
double tau(const ProtocolParams& p, int q);
// Upper limit 120^q m^d R_q^{alpha-d} that every tau_q must respect.
double tau_limit(const ProtocolParams& p, int q);
// Coupling prefactor (d R_q)^{-alpha}.
double zz_prefactor(const ProtocolParams& p, int q);

enum class LayerKind { Depolarize, ZZGrow };

struct ZZCoupling {
  int i = 0;
  int j = 0;
  double J = 0.0;
};

struct Layer {
  LayerKind kind = LayerKind::Depolarize;
  int q = 0;
  double duration = 0.0;
  std::string seed_path;
  std::uint64_t seed = 0;
  double prefactor = 0.0;
  bool materialized = false;
  std::vector<int> elements;            // group element per site (Depolarize)
  std::vector<ZZCoupling> couplings;    // per-pair couplings (ZZGrow)
};

struct ProtocolSchedule {
  ProtocolParams params;
  std::vector<Layer> layers;
  std::vector<double> tau;       // tau[q-1]
  std::vector<double> runtime;   // runtime[q] = t_q, runtime[0] = 0
  double total_runtime = 0.0;

  int zz_layer_count() const;
  int depolarize_layer_count() const;
  std::string to_json(int indent = 2) const;
};

// Site lists of every q-cube (row-major lattice indices).
std::vector<std::vector<int>> cube_partition(const ProtocolParams& p, int q);

Layer sample_depolarizer(int sites, Rng& rng);
Layer sample_zz_layer(const ProtocolParams& p, int q, const std::vector<std::vector<int>>& cubes, double s,
                      Rng& rng);

ProtocolSchedule assemble(const ProtocolParams& p);
// Draws the per-layer randomness from each layer's seed path.
void materialize(ProtocolSchedule& schedule, long long max_sites = 4096);

struct RuntimePoint {
  double r = 0.0;
  int m = 0;
  int q_star = 0;
  double t = 0.0;
  double tau_top = 0.0;
};
std::vector<RuntimePoint> runtime_scaling(double alpha, int d, const std::vector<double>& r_values);
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> geometric_grid(double lo, double hi, int points);

WeightedPauliSum simulate_exact(const ProtocolSchedule& schedule, const WeightedPauliSum& initial,
                                int cap = 8);

struct BranchingResult {
  WeightedPauliSum op;
  double discarded_weight = 0.0;
};
BranchingResult simulate_pauli_branching(const ProtocolSchedule& schedule, const WeightedPauliSum& initial,
                                         double truncation = 1e-8);

}  // namespace opgrowth::protocol
