#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "opgrowth/protocol.hpp"
#include "opgrowth/seed.hpp"

namespace opgrowth::reduced {

enum class SiteLabel : std::uint8_t { Identity = 0, NuXY = 1, ZOnly = 2 };

struct SincBounds {
  double F = 1.0;
  double lower = 1.0;
  double upper = 1.0;
};
SincBounds sinc_bounds(double x);

// Flip probability of one coupling, J uniform on [-1,1], theta = J tau / L^alpha.
double p1(double tau, double length, double alpha);
double p_ell(double p1, long long ell);
double p_star(double p_ell, double cube_size);

struct RecursionRow {
  int q = 0;
  double lambda1 = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;  // eta_{2,q}, feeds eta_{1,q+1}
  double eta3 = 0.0;
  double s = 1.0;
  double tau = 0.0;
  double p1 = 0.0;
  double p_star = 0.0;  // with ell = s/2 and cube size R_{q-1}^d
  bool vacuous = false;
};

struct RecursionTable {
  std::vector<RecursionRow> rows;  // q = 1..q*
  double floor_eta = 0.0;          // max(0, 1 - 3 q* exp(-m^d/2160))
  double floor_product = 0.0;      // max(0, 1 - e^{-m^d/480} - e^{-m^d/120} - e^{-m^d/2160})^{q*}
  const RecursionRow& at(int q) const { return rows.at(static_cast<std::size_t>(q - 1)); }
};

// lambda_{1,q} for q = 1..q_max from the clamped recursion (index 0 holds q = 1).
std::vector<double> analytic_lambda(int m, int d, int q_max);
RecursionTable analytic_recursion(const protocol::ProtocolParams& params);

// Occupied sites of the top cube in hierarchical order (each q-cube is a contiguous range).
class ReducedState {
 public:
  ReducedState() = default;
  ReducedState(int d, int m, int q_star);

  static ReducedState seeded(int d, int m, int q_star);

  int d() const { return d_; }
  int m() const { return m_; }
  int q_star() const { return q_star_; }
  long long site_count() const { return sites_; }
  long long occupancy() const { return static_cast<long long>(occupied_.size()); }
  long long nu_count() const;
  SiteLabel label(long long index) const;
  const std::vector<std::pair<long long, SiteLabel>>& occupied() const { return occupied_; }
  void set_occupied(std::vector<std::pair<long long, SiteLabel>> occ);

  // Coordinates of a hierarchical index.
  std::pair<long long, long long> coord(long long index) const;
  long long index_of(long long x, long long y) const;
  // Manhattan diameter of the occupied set together with the origin.
  long long diameter() const;

 private:
  int d_ = 1;
  int m_ = 2;
  int q_star_ = 1;
  long long sites_ = 0;
  std::vector<std::pair<long long, SiteLabel>> occupied_;
};

// Per q-cube with ell NuXY sites, Identity and ZOnly sites swap with probability p_ell.
void apply_zz_reduced(ReducedState& state, int q, double tau_q, double alpha, Rng& rng);
// Every occupied site becomes NuXY with probability 2/3, else ZOnly.
void apply_depolarizer_reduced(ReducedState& state, Rng& rng);

struct TrajectoryPoint {
  long long occupancy = 0;
  long long nu = 0;
  long long diameter = 0;
};

// Flattened schedule order starting from one NuXY site at the origin; entry 0 is the initial state.
std::vector<TrajectoryPoint> run_trial(const protocol::ProtocolSchedule& schedule, Rng& rng);
std::vector<TrajectoryPoint> run_trial(const protocol::ProtocolParams& params, Rng& rng);
// Trajectory index at which the first copy of U_q has completed.
int level_end_index(int q);

struct SuccessEstimate {
  long long trials = 0;
  long long successes = 0;
  double estimate = 0.0;
  double lower = 0.0;  // Wilson 95%
  double upper = 1.0;
};
SuccessEstimate wilson_interval(long long successes, long long trials, double z = 1.959963984540054);

struct MonteCarloResult {
  std::vector<std::vector<TrajectoryPoint>> trajectories;
  SuccessEstimate success;
};

// Trial k uses the stream derive_seed(params.seed, "trial/k"); threads only change speed.
MonteCarloResult run_monte_carlo(const protocol::ProtocolParams& params, long long trials, double lambda,
                                 double min_diameter, unsigned threads = 1);
SuccessEstimate estimate_success(const protocol::ProtocolParams& params, long long trials, double lambda,
                                 double min_diameter, unsigned threads = 1);

}  // namespace opgrowth::reduced
