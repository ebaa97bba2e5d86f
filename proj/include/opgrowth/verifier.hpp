#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opgrowth/dense.hpp"
#include "opgrowth/seed.hpp"

namespace opgrowth::verifier {

// Slack is (LHS - RHS) / max(|LHS|, |RHS|) for inequalities and an absolute
// deviation for identities; negative or zero means satisfied.
struct CheckReport {
  std::string name;
  long long trials = 0;
  double max_slack = -kInf;
  std::uint64_t worst_seed = 0;
  bool pass = false;
  double tolerance = 0.0;
  std::map<std::string, double> extras;

  void record(double slack, std::uint64_t seed);
  void finish() { pass = max_slack <= tolerance; }
  std::string to_json(int indent = 2) const;
};

inline constexpr double kRelTol = 1e-9;

double relative_slack(double lhs, double rhs);

// Trial seeds are derive_seed(seed, name + "/" + k); worst_seed reproduces the worst trial.
Matrix random_complex(int rows, int cols, Rng& rng);
Matrix haar_unitary(int dim, Rng& rng);
// U diag(s) U^dagger with s uniform in [-1, 1]; a random subset of eigenvalues is zeroed.
Matrix random_contraction(int dim, Rng& rng);

Matrix partial_trace_right(const Matrix& a, int dim_left, int dim_right);
// Y - Tr_i(Y) (x) I_i / dim_i for a matrix on H_j (x) H_i.
Matrix make_traceless_right(const Matrix& y, int dim_j, int dim_i);

// ||X+Y||_q^2 - ||X||_q^2 - (q-1)||Y||_q^2 as a relative slack.
struct SubsystemPair {
  Matrix x;  // X_j (x) I_i
  Matrix y;  // traceless on H_i
};
// Operands of one smoothness or nc-convexity trial seeded with Rng(worst_seed).
SubsystemPair sample_subsystem_pair(int dim_i, int dim_j, Rng& rng);

double uniform_smoothness_slack(const Matrix& x, const Matrix& y, double q);
double nc_convexity_slack(const Matrix& x, const Matrix& y, double p);

// Dimensions of 0 are drawn per trial with dim_i * dim_j <= 16.
CheckReport check_uniform_smoothness(int dim_i, int dim_j, const std::vector<double>& q_list, long long trials,
                                     std::uint64_t seed);
CheckReport check_nc_convexity(int dim_i, int dim_j, const std::vector<double>& p_list, long long trials,
                               std::uint64_t seed);
CheckReport check_holder(long long trials, std::uint64_t seed);
CheckReport check_riesz_thorin(long long trials, std::uint64_t seed);
// k = 2: Frobenius bound 2e ||H||_(2) ||O||_F (|ln ||O||_F| + 1) on power-law H.
// k >= 3: e p^{k/2} ||H||_(2) ||O||_pbar (|ln ||O||_pbar| + 1)^{k/2} on random k-local H, for p in p_list.
CheckReport check_submultiplicativity(int n, double alpha, long long trials, std::uint64_t seed, int k = 2,
                                      const std::vector<double>& p_list = {2.0});
CheckReport check_depolarizer_group();
CheckReport check_zz_rotation(const std::vector<double>& theta_list);
CheckReport check_inclusion_exclusion(int N, int k_max);
// Weighted count sum_k (sum_{p=N}^k (-1)^{k-p} C(k,p)) * #{k-subsets of M marked couplings}.
long long inclusion_exclusion_count(int N, int M);
// ||[B, A]||_F <= 2 ||B||_inf sqrt((A|P_y|A)) for B supported on site y.
CheckReport check_commutator_front(int n, long long trials, std::uint64_t seed);
// Markov step ||Q_x A(t)||_F^2 <= F(t)/x (slack scaled by at least ||A||_F^2) and dF/dt <= worst-case rate bound, A(0) = X_0.
CheckReport check_markov_front(int n, double alpha, const std::vector<double>& t_grid, long long trials,
                               std::uint64_t seed);

// Full suite; inequality checks use `trials` samples, dense-oracle checks proportionally fewer.
std::vector<CheckReport> run_all(std::uint64_t seed, long long trials = 1000);

}  // namespace opgrowth::verifier
