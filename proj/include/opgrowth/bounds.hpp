#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opgrowth::bounds {

struct TailSum {
  double partial = 0.0;          // sum_{m=j0}^{M} (m - j0 + 1) m^{-2 alpha}
  double remainder_bound = 0.0;  // integral bound on the rest
  long long cutoff = 0;          // M
  double upper() const { return partial + remainder_bound; }
};

// sum_{i<=0} sum_{j>=j0} |i - j|^{-2 alpha} = sum_{m>=j0} (m - j0 + 1) m^{-2 alpha}.
TailSum pair_tail_sum(double alpha, long long j0);

struct RateConstant {
  double value = 0.0;  // C with ||L_{q,k} O|| <= C ||O|| (|ln||O|||+1) 2^{-q(alpha-1)}
  long long j0 = 1;
  TailSum tail;
};
RateConstant scale_rate_constant(double alpha, int q);

struct BoundReport {
  std::string kind;
  std::string regime;
  std::map<std::string, double> inputs;
  double bound = 0.0;
  std::map<std::string, double> constants;
  std::map<std::string, std::vector<double>> tables;
  std::vector<std::string> structural;  // constants with no numeric value in the source
  std::vector<std::string> notes;

  std::string to_json(int indent = 2) const;
  // "alpha,d,r,regime,bound" followed by the sorted constant values.
  std::string csv_header() const;
  std::string csv_row() const;
};

std::string frobenius_regime(double alpha);

// Occupancy profile p[q][n] = ||sum_{j in S_{q,n}} Q_j A||_F^2.
using Profile = std::vector<std::vector<double>>;

struct RateBound {
  double value = 0.0;
  std::vector<double> per_scale;
  std::vector<double> constants;      // C(q)
  double printed_closed_form = 0.0;   // closed form with C = max_q C(q), audit only
  int q_star = 0;
};

RateBound frobenius_front_rate_bound(double alpha, int R);
RateBound frobenius_front_rate_bound(double alpha, int R, const Profile& profile);
double frobenius_lightcone_time(double alpha, int R, double delta);
BoundReport frobenius_report(double alpha, int R, double delta);

struct PnormConstants {
  int q_star = 0;
  std::vector<long long> N;
  std::vector<double> weights;
  double M = 0.0;
  int q1 = 0;
  double script_R = 0.0;
  std::string regime;
};
int pnorm_q_star(double r);
PnormConstants pnorm_constants(double alpha, double r);
PnormConstants pnorm_constants(double alpha, double r, int q_star);
double script_R(double alpha, double r);
double pnorm_lightcone_time(double alpha, double r, double p, double delta, double c_prime = 1.0);
BoundReport pnorm_report(double alpha, double r, double p, double delta, double c_prime = 1.0);

double concentration_exponent(double alpha, double delta_exp);
double concentration_bound(double alpha, double r, double epsilon, double C = 1.0, double delta_exp = 0.0);
BoundReport concentration_report(double alpha, double r, double epsilon, double C = 1.0,
                                 double delta_exp = 0.0);

double typical_state_tail(double pnorm_value, double a, double p);

}  // namespace opgrowth::bounds
