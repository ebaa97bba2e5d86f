#include "opgrowth/verifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "opgrowth/bounds.hpp"
#include "opgrowth/error.hpp"
#include "opgrowth/pauli.hpp"
#include "opgrowth/scale.hpp"

namespace opgrowth::verifier {

namespace {

constexpr double kE = std::numbers::e;

std::uint64_t trial_seed(std::uint64_t seed, const std::string& name, long long k) {
  return derive_seed(seed, name + "/" + std::to_string(k));
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::pair<int, int> draw_dims(int dim_i, int dim_j, Rng& rng) {
  int di = dim_i > 0 ? dim_i : uniform_int(rng, 2, 8);
  int dj = dim_j > 0 ? dim_j : uniform_int(rng, 1, 16 / di);
  return {di, dj};
}

double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double draw_exponent(Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  if (u < 0.1) return kInf;
  if (u < 0.2) return 1.0;
  return 1.0 / uniform(rng, 0.02, 1.0);
}

}  // namespace

void CheckReport::record(double slack, std::uint64_t seed) {
  ++trials;
  if (slack > max_slack) {
    max_slack = slack;
    worst_seed = seed;
  }
}

std::string CheckReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["check"] = name;
  j["trials"] = trials;
  if (std::isfinite(max_slack))
    j["max_slack"] = max_slack;
  else
    j["max_slack"] = nullptr;
  j["worst_seed"] = worst_seed;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  nlohmann::ordered_json ex = nlohmann::ordered_json::object();
  for (const auto& [k, v] : extras) ex[k] = v;
  j["extras"] = ex;
  return j.dump(indent);
}

double relative_slack(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return (lhs - rhs) / scale;
}

Matrix random_complex(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

Matrix haar_unitary(int dim, Rng& rng) {
  Matrix z = random_complex(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  Matrix r = qr.matrixQR();
  for (int i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= a > 0.0 ? d / a : cplx(1.0);
  }
  return q;
}

namespace {

struct Contraction {
  Matrix m;
  Eigen::VectorXd spectrum;
};

Contraction sample_contraction(int dim, Rng& rng) {
  Matrix u = haar_unitary(dim, rng);
  const double zero_fraction = uniform(rng, 0.0, 1.0);
  Eigen::VectorXd s(dim);
  for (int i = 0; i < dim; ++i) s(i) = uniform(rng, 0.0, 1.0) < zero_fraction ? 0.0 : uniform(rng, -1.0, 1.0);
  s(uniform_int(rng, 0, dim - 1)) = uniform(rng, -1.0, 1.0);
  Matrix o = u * s.cast<cplx>().asDiagonal() * u.adjoint();
  return {0.5 * (o + o.adjoint()), s.cwiseAbs()};
}

double spectrum_norm(const Eigen::VectorXd& s, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc / static_cast<double>(s.size()), 1.0 / p);
}

}  // namespace

Matrix random_contraction(int dim, Rng& rng) { return sample_contraction(dim, rng).m; }

Matrix partial_trace_right(const Matrix& a, int dim_left, int dim_right) {
  if (a.rows() != dim_left * dim_right || a.cols() != a.rows()) throw DimensionError("partial trace dimensions");
  Matrix out = Matrix::Zero(dim_left, dim_left);
  for (int j = 0; j < dim_left; ++j)
    for (int i = 0; i < dim_left; ++i)
      for (int k = 0; k < dim_right; ++k) out(i, j) += a(i * dim_right + k, j * dim_right + k);
  return out;
}

Matrix make_traceless_right(const Matrix& y, int dim_j, int dim_i) {
  Matrix tr = partial_trace_right(y, dim_j, dim_i);
  return y - kron(tr, Matrix::Identity(dim_i, dim_i)) / static_cast<double>(dim_i);
}

double uniform_smoothness_slack(const Matrix& x, const Matrix& y, double q) {
  if (q < 2.0) throw ContractError("uniform smoothness needs q >= 2");
  const double s = schatten_norm(Matrix(x + y), q, false);
  const double nx = schatten_norm(x, q, false);
  const double ny = schatten_norm(y, q, false);
  return relative_slack(s * s, nx * nx + (q - 1.0) * ny * ny);
}

double nc_convexity_slack(const Matrix& x, const Matrix& y, double p) {
  if (p < 2.0) throw ContractError("nc-convexity check needs p >= 2");
  return relative_slack(schatten_norm(x, p, false), schatten_norm(Matrix(x + y), p, false));
}

SubsystemPair sample_subsystem_pair(int dim_i, int dim_j, Rng& rng) {
  auto [di, dj] = draw_dims(dim_i, dim_j, rng);
  const bool hermitian = uniform(rng, 0.0, 1.0) < 0.5;
  Matrix xj = random_complex(dj, dj, rng);
  Matrix y = random_complex(di * dj, di * dj, rng);
  if (hermitian) {
    xj = 0.5 * (xj + xj.adjoint()).eval();
    y = 0.5 * (y + y.adjoint()).eval();
  }
  y *= std::pow(10.0, uniform(rng, -1.5, 1.5));
  return {kron(xj, Matrix::Identity(di, di)), make_traceless_right(y, dj, di)};
}

CheckReport check_uniform_smoothness(int dim_i, int dim_j, const std::vector<double>& q_list, long long trials,
                                     std::uint64_t seed) {
  for (double q : q_list)
    if (q < 2.0) throw ContractError("uniform smoothness needs q >= 2");
  CheckReport rep;
  rep.name = "uniform_smoothness";
  rep.tolerance = kRelTol;
  for (long long k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(seed, rep.name, k);
    Rng rng(s);
    auto pair = sample_subsystem_pair(dim_i, dim_j, rng);
    double worst = -kInf;
    for (double q : q_list) worst = std::max(worst, uniform_smoothness_slack(pair.x, pair.y, q));
    rep.record(worst, s);
  }
  rep.finish();
  return rep;
}

CheckReport check_nc_convexity(int dim_i, int dim_j, const std::vector<double>& p_list, long long trials,
                               std::uint64_t seed) {
  for (double p : p_list)
    if (p < 2.0) throw ContractError("nc-convexity check needs p >= 2");
  CheckReport rep;
  rep.name = "nc_convexity";
  rep.tolerance = kRelTol;
  for (long long k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(seed, rep.name, k);
    Rng rng(s);
    auto pair = sample_subsystem_pair(dim_i, dim_j, rng);
    double worst = -kInf;
    for (double p : p_list) worst = std::max(worst, nc_convexity_slack(pair.x, pair.y, p));
    rep.record(worst, s);
  }
  rep.finish();
  return rep;
}

CheckReport check_holder(long long trials, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "holder";
  rep.tolerance = kRelTol;
  for (long long k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(seed, rep.name, k);
    Rng rng(s);
    const int dim = uniform_int(rng, 1, 16);
    Matrix a = random_complex(dim, dim, rng);
    Matrix b = random_complex(dim, dim, rng) * std::pow(10.0, uniform(rng, -1.0, 1.0));
    const double inv_p = uniform(rng, 0.0, 1.0) < 0.1 ? 1.0 : uniform(rng, 1e-3, 1.0);
    const double v = uniform(rng, 0.0, 1.0);
    double ia = inv_p * v, ib = inv_p * (1.0 - v);
    if (v < 0.1) {
      ia = 0.0;
      ib = inv_p;
    } else if (v > 0.9) {
      ia = inv_p;
      ib = 0.0;
    }
    const double p = 1.0 / inv_p;
    const double p1 = ia == 0.0 ? kInf : 1.0 / ia;
    const double p2 = ib == 0.0 ? kInf : 1.0 / ib;
    const double lhs = schatten_norm(Matrix(a * b), p, false);
    const double rhs = schatten_norm(a, p1, false) * schatten_norm(b, p2, false);
    rep.record(relative_slack(lhs, rhs), s);
  }
  rep.finish();
  return rep;
}

CheckReport check_riesz_thorin(long long trials, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "riesz_thorin";
  rep.tolerance = kRelTol;
  for (long long k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(seed, rep.name, k);
    Rng rng(s);
    const int dim = uniform_int(rng, 1, 16);
    Matrix a = random_complex(dim, dim, rng);
    if (uniform(rng, 0.0, 1.0) < 0.3) {
      Matrix u = haar_unitary(dim, rng);
      Eigen::VectorXd sv(dim);
      for (int i = 0; i < dim; ++i) sv(i) = std::pow(10.0, uniform(rng, -3.0, 0.0));
      a = u * sv.cast<cplx>().asDiagonal() * haar_unitary(dim, rng);
    }
    const double q1 = draw_exponent(rng), q2 = draw_exponent(rng);
    const double theta = uniform(rng, 0.0, 1.0);
    const double inv = theta / q1 + (1.0 - theta) / q2;
    const double qt = inv == 0.0 ? kInf : 1.0 / inv;
    const double lhs = schatten_norm(a, qt, false);
    const double rhs = std::pow(schatten_norm(a, q1, false), theta) * std::pow(schatten_norm(a, q2, false), 1.0 - theta);
    rep.record(relative_slack(lhs, rhs), s);
  }
  rep.finish();
  return rep;
}

namespace {

struct KLocal {
  WeightedPauliSum h;
  double h2 = 0.0;
};

KLocal random_k_local(int n, int k, double alpha, Rng& rng) {
  KLocal out{WeightedPauliSum(n), 0.0};
  std::vector<int> pick(static_cast<std::size_t>(k));
  double acc = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    PauliString p(n);
    int lo = n, hi = -1;
    for (int s = 0; s < n; ++s)
      if (mask >> s & 1u) {
        p.set_letter_code(s, uniform_int(rng, 1, 3));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    const double J = uniform(rng, -1.0, 1.0) * std::pow(static_cast<double>(hi - lo), -alpha);
    out.h.add(p, J);
    acc += J * J;
  }
  out.h2 = std::sqrt(acc);
  return out;
}

}  // namespace

CheckReport check_submultiplicativity(int n, double alpha, long long trials, std::uint64_t seed, int k,
                                      const std::vector<double>& p_list) {
  if (n < 2 || n > 10) throw ContractError("submultiplicativity check needs 2 <= n <= 10");
  if (k < 2 || k > n) throw ContractError("locality outside [2, n]");
  for (double p : p_list)
    if (p < 2.0) throw ContractError("p must be at least 2");
  CheckReport rep;
  rep.name = k == 2 ? "submultiplicativity_k2" : "submultiplicativity_k" + std::to_string(k);
  rep.tolerance = kRelTol;
  const int dim = 1 << n;
  double max_ratio = 0.0;
  for (long long t = 0; t < trials; ++t) {
    const std::uint64_t s = trial_seed(seed, rep.name, t);
    Rng rng(s);
    Matrix hm;
    double h2 = 0.0;
    if (k == 2) {
      auto h = scale::sample_powerlaw_hamiltonian(n, alpha, rng, scale::SampleMode::DenseRandom);
      hm = to_matrix(h.to_pauli_sum(), n).m;
      h2 = scale::h2_norm_grouped(h);
    } else {
      auto h = random_k_local(n, k, alpha, rng);
      hm = to_matrix(h.h, n).m;
      h2 = h.h2;
    }
    auto c = sample_contraction(dim, rng);
    if (c.spectrum.maxCoeff() > 1.0) throw std::logic_error("sampled operator exceeds unit norm");
    Matrix ho = hm * c.m;
    double worst = -kInf;
    if (k == 2) {
      const double f = spectrum_norm(c.spectrum, 2.0);
      const double lhs = schatten_norm(ho, 2.0, true);
      const double rhs = 2.0 * kE * h2 * f * (std::abs(std::log(f)) + 1.0);
      worst = relative_slack(lhs, rhs);
      max_ratio = std::max(max_ratio, lhs / rhs);
    } else {
      for (double p : p_list) {
        const double f = spectrum_norm(c.spectrum, p);
        const double lhs = schatten_norm(ho, p, true);
        const double rhs = kE * std::pow(p, k / 2.0) * h2 * f * std::pow(std::abs(std::log(f)) + 1.0, k / 2.0);
        worst = std::max(worst, relative_slack(lhs, rhs));
        max_ratio = std::max(max_ratio, lhs / rhs);
      }
    }
    rep.record(worst, s);
  }
  rep.extras["max_ratio"] = max_ratio;
  rep.extras["n"] = n;
  rep.extras["alpha"] = alpha;
  rep.extras["k"] = k;
  rep.finish();
  return rep;
}

CheckReport check_depolarizer_group() {
  CheckReport rep;
  rep.name = "depolarizer_group";
  rep.tolerance = 1e-12;
  const auto& g = depolarizer_group();
  auto find = [&g](const Matrix2& m) {
    double best = kInf;
    for (const auto& h : g) best = std::min(best, (m - h).cwiseAbs().maxCoeff());
    return best;
  };
  double min_gap = kInf;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b) min_gap = std::min(min_gap, (g[a] - g[b]).cwiseAbs().maxCoeff());
  rep.extras["order"] = static_cast<double>(g.size());
  rep.extras["min_separation"] = min_gap;
  rep.record(g.size() == 48 ? 0.0 : 1.0, 0);
  rep.record(min_gap > 0.1 ? 0.0 : 1.0, 0);
  double closure = 0.0, inverse = 0.0;
  for (const auto& a : g) {
    inverse = std::max(inverse, find(a.adjoint()));
    for (const auto& b : g) closure = std::max(closure, find(a * b));
  }
  rep.extras["closure_deviation"] = closure;
  rep.extras["inverse_deviation"] = inverse;
  rep.record(closure, 0);
  rep.record(inverse, 0);

  const cplx i(0.0, 1.0);
  Matrix2 x, y, z;
  x << 0, 1, 1, 0;
  y << 0, -i, i, 0;
  z << 1, 0, 0, -1;
  const Matrix2 d = (Matrix2::Identity() + i * x) / std::sqrt(2.0);
  const double zy = (d.adjoint() * z * d + y).cwiseAbs().maxCoeff();
  rep.extras["ZY_example_deviation"] = zy;
  rep.record(zy, 0);

  Matrix expected = Matrix::Zero(16, 16);
  expected(0, 0) = 1.0;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) expected(4 * b + b, 4 * a + a) = 1.0 / 3.0;
  const double dev = max_abs(depolarizer_transfer() - expected);
  rep.extras["average_deviation"] = dev;
  rep.record(dev, 0);
  rep.finish();
  return rep;
}

CheckReport check_zz_rotation(const std::vector<double>& theta_list) {
  CheckReport rep;
  rep.name = "zz_rotation";
  rep.tolerance = 1e-12;
  const PauliString zz = PauliString::from_letters("ZZ");
  const Matrix zzm = pauli_matrix(zz);
  const char* letters = "IXYZ";
  for (double theta : theta_list) {
    Matrix u = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) u(k, k) = std::polar(1.0, -theta * zzm(k, k).real());
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const PauliString p = PauliString::from_letters(std::string{letters[a], letters[b]});
        const Matrix pm = pauli_matrix(p);
        const Matrix conj = u.adjoint() * pm * u;
        Matrix expected = pm;
        if (!commutes(p, zz))
          expected = std::cos(2.0 * theta) * pm - cplx(0.0, std::sin(2.0 * theta)) * pauli_matrix(multiply(p, zz));
        worst = std::max(worst, max_abs(conj - expected));
      }
    const Matrix x0 = pauli_matrix(PauliString::from_letters("XI"));
    const Matrix y0z1 = pauli_matrix(PauliString::from_letters("YZ"));
    const Matrix closed = std::cos(2.0 * theta) * x0 - std::sin(2.0 * theta) * y0z1;
    worst = std::max(worst, max_abs(u.adjoint() * x0 * u - closed));
    rep.record(worst, 0);
  }
  rep.finish();
  return rep;
}

long long inclusion_exclusion_count(int N, int M) {
  if (N < 1 || M < 0 || M > 20) throw ContractError("inclusion-exclusion arguments out of range");
  auto binom = [](int n, int k) {
    long long c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
  };
  std::vector<long long> weight(static_cast<std::size_t>(M) + 1, 0);
  for (int k = N; k <= M; ++k)
    for (int p = N; p <= k; ++p) weight[k] += ((k - p) % 2 ? -1 : 1) * binom(k, p);
  long long total = 0;
  for (unsigned mask = 0; mask < (1u << M); ++mask) total += weight[static_cast<std::size_t>(std::popcount(mask))];
  return total;
}

CheckReport check_inclusion_exclusion(int N, int k_max) {
  if (N < 1 || k_max < N || k_max > 12) throw ContractError("need 1 <= N <= k_max <= 12");
  CheckReport rep;
  rep.name = "inclusion_exclusion";
  rep.tolerance = 0.0;
  for (int M = 0; M <= k_max; ++M) {
    const long long expected = M >= N ? 1 : 0;
    rep.record(static_cast<double>(std::llabs(inclusion_exclusion_count(N, M) - expected)), 0);
  }
  rep.extras["N"] = N;
  rep.extras["k_max"] = k_max;
  rep.finish();
  return rep;
}

CheckReport check_commutator_front(int n, long long trials, std::uint64_t seed) {
  if (n < 1 || n > 8) throw ContractError("commutator check needs 1 <= n <= 8");
  CheckReport rep;
  rep.name = "commutator_front";
  rep.tolerance = kRelTol;
  const int dim = 1 << n;
  for (long long k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(seed, rep.name, k);
    Rng rng(s);
    const int y = uniform_int(rng, 0, n - 1);
    Matrix a = random_complex(dim, dim, rng);
    Matrix b = embed(random_complex(2, 2, rng), {y}, n);
    const double lhs = schatten_norm(Matrix(b * a - a * b), 2.0, true);
    const double py = schatten_norm(site_projector_channel(a, n, y), 2.0, true);
    const double rhs = 2.0 * schatten_norm(b, kInf, false) * py;
    rep.record(relative_slack(lhs, rhs), s);
  }
  rep.finish();
  return rep;
}

CheckReport check_markov_front(int n, double alpha, const std::vector<double>& t_grid, long long trials,
                               std::uint64_t seed) {
  if (n < 2 || n > 10) throw ContractError("Markov front check needs 2 <= n <= 10");
  CheckReport rep;
  rep.name = "markov_front";
  rep.tolerance = kRelTol;
  int R = 1;
  while (R < n - 1) R = 2 * R + 1;
  const double rate_bound = bounds::frobenius_front_rate_bound(alpha, R).value;
  const Matrix a0 = pauli_matrix(PauliString::single(n, 0, 'X'));
  double markov_worst = -kInf, rate_worst = -kInf, max_rate_ratio = 0.0, max_rate = 0.0;
  long long points = 0;
  for (long long k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(seed, rep.name, k);
    Rng rng(s);
    auto h = scale::sample_powerlaw_hamiltonian(n, alpha, rng, scale::SampleMode::DenseRandom);
    HermitianEvolver ev(to_matrix(h.to_pauli_sum(), n).m);
    const Matrix a_eig = ev.rotate_in(a0);
    double worst = -kInf;
    Matrix at, dat;
    for (double t : t_grid) {
      ev.heisenberg_rotated(a_eig, t, at, &dat);
      const auto w = rightmost_weights(at, n, n - 1);
      const auto wd = rightmost_weights(dat, n, n - 1);
      const auto ws = rightmost_weights(Matrix(at + dat), n, n - 1);
      double front = 0.0, rate = 0.0, total = 0.0;
      for (int x = 0; x < n; ++x) {
        front += x * w[x];
        rate += x * (ws[x] - w[x] - wd[x]);
        total += w[x];
      }
      for (int x = 1; x < n; ++x) {
        const double sl = (w[x] - front / x) / std::max({std::abs(w[x]), std::abs(front / x), total});
        markov_worst = std::max(markov_worst, sl);
        worst = std::max(worst, sl);
      }
      const double rs = relative_slack(rate, rate_bound);
      rate_worst = std::max(rate_worst, rs);
      worst = std::max(worst, rs);
      max_rate = std::max(max_rate, rate);
      max_rate_ratio = std::max(max_rate_ratio, rate / rate_bound);
      ++points;
    }
    rep.record(worst, s);
  }
  rep.extras["markov_max_slack"] = markov_worst;
  rep.extras["rate_max_slack"] = rate_worst;
  rep.extras["rate_bound"] = rate_bound;
  rep.extras["max_rate"] = max_rate;
  rep.extras["max_rate_ratio"] = max_rate_ratio;
  rep.extras["points"] = static_cast<double>(points);
  rep.extras["R"] = R;
  rep.finish();
  return rep;
}

std::vector<CheckReport> run_all(std::uint64_t seed, long long trials) {
  if (trials < 1) throw ContractError("need at least one trial");
  const long long dense_trials = std::max(1LL, trials / 10);
  std::vector<CheckReport> out;
  out.push_back(check_depolarizer_group());
  out.push_back(check_zz_rotation({0.0, std::numbers::pi / 8, std::numbers::pi / 4, 0.3, 1.1, -0.7}));
  auto ie = check_inclusion_exclusion(1, 12);
  for (int N = 2; N <= 12; ++N) {
    ie.record(check_inclusion_exclusion(N, 12).max_slack, 0);
  }
  ie.extras.erase("N");
  ie.finish();
  out.push_back(ie);
  out.push_back(check_uniform_smoothness(0, 0, {2.0, 3.0, 4.0, 6.0}, trials, seed));
  out.push_back(check_nc_convexity(0, 0, {2.0, 3.0, 4.0, 6.0}, trials, seed));
  out.push_back(check_holder(trials, seed));
  out.push_back(check_riesz_thorin(trials, seed));
  out.push_back(check_commutator_front(4, dense_trials, seed));
  out.push_back(check_submultiplicativity(6, 2.0, dense_trials, seed, 2));
  out.push_back(check_submultiplicativity(6, 2.0, dense_trials, seed, 3, {2.0, 4.0}));
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(0.2 * k);
  out.push_back(check_markov_front(6, 2.0, grid, std::max(1LL, dense_trials / 10), seed));
  return out;
}

}  // namespace opgrowth::verifier
