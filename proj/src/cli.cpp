#include "opgrowth/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "opgrowth/bounds.hpp"
#include "opgrowth/error.hpp"
#include "opgrowth/protocol.hpp"
#include "opgrowth/reduced.hpp"
#include "opgrowth/seed.hpp"
#include "opgrowth/verifier.hpp"

namespace opgrowth::cli {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kSubcommands = {"bounds", "protocol", "reduced", "verify", "oracle-compare", "sweep"};

const std::map<std::string, std::string> kDescriptions = {
    {"bounds", "evaluate growth-rate bounds"},
    {"protocol", "build a growth schedule and its recursion table"},
    {"reduced", "Monte Carlo of the reduced classical process"},
    {"verify", "randomized checks of the norm inequalities"},
    {"oracle-compare", "reduced process against the exact channel"},
    {"sweep", "parameter sweep as CSV"}};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["subcommand"] = cfg.subcommand;
  for (const auto& [k, v] : cfg.values) j[k] = v;
  return j;
}

void emit(const ExperimentConfig& cfg, const std::string& content, const std::string& summary, std::ostream& out,
          std::ostream& err) {
  const std::string path = cfg.get("out");
  if (path.empty()) {
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
    err << summary << '\n';
  } else {
    write_atomic(path, content);
    out << summary << '\n';
  }
}

protocol::ProtocolParams params_from(const ExperimentConfig& cfg) {
  protocol::ProtocolParams p;
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  if (cfg.has("m") || cfg.has("q-star")) {
    if (!cfg.has("m") || !cfg.has("q-star")) throw ConfigError("m and q-star must be given together");
    p = protocol::make_params(static_cast<int>(cfg.get_int("d")), cfg.get_double("alpha"),
                              static_cast<int>(cfg.get_int("m")), static_cast<int>(cfg.get_int("q-star")), seed);
  } else {
    p = protocol::derive_params(cfg.get_double("r"), cfg.get_double("alpha"), static_cast<int>(cfg.get_int("d")),
                                seed);
  }
  p.adaptive_tau = cfg.get_bool("adaptive-tau");
  return p;
}

unsigned threads_of(const ExperimentConfig& cfg) {
  return static_cast<unsigned>(std::max(1LL, cfg.get_int("threads")));
}

int cmd_bounds(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string kind = cfg.get("kind");
  const double alpha = cfg.get_double("alpha"), r = cfg.get_double("r");
  std::vector<bounds::BoundReport> reps;
  auto frob = [&] {
    const double R = std::round(r);
    if (R != r || R < 1 || R > 1 << 30) throw ConfigError("frobenius bound needs an integer R with R+1 a power of two");
    reps.push_back(bounds::frobenius_report(alpha, static_cast<int>(R), cfg.get_double("delta")));
  };
  auto pn = [&] {
    reps.push_back(bounds::pnorm_report(alpha, r, cfg.get_double("p"), cfg.get_double("delta"),
                                        cfg.get_double("c-prime")));
  };
  auto conc = [&] { reps.push_back(bounds::concentration_report(alpha, r, cfg.get_double("epsilon"), cfg.get_double("C"))); };
  if (kind == "frobenius")
    frob();
  else if (kind == "pnorm")
    pn();
  else if (kind == "concentration")
    conc();
  else if (kind == "all") {
    frob();
    pn();
    if (alpha > 2.0 && alpha < 3.0) conc();
  } else {
    throw ConfigError("unknown bound kind: " + kind);
  }
  json j;
  j["config"] = config_json(cfg);
  if (reps.size() == 1) {
    j["report"] = json::parse(reps[0].to_json());
  } else {
    j["reports"] = json::array();
    for (const auto& r2 : reps) j["reports"].push_back(json::parse(r2.to_json()));
  }
  std::ostringstream summary;
  summary << "bounds " << kind;
  for (const auto& r2 : reps) summary << " " << r2.kind << "[" << r2.regime << "]=" << fmt(r2.bound);
  emit(cfg, j.dump(2), summary.str(), out, err);
  return kExitOk;
}

json recursion_json(const reduced::RecursionTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"q", r.q},
                    {"lambda1", r.lambda1},
                    {"eta1", r.eta1},
                    {"eta2", r.eta2},
                    {"eta3", r.eta3},
                    {"s", r.s},
                    {"tau", r.tau},
                    {"p1", r.p1},
                    {"p_star", r.p_star},
                    {"vacuous", r.vacuous}});
  return {{"rows", rows}, {"floor_eta", t.floor_eta}, {"floor_product", t.floor_product}};
}

int cmd_protocol(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto params = params_from(cfg);
  const auto schedule = protocol::assemble(params);
  json j;
  j["config"] = config_json(cfg);
  j["schedule"] = json::parse(schedule.to_json());
  j["recursion"] = recursion_json(reduced::analytic_recursion(params));
  std::ostringstream summary;
  summary << "protocol d=" << params.d << " alpha=" << params.alpha << " m=" << params.m << " q*=" << params.q_star
          << " layers=" << schedule.layers.size() << " t=" << fmt(schedule.total_runtime);
  emit(cfg, j.dump(2), summary.str(), out, err);
  return kExitOk;
}

int cmd_reduced(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto params = params_from(cfg);
  const auto table = reduced::analytic_recursion(params);
  const double lambda = table.at(params.q_star).lambda1;
  const double min_diam = params.R(params.q_star) / params.m;
  const long long trials = cfg.get_int("trials");
  const auto mc = reduced::run_monte_carlo(params, trials, lambda, min_diam, threads_of(cfg));
  json levels = json::array();
  for (int q = 0; q <= params.q_star; ++q) {
    const auto idx = static_cast<std::size_t>(reduced::level_end_index(q));
    double occ = 0.0, diam = 0.0;
    for (const auto& tr : mc.trajectories) {
      occ += static_cast<double>(tr[idx].occupancy);
      diam += static_cast<double>(tr[idx].diameter);
    }
    levels.push_back({{"q", q},
                      {"trajectory_index", idx},
                      {"mean_occupancy", occ / trials},
                      {"mean_diameter", diam / trials}});
  }
  json j;
  j["config"] = config_json(cfg);
  j["lambda_threshold"] = lambda;
  j["min_diameter"] = min_diam;
  j["success"] = {{"trials", mc.success.trials},
                  {"successes", mc.success.successes},
                  {"estimate", mc.success.estimate},
                  {"wilson_lower", mc.success.lower},
                  {"wilson_upper", mc.success.upper}};
  j["certified_eta"] = table.at(params.q_star).eta1;
  j["levels"] = levels;
  j["recursion"] = recursion_json(table);
  std::ostringstream summary;
  summary << "reduced trials=" << trials << " success=" << fmt(mc.success.estimate) << " ["
          << fmt(mc.success.lower) << ", " << fmt(mc.success.upper) << "]";
  emit(cfg, j.dump(2), summary.str(), out, err);
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto reports = verifier::run_all(static_cast<std::uint64_t>(cfg.get_int("seed")), cfg.get_int("trials"));
  json j;
  j["config"] = config_json(cfg);
  j["checks"] = json::array();
  int failed = 0;
  for (const auto& r : reports) {
    j["checks"].push_back(json::parse(r.to_json()));
    failed += !r.pass;
  }
  std::ostringstream summary;
  summary << "verify checks=" << reports.size() << " failed=" << failed;
  emit(cfg, j.dump(2), summary.str(), out, err);
  return failed ? kExitCheckFailed : kExitOk;
}

WeightedPauliSum random_initial(int n, Rng& rng) {
  WeightedPauliSum a(n);
  std::uniform_int_distribution<int> letter(0, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  const int terms = 1 + static_cast<int>(rng() % 4);
  for (int k = 0; k < terms; ++k) {
    PauliString p(n);
    for (int s = 0; s < n; ++s) p.set_letter_code(s, letter(rng));
    a.add(p, g(rng));
  }
  const double norm = frobenius_norm(a);
  if (norm > 0.0) a *= 1.0 / norm;
  return a;
}

int cmd_oracle_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  auto params = params_from(cfg);
  const long long n = params.site_count();
  if (n > 8) throw ConfigError("oracle comparison needs at most 8 sites");
  const double trunc = cfg.get_double("truncation");
  const long long trials = cfg.get_int("trials");
  double max_err = 0.0, max_discarded = 0.0;
  std::uint64_t worst_seed = 0;
  for (long long k = 0; k < trials; ++k) {
    params.seed = derive_seed(static_cast<std::uint64_t>(cfg.get_int("seed")), "schedule/" + std::to_string(k));
    auto schedule = protocol::assemble(params);
    protocol::materialize(schedule);
    Rng rng = make_rng(params.seed, "initial");
    const auto init = random_initial(static_cast<int>(n), rng);
    const auto exact = protocol::simulate_exact(schedule, init);
    const auto branch = protocol::simulate_pauli_branching(schedule, init, trunc);
    const double e = exact.max_abs_difference(branch.op);
    if (e > max_err) {
      max_err = e;
      worst_seed = params.seed;
    }
    max_discarded = std::max(max_discarded, branch.discarded_weight);
  }
  const double tol = 1e-9 + std::sqrt(max_discarded);
  const bool pass = max_err < tol;
  json j;
  j["config"] = config_json(cfg);
  j["sites"] = n;
  j["schedules"] = trials;
  j["max_coefficient_error"] = max_err;
  j["max_discarded_weight"] = max_discarded;
  j["tolerance"] = tol;
  j["worst_seed"] = worst_seed;
  j["pass"] = pass;
  std::ostringstream summary;
  summary << "oracle-compare schedules=" << trials << " sites=" << n << " max_error=" << fmt(max_err)
          << (pass ? " PASS" : " FAIL");
  emit(cfg, j.dump(2), summary.str(), out, err);
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string csv = sweep_csv(cfg);
  long long rows = -1;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) rows += !line.empty() && line[0] != '#';
  std::ostringstream summary;
  summary << "sweep param=" << cfg.get("param") << " points=" << cfg.get("points") << " rows=" << rows;
  emit(cfg, csv, summary.str(), out, err);
  return kExitOk;
}

}  // namespace

bool ExperimentConfig::has(const std::string& key) const {
  auto it = values.find(key);
  return it != values.end() && !it->second.empty();
}

std::string ExperimentConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("unknown key: " + key);
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
  const std::string v = get(key);
  if (v.empty()) throw ConfigError("missing value for " + key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("not a number: " + key + "=" + v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: " + key + "=" + v);
  }
}

long long ExperimentConfig::get_int(const std::string& key) const {
  const std::string v = get(key);
  if (v.empty()) throw ConfigError("missing value for " + key);
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos == v.size()) return i;
  } catch (const std::logic_error&) {
  }
  const double d = get_double(key);
  if (d != std::floor(d) || std::abs(d) > 9e18) throw ConfigError("not an integer: " + key + "=" + v);
  return static_cast<long long>(d);
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
  throw ConfigError("not a boolean: " + key + "=" + v);
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "alpha", "d",      "r",  "m",  "q-star", "p",    "delta", "epsilon", "trials",  "seed", "truncation",
      "out",   "threads", "kind", "param", "lo", "hi", "points", "grid", "c-prime", "C", "adaptive-tau"};
  return keys;
}

ExperimentConfig default_config(const std::string& subcommand) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end())
    throw ConfigError("unknown subcommand: " + subcommand);
  ExperimentConfig c;
  c.subcommand = subcommand;
  c.values = {{"alpha", "1.5"},  {"d", "1"},         {"r", "1000"},    {"m", ""},
              {"q-star", ""},    {"p", "2"},         {"delta", "0.5"}, {"epsilon", "0.1"},
              {"trials", "1000"}, {"seed", "0"},     {"truncation", "0"}, {"out", ""},
              {"threads", std::to_string(default_threads())}, {"kind", "frobenius"}, {"param", "r"},
              {"lo", "1000"},    {"hi", "100000"},  {"points", "5"},  {"grid", "geometric"},
              {"c-prime", "1"},  {"C", "1"},         {"adaptive-tau", "false"}};
  if (subcommand == "bounds") c.values["r"] = "127";
  if (subcommand == "oracle-compare") {
    c.values["m"] = "2";
    c.values["q-star"] = "2";
    c.values["trials"] = "100";
  }
  if (subcommand == "sweep") c.values["trials"] = "20";
  return c;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto& keys = known_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + " lacks '='");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key: " + key);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  for (const auto& [k, v] : parse_config_text(ss.str())) cfg.values[k] = v;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(derive_seed(0, path) % 100000);
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ResourceError("cannot write " + tmp.string());
    f << content;
    if (!content.empty() && content.back() != '\n') f << '\n';
    f.flush();
    if (!f) throw ResourceError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string sweep_csv(const ExperimentConfig& cfg) {
  const std::string param = cfg.get("param");
  const std::string grid_kind = cfg.get("grid");
  const double lo = cfg.get_double("lo"), hi = cfg.get_double("hi");
  const int points = static_cast<int>(cfg.get_int("points"));
  if (points < 1) throw ConfigError("empty grid");
  if (param != "r" && param != "alpha") throw ConfigError("sweep parameter must be r or alpha");
  std::vector<double> grid;
  if (grid_kind == "geometric") {
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("geometric grid needs 0 < lo <= hi");
    grid = points == 1 ? std::vector<double>{lo} : protocol::geometric_grid(lo, hi, points);
  } else if (grid_kind == "linear") {
    if (!(hi >= lo)) throw ConfigError("linear grid needs lo <= hi");
    for (int k = 0; k < points; ++k) grid.push_back(points == 1 ? lo : lo + (hi - lo) * k / (points - 1));
  } else {
    throw ConfigError("grid must be geometric or linear");
  }
  const int d = static_cast<int>(cfg.get_int("d"));
  const double delta = cfg.get_double("delta"), p = cfg.get_double("p");
  const long long trials = cfg.get_int("trials");
  const auto master = static_cast<std::uint64_t>(cfg.get_int("seed"));

  std::ostringstream os;
  os.precision(12);
  os << "# opgrowth sweep\n";
  for (const auto& [k, v] : cfg.values) os << "# config " << k << "=" << v << "\n";
  os << "# columns: param value; alpha; d; r; R_frob = smallest 2^k-1 >= r; frobenius_time at R_frob;\n"
     << "#   pnorm_time (alpha > 3/2, c'=1); m, q_star, t_qstar, tau_top of the protocol (d < alpha < d+1);\n"
     << "#   mc_trials, mc_success, mc_lower, mc_upper (Wilson 95%) of the reduced process; seed of the MC cell.\n"
     << "# empty cells are outside the validity range of that column\n";
  os << "param,value,alpha,d,r,R_frob,frobenius_time,pnorm_time,m,q_star,t_qstar,tau_top,mc_trials,mc_success,"
        "mc_lower,mc_upper,seed\n";
  std::vector<double> xs, ts;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double alpha = param == "alpha" ? grid[k] : cfg.get_double("alpha");
    const double r = param == "r" ? grid[k] : cfg.get_double("r");
    os << param << "," << grid[k] << "," << alpha << "," << d << "," << r << ",";
    long long R = 1;
    while (R < r) R = 2 * R + 1;
    if (d == 1 && alpha > 1.0 && R < (1LL << 30))
      os << R << "," << bounds::frobenius_lightcone_time(alpha, static_cast<int>(R), delta) << ",";
    else
      os << ",,";
    if (alpha > 1.5 && r >= 4.0)
      os << bounds::pnorm_lightcone_time(alpha, r, p, delta) << ",";
    else
      os << ",";
    const std::uint64_t cell_seed = derive_seed(master, "sweep/" + std::to_string(k));
    if (alpha > d && alpha < d + 1 && r >= std::exp(1.0)) {
      auto params = protocol::derive_params(r, alpha, d, cell_seed);
      params.adaptive_tau = cfg.get_bool("adaptive-tau");
      const auto schedule = protocol::assemble(params);
      const double t = schedule.total_runtime;
      os << params.m << "," << params.q_star << "," << t << "," << schedule.tau.back() << ",";
      xs.push_back(r);
      ts.push_back(t);
      if (trials > 0) {
        const auto table = reduced::analytic_recursion(params);
        const auto est = reduced::estimate_success(params, trials, table.at(params.q_star).lambda1,
                                                   params.R(params.q_star) / params.m, threads_of(cfg));
        os << trials << "," << est.estimate << "," << est.lower << "," << est.upper << "," << cell_seed << "\n";
      } else {
        os << "0,,,," << cell_seed << "\n";
      }
    } else {
      os << ",,,,,,,," << cell_seed << "\n";
    }
  }
  if (param == "r" && xs.size() >= 2) os << "# loglog_slope t_qstar " << protocol::fit_loglog_slope(xs, ts) << "\n";
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator growth toolkit", "opgrowth"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, bool> adaptive;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    subs[name] = sub;
    auto& store = flags[name];
    for (const auto& key : known_keys()) {
      if (key == "adaptive-tau") continue;
      sub->add_option("--" + key, store[key]);
    }
    sub->add_flag("--adaptive-tau", adaptive[name]);
    sub->add_option("--config", config_paths[name], "key=value file");
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfigError;
  }
  std::string name;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) name = n;
  try {
    ExperimentConfig cfg = default_config(name);
    if (!config_paths[name].empty()) apply_config_file(cfg, config_paths[name]);
    CLI::App* sub = subs[name];
    for (const auto& key : known_keys()) {
      if (key == "adaptive-tau") continue;
      if (sub->count("--" + key)) cfg.values[key] = flags[name][key];
    }
    if (sub->count("--adaptive-tau")) cfg.values["adaptive-tau"] = adaptive[name] ? "true" : "false";
    if (name == "bounds") return cmd_bounds(cfg, out, err);
    if (name == "protocol") return cmd_protocol(cfg, out, err);
    if (name == "reduced") return cmd_reduced(cfg, out, err);
    if (name == "verify") return cmd_verify(cfg, out, err);
    if (name == "oracle-compare") return cmd_oracle_compare(cfg, out, err);
    return cmd_sweep(cfg, out, err);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace opgrowth::cli
