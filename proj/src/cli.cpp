#include "roughmerton/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "roughmerton/config.hpp"
#include "roughmerton/distortion.hpp"
#include "roughmerton/errors.hpp"
#include "roughmerton/io.hpp"
#include "roughmerton/kernels.hpp"
#include "roughmerton/markov_approx.hpp"
#include "roughmerton/models.hpp"
#include "roughmerton/parallel.hpp"
#include "roughmerton/riccati.hpp"
#include "roughmerton/roughness.hpp"
#include "roughmerton/statistics.hpp"

namespace roughmerton {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Key groups. Defaults are the reference parameter set.
const std::vector<ConfigKey> kRunKeys{
    {"run.seed", "42", "RNG seed (u64)"},
    {"run.paths", "1000", "number of Monte Carlo paths"},
    {"run.dt", "0.00390625", "target time step"},
    {"run.antithetic", "false", "antithetic pairs of paths"},
    {"run.threads", "0", "worker threads (0 = hardware default)"},
};
const std::vector<ConfigKey> kMarketKeys{
    {"market.r", "0.02", "constant short rate"},
    {"market.r_times", "", "knot times of a piecewise-linear rate curve (list)"},
    {"market.r_values", "", "rates at market.r_times (list)"},
    {"market.theta", "1", "market price of variance risk"},
    {"market.rho", "-0.5", "correlation of stock and variance drivers"},
    {"market.gamma", "0.5", "power-utility exponent in (0, 1)"},
    {"market.T", "1", "investment horizon"},
    {"market.w0", "1", "initial wealth"},
    {"market.s0", "1", "initial stock price"},
};
const std::vector<ConfigKey> kHestonKeys{
    {"heston.v0", "0.04", "initial variance"},
    {"heston.kappa", "2", "mean reversion"},
    {"heston.phi", "0.04", "long-run variance level"},
    {"heston.sigma", "0.3", "volatility of variance"},
};
const std::vector<ConfigKey> kKernelKeys{
    {"kernel.kind", "fractional", "constant | fractional | exponential | gamma"},
    {"kernel.c", "1", "kernel scale"},
    {"kernel.alpha", "0.6", "fractional order (fractional, gamma)"},
    {"kernel.lambda", "0", "exponential damping (exponential, gamma)"},
};
const std::vector<ConfigKey> kMarchaudKeys{
    {"marchaud.nu0", "0.04", "volatility level nu0"},
    {"marchaud.alpha", "-0.75", "Marchaud exponent in (-1, -1/2)"},
    {"marchaud.z0", "0.04", "initial value of the driving CIR factor"},
    {"marchaud.kappa", "2", "CIR mean reversion"},
    {"marchaud.phi", "0.04", "CIR long-run level"},
    {"marchaud.sigma", "0.3", "CIR volatility"},
    {"marchaud.floor_eps", "1e-6", "floor of the variance map max(nu, eps)"},
};
const std::vector<ConfigKey> kPartitionKeys{
    {"partition.xi_min", "1e-4", "smallest partition knot"},
    {"partition.xi_max", "1e4", "largest partition knot"},
    {"partition.n", "50", "number of atoms"},
    {"partition.spacing", "geometric", "geometric | linear"},
    {"partition.convergence", "", "atom counts for a convergence study (list, nested)"},
    {"partition.laplace_t", "1", "argument of the Laplace-transform check"},
};

std::vector<ConfigKey> join(std::initializer_list<std::vector<ConfigKey>> groups,
                            std::vector<ConfigKey> extra = {}) {
  std::vector<ConfigKey> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Emitter {
 public:
  Emitter(fs::path dir, std::string command, json config, std::uint64_t seed)
      : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)), seed_(seed) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void emit(const std::string& name, const std::string& content) {
    write_text_file(dir_ / name, content);
    json meta{{"artifact", name},
              {"command", command_},
              {"content_hash", content_hash(content)},
              {"seed", seed_},
              {"config", config_},
              {"created_utc", utc_timestamp()}};
    write_text_file(dir_ / (name + ".meta.json"), meta.dump(2) + "\n");
  }

  void emit_json(const std::string& name, const json& j) { emit(name, j.dump(2) + "\n"); }

 private:
  fs::path dir_;
  std::string command_;
  json config_;
  std::uint64_t seed_;
};

// Effective configuration: defaults overlaid with user values.
class Settings {
 public:
  Settings(const std::vector<ConfigKey>& schema, const Config& user) {
    std::vector<std::string> known;
    for (const auto& k : schema) {
      known.push_back(k.key);
      cfg_.set(k.key, k.fallback);
    }
    user.require_known(known);
    for (const auto& [key, value] : user.entries()) cfg_.set(key, value);
  }

  bool empty(const std::string& key) const { return cfg_.get_string(key, "").empty(); }
  std::string str(const std::string& key) const { return cfg_.get_string(key, ""); }
  double num(const std::string& key) const { return cfg_.get_double(key, 0.0); }
  std::uint64_t u64(const std::string& key) const { return cfg_.get_u64(key, 0); }
  bool flag(const std::string& key) const { return cfg_.get_bool(key, false); }
  std::vector<double> list(const std::string& key) const {
    return empty(key) ? std::vector<double>{} : cfg_.get_doubles(key, {});
  }
  json echo() const { return cfg_.to_json(); }

  std::uint64_t seed() const { return u64("run.seed"); }
  std::size_t paths() const {
    const auto n = u64("run.paths");
    if (n == 0) throw DomainError("run.paths must be positive");
    return n;
  }
  SimulationOptions options() const {
    SimulationOptions o{seed(), flag("run.antithetic")};
    if (o.antithetic && paths() % 2 != 0) {
      throw DomainError("antithetic sampling needs an even number of paths");
    }
    return o;
  }

  MarketParams market() const {
    MarketParams m;
    if (!empty("market.r_times") || !empty("market.r_values")) {
      m.r = RateCurve(list("market.r_times"), list("market.r_values"));
    } else {
      m.r = RateCurve(num("market.r"));
    }
    m.theta = num("market.theta");
    m.rho = num("market.rho");
    m.gamma_ra = num("market.gamma");
    m.T = num("market.T");
    m.w0 = num("market.w0");
    m.s0 = num("market.s0");
    m.validate();
    return m;
  }

  KernelSpec kernel() const {
    const double c = num("kernel.c");
    switch (kernel_kind_from_string(str("kernel.kind"))) {
      case KernelKind::Constant: return KernelSpec::constant(c);
      case KernelKind::Fractional: return KernelSpec::fractional(c, num("kernel.alpha"));
      case KernelKind::Exponential: return KernelSpec::exponential(c, num("kernel.lambda"));
      case KernelKind::Gamma:
        return KernelSpec::gamma(c, num("kernel.alpha"), num("kernel.lambda"));
    }
    throw DomainError("unknown kernel kind");
  }

  VolterraHestonParams heston() const {
    VolterraHestonParams h{num("heston.v0"), num("heston.kappa"), num("heston.phi"),
                           num("heston.sigma"), kernel()};
    h.validate();
    return h;
  }

  MarchaudParams marchaud() const {
    MarchaudParams p{num("marchaud.nu0"),   num("marchaud.alpha"), num("marchaud.z0"),
                     num("marchaud.kappa"), num("marchaud.phi"),   num("marchaud.sigma"),
                     num("marchaud.floor_eps")};
    p.validate();
    return p;
  }

  PartitionSpec partition(std::size_t n) const {
    return {num("partition.xi_min"), num("partition.xi_max"), n,
            spacing_from_string(str("partition.spacing"))};
  }

  TimeGrid grid(double horizon) const { return TimeGrid::over(horizon, num("run.dt")); }

 private:
  Config cfg_;
};

std::size_t to_count(double x, const std::string& what) {
  if (!(x >= 1.0) || x != std::floor(x)) throw DomainError(what + " must be a positive integer");
  return static_cast<std::size_t>(x);
}

// Commands.

void cmd_kernels(const Settings& s, Emitter& e) {
  const KernelSpec k = s.kernel();
  const TimeGrid grid = s.grid(s.num("kernels.horizon"));
  const ResolventCurve curve = resolvent_second_kind(k, grid);
  e.emit("resolvent.csv", resolvent_csv(curve));
  const auto integral = resolvent_integral(k, grid);
  std::ostringstream os;
  os << "t,K,R,int_R\n";
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
    const double t = grid.node(j);
    os << format_double(t) << ',' << (j == 0 && k.singular_at_zero() ? std::string("inf")
                                                                      : format_double(eval_kernel(k, t)))
       << ',' << format_double(curve.values[j]) << ',' << format_double(integral[j]) << '\n';
  }
  e.emit("kernel_curves.csv", os.str());
  const double residual = resolvent_residual(k, curve);
  const double tol = resolvent_tolerance(k, grid.dt());
  json report{{"kernel", k.describe()},
              {"dt", grid.dt()},
              {"source", curve.source == ResolventSource::ClosedForm ? "closed_form" : "numerical"},
              {"resolvent_residual", residual},
              {"resolvent_tolerance", tol},
              {"resolvent_pass", residual <= tol}};
  const KernelSpec canon = k.canonical();
  if (canon.kind() == KernelKind::Fractional) {
    const double fk = first_kind_residual(canon, grid);
    const double a = canon.alpha();
    const double fk_tol = 2.0 * std::pow(grid.dt(), std::min(a, 1.0 - a));
    report["first_kind_residual"] = fk;
    report["first_kind_tolerance"] = fk_tol;
    report["first_kind_pass"] = fk <= fk_tol;
  }
  e.emit_json("kernels_report.json", report);
}

void cmd_riccati(const Settings& s, Emitter& e) {
  const KernelSpec k = s.kernel();
  const TimeGrid grid = s.grid(s.num("riccati.horizon"));
  const RiccatiCoefficients coeffs{s.num("riccati.c0"), s.num("riccati.c1"), s.num("riccati.c2")};
  RiccatiOptions opts;
  opts.corrector_iters = s.u64("riccati.corrector_iters");
  opts.blow_up_cap = s.num("riccati.blow_up_cap");
  const RiccatiSolution sol = solve_riccati(k, coeffs, grid, opts);
  e.emit("riccati.csv", riccati_csv(sol));
  const double residual = riccati_residual(sol);
  const double tol = riccati_tolerance(k, grid.dt());
  e.emit_json("riccati_report.json", {{"kernel", k.describe()},
                                      {"dt", grid.dt()},
                                      {"c0", coeffs.c0},
                                      {"c1", coeffs.c1},
                                      {"c2", coeffs.c2},
                                      {"phi_T", sol.values.back()},
                                      {"residual", residual},
                                      {"tolerance", tol},
                                      {"pass", residual <= tol}});
}

StrategySchedule strategy_for(const Settings& s, const MarketParams& m,
                              const VolterraHestonParams& h, const TimeGrid& grid) {
  const std::string kind = s.str("simulate.strategy");
  if (kind == "constant") return StrategySchedule::constant(grid, s.num("simulate.pi"));
  if (kind == "optimal") return solve_distortion(m, h, grid).strategy;
  throw DomainError("simulate.strategy must be none, constant or optimal");
}

void emit_matrix_csv(Emitter& e, const std::string& name, const std::string& column,
                     const TimeGrid& grid, std::size_t n_paths, const std::vector<double>& data) {
  const std::size_t nodes = grid.n_nodes();
  std::ostringstream os;
  os << "path_id,t," << column << '\n';
  for (std::size_t p = 0; p < n_paths; ++p) {
    for (std::size_t j = 0; j < nodes; ++j) {
      os << p << ',' << format_double(grid.node(j)) << ',' << format_double(data[p * nodes + j])
         << '\n';
    }
  }
  e.emit(name, os.str());
}

void cmd_simulate(const Settings& s, Emitter& e) {
  const std::string model = s.str("simulate.model");
  const MarketParams m = s.market();
  const TimeGrid grid = s.grid(m.T);
  const std::size_t n = s.paths();
  const SimulationOptions opts = s.options();
  if (model == "volterra") {
    const VolterraHestonParams h = s.heston();
    PathBundle b = simulate_volterra_heston(h, m, grid, n, opts);
    for (double& x : b.s) x *= m.s0;
    if (s.str("simulate.strategy") != "none") simulate_wealth(b, m, strategy_for(s, m, h, grid));
    const std::string fmt = s.str("simulate.format");
    if (fmt != "csv" && fmt != "binary" && fmt != "both") {
      throw DomainError("simulate.format must be csv, binary or both");
    }
    if (fmt != "binary") e.emit("paths.csv", path_bundle_csv(b));
    if (fmt != "csv") {
      std::ostringstream os;
      write_path_bundle_binary(b, os);
      e.emit("paths.vmpb", os.str());
    }
  } else if (model == "cir") {
    const CirParams p{s.num("heston.v0"), s.num("heston.kappa"), s.num("heston.phi"),
                      s.num("heston.sigma")};
    emit_matrix_csv(e, "cir.csv", "Z", grid, n, simulate_cir(p, grid, n, opts));
  } else if (model == "fbm") {
    emit_matrix_csv(e, "fbm.csv", "W", grid, n, simulate_fbm(s.num("simulate.hurst"), grid, n, opts.seed));
  } else if (model == "marchaud") {
    const MarchaudParams p = s.marchaud();
    const Quantization q =
        build_quantization(p.alpha_m, s.partition(to_count(s.num("partition.n"), "partition.n")));
    const PathBundle b = simulate_marchaud_factors(p, q, m.rho, grid, n, opts);
    const ApproxVolPaths vol = assemble_approx_vol(p, q, *b.z, *b.y_factors, grid);
    const std::size_t nodes = grid.n_nodes();
    std::ostringstream os;
    os << "path_id,t,Z,nu,V\n";
    for (std::size_t path = 0; path < n; ++path) {
      for (std::size_t j = 0; j < nodes; ++j) {
        const std::size_t k = path * nodes + j;
        os << path << ',' << format_double(grid.node(j)) << ',' << format_double((*b.z)[k]) << ','
           << format_double(vol.nu[k]) << ',' << format_double(vol.variance[k]) << '\n';
      }
    }
    e.emit("marchaud.csv", os.str());
  } else {
    throw DomainError("simulate.model must be volterra, cir, fbm or marchaud");
  }
}

std::vector<double> read_series(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read series file " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      out.push_back(parse_double(field, "series value"));
    } catch (const DomainError&) {
      if (!first) throw;
    }
    first = false;
  }
  return out;
}

void cmd_roughness(const Settings& s, Emitter& e) {
  std::vector<double> qs = s.list("roughness.qs");
  const std::size_t max_lag = to_count(s.num("roughness.max_lag"), "roughness.max_lag");
  std::vector<std::size_t> lags;
  for (std::size_t l = 1; l <= max_lag; ++l) lags.push_back(l);
  ScalingReport rep;
  if (!s.empty("roughness.input")) {
    const auto series = read_series(s.str("roughness.input"));
    rep = estimate_hurst(std::span<const double>(series), qs, lags);
  } else {
    const std::size_t steps = to_count(s.num("roughness.steps"), "roughness.steps");
    const TimeGrid grid = TimeGrid::with_steps(1.0, steps);
    const std::size_t n = s.paths();
    const auto paths = simulate_fbm(s.num("roughness.hurst"), grid, n, s.seed());
    std::vector<std::span<const double>> rows;
    for (std::size_t p = 0; p < n; ++p) rows.emplace_back(paths.data() + p * grid.n_nodes(), grid.n_nodes());
    rep = estimate_hurst(rows, qs, lags);
  }
  e.emit("scaling.csv", scaling_csv(rep));
  e.emit_json("scaling_summary.json", scaling_summary(rep));
}

void cmd_distortion(const Settings& s, Emitter& e) {
  const MarketParams m = s.market();
  const VolterraHestonParams h = s.heston();
  const TimeGrid grid = s.grid(m.T);
  RiccatiOptions opts;
  opts.corrector_iters = s.u64("riccati.corrector_iters");
  DistortionSolution sol = solve_distortion(m, h, grid, opts);
  const double p = s.empty("distortion.p") ? default_condition_p(sol.delta) : s.num("distortion.p");
  sol.conditions = check_conditions(sol, p, s.list("distortion.a_scan"));
  e.emit("strategy.csv", strategy_csv(sol));
  e.emit("curves.csv", distortion_curves_csv(sol));
  e.emit_json("distortion_summary.json", distortion_summary(sol));
}

void cmd_approx(const Settings& s, Emitter& e, const std::string& convergence_flag) {
  const MarchaudParams p = s.marchaud();
  MarketParams m = s.market();
  const TimeGrid grid = s.grid(m.T);
  const std::size_t n_atoms = to_count(s.num("partition.n"), "partition.n");
  const Quantization q = build_quantization(p.alpha_m, s.partition(n_atoms));
  e.emit("quantization.csv", quantization_csv(q));
  const LaplaceCheck lc = laplace_check(q, s.num("partition.laplace_t"));
  const ApproxValue v = feynman_kac_value(p, m, q, grid, s.paths(), s.options());
  e.emit_json("approx_value.json",
              {{"n", v.n},
               {"estimate", v.estimate},
               {"std_err", v.std_err},
               {"n_paths", v.n_paths},
               {"seed", v.seed},
               {"pi_star", optimal_strategy_rho0(m, grid).pi.front()},
               {"laplace", {{"t", s.num("partition.laplace_t")},
                            {"discrete", lc.discrete},
                            {"exact", lc.exact},
                            {"abs_err", lc.abs_err}}}});

  std::string list = convergence_flag.empty() ? s.str("partition.convergence") : convergence_flag;
  if (list.rfind("n=", 0) == 0) list = list.substr(2);
  if (!list.empty()) {
    std::vector<PartitionSpec> specs;
    for (double n : parse_doubles(list, "convergence atom counts")) {
      specs.push_back(s.partition(to_count(n, "convergence atom count")));
    }
    const ConvergenceTable t = convergence_study(p, m, specs, grid, s.paths(), s.options());
    e.emit("convergence.csv", convergence_csv(t));
    e.emit_json("convergence_summary.json",
                {{"nondecreasing", t.nondecreasing}, {"stabilizing", t.stabilizing}});
  }
}

void cmd_compare(const Settings& s, Emitter& e) {
  const MarketParams m = s.market();
  const VolterraHestonParams h = s.heston();
  const TimeGrid grid = s.grid(m.T);
  const DistortionSolution sol = solve_distortion(m, h, grid);
  const std::vector<double> mult = s.list("compare.multipliers");
  std::vector<StrategySchedule> strategies{sol.strategy};
  for (double k : mult) {
    StrategySchedule st = sol.strategy;
    for (double& x : st.pi) x *= k;
    strategies.push_back(st);
  }
  const VolterraHestonSimulator sim(h, m, grid, s.options());
  const auto samples = utility_samples(sim, strategies, s.paths());
  std::ostringstream os;
  os << "strategy,multiplier,estimate,std_err,j0,z_score,verdict\n";
  json rows = json::array();
  bool consistent = true;
  for (std::size_t k = 0; k < strategies.size(); ++k) {
    const SampleSummary sum = s.flag("run.antithetic") ? summarize_pairs(samples[k]) : summarize(samples[k]);
    const double z = z_score(sum.mean, sum.std_err, sol.j0, 0.0);
    const bool optimal = k == 0;
    const bool ok = optimal ? z <= 3.0 : sum.mean <= sol.j0 + 3.0 * sum.std_err;
    consistent = consistent && ok;
    const double multiplier = optimal ? 1.0 : mult[k - 1];
    const std::string name = optimal ? "optimal" : "perturbed";
    os << name << ',' << format_double(multiplier) << ',' << format_double(sum.mean) << ','
       << format_double(sum.std_err) << ',' << format_double(sol.j0) << ',' << format_double(z)
       << ',' << (ok ? "pass" : "fail") << '\n';
    rows.push_back({{"strategy", name},
                    {"multiplier", multiplier},
                    {"estimate", sum.mean},
                    {"std_err", sum.std_err},
                    {"z_score", z},
                    {"pass", ok}});
  }
  e.emit("compare.csv", os.str());
  e.emit_json("compare_summary.json", {{"j0", sol.j0},
                                       {"m0", sol.m0},
                                       {"delta", sol.delta},
                                       {"lambda", sol.lambda_tilde},
                                       {"conditions", condition_json(sol.conditions)},
                                       {"rows", rows},
                                       {"consistent", consistent}});
}

std::string keys_footer(const std::vector<ConfigKey>& keys) {
  std::ostringstream os;
  os << "\nConfig keys (section.key, default):\n";
  for (const auto& k : keys) {
    os << "  " << std::left << std::setw(24) << k.key << std::setw(14)
       << (k.fallback.empty() ? "(unset)" : k.fallback) << k.help << '\n';
  }
  return os.str();
}

}  // namespace

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> cmds{"kernels",    "riccati",  "simulate", "roughness",
                                             "distortion", "approx",   "compare"};
  return cmds;
}

std::vector<ConfigKey> command_keys(const std::string& command) {
  const ConfigKey seed = kRunKeys[0];
  const ConfigKey dt = kRunKeys[2];
  const ConfigKey threads = kRunKeys[4];
  if (command == "kernels") {
    return join({kKernelKeys}, {seed, dt, threads, {"kernels.horizon", "2", "grid horizon"}});
  }
  if (command == "riccati") {
    return join({kKernelKeys},
                {seed, dt, threads,
                 {"riccati.c0", "0", "constant coefficient"},
                 {"riccati.c1", "0", "linear coefficient"},
                 {"riccati.c2", "0", "quadratic coefficient"},
                 {"riccati.horizon", "1", "grid horizon"},
                 {"riccati.corrector_iters", "2", "corrector sweeps"},
                 {"riccati.blow_up_cap", "1e8", "blow-up threshold on |phi|"}});
  }
  if (command == "simulate") {
    return join({kRunKeys, kMarketKeys, kHestonKeys, kKernelKeys, kMarchaudKeys, kPartitionKeys},
                {{"simulate.model", "volterra", "volterra | cir | fbm | marchaud"},
                 {"simulate.strategy", "none", "none | constant | optimal (volterra only)"},
                 {"simulate.pi", "1", "fraction of wealth in the stock for strategy=constant"},
                 {"simulate.format", "csv", "csv | binary | both (volterra only)"},
                 {"simulate.hurst", "0.1", "Hurst index for model=fbm"}});
  }
  if (command == "roughness") {
    return join({}, {seed, kRunKeys[1], threads,
                     {"roughness.hurst", "0.1", "Hurst index of the simulated fBm series"},
                     {"roughness.steps", "2048", "steps per simulated series"},
                     {"roughness.qs", "0.5,1,1.5,2,3", "moment orders (list)"},
                     {"roughness.max_lag", "20", "lags 1..max_lag in steps"},
                     {"roughness.input", "", "CSV file of log-volatility samples (last column)"}});
  }
  if (command == "distortion") {
    return join({kMarketKeys, kHestonKeys, kKernelKeys},
                {seed, dt, threads,
                 {"riccati.corrector_iters", "2", "corrector sweeps"},
                 {"distortion.p", "", "exponent p of the third condition (default automatic)"},
                 {"distortion.a_scan", "1.1,1.5,2,4", "values of a scanned for eta (list)"}});
  }
  if (command == "approx") {
    // the Markovian value exists only without correlation
    auto market = kMarketKeys;
    for (auto& k : market) {
      if (k.key == "market.rho") k = {"market.rho", "0", "correlation; must be 0 for approx"};
    }
    return join({kRunKeys, market, kMarchaudKeys, kPartitionKeys});
  }
  if (command == "compare") {
    return join({kRunKeys, kMarketKeys, kHestonKeys, kKernelKeys},
                {{"compare.multipliers", "0,2", "multiples of pi* used as perturbed strategies"}});
  }
  throw DomainError("unknown command '" + command + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rough Heston portfolio optimisation toolkit", "roughmerton"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<double> dt;
    std::optional<std::uint64_t> threads;
    std::vector<std::string> overrides;
    std::string convergence;
  };
  std::map<std::string, Flags> flags;
  for (const auto& cmd : cli_commands()) {
    Flags& f = flags[cmd];
    CLI::App* sub = app.add_subcommand(cmd, "");
    sub->footer(keys_footer(command_keys(cmd)));
    sub->add_option("--config", f.config, "config file");
    sub->add_option("--out", f.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", f.seed, "RNG seed (overrides run.seed)");
    sub->add_option("--paths", f.paths, "Monte Carlo paths (overrides run.paths)");
    sub->add_option("--dt", f.dt, "time step (overrides run.dt)");
    sub->add_option("--threads", f.threads, "worker threads (overrides run.threads)");
    sub->add_option("--set", f.overrides, "section.key=value override (repeatable)");
    if (cmd == "approx") {
      sub->add_option("--convergence", f.convergence, "atom counts, e.g. n=10,20,40");
    }
  }
  app.get_subcommand("kernels")->description("resolvent curves and identity residuals");
  app.get_subcommand("riccati")->description("solve a Riccati-Volterra equation");
  app.get_subcommand("simulate")->description("simulate path bundles");
  app.get_subcommand("roughness")->description("Hurst estimate by moment scaling");
  app.get_subcommand("distortion")->description("martingale-distortion solution and conditions");
  app.get_subcommand("approx")->description("Marchaud quantization, value and convergence");
  app.get_subcommand("compare")->description("distortion value against its Monte Carlo check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const Flags& f = flags[command];
  try {
    Config user = f.config.empty() ? Config{} : Config::load(f.config);
    for (const auto& o : f.overrides) user.set(o);
    if (f.seed) user.set("run.seed", std::to_string(*f.seed));
    if (f.paths) user.set("run.paths", std::to_string(*f.paths));
    if (f.dt) user.set("run.dt", format_double(*f.dt));
    if (f.threads) user.set("run.threads", std::to_string(*f.threads));
    const Settings s(command_keys(command), user);
    if (const auto t = s.u64("run.threads"); t > 0) set_thread_count(t);

    Emitter e(f.out_dir, command, s.echo(), s.seed());
    if (command == "kernels") cmd_kernels(s, e);
    else if (command == "riccati") cmd_riccati(s, e);
    else if (command == "simulate") cmd_simulate(s, e);
    else if (command == "roughness") cmd_roughness(s, e);
    else if (command == "distortion") cmd_distortion(s, e);
    else if (command == "approx") cmd_approx(s, e, f.convergence);
    else if (command == "compare") cmd_compare(s, e);
    return kExitOk;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::logic_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace roughmerton
