// Experiment runner: every subcommand writes a CSV (plus a resolved-config
// manifest) and is deterministic given its seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsaw/csv.hpp"
#include "wsaw/enumerate.hpp"
#include "wsaw/lace.hpp"
#include "wsaw/montecarlo.hpp"
#include "wsaw/rng.hpp"
#include "wsaw/scaling.hpp"
#include "wsaw/version.hpp"

using json = nlohmann::json;
using namespace wsaw;

namespace {

struct Options {
  std::string command;
  int dim = 2;
  double beta = 0.1;
  int r = 0;
  int n = 6;
  int n_min = 1;
  std::uint64_t seed = 1;
  std::string budget = "small";
  std::string out = "out.csv";
  int chains = 2;
  int tours = 2000;
  int grid = 11;
  int blocks = 2;
  double k_scale = 0.0;  // 0: defaults to n
  double d_hat = 0.0;    // 0: estimate from MSD
  double epsilon = 0.25;
  double z = 0.0;  // 0: 0.9 / mu_hat
  std::string rs = "20,40,80";
  bool use_perm = false;

  json to_json() const {
    return json{{"command", command}, {"dim", dim},       {"beta", beta},
                {"r", r},             {"n", n},           {"n_min", n_min},
                {"seed", seed},       {"budget", budget}, {"out", out},
                {"chains", chains},   {"tours", tours},   {"grid", grid},
                {"blocks", blocks},   {"k_scale", k_scale}, {"d_hat", d_hat},
                {"epsilon", epsilon}, {"z", z},           {"rs", rs},
                {"use_perm", use_perm}};
  }

  static Options from_json(const json& j) {
    Options o;
    o.command = j.at("command").get<std::string>();
    o.dim = j.at("dim").get<int>();
    o.beta = j.at("beta").get<double>();
    o.r = j.at("r").get<int>();
    o.n = j.at("n").get<int>();
    o.n_min = j.at("n_min").get<int>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.budget = j.at("budget").get<std::string>();
    o.out = j.at("out").get<std::string>();
    o.chains = j.at("chains").get<int>();
    o.tours = j.at("tours").get<int>();
    o.grid = j.at("grid").get<int>();
    o.blocks = j.at("blocks").get<int>();
    o.k_scale = j.at("k_scale").get<double>();
    o.d_hat = j.at("d_hat").get<double>();
    o.epsilon = j.at("epsilon").get<double>();
    o.z = j.at("z").get<double>();
    o.rs = j.at("rs").get<std::string>();
    o.use_perm = j.at("use_perm").get<bool>();
    return o;
  }
};

struct Budget {
  std::uint64_t max_nodes = 0;
  std::int64_t samples = 0;
  std::int64_t sweeps = 0;
};

Budget resolve_budget(const std::string& name) {
  if (name == "small") return {20'000'000ull, 20'000, 20'000};
  if (name == "medium") return {400'000'000ull, 200'000, 100'000};
  if (name == "large") return {4'000'000'000ull, 2'000'000, 400'000};
  throw std::invalid_argument("budget must be small, medium or large");
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

void write_manifest(const Options& opt, const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "wsaw";
  m["version"] = version_string;
  m["config"] = opt.to_json();
  m["outputs"] = outputs;
  std::ofstream f(opt.out + ".manifest.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest next to " + opt.out);
  f << m.dump(2) << "\n";
}

ModelParams params_of(const Options& opt) {
  ModelParams p{opt.dim, opt.beta, opt.r, opt.n};
  p.validate();
  return p;
}

MetropolisConfig metropolis_config(const Options& opt, const Budget& budget,
                                   std::int64_t sweeps_scale = 1) {
  MetropolisConfig cfg;
  cfg.sweeps = std::max<std::int64_t>(64, budget.sweeps / sweeps_scale);
  cfg.thermalization = cfg.sweeps / 8;
  cfg.seed = opt.seed;
  cfg.chains = opt.chains;
  return cfg;
}

// ---------------------------------------------------------------------------

void run_enumerate(const Options& opt, const Budget& budget) {
  ModelParams p = params_of(opt);
  EnumerationConfig cfg;
  cfg.max_nodes = budget.max_nodes;
  EnumerationSummary s = enumerate(p, cfg);

  CsvWriter summary(opt.out);
  summary.row("n", "c_n", "msd");
  summary.row(s.n, s.c_n, s.c_n > 0 ? s.sum_sq_disp / s.c_n : 0.0);

  const std::string ep_path = opt.out + ".endpoints.csv";
  CsvWriter endpoints(ep_path);
  {
    std::vector<std::string> head;
    for (int a = 1; a <= p.dim; ++a) head.push_back("x_" + std::to_string(a));
    head.push_back("weight");
    endpoints.raw_row(head);
  }
  for (const auto& [x, w] : s.endpoint_weights) {
    std::vector<std::string> cells;
    for (Coord c : x) cells.push_back(std::to_string(c));
    cells.push_back(format_value(w));
    endpoints.raw_row(cells);
  }
  write_manifest(opt, {opt.out, ep_path});
  std::cout << "c_" << s.n << " = " << format_value(s.c_n) << "\n";
}

void run_lace_check(const Options& opt, const Budget& budget) {
  ModelParams base = params_of(opt);
  if (base.torus()) throw std::invalid_argument("lace-check runs on Z^d");
  std::uint64_t walks = 0, pow = 1;
  for (int n = 0; n <= opt.n; ++n) {
    walks += pow;
    pow *= static_cast<std::uint64_t>(2 * opt.dim);
  }
  if (walks > budget.max_nodes) throw BudgetExceeded("lace-check walk budget exceeded");

  CsvWriter csv(opt.out);
  csv.row("n", "beta", "max_residual");
  double overall = 0.0;
  for (double beta : {0.1, 0.5, 1.0}) {
    for (int n = 0; n <= opt.n; ++n) {
      ModelParams p{opt.dim, beta, 0, n};
      double worst = 0.0;
      for_each_walk(opt.dim, n, [&](const std::vector<std::uint8_t>& steps) {
        Walk w(opt.dim, steps);
        for (int m = 0; m <= n; ++m)
          worst = std::max(worst, kjk_residual(w, m, p));
      });
      csv.row(n, beta, worst);
      overall = std::max(overall, worst);
    }
  }

  // companion table: partial sums of the lace-term series at z = 0.9/mu_hat
  // (or --z), the summability diagnostic
  double z = opt.z;
  EnumerationConfig ecfg;
  ecfg.max_nodes = budget.max_nodes;
  if (z <= 0) {
    std::vector<double> ratios =
        connective_ratio_sequence(ModelParams{opt.dim, opt.beta, 0, opt.n}, opt.n, ecfg);
    z = 0.9 / ratios.back();
  }
  const std::string pi_path = opt.out + ".pi.csv";
  CsvWriter pi_csv(pi_path);
  pi_csv.row("n", "term", "partial_sum");
  for (const PiSeriesRow& row :
       pi_series_partial(ModelParams{opt.dim, opt.beta, 0, opt.n}, z, opt.n, ecfg))
    pi_csv.row(row.n, row.term, row.partial_sum);

  write_manifest(opt, {opt.out, pi_path});
  std::cout << "max KJK residual = " << format_value(overall) << "\n";
}

void run_perm(const Options& opt, const Budget&) {
  ModelParams p = params_of(opt);
  ChainGrowthConfig cfg;
  cfg.tours = opt.tours;
  cfg.seed = opt.seed;
  EstimateWithError e = perm_partition_estimate(p, cfg);
  CsvWriter csv(opt.out);
  csv.row("n", "mean", "std_error", "n_effective", "log_mean");
  csv.row(p.length, e.mean, e.std_error, e.n_effective, e.log_mean);
  write_manifest(opt, {opt.out});
  std::cout << "c_" << p.length << " estimate = " << format_value(e.mean) << " +- "
            << format_value(e.std_error) << "\n";
}

void run_metropolis(const Options& opt, const Budget& budget) {
  ModelParams p = params_of(opt);
  MetropolisConfig cfg = metropolis_config(opt, budget);
  const std::vector<std::string> names = {"end_norm_sq", "contacts"};

  const std::string trace_path = opt.out + ".trace.csv";
  CsvWriter trace(trace_path);
  trace.row("sweep", "end_norm_sq", "contacts");

  const std::int64_t measured = cfg.sweeps - cfg.thermalization;
  std::vector<std::vector<std::vector<double>>> series(
      static_cast<std::size_t>(cfg.chains),
      std::vector<std::vector<double>>(names.size()));
  for (int c = 0; c < cfg.chains; ++c) {
    MetropolisConfig chain_cfg = cfg;
    chain_cfg.seed = derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(c) + 1);
    chain_cfg.chains = 1;
    MetropolisSampler sampler(p, chain_cfg);
    for (std::int64_t s = 0; s < cfg.thermalization; ++s) sampler.sweep();
    for (std::int64_t s = 0; s < measured; ++s) {
      sampler.sweep();
      double e0 = sampler.end_norm_sq();
      double e1 = static_cast<double>(sampler.contacts());
      series[static_cast<std::size_t>(c)][0].push_back(e0);
      series[static_cast<std::size_t>(c)][1].push_back(e1);
      if (c == 0) trace.row(s, e0, e1);
    }
  }

  json summary;
  summary["n"] = p.length;
  for (std::size_t o = 0; o < names.size(); ++o) {
    double mean = 0.0, se_sq = 0.0, neff = 0.0;
    for (int c = 0; c < cfg.chains; ++c) {
      EstimateWithError e = batch_means(series[static_cast<std::size_t>(c)][o]);
      mean += e.mean;
      se_sq += e.std_error * e.std_error;
      neff += e.n_effective;
    }
    mean /= cfg.chains;
    summary[names[o]] = {{"mean", mean},
                         {"std_error", std::sqrt(se_sq) / cfg.chains},
                         {"n_effective", neff}};
  }
  std::ofstream sf(opt.out, std::ios::binary);
  sf << summary.dump(2) << "\n";
  write_manifest(opt, {opt.out, trace_path});
  std::cout << summary.dump(2) << "\n";
}

double estimate_d_hat(const ModelParams& p, const Options& opt, const Budget& budget) {
  // slope of E|w(n)|^2 through the window [n/2, n], three chain lengths
  std::map<int, double> msd;
  std::vector<int> lengths = {p.length / 2, (3 * p.length) / 4, p.length};
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  int idx = 0;
  for (int n : lengths) {
    ModelParams q = p;
    q.length = n;
    MetropolisConfig cfg = metropolis_config(opt, budget, 4);
    cfg.seed = derive_stream_seed(opt.seed, 1000 + static_cast<std::uint64_t>(idx++));
    cfg.chains = 1;
    auto est = metropolis_sample(q, cfg, {"end_norm_sq"});
    msd[n] = est["end_norm_sq"].mean;
  }
  return diffusion_fit(msd, lengths.front(), lengths.back()).d_hat;
}

void run_fdd(const Options& opt, const Budget& budget) {
  ModelParams p = params_of(opt);
  if (p.torus()) throw std::invalid_argument("fdd runs on the Z^d measure");
  const double k = opt.k_scale > 0 ? opt.k_scale : static_cast<double>(p.length);
  const double d_hat = opt.d_hat > 0 ? opt.d_hat : estimate_d_hat(p, opt, budget);

  IncrementSpec spec;
  spec.k_scale = k;
  for (int j = 1; j <= opt.blocks; ++j)
    spec.times.push_back(static_cast<double>(j) / opt.blocks *
                         (static_cast<double>(p.length) / k));
  spec.freq_grid = standard_frequency_grid(p.dim, opt.blocks);

  MetropolisConfig cfg = metropolis_config(opt, budget, 2);
  const int count = static_cast<int>(budget.samples / 2);
  std::vector<Walk> paths = sample_paths(p, cfg, count);
  FddResult res = fdd_statistic(paths, spec, d_hat);

  CsvWriter csv(opt.out);
  csv.row("tuple", "emp_re", "emp_im", "reference", "abs_deviation");
  for (std::size_t g = 0; g < res.points.size(); ++g)
    csv.row(static_cast<int>(g), res.points[g].empirical.real(),
            res.points[g].empirical.imag(), res.points[g].reference,
            res.points[g].abs_deviation);
  write_manifest(opt, {opt.out});
  std::cout << "fdd deviation = " << format_value(res.deviation)
            << " (D_hat = " << format_value(d_hat) << ", samples = " << count << ")\n";
}

void run_tightness(const Options& opt, const Budget& budget) {
  ModelParams p = params_of(opt);
  const int r_scale = opt.r > 0 ? opt.r
                                : std::max(1, static_cast<int>(std::sqrt(
                                                  static_cast<double>(p.length))));
  ModelParams zd = p;
  zd.torus_r = 0;
  MetropolisConfig cfg = metropolis_config(opt, budget, 2);
  const int count = static_cast<int>(budget.samples / 4);
  std::vector<Walk> paths = sample_paths(zd, cfg, count);

  const double horizon = static_cast<double>(p.length) / (static_cast<double>(r_scale) * r_scale);
  std::vector<double> ts;
  for (int i = 0; i < opt.grid; ++i)
    ts.push_back(horizon * i / std::max(1, opt.grid - 1));
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j) pairs.emplace_back(ts[i], ts[j]);

  const double a_hat = tightness_bound(paths, r_scale, pairs);
  CsvWriter csv(opt.out);
  csv.row("n", "r", "a_hat", "samples");
  csv.row(p.length, r_scale, a_hat, count);
  write_manifest(opt, {opt.out});
  std::cout << "A_hat = " << format_value(a_hat) << " (r = " << r_scale << ")\n";
}

void run_dilute(const Options& opt, const Budget& budget) {
  if (opt.r < 3) throw std::invalid_argument("dilute-ratio needs --r >= 3");
  std::vector<DiluteRow> rows;
  if (opt.use_perm) {
    std::vector<int> lengths;
    for (int n = opt.n_min; n <= opt.n; ++n) lengths.push_back(n);
    ChainGrowthConfig cfg;
    cfg.tours = opt.tours;
    cfg.seed = opt.seed;
    rows = dilute_ratio_perm(opt.dim, opt.beta, opt.r, lengths, cfg);
  } else {
    EnumerationConfig cfg;
    cfg.max_nodes = budget.max_nodes;
    rows = dilute_ratio_exact(opt.dim, opt.beta, opt.r, opt.n_min, opt.n, cfg);
  }
  double c_fit = 0.0;
  for (const DiluteRow& row : rows)
    if (row.bound_shape > 0)
      c_fit = std::max(c_fit, std::abs(row.ratio - 1.0) / row.bound_shape);
  CsvWriter csv(opt.out);
  csv.row("n", "r", "ratio", "std_error", "bound_shape");
  for (const DiluteRow& row : rows)
    csv.row(row.n, row.r, row.ratio, row.ratio_std_error, row.bound_shape);
  write_manifest(opt, {opt.out});
  std::cout << "fitted C = " << format_value(c_fit) << " over " << rows.size()
            << " lengths\n";
}

void run_degenerate(const Options& opt, const Budget& budget) {
  std::vector<int> r_list = parse_int_list(opt.rs);
  CsvWriter csv(opt.out);
  csv.row("n", "r", "epsilon", "p_hat", "std_error", "samples");
  int idx = 0;
  for (int r : r_list) {
    ModelParams p{opt.dim, opt.beta, r, opt.n};
    p.validate();
    MetropolisConfig cfg = metropolis_config(opt, budget, 8);
    cfg.seed = derive_stream_seed(opt.seed, 500 + static_cast<std::uint64_t>(idx++));
    cfg.chains = 1;
    DegenerateRow row = degenerate_tail_probability(
        p, cfg, opt.epsilon, static_cast<int>(budget.samples));
    csv.row(row.n, row.r, row.epsilon, row.p_hat, row.std_error, row.samples);
    std::cout << "(n=" << row.n << ", r=" << row.r
              << ") tail = " << format_value(row.p_hat) << "\n";
  }
  write_manifest(opt, {opt.out});
}

void run_plateau(const Options& opt, const Budget& budget) {
  if (opt.r < 3) throw std::invalid_argument("plateau needs --r >= 3");
  EnumerationConfig cfg;
  cfg.max_nodes = budget.max_nodes / 2;
  double z = opt.z;
  if (z <= 0) {
    ModelParams zd{opt.dim, opt.beta, 0, opt.n};
    std::vector<double> ratios = connective_ratio_sequence(zd, opt.n, cfg);
    z = 0.9 / ratios.back();
  }
  ModelParams zd{opt.dim, opt.beta, 0, opt.n};
  ModelParams torus{opt.dim, opt.beta, opt.r, opt.n};
  TwoPointTable g = two_point_series(zd, z, opt.n, cfg);
  TwoPointTable gt = two_point_series(torus, z, opt.n, cfg);

  CsvWriter csv(opt.out);
  {
    std::vector<std::string> head;
    for (int a = 1; a <= opt.dim; ++a) head.push_back("x_" + std::to_string(a));
    head.insert(head.end(), {"abs_x", "g_torus", "g_zd"});
    csv.raw_row(head);
  }
  for (const auto& [x, gtv] : gt.values) {
    std::vector<std::string> cells;
    for (Coord c : x) cells.push_back(std::to_string(c));
    cells.push_back(format_value(std::sqrt(static_cast<double>(norm_sq(x)))));
    cells.push_back(format_value(gtv));
    auto it = g.values.find(x);
    cells.push_back(format_value(it != g.values.end() ? it->second : 0.0));
    csv.raw_row(cells);
  }
  write_manifest(opt, {opt.out});
  std::cout << "plateau table at z = " << format_value(z) << " ("
            << gt.values.size() << " sites)\n";
}

void dispatch(const Options& opt) {
  Budget budget = resolve_budget(opt.budget);
  if (opt.command == "enumerate") return run_enumerate(opt, budget);
  if (opt.command == "lace-check") return run_lace_check(opt, budget);
  if (opt.command == "perm") return run_perm(opt, budget);
  if (opt.command == "metropolis") return run_metropolis(opt, budget);
  if (opt.command == "fdd") return run_fdd(opt, budget);
  if (opt.command == "tightness") return run_tightness(opt, budget);
  if (opt.command == "dilute-ratio") return run_dilute(opt, budget);
  if (opt.command == "degenerate") return run_degenerate(opt, budget);
  if (opt.command == "plateau") return run_plateau(opt, budget);
  throw std::invalid_argument("unknown command: " + opt.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakly self-avoiding walk toolkit"};
  app.require_subcommand(0, 1);

  Options opt;
  std::string from_manifest;
  app.add_option("--from-manifest", from_manifest,
                 "re-run the resolved config recorded in a manifest file");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--dim", opt.dim, "lattice dimension d");
    cmd->add_option("--beta", opt.beta, "interaction strength in [0,1]");
    cmd->add_option("--r", opt.r, "torus side (0 = Z^d)");
    cmd->add_option("--n", opt.n, "walk length");
    cmd->add_option("--n-min", opt.n_min, "smallest length in sweeps");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--budget", opt.budget, "small | medium | large");
    cmd->add_option("--out", opt.out, "output CSV path");
    cmd->add_option("--chains", opt.chains, "Metropolis chains");
    cmd->add_option("--tours", opt.tours, "PERM tours");
    cmd->add_option("--grid", opt.grid, "grid points for path statistics");
    cmd->add_option("--blocks", opt.blocks, "fdd increment blocks");
    cmd->add_option("--k", opt.k_scale, "fdd scale k (default n)");
    cmd->add_option("--d-hat", opt.d_hat, "diffusion constant override");
    cmd->add_option("--epsilon", opt.epsilon, "degenerate-regime threshold");
    cmd->add_option("--z", opt.z, "activity (default 0.9/mu_hat)");
    cmd->add_option("--rs", opt.rs, "comma-separated torus sides");
    cmd->add_flag("--perm", opt.use_perm, "use PERM instead of enumeration");
  };

  for (const char* name : {"enumerate", "lace-check", "perm", "metropolis", "fdd",
                           "tightness", "dilute-ratio", "degenerate", "plateau"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  try {
    if (!from_manifest.empty()) {
      std::ifstream f(from_manifest);
      if (!f) throw std::invalid_argument("cannot read manifest: " + from_manifest);
      json m = json::parse(f);
      Options replay = Options::from_json(m.at("config"));
      dispatch(replay);
      return 0;
    }
    if (app.get_subcommands().empty())
      throw std::invalid_argument("a subcommand is required (see --help)");
    opt.command = app.get_subcommands().front()->get_name();
    dispatch(opt);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: budget-exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid-config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
