// gpx: simulation and numerical checks for extremes of order-statistics
// processes of stationary Gaussian processes.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gpx/berman.hpp"
#include "gpx/correlation.hpp"
#include "gpx/extremes.hpp"
#include "gpx/gaussim.hpp"
#include "gpx/lil.hpp"
#include "gpx/orderstats.hpp"
#include "gpx/parallel.hpp"
#include "gpx/report.hpp"
#include "gpx/svg.hpp"

namespace {

using gpx::report::Json;

struct ModelFlags {
  std::string family = "powered-exp";
  double c = 1.0;
  double alpha = 1.0;
  double lambda = 1.0;
  double c_prime = 1.0;
  double gamma = 1.0;
  std::string table;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "correlation family: powered-exp|cauchy|table")
        ->check(CLI::IsMember({"powered-exp", "cauchy", "table"}));
    app->add_option("--c", c, "local scale C in 1 - r(t) ~ C|t|^alpha");
    app->add_option("--alpha", alpha, "local exponent alpha in (0, 2]");
    app->add_option("--lambda", lambda, "declared decay exponent");
    app->add_option("--cprime", c_prime, "cauchy scale C'");
    app->add_option("--gamma", gamma, "cauchy decay power gamma");
    app->add_option("--table", table, "CSV file (t,r) for tabulated models");
  }

  gpx::correlation::CorrelationModel build() const {
    using gpx::correlation::CorrelationModel;
    if (family == "powered-exp")
      return CorrelationModel::powered_exponential(c, alpha, lambda);
    if (family == "cauchy") return CorrelationModel::cauchy(c_prime, alpha, gamma);
    if (table.empty())
      throw std::invalid_argument("tabulated family requires --table");
    return CorrelationModel::tabulated_from_csv(table, c, alpha, lambda);
  }

  Json to_json() const {
    Json j;
    j["family"] = family;
    j["c"] = c;
    j["alpha"] = alpha;
    j["lambda"] = lambda;
    if (family == "cauchy") {
      j["cprime"] = c_prime;
      j["gamma"] = gamma;
    }
    if (!table.empty()) j["table"] = table;
    return j;
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GPX_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw std::invalid_argument("GPX_SEED is not a valid integer");
    }
  }
  return 1;
}

// Values for options not given on the command line may come from a JSON
// config file; explicit flags win.
void layer_config(CLI::App* app, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config file " + config_path);
  nlohmann::json doc = nlohmann::json::parse(in);
  for (const auto& [key, value] : doc.items()) {
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
    opt->run_callback();
  }
}

int run(int argc, char** argv) {
  CLI::App app{"extremes of order-statistics processes of stationary Gaussian "
               "processes: simulation, tail asymptotics, Pickands constants, "
               "crossing diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = default_seed();
  unsigned threads = gpx::default_threads();
  std::string config_path;
  app.add_option("--seed", seed, "master seed (env GPX_SEED is the fallback)");
  app.add_option("--threads", threads, "worker thread cap");
  app.add_option("--config", config_path, "JSON config file; flags override it");

  // ---- simulate ----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "sample a stationary ensemble; CSV "
                                             "columns t,path_1..path_n or GPX1 binary");
  ModelFlags sim_model;
  sim_model.attach(sim);
  double sim_t0 = 0.0, sim_horizon = 10.0, sim_mesh = 0.1;
  long sim_n = 1;
  std::string sim_out = "ensemble.csv", sim_format = "auto";
  sim->add_option("--t0", sim_t0, "grid start time");
  sim->add_option("--horizon", sim_horizon, "grid horizon");
  sim->add_option("--mesh", sim_mesh, "grid mesh");
  sim->add_option("--n", sim_n, "number of independent copies");
  sim->add_option("--out", sim_out, "output path");
  sim->add_option("--format", sim_format, "csv|gpx|auto (by extension)")
      ->check(CLI::IsMember({"csv", "gpx", "auto"}));

  // ---- tail --------------------------------------------------------------
  auto* tail = app.add_subcommand("tail", "Monte Carlo exceedance probability of "
                                          "sup X_{r:n} on [0,1] vs the asymptotic law");
  ModelFlags tail_model;
  tail_model.attach(tail);
  long tail_n = 1, tail_reps = 100000;
  int tail_r = 1;
  double tail_u = 3.0, tail_theta = 0.1;
  double tail_h = 0.0;
  std::string tail_out = "tail.json";
  tail->add_option("--n", tail_n, "number of copies");
  tail->add_option("--r", tail_r, "order statistic index");
  tail->add_option("--u", tail_u, "threshold level");
  tail->add_option("--theta", tail_theta, "mesh parameter (mesh = theta u^{-2/alpha})");
  tail->add_option("--reps", tail_reps, "Monte Carlo replicates (>= 1000)");
  tail->add_option("--pickands-h", tail_h,
                   "Pickands constant override for the asymptotic value");
  tail->add_option("--out", tail_out, "JSON output path");

  // ---- pickands ----------------------------------------------------------
  auto* pick = app.add_subcommand("pickands", "estimate H_{alpha,k}(T)/T over a "
                                              "T-ladder and extrapolate T -> infinity");
  double pk_alpha = 1.0, pk_theta = 0.05;
  int pk_k = 1;
  long pk_reps = 20000;
  std::vector<double> pk_T = {8.0, 16.0, 32.0};
  std::string pk_out = "pickands.json", pk_csv, pk_method = "auto";
  pick->add_option("--alpha", pk_alpha, "local exponent alpha in (0, 2]");
  pick->add_option("--k", pk_k, "number of coupled copies");
  pick->add_option("--T", pk_T, "horizon ladder (ascending)")->expected(-1);
  pick->add_option("--theta", pk_theta, "fBm mesh");
  pick->add_option("--reps", pk_reps, "replicates");
  pick->add_option("--method", pk_method, "auto|sweep|importance")
      ->check(CLI::IsMember({"auto", "sweep", "importance"}));
  pick->add_option("--out", pk_out, "JSON output path");
  pick->add_option("--csv", pk_csv, "optional ladder CSV path");

  // ---- criterion ---------------------------------------------------------
  auto* crit = app.add_subcommand("criterion", "zero-one verdict for the threshold "
                                               "family plus the criterion integral");
  double cr_p = 1.0, cr_alpha = 2.0, cr_c = 1.0, cr_h = 0.0;
  int cr_n = 1, cr_r = 1;
  double cr_T = 2.0, cr_umax = 1e6;
  double cr_tail_a = 0.0, cr_tail_q = 0.0;
  bool cr_integral_family = false;
  double cr_band_from = 0.0, cr_band_to = 0.0;
  std::string cr_out = "criterion.json";
  crit->add_option("--p", cr_p, "family parameter p");
  crit->add_option("--n", cr_n, "copies");
  crit->add_option("--r", cr_r, "order index");
  crit->add_option("--alpha", cr_alpha, "local exponent");
  crit->add_option("--c", cr_c, "local scale C");
  crit->add_option("--pickands-h", cr_h, "Pickands constant for the Gf constant");
  crit->add_option("--T", cr_T, "integral lower endpoint");
  crit->add_option("--u-max", cr_umax, "numeric integration upper endpoint");
  crit->add_option("--tail-a", cr_tail_a, "canonical tail amplitude a");
  crit->add_option("--tail-q", cr_tail_q, "canonical tail log-exponent q");
  crit->add_flag("--family-integral", cr_integral_family,
                 "integrate the family's own Gf tail law");
  crit->add_option("--band-from", cr_band_from, "validity band check: window start");
  crit->add_option("--band-to", cr_band_to, "validity band check: window end");
  crit->add_option("--out", cr_out, "JSON output path");

  // ---- lil ---------------------------------------------------------------
  auto* lil_cmd = app.add_subcommand("lil", "large-horizon crossing diagnostics "
                                            "(finite-horizon checks, not limits)");
  ModelFlags lil_model;
  lil_model.alpha = 2.0;
  lil_model.attach(lil_cmd);
  double ll_p = 1.0, ll_horizon = 1e4, ll_scan = 2.718281828459045, ll_theta = 0.1;
  int ll_n = 1, ll_r = 1;
  long ll_runs = 50;
  double ll_h = 0.0;
  std::string ll_out = "lil.json", ll_crossings_csv, ll_svg;
  long ll_dump_run = 0, ll_dump_stride = 1;
  lil_cmd->add_option("--p", ll_p, "family parameter p (>= 0)");
  lil_cmd->add_option("--n", ll_n, "copies");
  lil_cmd->add_option("--r", ll_r, "order index");
  lil_cmd->add_option("--horizon", ll_horizon, "scan horizon T (>= 1e3)");
  lil_cmd->add_option("--scan-start", ll_scan, "scan window start");
  lil_cmd->add_option("--theta", ll_theta, "mesh parameter at the top threshold");
  lil_cmd->add_option("--runs", ll_runs, "independent runs");
  lil_cmd->add_option("--pickands-h", ll_h, "Pickands constant override");
  lil_cmd->add_option("--out", ll_out, "JSON report path");
  lil_cmd->add_option("--crossings-csv", ll_crossings_csv,
                      "dump one run's crossing series (t,x_value,f_p,crossed)");
  lil_cmd->add_option("--dump-run", ll_dump_run, "run index for the series dump");
  lil_cmd->add_option("--dump-stride", ll_dump_stride, "grid stride for the dump");
  lil_cmd->add_option("--svg", ll_svg, "plot of the dumped run");

  // ---- berman ------------------------------------------------------------
  auto* ber = app.add_subcommand("berman", "order-statistics normal-comparison "
                                           "inequality checks on small instances");
  std::string ber_instances, ber_out = "berman.csv", ber_summary;
  bool ber_batch = false, ber_proof_variant = false;
  int ber_dmax = 4, ber_n = 2, ber_r = 1, ber_count = 200, ber_holdout = 0;
  ber->add_option("--instances", ber_instances, "JSON instance file to check");
  ber->add_flag("--batch", ber_batch, "randomized calibration batch mode");
  ber->add_flag("--proof-variant", ber_proof_variant,
                "use the (1+|h|)^{2(n-r)} integrand variant");
  ber->add_option("--d-max", ber_dmax, "max dimension in batch mode");
  ber->add_option("--n", ber_n, "copies (batch mode)");
  ber->add_option("--r", ber_r, "order index (batch mode)");
  ber->add_option("--count", ber_count, "calibration instances");
  ber->add_option("--holdout", ber_holdout, "held-out instances to verify");
  ber->add_option("--out", ber_out, "CSV output path");
  ber->add_option("--summary", ber_summary, "JSON summary path");

  // ---- plot --------------------------------------------------------------
  auto* plot = app.add_subcommand("plot", "SVG plot of a crossing series CSV");
  std::string pl_in, pl_out = "plot.svg", pl_title;
  plot->add_option("--in", pl_in, "crossing series CSV")->required();
  plot->add_option("--out", pl_out, "SVG output path");
  plot->add_option("--title", pl_title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 2;
  }
  layer_config(&app, config_path);
  for (auto* sub : app.get_subcommands()) layer_config(sub, config_path);

  if (sim->parsed()) {
    const auto model = sim_model.build();
    const gpx::GridSpec grid(sim_t0, sim_horizon, sim_mesh);
    const auto ens = gpx::gaussim::sample_stationary(model, grid, sim_n, seed, threads);
    std::string format = sim_format;
    if (format == "auto")
      format = sim_out.size() >= 4 && sim_out.substr(sim_out.size() - 4) == ".gpx"
                   ? "gpx"
                   : "csv";
    if (format == "gpx")
      gpx::gaussim::write_gpx(ens, sim_out);
    else
      gpx::gaussim::write_csv(ens, sim_out);
    std::cout << "wrote " << sim_out << " (" << sim_n << " paths, " << grid.count()
              << " points)\n";
    return 0;
  }

  if (tail->parsed()) {
    const auto model = tail_model.build();
    std::optional<double> h;
    if (tail->count("--pickands-h")) h = tail_h;
    const auto est = gpx::orderstats::empirical_tail(model, tail_n, tail_r, tail_u,
                                                     tail_theta, tail_reps, seed,
                                                     threads, h);
    Json config = tail_model.to_json();
    config["n"] = tail_n;
    config["r"] = tail_r;
    config["u"] = tail_u;
    config["theta"] = tail_theta;
    config["reps"] = tail_reps;
    config["seed"] = seed;
    gpx::report::write_json(
        gpx::report::make_report("tail", config, gpx::report::tail_to_json(est)),
        tail_out);
    std::cout << "p_hat = " << est.p_hat << " (se " << est.se << ")";
    if (std::isfinite(est.ratio)) std::cout << ", ratio = " << est.ratio;
    std::cout << " -> " << tail_out << "\n";
    return 0;
  }

  if (pick->parsed()) {
    gpx::extremes::PickandsConfig cfg;
    cfg.alpha = pk_alpha;
    cfg.k = pk_k;
    cfg.horizons = pk_T;
    cfg.theta = pk_theta;
    cfg.replicates = pk_reps;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.method = pk_method == "sweep"        ? gpx::extremes::PickandsMethod::kExactSweep
                 : pk_method == "importance" ? gpx::extremes::PickandsMethod::kImportance
                                             : gpx::extremes::PickandsMethod::kAuto;
    const auto ladder = gpx::extremes::pickands_ladder(cfg);
    Json config;
    config["alpha"] = pk_alpha;
    config["k"] = pk_k;
    config["T"] = pk_T;
    config["theta"] = pk_theta;
    config["reps"] = pk_reps;
    config["seed"] = seed;
    config["method"] = pk_method;
    Json results;
    results["ladder"] = gpx::report::ladder_to_json(ladder);
    if (ladder.size() >= 3) {
      const auto fit = gpx::extremes::pickands_extrapolate(ladder);
      results["extrapolation"] = gpx::report::extrapolation_to_json(fit);
      std::cout << "H_{" << pk_alpha << "," << pk_k << "} ~ " << fit.intercept
                << " +/- " << fit.intercept_ci << "\n";
    }
    gpx::report::write_json(gpx::report::make_report("pickands", config, results),
                            pk_out);
    if (!pk_csv.empty()) gpx::report::write_ladder_csv(ladder, pk_csv);
    std::cout << "wrote " << pk_out << "\n";
    return 0;
  }

  if (crit->parsed()) {
    std::optional<double> h;
    if (crit->count("--pickands-h")) h = cr_h;
    if (!h) h = gpx::extremes::pickands_closed_form(cr_alpha, cr_n - cr_r + 1);
    gpx::lil::ThresholdFamily family(cr_p, cr_n, cr_r, cr_alpha, cr_c, h);
    Json config;
    config["p"] = cr_p;
    config["n"] = cr_n;
    config["r"] = cr_r;
    config["alpha"] = cr_alpha;
    config["c"] = cr_c;
    config["seed"] = seed;
    Json results;
    results["verdict"] =
        gpx::lil::classify_dichotomy(family) == gpx::lil::Dichotomy::kOne ? "one"
                                                                          : "zero";
    results["s_min"] = family.s_min();
    results["exponent_shift"] = family.exponent_shift();
    if (family.has_pickands_h()) results["gf_constant"] = family.gf_constant();
    if (crit->count("--tail-a") || cr_integral_family) {
      gpx::lil::TailModel tm =
          cr_integral_family ? gpx::lil::TailModel::from_family(family)
                             : gpx::lil::TailModel::canonical(cr_tail_a, cr_tail_q);
      results["integral"] =
          gpx::report::if_report_to_json(gpx::lil::integral_If(tm, cr_T, cr_umax));
    }
    if (crit->count("--band-from") && crit->count("--band-to"))
      results["theorem_backed"] =
          family.within_validity_band(cr_band_from, cr_band_to);
    gpx::report::write_json(gpx::report::make_report("criterion", config, results),
                            cr_out);
    std::cout << "verdict: " << results["verdict"].get<std::string>() << " -> "
              << cr_out << "\n";
    return 0;
  }

  if (lil_cmd->parsed()) {
    gpx::lil::LilConfig cfg;
    cfg.model = lil_model.build();
    cfg.n = ll_n;
    cfg.r = ll_r;
    cfg.p = ll_p;
    cfg.horizon = ll_horizon;
    cfg.scan_start = ll_scan;
    cfg.theta = ll_theta;
    cfg.runs = ll_runs;
    cfg.seed = seed;
    cfg.threads = threads;
    if (lil_cmd->count("--pickands-h")) cfg.pickands_h = ll_h;
    const auto rep = gpx::lil::lil_experiment(cfg);
    Json config = lil_model.to_json();
    config["p"] = ll_p;
    config["n"] = ll_n;
    config["r"] = ll_r;
    config["horizon"] = ll_horizon;
    config["scan_start"] = ll_scan;
    config["theta"] = ll_theta;
    config["runs"] = ll_runs;
    config["seed"] = seed;
    gpx::report::write_json(
        gpx::report::make_report("lil", config, gpx::report::lil_to_json(rep)), ll_out);
    std::cout << "mean normalized max " << rep.mean_normalized_max
              << ", mean crossing windows " << rep.mean_crossing_windows << " (Gf "
              << rep.predicted_cumulative_crossings << ") -> " << ll_out << "\n";

    if (!ll_crossings_csv.empty() || !ll_svg.empty()) {
      std::optional<double> h = cfg.pickands_h;
      if (!h) h = gpx::extremes::pickands_closed_form(cfg.model.alpha(), ll_n - ll_r + 1);
      gpx::lil::ThresholdFamily family(ll_p, ll_n, ll_r, cfg.model.alpha(),
                                       cfg.model.c(), h);
      const double a = std::max(ll_scan, family.s_min());
      const double mesh =
          ll_theta * std::pow(family.f(ll_horizon), -2.0 / cfg.model.alpha());
      const gpx::GridSpec grid(a, ll_horizon - a, mesh);
      const auto sw = gpx::gaussim::circulant_embed(cfg.model, grid);
      Eigen::MatrixXd paths;
      gpx::gaussim::sample_ensemble_rows(sw, grid.count(), ll_n, seed,
                                         static_cast<std::uint64_t>(ll_dump_run), 0,
                                         paths);
      gpx::gaussim::PathEnsemble ens;
      ens.grid = grid;
      ens.n = ll_n;
      ens.seed = seed;
      ens.model = cfg.model;
      ens.values = std::move(paths);
      const auto os_path = gpx::orderstats::order_statistic_path(ens, ll_r);
      std::vector<double> t, x, f;
      std::vector<int> crossed;
      for (long j = 0; j < grid.count(); j += std::max<long>(1, ll_dump_stride)) {
        const double tj = grid.time_at(j);
        t.push_back(tj);
        x.push_back(os_path.values[j]);
        f.push_back(family.f(tj));
        crossed.push_back(os_path.values[j] >= f.back() ? 1 : 0);
      }
      if (!ll_crossings_csv.empty())
        gpx::report::write_crossing_csv(t, x, f, crossed, ll_crossings_csv);
      if (!ll_svg.empty()) gpx::svg::write_crossing_plot(t, x, f, crossed, ll_svg);
    }
    return 0;
  }

  if (ber->parsed()) {
    const auto exponent = ber_proof_variant ? gpx::berman::AExponent::kProofVariant
                                            : gpx::berman::AExponent::kStatement;
    if (!ber_instances.empty()) {
      const auto instances = gpx::berman::load_instances_json(ber_instances);
      std::vector<gpx::berman::BatchEntry> entries;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        gpx::berman::BatchEntry e;
        e.instance_id = static_cast<long>(i);
        e.instance = instances[i];
        e.report = gpx::berman::check_instance(instances[i], exponent);
        entries.push_back(std::move(e));
      }
      gpx::berman::write_batch_csv(entries, ber_out);
      std::cout << "checked " << entries.size() << " instances -> " << ber_out << "\n";
      return 0;
    }
    if (!ber_batch) throw std::invalid_argument("berman: need --instances or --batch");
    const auto fit = gpx::berman::calibrate_constant(ber_dmax, ber_n, ber_r, ber_count,
                                                     seed, threads);
    gpx::berman::write_batch_csv(fit.entries, ber_out);
    Json summary;
    summary["n"] = ber_n;
    summary["r"] = ber_r;
    summary["c_hat"] = fit.c_hat;
    summary["count"] = ber_count;
    if (ber_holdout > 0) {
      const auto violations =
          gpx::berman::holdout_violations(fit, ber_dmax, ber_holdout, seed + 1, threads);
      summary["holdout"] = ber_holdout;
      summary["holdout_violations"] = violations.size();
    }
    std::cout << "C_hat(" << ber_n << "," << ber_r << ") = " << fit.c_hat << " -> "
              << ber_out << "\n";
    if (!ber_summary.empty()) {
      Json config;
      config["d_max"] = ber_dmax;
      config["n"] = ber_n;
      config["r"] = ber_r;
      config["count"] = ber_count;
      config["seed"] = seed;
      gpx::report::write_json(gpx::report::make_report("berman", config, summary),
                              ber_summary);
    }
    return 0;
  }

  if (plot->parsed()) {
    const auto series = gpx::report::read_crossing_csv(pl_in);
    gpx::svg::PlotOptions opt;
    if (!pl_title.empty()) opt.title = pl_title;
    gpx::svg::write_crossing_plot(series.t, series.x, series.f, series.crossed, pl_out,
                                  opt);
    std::cout << "wrote " << pl_out << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
