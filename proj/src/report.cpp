#include "gpx/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gpx::report {

namespace {

Json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Json make_report(const std::string& subcommand, Json config, Json results,
                 bool with_timestamp) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["subcommand"] = subcommand;
  doc["config"] = std::move(config);
  doc["results"] = std::move(results);
  Json meta = Json::object();
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    meta["unix_time"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
  }
  doc["meta"] = std::move(meta);
  return doc;
}

Json tail_to_json(const extremes::TailEstimate& e) {
  Json j;
  j["u"] = e.u;
  j["p_hat"] = e.p_hat;
  j["se"] = e.se;
  j["replicates"] = e.replicates;
  j["theta"] = e.theta;
  j["mesh"] = e.mesh;
  j["asymptotic_value"] = finite_or_null(e.asymptotic_value);
  j["ratio"] = finite_or_null(e.ratio);
  j["p_hat_half"] = e.p_hat_half;
  j["mesh_stable"] = e.mesh_stable;
  j["below_resolution"] = e.below_resolution;
  return j;
}

Json pickands_to_json(const extremes::PickandsEstimate& e) {
  Json j;
  j["alpha"] = e.alpha;
  j["k"] = e.k;
  j["T"] = e.T;
  j["theta"] = e.theta;
  j["value"] = e.value;
  j["ci_half_width"] = e.ci_half_width;
  j["replicates"] = e.replicates;
  j["value_fine"] = e.value_fine;
  j["value_coarse"] = e.value_coarse;
  return j;
}

Json ladder_to_json(const std::vector<extremes::PickandsEstimate>& ladder) {
  Json arr = Json::array();
  for (const auto& e : ladder) arr.push_back(pickands_to_json(e));
  return arr;
}

Json extrapolation_to_json(const extremes::Extrapolation& fit) {
  Json j;
  j["intercept"] = fit.intercept;
  j["slope"] = fit.slope;
  j["intercept_ci"] = fit.intercept_ci;
  Json res = Json::array();
  for (Eigen::Index i = 0; i < fit.residuals.size(); ++i) res.push_back(fit.residuals[i]);
  j["residuals"] = std::move(res);
  return j;
}

Json lil_to_json(const lil::LilReport& r) {
  Json j;
  j["p"] = r.p;
  j["n"] = r.n;
  j["r"] = r.r;
  j["alpha"] = r.alpha;
  j["c"] = r.c;
  j["horizon"] = r.horizon;
  j["scan_start"] = r.scan_start;
  j["mesh"] = r.mesh;
  j["theta"] = r.theta;
  j["runs"] = r.runs;
  j["seed"] = r.seed;
  j["character"] = r.character;
  j["within_validity_band"] = r.within_validity_band;
  j["mean_normalized_max"] = r.mean_normalized_max;
  j["q05_normalized_max"] = r.q05_normalized_max;
  j["q50_normalized_max"] = r.q50_normalized_max;
  j["q95_normalized_max"] = r.q95_normalized_max;
  j["mean_crossing_windows"] = r.mean_crossing_windows;
  j["predicted_cumulative_crossings"] = r.predicted_cumulative_crossings;
  j["hp_at_horizon"] = r.hp_at_horizon ? Json(*r.hp_at_horizon) : Json(nullptr);
  Json runs = Json::array();
  for (const auto& run : r.per_run) {
    Json jr;
    jr["normalized_running_max"] = run.normalized_running_max;
    jr["crossing_windows"] = run.crossing_windows;
    jr["crossings"] = run.crossings;
    jr["xi"] = run.xi ? Json(*run.xi) : Json(nullptr);
    jr["max_gap"] = run.max_gap ? Json(*run.max_gap) : Json(nullptr);
    jr["gap_to_hp"] = run.gap_to_hp ? Json(*run.gap_to_hp) : Json(nullptr);
    runs.push_back(std::move(jr));
  }
  j["per_run"] = std::move(runs);
  return j;
}

Json if_report_to_json(const lil::IfReport& r) {
  Json j;
  switch (r.verdict) {
    case lil::IfReport::Verdict::kFinite:
      j["verdict"] = "finite";
      j["value"] = r.value;
      break;
    case lil::IfReport::Verdict::kDivergent:
      j["verdict"] = "divergent";
      break;
    case lil::IfReport::Verdict::kInconclusive:
      j["verdict"] = "inconclusive";
      break;
  }
  j["numeric_part"] = r.numeric_part;
  j["tail_remainder"] = r.tail_remainder;
  j["u_exponent"] = r.u_exponent;
  j["log_exponent"] = r.log_exponent;
  return j;
}

Json check_to_json(const berman::CheckReport& r) {
  Json j;
  j["p0"] = r.p0;
  j["p1"] = r.p1;
  j["lhs_diff"] = r.lhs_diff;
  j["bound"] = r.bound;
  j["ratio"] = r.ratio ? Json(*r.ratio) : Json(nullptr);
  j["bound_zero_no_control"] = r.bound_zero_no_control;
  j["violation"] = r.violation;
  return j;
}

void write_json(const Json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json: cannot open " + path);
  out << doc.dump(2) << "\n";
}

void write_ladder_csv(const std::vector<extremes::PickandsEstimate>& ladder,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ladder_csv: cannot open " + path);
  out << "alpha,k,T,theta,value,ci,replicates\n";
  char buf[256];
  for (const auto& e : ladder) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%ld\n", e.alpha,
                  e.k, e.T, e.theta, e.value, e.ci_half_width, e.replicates);
    out << buf;
  }
}

void write_crossing_csv(const std::vector<double>& t, const std::vector<double>& x,
                        const std::vector<double>& f, const std::vector<int>& crossed,
                        const std::string& path) {
  if (t.size() != x.size() || t.size() != f.size() || t.size() != crossed.size())
    throw std::invalid_argument("write_crossing_csv: column length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_crossing_csv: cannot open " + path);
  out << "t,x_value,f_p,crossed\n";
  char buf[128];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", t[i], x[i], f[i],
                  crossed[i]);
    out << buf;
  }
}

CrossingSeries read_crossing_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_crossing_csv: cannot open " + path);
  CrossingSeries series;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double vals[3] = {0, 0, 0};
    for (double& v : vals) {
      if (!std::getline(row, field, ','))
        throw std::runtime_error("read_crossing_csv: malformed row '" + line + "'");
      v = std::stod(field);
    }
    int crossed = 0;
    if (std::getline(row, field, ',')) crossed = std::stoi(field);
    series.t.push_back(vals[0]);
    series.x.push_back(vals[1]);
    series.f.push_back(vals[2]);
    series.crossed.push_back(crossed);
  }
  return series;
}

}  // namespace gpx::report
