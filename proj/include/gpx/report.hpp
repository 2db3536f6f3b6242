#pragma once

// JSON/CSV report emission. Payloads are deterministic for a fixed config and
// seed; wall-clock metadata lives in a separate "meta" object that callers
// exclude when comparing runs.

#include <json.hpp>

#include <string>
#include <vector>

#include "gpx/berman.hpp"
#include "gpx/extremes.hpp"
#include "gpx/lil.hpp"

namespace gpx::report {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Skeleton {schema_version, subcommand, config, results, meta}.
Json make_report(const std::string& subcommand, Json config, Json results,
                 bool with_timestamp = true);

Json tail_to_json(const extremes::TailEstimate& estimate);
Json pickands_to_json(const extremes::PickandsEstimate& estimate);
Json ladder_to_json(const std::vector<extremes::PickandsEstimate>& ladder);
Json extrapolation_to_json(const extremes::Extrapolation& fit);
Json lil_to_json(const lil::LilReport& report);
Json if_report_to_json(const lil::IfReport& report);
Json check_to_json(const berman::CheckReport& report);

void write_json(const Json& doc, const std::string& path);

/// Pickands ladder CSV: alpha,k,T,theta,value,ci,replicates.
void write_ladder_csv(const std::vector<extremes::PickandsEstimate>& ladder,
                      const std::string& path);

/// Crossing time series CSV: t,x_value,f_p,crossed.
void write_crossing_csv(const std::vector<double>& t, const std::vector<double>& x,
                        const std::vector<double>& f, const std::vector<int>& crossed,
                        const std::string& path);

struct CrossingSeries {
  std::vector<double> t, x, f;
  std::vector<int> crossed;
};

CrossingSeries read_crossing_csv(const std::string& path);

}  // namespace gpx::report
