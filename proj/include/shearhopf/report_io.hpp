#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "shearhopf/hopf.hpp"

namespace shearhopf {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json report_to_json(const HopfReport& r);
// Throws InvalidParameter on a missing field or a schema version mismatch.
HopfReport report_from_json(const nlohmann::json& j);

struct Provenance {
  std::string config_hash;
  std::string command;
};

std::string library_version();

// Human-readable expansions of mu(eps), omega(eps) and sigma_eps.
std::string report_summary(const HopfReport& r, const Provenance& prov);

// Writes hopf_report.json and summary.txt into dir (created if missing) and
// returns their paths.
std::vector<std::string> emit_report(const HopfReport& r, const std::string& dir, const Provenance& prov = {});

}  // namespace shearhopf
