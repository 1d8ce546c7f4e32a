#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crystalwalk/asymptotics.hpp"
#include "crystalwalk/verify.hpp"
#include "crystalwalk/walker.hpp"

namespace crystalwalk {

// JSON bodies are produced as strings so callers can route them to files
// or stdout. Apart from the metadata timestamp, the bytes are a pure
// function of the inputs.
std::string timestamp_utc();

std::string report_json(const std::vector<VerificationReport>& reports);
std::string summary_json(const AsymptoticSummary& summary);
std::string record_json(const WalkRecord& record, const GeometryParams& geometry);

void write_text_file(const std::string& path, const std::string& body);
void write_trajectory_csv(std::ostream& out, const WalkRecord& record,
                          const GeometryParams& geometry);
void write_trajectory_csv(const std::string& path, const WalkRecord& record,
                          const GeometryParams& geometry);

// One human-readable line per check, e.g. "[PASS] clt.cov.xy ...".
std::string format_report_line(const VerificationReport& report);

}  // namespace crystalwalk
