#include "crystalwalk/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "crystalwalk/errors.hpp"
#include "crystalwalk/lattice.hpp"

#ifndef CRYSTALWALK_VERSION
#define CRYSTALWALK_VERSION "0.0.0"
#endif

namespace crystalwalk {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

ordered_json mat_json(const Mat3& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < 3; ++r)
        rows.push_back(ordered_json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return rows;
}

ordered_json matx_json(const MatX& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json meta_json() {
    return ordered_json{{"version", CRYSTALWALK_VERSION}, {"timestamp", timestamp_utc()}};
}

const char* status_label(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Flagged: return "flagged";
    }
    return "unknown";
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string report_json(const std::vector<VerificationReport>& reports) {
    ordered_json doc;
    doc["meta"] = meta_json();
    ordered_json checks = ordered_json::array();
    for (const VerificationReport& rep : reports) {
        ordered_json entry{{"check", rep.check_name},
                           {"status", status_label(rep.status)},
                           {"observed", rep.observed},
                           {"target", rep.target},
                           {"tolerance", rep.tolerance_used},
                           {"seed", rep.seed},
                           {"n", rep.steps},
                           {"replicates", rep.replicates}};
        if (!rep.detail.empty()) entry["detail"] = rep.detail;
        checks.push_back(std::move(entry));
    }
    doc["checks"] = std::move(checks);
    doc["passed"] = all_passed(reports);
    return doc.dump(2) + "\n";
}

std::string summary_json(const AsymptoticSummary& s) {
    const bool graphite = s.kind == LatticeKind::Graphite2h;
    ordered_json doc;
    doc["meta"] = meta_json();
    doc["lattice"] = graphite ? "graphite" : "ice";
    doc["a"] = s.geometry.a;
    doc["h"] = s.geometry.h;
    doc["p"] = s.p;
    doc["alpha"] = s.alpha;
    doc["mu"] = vec_json(s.mu);
    doc["theta"] = vec_json(s.theta);
    if (graphite) {
        doc["m"] = vec_json(s.m);
        doc["rho"] = vec_json(s.rho);
    }
    doc["zeta"] = vec_json(s.zeta);
    doc["sigma2"] = mat_json(s.sigma2);
    doc["nu"] = mat_json(s.nu);
    if (graphite) {
        doc["gamma"] = mat_json(s.gamma);
        doc["delta"] = mat_json(s.delta);
    }
    doc["lln_limit"] = vec_json(s.lln_limit);
    doc["Gamma"] = mat_json(s.Gamma);
    doc["Lambda"] = matx_json(s.Lambda);
    if (s.cancellation_flag) doc["cancellation_flag"] = true;
    return doc.dump(2) + "\n";
}

std::string record_json(const WalkRecord& record, const GeometryParams& geometry) {
    const bool graphite = record.kind == LatticeKind::Graphite2h;
    const MartingaleLedger& led = record.ledger;
    ordered_json doc;
    doc["meta"] = meta_json();
    doc["lattice"] = graphite ? "graphite" : "ice";
    doc["steps"] = record.steps;
    doc["seed"] = record.rng.seed;
    doc["stream"] = record.rng.stream_id;
    doc["S"] = vec_json(record.S);
    doc["position"] = vec_json(position(record.final_state, geometry, record.kind));
    doc["I"] = record.I;
    if (graphite) {
        doc["J"] = record.J;
        doc["K"] = record.K;
    }
    ordered_json visits = ordered_json::array();
    const auto classes = all_classes(record.kind);
    for (const VertexClass c : classes) {
        visits.push_back(ordered_json{{"class", class_name(record.kind, c)},
                                      {"count", record.class_visits[class_index(record.kind, c)]}});
    }
    doc["class_visits"] = std::move(visits);
    ordered_json ledger;
    ledger["M"] = vec_json(led.M);
    ledger["R"] = vec_json(led.R);
    ledger["bracket_M"] = mat_json(led.bracket_M);
    ledger["bracket_C"] = vec_json(led.bracket_C);
    if (graphite) {
        ledger["NJ"] = led.NJ;
        ledger["NK"] = led.NK;
        ledger["bracket_NJ"] = led.bracket_NJ;
        ledger["bracket_NK"] = led.bracket_NK;
        ledger["bracket_E"] = vec_json(led.bracket_E);
        ledger["bracket_D"] = led.bracket_D;
    } else {
        ledger["N"] = led.N;
        ledger["bracket_N"] = led.bracket_N;
    }
    doc["ledger"] = std::move(ledger);
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << body;
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

void write_trajectory_csv(std::ostream& out, const WalkRecord& record,
                          const GeometryParams& geometry) {
    if (record.states.empty())
        throw std::logic_error("trajectory output requires a record simulated in trajectory mode");
    const bool graphite = record.kind == LatticeKind::Graphite2h;
    out << "step,x,y,z,i,j,k_sign\n";
    for (std::size_t step = 0; step < record.states.size(); ++step) {
        const LatticeState& state = record.states[step];
        const Vec3 pos = position(state, geometry, record.kind);
        out << step << ',' << format_double(pos[0]) << ',' << format_double(pos[1]) << ','
            << format_double(pos[2]) << ',' << static_cast<int>(sign_i(state.cls)) << ',';
        if (graphite) {
            out << static_cast<int>(sign_j(state.cls)) << ','
                << static_cast<int>(sign_k(state.cls));
        } else {
            out << ',';
        }
        out << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const WalkRecord& record,
                          const GeometryParams& geometry) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    write_trajectory_csv(out, record, geometry);
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

std::string format_report_line(const VerificationReport& report) {
    const char* tag = report.status == CheckStatus::Pass     ? "PASS"
                      : report.status == CheckStatus::Fail   ? "FAIL"
                                                             : "FLAG";
    std::string line = std::string("[") + tag + "] " + report.check_name +
                       " observed=" + format_double(report.observed) +
                       " target=" + format_double(report.target) +
                       " tol=" + format_double(report.tolerance_used);
    if (!report.detail.empty()) line += " (" + report.detail + ")";
    return line;
}

}  // namespace crystalwalk
