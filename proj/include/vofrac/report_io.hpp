#pragma once

// Serialization of ResidualReport lists: a flat CSV table (one row per
// variant and grid point) and a JSON document mirroring the report
// structure.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vofrac/checker.hpp"

namespace vofrac {

enum class ReportFormat { csv, json };

inline const char* kCsvHeader =
    "case_name,identity,variant_label,s_real,s_imag,lhs_real,lhs_imag,rhs_real,rhs_imag,rel_residual,verdict";

namespace reportio {

using nlohmann::json;

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline Verdict verdict_from(const std::string& s) {
  if (s == "HOLDS") return Verdict::holds;
  if (s == "FAILS") return Verdict::fails;
  if (s == "INCONCLUSIVE") return Verdict::inconclusive;
  throw ParseError("unknown verdict " + s, 0, "verdict");
}

inline json pair(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx unpair(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace reportio

inline std::string reports_to_csv(const std::vector<ResidualReport>& reports) {
  using reportio::csv_field;
  using reportio::num;
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) {
    const std::string head = csv_field(r.case_name) + "," + csv_field(r.identity) + ",";
    if (r.error) {
      out += head + "error,,,,,,,," + std::string(to_string(Verdict::inconclusive)) + "\n";
      continue;
    }
    for (const auto& v : r.variants) {
      const auto& pts = v.lhs.grid.points();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        out += head + csv_field(v.label) + "," + num(pts[i].real()) + "," + num(pts[i].imag()) + "," +
               num(v.lhs.values[i].real()) + "," + num(v.lhs.values[i].imag()) + "," + num(v.rhs.values[i].real()) +
               "," + num(v.rhs.values[i].imag()) + "," + num(v.residuals[i]) + "," + to_string(v.verdict) + "\n";
      }
    }
  }
  return out;
}

inline nlohmann::json reports_to_json(const std::vector<ResidualReport>& reports, long long seed) {
  using reportio::json;
  using reportio::pair;
  json doc;
  doc["seed"] = seed;
  doc["reports"] = json::array();
  for (const auto& r : reports) {
    json jr;
    jr["case_name"] = r.case_name;
    jr["identity"] = r.identity;
    jr["headline"] = r.headline;
    jr["verdict"] = to_string(r.verdict());
    jr["notes"] = r.notes;
    jr["warnings"] = r.warnings;
    jr["error"] = r.error ? json(*r.error) : json(nullptr);
    jr["variants"] = json::array();
    for (const auto& v : r.variants) {
      json jv;
      jv["label"] = v.label;
      jv["verdict"] = to_string(v.verdict);
      jv["rel_residual"] = v.rel_residual;
      jv["abscissa"] = v.lhs.grid.abscissa();
      jv["lhs_method"] = to_string(v.lhs.method);
      jv["rhs_method"] = to_string(v.rhs.method);
      jv["points"] = json::array();
      const auto& pts = v.lhs.grid.points();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        jv["points"].push_back({{"s", pair(pts[i])},
                                {"lhs", pair(v.lhs.values[i])},
                                {"rhs", pair(v.rhs.values[i])},
                                {"rel_residual", v.residuals[i]},
                                {"lhs_converged", static_cast<bool>(v.lhs.converged[i])},
                                {"rhs_converged", static_cast<bool>(v.rhs.converged[i])}});
      }
      jr["variants"].push_back(std::move(jv));
    }
    doc["reports"].push_back(std::move(jr));
  }
  return doc;
}

inline std::string reports_to_json_text(const std::vector<ResidualReport>& reports, long long seed) {
  return reports_to_json(reports, seed).dump(2) + "\n";
}

inline TransformMethod method_from(const std::string& s) {
  for (auto m : {TransformMethod::classical_quadrature, TransformMethod::closed_form, TransformMethod::regularized_power}) {
    if (s == to_string(m)) return m;
  }
  throw ParseError("unknown transform method " + s, 0, "method");
}

/// Inverse of reports_to_json_text.
inline std::vector<ResidualReport> reports_from_json_text(const std::string& text, long long* seed = nullptr) {
  using reportio::json;
  using reportio::unpair;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, "");
  }
  std::vector<ResidualReport> out;
  try {
    if (seed) *seed = doc.at("seed").get<long long>();
    for (const auto& jr : doc.at("reports")) {
      ResidualReport r;
      r.case_name = jr.at("case_name").get<std::string>();
      r.identity = jr.at("identity").get<std::string>();
      r.headline = jr.at("headline").get<std::string>();
      r.notes = jr.at("notes").get<std::vector<std::string>>();
      r.warnings = jr.at("warnings").get<std::vector<std::string>>();
      if (!jr.at("error").is_null()) r.error = jr.at("error").get<std::string>();
      for (const auto& jv : jr.at("variants")) {
        std::vector<cplx> s, lhs, rhs;
        std::vector<bool> lok, rok;
        VariantResult v;
        v.label = jv.at("label").get<std::string>();
        v.verdict = reportio::verdict_from(jv.at("verdict").get<std::string>());
        v.rel_residual = jv.at("rel_residual").get<double>();
        for (const auto& p : jv.at("points")) {
          s.push_back(unpair(p.at("s")));
          lhs.push_back(unpair(p.at("lhs")));
          rhs.push_back(unpair(p.at("rhs")));
          v.residuals.push_back(p.at("rel_residual").get<double>());
          lok.push_back(p.at("lhs_converged").get<bool>());
          rok.push_back(p.at("rhs_converged").get<bool>());
        }
        const ComplexGrid grid(s, jv.at("abscissa").get<double>());
        v.lhs = {grid, lhs, method_from(jv.at("lhs_method").get<std::string>()), lok};
        v.rhs = {grid, rhs, method_from(jv.at("rhs_method").get<std::string>()), rok};
        for (std::size_t i = 0; i < lok.size(); ++i) v.converged.push_back(lok[i] && rok[i]);
        r.variants.push_back(std::move(v));
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, "reports");
  }
  return out;
}

/// Writes `reports` to `path`. An empty list is rejected before the file
/// is touched.
inline void emit_report(const std::vector<ResidualReport>& reports, ReportFormat format, const std::string& path,
                        long long seed = 42) {
  if (reports.empty()) throw ValidationError("emit_report: no reports to write");
  const std::string body = format == ReportFormat::csv ? reports_to_csv(reports) : reports_to_json_text(reports, seed);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace vofrac
