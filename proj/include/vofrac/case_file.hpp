#pragma once

// Case files: JSON documents that declare IdentityCase values from a fixed
// catalog of named function forms.
//
//   {"cases": [{"name": "...", "interval": [a, b], "sigma": 0,
//               "psi":   {"form": "polynomial", "coeffs": [0, 1]},
//               "order": {"form": "saturating", "base": 0.3, "amp": 0.4},
//               "scale": {"form": "power", "coef": 1, "exponent": 2},
//               "grid": "default", "t_eval": [0.25, 0.5, 1, 2],
//               "t_prime": 1, "checks": ["vo_caputo_lt"]}]}

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vofrac/checker.hpp"

namespace vofrac {

namespace casefile {

using nlohmann::json;

// 1-based line of byte offset `pos`.
inline int line_at(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Best-effort line lookup for key `field` inside the case whose name is
// `case_name`: first occurrence of "field" after the case's name string.
inline int locate(const std::string& text, const std::string& case_name, const std::string& field) {
  std::size_t from = 0;
  if (!case_name.empty()) {
    const std::size_t at = text.find("\"" + case_name + "\"");
    if (at != std::string::npos) {
      const std::size_t open = text.rfind('{', at);
      from = open == std::string::npos ? at : open;
    }
  }
  const std::size_t hit = text.find("\"" + field + "\"", from);
  if (hit != std::string::npos) return line_at(text, hit);
  return from ? line_at(text, from) : 0;
}

class Reader {
 public:
  Reader(const std::string& text, std::string case_name) : text_(text), case_(std::move(case_name)) {}

  // Reports the line of the deepest path component present in the text, so
  // a missing key points at its parent.
  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    std::string path = field;
    int line = 0;
    while (!path.empty()) {
      const std::size_t dot = path.find_last_of('.');
      const std::string leaf = path.substr(dot == std::string::npos ? 0 : dot + 1);
      if (leaf.find('[') == std::string::npos && text_.find("\"" + leaf + "\"") != std::string::npos) {
        line = locate(text_, case_, leaf);
        break;
      }
      path = dot == std::string::npos ? "" : path.substr(0, dot);
    }
    if (line == 0) line = locate(text_, case_, "name");
    throw ParseError(msg, line, field);
  }

  const json& member(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing field");
    return *it;
  }

  double number(const json& obj, const std::string& key, const std::string& path) const {
    const json& v = member(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
  }

  double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) const {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return number(obj, key, path);
  }

  std::vector<double> numbers(const json& v, const std::string& field) const {
    if (!v.is_array()) fail(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(field, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::string form(const json& obj, const std::string& path) const {
    const json& f = member(obj, "form", path);
    if (!f.is_string()) fail(path + ".form", "expected a string");
    return f.get<std::string>();
  }

 private:
  const std::string& text_;
  std::string case_;
};

inline double factorial(int k) { return std::tgamma(k + 1.0); }

inline ScalarFunction make_psi(const Reader& rd, const json& node, double sigma) {
  const std::string path = "psi";
  const std::string form = rd.form(node, path);
  if (form == "polynomial") {
    const std::vector<double> c = rd.numbers(rd.member(node, "coeffs", path), path + ".coeffs");
    if (c.empty()) rd.fail(path + ".coeffs", "needs at least one coefficient");
    auto f = [c](double t) {
      double v = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
      return v;
    };
    auto df = [c](double t) {
      double v = 0.0;
      for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
      return v;
    };
    // t^k <= k!/r^k e^(rt) for every t >= 0.
    constexpr double rate = 0.5;
    double bound = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) bound += std::abs(c[k]) * factorial(static_cast<int>(k)) / std::pow(rate, k);
    ScalarFunction psi(f, df, sigma);
    psi.with_growth({std::max(bound, 1e-300), rate});
    psi.with_transform([c](cplx s) {
      cplx v = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) v += c[k] * factorial(static_cast<int>(k)) / std::pow(s, k + 1.0);
      return v;
    });
    return psi;
  }
  if (form == "exponential") {
    // amp e^(rate t) + offset
    const double amp = rd.number(node, "amp", path), rate = rd.number(node, "rate", path);
    const double offset = rd.number_or(node, "offset", 0.0, path);
    ScalarFunction psi([=](double t) { return amp * std::exp(rate * t) + offset; },
                       [=](double t) { return amp * rate * std::exp(rate * t); }, sigma);
    psi.with_growth({std::abs(amp) + std::abs(offset) + 1e-300, std::max(rate, 0.0)});
    psi.with_transform([=](cplx s) { return amp / (s - rate) + offset / s; });
    return psi;
  }
  if (form == "sinusoidal") {
    // amp sin(freq t + phase) + offset
    const double amp = rd.number(node, "amp", path), freq = rd.number(node, "freq", path);
    const double phase = rd.number_or(node, "phase", 0.0, path), offset = rd.number_or(node, "offset", 0.0, path);
    ScalarFunction psi([=](double t) { return amp * std::sin(freq * t + phase) + offset; },
                       [=](double t) { return amp * freq * std::cos(freq * t + phase); }, sigma);
    psi.with_growth({std::abs(amp) + std::abs(offset) + 1e-300, 0.0});
    psi.with_transform([=](cplx s) {
      return amp * (freq * std::cos(phase) + s * std::sin(phase)) / (s * s + freq * freq) + offset / s;
    });
    return psi;
  }
  rd.fail(path + ".form", "unknown form '" + form + "' (polynomial, exponential, sinusoidal)");
}

inline OrderFunction make_order(const Reader& rd, const json& node) {
  const std::string path = "order";
  const std::string form = rd.form(node, path);
  const double ks = rd.number_or(node, "sigma_coef", 0.0, path);
  if (form == "constant") {
    const double v = rd.number(node, "value", path);
    if (ks == 0.0) {
      try {
        return OrderFunction::constant(v);
      } catch (const OrderRangeError& e) {
        throw ValidationError(e.what());
      }
    }
    return OrderFunction([=](double sigma, double) { return v + ks * sigma; });
  }
  if (form == "linear") {
    // c0 + c1 t, clamped to [lo, hi] when given
    const double c0 = rd.number(node, "c0", path), c1 = rd.number(node, "c1", path);
    const double lo = rd.number_or(node, "lo", -INFINITY, path), hi = rd.number_or(node, "hi", INFINITY, path);
    return OrderFunction([=](double sigma, double t) { return std::clamp(c0 + c1 * t, lo, hi) + ks * sigma; });
  }
  if (form == "saturating") {
    // base + amp t/(1+t)
    const double base = rd.number(node, "base", path), amp = rd.number(node, "amp", path);
    return OrderFunction([=](double sigma, double t) { return base + amp * t / (1.0 + t) + ks * sigma; });
  }
  if (form == "sinusoidal") {
    // base + amp sin(freq t + phase)
    const double base = rd.number(node, "base", path), amp = rd.number(node, "amp", path);
    const double freq = rd.number_or(node, "freq", 1.0, path), phase = rd.number_or(node, "phase", 0.0, path);
    return OrderFunction([=](double sigma, double t) { return base + amp * std::sin(freq * t + phase) + ks * sigma; });
  }
  rd.fail(path + ".form", "unknown form '" + form + "' (constant, linear, saturating, sinusoidal)");
}

inline ScaleFunction make_scale(const Reader& rd, const json& node) {
  const std::string path = "scale";
  const std::string form = rd.form(node, path);
  if (form == "identity") return ScaleFunction::identity();
  if (form == "power") return ScaleFunction::power(rd.number(node, "coef", path), rd.number(node, "exponent", path));
  rd.fail(path + ".form", "unknown form '" + form + "' (identity, power)");
}

inline ComplexGrid make_grid(const Reader& rd, const json& node) {
  if (node.is_string()) {
    if (node.get<std::string>() != "default") rd.fail("grid", "expected \"default\" or an object");
    return ComplexGrid::default_grid();
  }
  const json& pts = rd.member(node, "points", "grid");
  if (!pts.is_array()) rd.fail("grid.points", "expected an array of [re, im] pairs");
  std::vector<cplx> points;
  for (const auto& p : pts) {
    const std::vector<double> xy = rd.numbers(p, "grid.points");
    if (xy.size() != 2) rd.fail("grid.points", "expected [re, im]");
    points.emplace_back(xy[0], xy[1]);
  }
  return ComplexGrid(std::move(points), rd.number(node, "abscissa", "grid"));
}

inline IdentityCase make_case(const std::string& text, const json& c, std::size_t index) {
  const std::string fallback = "cases[" + std::to_string(index) + "]";
  std::string name;
  if (c.is_object() && c.contains("name") && c["name"].is_string()) name = c["name"].get<std::string>();
  const Reader rd(text, name);
  if (name.empty()) rd.fail(fallback + ".name", "missing or non-string case name");

  const std::vector<double> ab = rd.numbers(rd.member(c, "interval", name), "interval");
  if (ab.size() != 2) rd.fail("interval", "expected [a, b]");
  const double sigma = rd.number_or(c, "sigma", 0.0, name);

  IdentityCase out;
  out.name = name;
  out.iv = Interval(ab[0], ab[1]);
  out.psi = make_psi(rd, rd.member(c, "psi", name), sigma);
  out.xi = make_order(rd, rd.member(c, "order", name));
  out.phi = c.contains("scale") ? make_scale(rd, c["scale"]) : ScaleFunction::identity();
  out.grid = c.contains("grid") ? make_grid(rd, c["grid"]) : ComplexGrid::default_grid();
  out.t_eval_points = c.contains("t_eval") ? rd.numbers(c["t_eval"], "t_eval") : std::vector<double>{0.25, 0.5, 1.0, 2.0};
  out.t_prime = rd.number_or(c, "t_prime", 1.0, name);
  if (c.contains("checks")) {
    const json& ch = c["checks"];
    if (!ch.is_array()) rd.fail("checks", "expected an array of identity names");
    for (const auto& x : ch) {
      if (!x.is_string()) rd.fail("checks", "expected an array of identity names");
      out.checks.insert(x.get<std::string>());
    }
  }
  return out;
}

}  // namespace casefile

/// Parses and validates every case in `text`. Syntax and schema problems
/// raise ParseError; well-formed cases that break an invariant raise
/// ValidationError.
inline std::vector<IdentityCase> parse_cases(const std::string& text) {
  using casefile::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), casefile::line_at(text, e.byte ? e.byte - 1 : 0), "");
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array()) {
    throw ParseError("top level must be an object with a \"cases\" array", 1, "cases");
  }
  if (doc["cases"].empty()) throw ParseError("no cases", casefile::locate(text, "", "cases"), "cases");
  std::vector<IdentityCase> out;
  for (std::size_t i = 0; i < doc["cases"].size(); ++i) {
    out.push_back(casefile::make_case(text, doc["cases"][i], i));
    for (std::size_t j = 0; j < i; ++j) {
      if (out[j].name == out[i].name) throw ValidationError("duplicate case name " + out[i].name);
    }
    out.back().validate();
  }
  return out;
}

inline std::vector<IdentityCase> parse_case_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open case file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cases(buf.str());
}

}  // namespace vofrac
