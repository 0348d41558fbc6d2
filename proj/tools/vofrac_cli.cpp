#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vofrac/case_file.hpp"
#include "vofrac/report_io.hpp"

namespace {

using namespace vofrac;

struct RunConfig {
  std::string case_file = "default";
  std::string out;
  std::string format = "csv";
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  int talbot_nodes = kDefaultTalbotNodes;
  long long seed = 42;
};

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const OrderRangeError*>(&e)) return "OrderRangeError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const PoleError*>(&e)) return "PoleError";
  if (dynamic_cast<const AbscissaError*>(&e)) return "AbscissaError";
  if (dynamic_cast<const SingularAtOrigin*>(&e)) return "SingularAtOrigin";
  if (dynamic_cast<const ContourError*>(&e)) return "ContourError";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  return "Error";
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Plain result table for the non-verify commands.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // first cell is a string, the rest numeric text

  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + (i ? r[i] : reportio::csv_field(r[i]));
      out += "\n";
    }
    return out;
  }

  std::string json_text(long long seed) const {
    nlohmann::json doc;
    doc["seed"] = seed;
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i == 0) {
          row[columns[i]] = r[i];
        } else if (r[i] == "true" || r[i] == "false") {
          row[columns[i]] = r[i] == "true";
        } else {
          row[columns[i]] = std::stod(r[i]);
        }
      }
      doc["rows"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
  }
};

QuadConfig quad_config(const RunConfig& rc) {
  QuadConfig q;
  if (rc.rel_tol) q.rel_tol = *rc.rel_tol;
  if (rc.abs_tol) q.abs_tol = *rc.abs_tol;
  q.validate();
  return q;
}

std::vector<IdentityCase> load_cases(const RunConfig& rc) {
  if (rc.case_file == "default") return default_battery();
  return parse_case_file(rc.case_file);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  if (!out.flush()) throw IoError("write to " + path + " failed");
}

void emit_table(const Table& t, const RunConfig& rc) {
  if (t.rows.empty()) throw ValidationError("nothing to write");
  const std::string body = rc.format == "json" ? t.json_text(rc.seed) : t.csv();
  if (rc.out.empty()) {
    std::cout << body;
  } else {
    write_text(rc.out, body);
  }
}

int run_pointwise(const RunConfig& rc, bool derivative) {
  const QuadConfig q = quad_config(rc);
  Table t{{"case_name", "t", derivative ? "caputo_left" : "integral_left"}, {}};
  for (const auto& c : load_cases(rc)) {
    for (double x : c.t_eval_points) {
      const double v = derivative ? vo_caputo_left(c.psi, c.xi, c.phi, c.iv, x, q)
                                  : vo_integral_left(c.psi, c.xi, c.phi, c.iv, x, q);
      t.rows.push_back({c.name, fmt(x), fmt(v)});
    }
  }
  emit_table(t, rc);
  return 0;
}

int run_laplace(const RunConfig& rc) {
  const QuadConfig q = quad_config(rc);
  Table t{{"case_name", "s_real", "s_imag", "value_real", "value_imag", "converged"}, {}};
  for (const auto& c : load_cases(rc)) {
    const TransformSample f = forward_lt(c.psi, c.grid, q);
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      const cplx s = c.grid.points()[i];
      t.rows.push_back({c.name, fmt(s.real()), fmt(s.imag()), fmt(f.values[i].real()), fmt(f.values[i].imag()),
                        f.converged[i] ? "true" : "false"});
    }
  }
  emit_table(t, rc);
  return 0;
}

int run_invlaplace(const RunConfig& rc) {
  Table t{{"case_name", "t", "value", "psi"}, {}};
  for (const auto& c : load_cases(rc)) {
    const auto& F = c.psi.closed_form_transform();
    if (!F || !*F) throw DomainError("invlaplace: case " + c.name + " has no closed-form transform for psi");
    for (double x : c.t_eval_points) t.rows.push_back({c.name, fmt(x), fmt(inverse_lt(*F, x, rc.talbot_nodes)), fmt(c.psi(x))});
  }
  emit_table(t, rc);
  return 0;
}

int run_verify(const RunConfig& rc) {
  const QuadConfig q = quad_config(rc);
  const auto reports = run_suite(load_cases(rc), all_identities(), q);
  int status = 0;
  for (const auto& r : reports) {
    if (r.error) {
      std::printf("%-18s %-14s ERROR %s\n", r.case_name.c_str(), r.identity.c_str(), r.error->c_str());
      status = 1;
      continue;
    }
    const VariantResult* h = r.find(r.headline);
    std::printf("%-18s %-14s %-12s max_rel_residual=%.3e\n", r.case_name.c_str(), r.identity.c_str(),
                to_string(r.verdict()), h ? h->rel_residual : 0.0);
  }
  if (!rc.out.empty()) {
    emit_report(reports, rc.format == "json" ? ReportFormat::json : ReportFormat::csv, rc.out, rc.seed);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-order fractional operators and Laplace identity checks"};
  app.require_subcommand(1);
  RunConfig rc;
  auto add_common = [&rc](CLI::App* sub) {
    sub->add_option("--case", rc.case_file, "case file (JSON), or 'default' for the built-in battery")
        ->capture_default_str();
    sub->add_option("--out", rc.out, "output path (stdout for table commands when omitted)");
    sub->add_option("--format", rc.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--rel-tol", rc.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs-tol", rc.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--talbot-nodes", rc.talbot_nodes, "Talbot contour nodes")->check(CLI::Range(16, 1000));
    sub->add_option("--seed", rc.seed, "seed recorded with machine-readable output")->capture_default_str();
  };
  auto* deriv = app.add_subcommand("deriv", "left Caputo-type derivative at each t_eval point");
  auto* integral = app.add_subcommand("integral", "left fractional integral at each t_eval point");
  auto* laplace = app.add_subcommand("laplace", "forward transform of psi on the case grid");
  auto* invlaplace = app.add_subcommand("invlaplace", "Talbot inversion of psi's closed-form transform");
  auto* verify = app.add_subcommand("verify", "evaluate every selected identity and report residuals");
  for (auto* sub : {deriv, integral, laplace, invlaplace, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*deriv) return run_pointwise(rc, true);
    if (*integral) return run_pointwise(rc, false);
    if (*laplace) return run_laplace(rc);
    if (*invlaplace) return run_invlaplace(rc);
    return run_verify(rc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << error_kind(e) << ": " << e.what() << "\n";
    return 1;
  }
}
