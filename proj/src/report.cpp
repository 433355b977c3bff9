#include "gma/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gma/verify.hpp"

namespace gma {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(std::size_t line) { return "line " + std::to_string(line); }

int parse_index(const std::string& field, std::size_t line, std::size_t column) {
  const std::string item = trim(field);
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(item, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (item.empty() || used != item.size()) {
    throw DesignParseError(where(line) + ", column " + std::to_string(column) + ": '" + item +
                           "' is not an integer level index");
  }
  return value;
}

nlohmann::ordered_json pattern_json(const WordlengthPattern& w) {
  auto out = nlohmann::ordered_json::array();
  for (double a : w.alpha) out.push_back(a);
  return out;
}

nlohmann::ordered_json display_json(const WordlengthPattern& w) {
  auto out = nlohmann::ordered_json::array();
  for (double a : w.alpha) out.push_back(display_value(a));
  return out;
}

std::string joined(const WordlengthPattern& w, bool display) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out << ", ";
    if (display) {
      out << display_value(w[i]);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", w[i]);
      out << buf;
    }
  }
  out << ')';
  return out.str();
}

}  // namespace

DesignFile parse_design(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  std::optional<FactorSpec> spec;
  while (std::getline(in, text)) {
    ++line_no;
    text = trim(text);
    if (text.empty()) continue;
    const std::string prefix = "levels:";
    if (text.compare(0, prefix.size(), prefix) != 0) {
      throw DesignParseError(where(line_no) + ": expected header 'levels: n1,n2,...'");
    }
    try {
      spec = parse_levels(trim(text.substr(prefix.size())));
    } catch (const std::invalid_argument& e) {
      throw DesignParseError(where(line_no) + ": " + e.what());
    }
    break;
  }
  if (!spec) throw DesignParseError("missing header 'levels: n1,n2,...'");

  DesignFile file{*spec, {}};
  while (std::getline(in, text)) {
    ++line_no;
    text = trim(text);
    if (text.empty()) continue;
    std::vector<int> run;
    std::stringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const std::size_t column = run.size() + 1;
      if (static_cast<int>(column) > spec->factor_count()) {
        throw DesignParseError(where(line_no) + ": more than " +
                               std::to_string(spec->factor_count()) + " columns");
      }
      const int level = parse_index(field, line_no, column);
      const int n = spec->levels_of(static_cast<int>(column) - 1);
      if (level < 0 || level >= n) {
        throw DesignParseError(where(line_no) + ", column " + std::to_string(column) +
                               ": level " + std::to_string(level) + " outside 0.." +
                               std::to_string(n - 1));
      }
      run.push_back(level);
    }
    if (static_cast<int>(run.size()) != spec->factor_count()) {
      throw DesignParseError(where(line_no) + ": expected " +
                             std::to_string(spec->factor_count()) + " columns, found " +
                             std::to_string(run.size()));
    }
    file.design.runs.push_back(std::move(run));
  }
  if (file.design.runs.empty()) throw DesignParseError("design has no runs");
  return file;
}

DesignFile read_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DesignParseError("cannot open '" + path + "'");
  return parse_design(in);
}

void write_design(std::ostream& out, const FactorSpec& spec, const DesignMatrix& design) {
  out << "levels: " << spec.to_string() << '\n';
  for (const auto& run : design.runs) {
    for (std::size_t k = 0; k < run.size(); ++k) {
      if (k) out << ',';
      out << run[k];
    }
    out << '\n';
  }
}

std::string display_value(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

nlohmann::ordered_json to_json(const ConstructReport& report) {
  nlohmann::ordered_json j;
  j["levels"] = report.spec.levels();
  j["runs"] = report.runs;
  j["wlp"] = pattern_json(report.result.wlp);
  j["wlp_display"] = display_json(report.result.wlp);
  j["strength"] = report.result.strength;
  j["is_oa"] = report.result.is_oa();
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : report.result.steps) {
    steps.push_back({{"k", s.k}, {"W_star", s.w_star}, {"status", to_string(s.status)}});
  }
  j["steps"] = steps;
  j["seed"] = report.config.seed;
  j["mode"] = to_string(report.config.mode);
  if (report.elapsed_s) {
    j["elapsed_s"] = *report.elapsed_s;
  } else {
    j["elapsed_s"] = nullptr;
  }
  j["proven"] = report.result.proven;
  j["counting_vector"] = report.result.y.counts;
  j["design"] = report.design.runs;
  return j;
}

std::string to_text(const ConstructReport& report) {
  std::ostringstream out;
  const auto& r = report.result;
  out << "levels:   " << report.spec.to_string() << '\n';
  out << "runs:     " << report.runs << '\n';
  out << "mode:     " << to_string(report.config.mode) << " (seed " << report.config.seed
      << ")\n";
  out << "wlp:      " << joined(r.wlp, true) << '\n';
  out << "wlp_full: " << joined(r.wlp, false) << '\n';
  out << "strength: " << r.strength << (r.is_oa() ? "" : " (not an orthogonal array)") << '\n';
  out << "proven:   " << (r.proven ? "yes" : "no") << '\n';
  for (const auto& s : r.steps) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "step %d: W* = %.10g (%s)\n", s.k, s.w_star,
                  to_string(s.status).c_str());
    out << buf;
  }
  if (report.elapsed_s) out << "elapsed:  " << *report.elapsed_s << " s\n";
  out << "design:\n";
  write_design(out, report.spec, report.design);
  return out.str();
}

bool EvaluationReport::paths_agree(double tol) const { return max_discrepancy <= tol; }

EvaluationReport evaluate_design(const DesignFile& file) {
  const auto model = GwlpModel::shared(file.spec);
  const auto y = compress(file.design, model->lattice());
  EvaluationReport report{file.spec, 0, {}, {}};
  report.runs = y.runs();
  report.wlp = model->pattern(y);
  report.wlp_oracle = wlp_oracle(y, model->lattice());
  for (std::size_t i = 0; i < report.wlp.size(); ++i) {
    report.max_discrepancy =
        std::max(report.max_discrepancy, std::abs(report.wlp[i] - report.wlp_oracle[i]));
  }
  report.strength_wlp = strength_from_wlp(report.wlp);
  report.strength_coefficients = strength_by_coefficients(y, model->lattice());
  report.strength_projection = projection_strength(file.design, file.spec);
  return report;
}

nlohmann::ordered_json to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["levels"] = report.spec.levels();
  j["runs"] = report.runs;
  j["wlp"] = pattern_json(report.wlp);
  j["wlp_display"] = display_json(report.wlp);
  j["wlp_oracle"] = pattern_json(report.wlp_oracle);
  j["max_discrepancy"] = report.max_discrepancy;
  j["strength"] = report.strength_wlp;
  j["strength_coefficients"] = report.strength_coefficients;
  j["strength_projection"] = report.strength_projection;
  j["is_oa"] = report.strength_wlp >= 1;
  return j;
}

std::string to_text(const EvaluationReport& report) {
  std::ostringstream out;
  out << "levels:     " << report.spec.to_string() << '\n';
  out << "runs:       " << report.runs << '\n';
  out << "wlp:        " << joined(report.wlp, true) << '\n';
  out << "wlp_full:   " << joined(report.wlp, false) << '\n';
  out << "wlp_oracle: " << joined(report.wlp_oracle, false) << '\n';
  out << "strength:   " << report.strength_wlp << " (coefficients "
      << report.strength_coefficients << ", projections " << report.strength_projection
      << ")\n";
  return out.str();
}

}  // namespace gma
