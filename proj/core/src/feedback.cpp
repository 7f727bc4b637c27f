#include "repx/feedback.hpp"

#include "repx/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <variant>
#include <cctype>

namespace repx {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 3> kSlots = {"rom", "similarity", "guidance"};

Comparator parse_comparator(const std::string& op, const std::string& where) {
  if (op == "<") return Comparator::Less;
  if (op == "<=") return Comparator::LessEqual;
  if (op == ">") return Comparator::Greater;
  if (op == ">=") return Comparator::GreaterEqual;
  if (op == "==") return Comparator::Equal;
  if (op == "!=") return Comparator::NotEqual;
  throw ConfigError(where + ": unknown comparator '" + op + "'");
}

bool holds(double lhs, Comparator op, double rhs) {
  switch (op) {
    case Comparator::Less:
      return lhs < rhs;
    case Comparator::LessEqual:
      return lhs <= rhs;
    case Comparator::Greater:
      return lhs > rhs;
    case Comparator::GreaterEqual:
      return lhs >= rhs;
    case Comparator::Equal:
      return lhs == rhs;
    case Comparator::NotEqual:
      return lhs != rhs;
  }
  return false;
}

bool is_field(std::string_view name) {
  const auto& f = report_fields();
  return std::find(f.begin(), f.end(), name) != f.end();
}

bool is_integer_field(std::string_view name) {
  return name == "worst_segment" || name == "stability_segment" || name == "critical_count";
}

int default_decimals(std::string_view name) {
  if (is_integer_field(name)) return 0;
  if (name.ends_with("_deg")) return 0;
  return 2;
}

struct Placeholder {
  std::string field;
  int decimals = -1;
};

// Splits "...{field:N}..." into literal runs and placeholders; throws on
// unknown fields or unbalanced braces.
std::vector<std::variant<std::string, Placeholder>> parse_text(const std::string& text, const std::string& where) {
  std::vector<std::variant<std::string, Placeholder>> parts;
  std::string literal;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '}') throw ConfigError(where + ": unmatched '}' in text");
    if (text[i] != '{') {
      literal += text[i];
      continue;
    }
    const std::size_t close = text.find('}', i);
    if (close == std::string::npos) throw ConfigError(where + ": unterminated placeholder");
    std::string inner = text.substr(i + 1, close - i - 1);
    Placeholder ph;
    if (const auto colon = inner.find(':'); colon != std::string::npos) {
      const std::string digits = inner.substr(colon + 1);
      if (digits.empty() || digits.size() > 2 || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
        throw ConfigError(where + ": bad precision in placeholder {" + inner + "}");
      }
      ph.decimals = std::stoi(digits);
      inner = inner.substr(0, colon);
    }
    if (!is_field(inner)) throw ConfigError(where + ": unresolvable placeholder {" + inner + "}");
    ph.field = inner;
    if (!literal.empty()) parts.emplace_back(std::move(literal));
    literal.clear();
    parts.emplace_back(std::move(ph));
    i = close;
  }
  if (!literal.empty()) parts.emplace_back(std::move(literal));
  return parts;
}

std::string render(const FeedbackTemplate& tpl, const AnalysisReport& report) {
  std::string out;
  for (const auto& part : parse_text(tpl.text, tpl.id)) {
    if (const auto* lit = std::get_if<std::string>(&part)) {
      out += *lit;
      continue;
    }
    const auto& ph = std::get<Placeholder>(part);
    const double value = report_field(report, ph.field);
    const int decimals = ph.decimals >= 0 ? ph.decimals : default_decimals(ph.field);
    out += fmt::format("{:.{}f}", value, decimals);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& report_fields() {
  static const std::vector<std::string> fields = {
      "similarity",    "rom_diff_deg",      "rom_signed_deg", "rom_signal_deg", "rom_anchor_deg",
      "njs_delta_min", "worst_segment",     "stability_segment", "critical_count", "dtw_cost"};
  return fields;
}

double report_field(const AnalysisReport& r, std::string_view field) {
  if (field == "similarity") return r.similarity;
  if (field == "rom_diff_deg") return r.rom_diff_deg;
  if (field == "rom_signed_deg") return r.rom_signed_deg;
  if (field == "rom_signal_deg") return r.rom_signal_deg;
  if (field == "rom_anchor_deg") return r.rom_anchor_deg;
  if (field == "njs_delta_min") return r.njs_delta_min;
  if (field == "worst_segment") return r.worst_segment;
  if (field == "stability_segment") return r.stability_segment;
  if (field == "critical_count") return static_cast<double>(r.critical_segments.size());
  if (field == "dtw_cost") return r.dtw_cost;
  throw ConfigError("unknown report field '" + std::string(field) + "'");
}

TemplateSet::TemplateSet(std::vector<FeedbackTemplate> templates) : templates_(std::move(templates)) {
  std::set<std::string> ids;
  for (const auto& t : templates_) {
    const std::string where = "template '" + t.id + "'";
    if (t.id.empty()) throw ConfigError("template without id");
    if (!ids.insert(t.id).second) throw ConfigError(where + ": duplicate id");
    if (std::find(kSlots.begin(), kSlots.end(), t.slot) == kSlots.end()) {
      throw ConfigError(where + ": unknown slot '" + t.slot + "' (expected rom, similarity or guidance)");
    }
    for (const auto& c : t.when) {
      if (!is_field(c.field)) throw ConfigError(where + ": unknown condition field '" + c.field + "'");
    }
    parse_text(t.text, where);
  }
  for (std::string_view slot : kSlots) {
    const FeedbackTemplate* last = nullptr;
    for (const auto& t : templates_)
      if (t.slot == slot) last = &t;
    if (last == nullptr || !last->when.empty()) {
      throw ConfigError("template set: slot '" + std::string(slot) +
                        "' needs a final template without conditions so every report is covered");
    }
  }
}

TemplateSet TemplateSet::from_json(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array()) {
    throw ConfigError(source + ": expected an object with a \"templates\" array");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "templates" && key != "language") throw ConfigError(source + ": unknown key '" + key + "'");
  }
  std::vector<FeedbackTemplate> out;
  for (const auto& item : doc["templates"]) {
    FeedbackTemplate t;
    try {
      for (const auto& [key, _] : item.items()) {
        if (key != "id" && key != "slot" && key != "when" && key != "text") {
          throw ConfigError(source + ": unknown template key '" + key + "'");
        }
      }
      t.id = item.at("id").get<std::string>();
      t.slot = item.at("slot").get<std::string>();
      t.text = item.at("text").get<std::string>();
      for (const auto& c : item.value("when", json::array())) {
        const std::string where = source + ": template '" + t.id + "'";
        t.when.push_back({c.at("field").get<std::string>(), parse_comparator(c.at("op").get<std::string>(), where),
                          c.at("value").get<double>()});
      }
    } catch (const json::exception& e) {
      throw ConfigError(source + ": " + e.what());
    }
    out.push_back(std::move(t));
  }
  try {
    return TemplateSet(std::move(out));
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str(), path.string());
}

TemplateSet TemplateSet::defaults(double high, double medium) {
  auto cond = [](std::string field, Comparator op, double v) { return Condition{std::move(field), op, v}; };
  std::vector<FeedbackTemplate> t;
  t.push_back({"rom_close", "rom", {cond("rom_diff_deg", Comparator::Less, 5.0)},
               "The degree difference is less than 5"});
  t.push_back({"rom_gap", "rom", {}, "The degree difference is {rom_diff_deg} degrees"});
  t.push_back({"similarity_high", "similarity", {cond("similarity", Comparator::GreaterEqual, high)},
               "This looks great. That means the similarity of the exercises compared to your anchor is very good!"});
  t.push_back({"similarity_medium", "similarity", {cond("similarity", Comparator::GreaterEqual, medium)},
               "This looks good. The similarity of the exercises compared to your anchor is fair."});
  t.push_back({"similarity_low", "similarity", {},
               "The similarity of the exercises compared to your anchor is low."});
  t.push_back({"guidance_raise", "guidance",
               {cond("rom_diff_deg", Comparator::GreaterEqual, 5.0), cond("rom_signed_deg", Comparator::Less, 0.0)},
               "Raise higher in segment {worst_segment} (gap {rom_diff_deg}°)"});
  t.push_back({"guidance_overshoot", "guidance",
               {cond("rom_diff_deg", Comparator::GreaterEqual, 5.0), cond("rom_signed_deg", Comparator::Greater, 0.0)},
               "Do not raise beyond your anchor in segment {worst_segment} (over by {rom_diff_deg}°)"});
  t.push_back({"guidance_steady", "guidance", {cond("njs_delta_min", Comparator::LessEqual, -1.0)},
               "Move more steadily in segment {stability_segment}"});
  t.push_back({"guidance_keep", "guidance", {cond("similarity", Comparator::GreaterEqual, high)},
               "No need to modify the way you do it"});
  t.push_back({"guidance_practice", "guidance", {}, "Keep practicing to match your anchor exercise"});
  return TemplateSet(std::move(t));
}

std::vector<std::string> generate_text(const AnalysisReport& report, const TemplateSet& templates) {
  std::vector<std::string> out;
  for (std::string_view slot : kSlots) {
    for (const auto& t : templates.templates()) {
      if (t.slot != slot) continue;
      const bool fires = std::all_of(t.when.begin(), t.when.end(), [&](const Condition& c) {
        return holds(report_field(report, c.field), c.op, c.value);
      });
      if (fires) {
        out.push_back(render(t, report));
        break;
      }
    }
  }
  return out;
}

}  // namespace repx
