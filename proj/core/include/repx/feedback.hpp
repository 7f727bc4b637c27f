#pragma once

#include "repx/report.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace repx {

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

struct Condition {
  std::string field;
  Comparator op = Comparator::Less;
  double value = 0.0;
};

/// A template fires when all its conditions hold. Text placeholders are
/// `{field}` or `{field:N}` (N decimals).
struct FeedbackTemplate {
  std::string id;
  std::string slot;  // "rom", "similarity" or "guidance"
  std::vector<Condition> when;
  std::string text;
};

/// Immutable, validated template set. Each slot needs a final template
/// without conditions so every report yields exactly one string per slot.
class TemplateSet {
 public:
  static TemplateSet from_json(std::string_view json_text, const std::string& source = "<inline>");
  static TemplateSet load(const std::filesystem::path& path);
  /// Built-in English set. Similarity bands: >= high "very good", >= medium "fair".
  static TemplateSet defaults(double high_similarity = 0.9, double medium_similarity = 0.7);

  const std::vector<FeedbackTemplate>& templates() const noexcept { return templates_; }

 private:
  explicit TemplateSet(std::vector<FeedbackTemplate> templates);
  std::vector<FeedbackTemplate> templates_;
};

/// Numeric fields a template may reference.
const std::vector<std::string>& report_fields();
double report_field(const AnalysisReport& report, std::string_view field);

/// One ROM string, one similarity string, one guidance string, in that order.
std::vector<std::string> generate_text(const AnalysisReport& report, const TemplateSet& templates);

}  // namespace repx
