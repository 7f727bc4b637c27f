#include "repx/error.hpp"
#include "repx/feedback.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace repx;

namespace {

AnalysisReport report(double similarity, double rom_signed, double njs_delta = 0.0) {
  AnalysisReport r;
  r.similarity = similarity;
  r.rom_signed_deg = rom_signed;
  r.rom_diff_deg = std::abs(rom_signed);
  r.njs_delta_min = njs_delta;
  r.worst_segment = 4;
  r.stability_segment = 7;
  return r;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(Feedback, CloseRomAndHighSimilarity) {
  const auto text = generate_text(report(0.95, 3.0), TemplateSet::defaults());
  ASSERT_EQ(text.size(), 3u);
  EXPECT_EQ(text[0], "The degree difference is less than 5");
  EXPECT_TRUE(contains(text[1], "the similarity of the exercises compared to your anchor is very good!"));
  EXPECT_EQ(text[2], "No need to modify the way you do it");
}

TEST(Feedback, ShortfallAsksToRaise) {
  const auto text = generate_text(report(0.5, -30.4), TemplateSet::defaults());
  EXPECT_EQ(text[0], "The degree difference is 30 degrees");
  EXPECT_TRUE(contains(text[1], "low"));
  EXPECT_EQ(text[2], "Raise higher in segment 4 (gap 30°)");
}

TEST(Feedback, OvershootAndSteadiness) {
  EXPECT_TRUE(contains(generate_text(report(0.8, 12.0), TemplateSet::defaults())[2], "Do not raise beyond"));
  const auto steady = generate_text(report(0.8, 1.0, -2.0), TemplateSet::defaults());
  EXPECT_TRUE(contains(steady[1], "fair"));
  EXPECT_EQ(steady[2], "Move more steadily in segment 7");
  EXPECT_EQ(generate_text(report(0.8, 1.0), TemplateSet::defaults())[2],
            "Keep practicing to match your anchor exercise");
}

TEST(Feedback, ThresholdsAreConfigurable) {
  const auto strict = TemplateSet::defaults(0.99, 0.98);
  EXPECT_TRUE(contains(generate_text(report(0.95, 0.0), strict)[1], "low"));
}

TEST(Feedback, PlaceholderPrecision) {
  const auto set = TemplateSet::from_json(R"({"templates": [
    {"id": "r", "slot": "rom", "text": "{rom_diff_deg:2} / {similarity:1}"},
    {"id": "s", "slot": "similarity", "text": "{similarity}"},
    {"id": "g", "slot": "guidance", "text": "seg {worst_segment}, {critical_count}"}]})");
  auto r = report(0.876, -12.345);
  r.critical_segments = {1, 2};
  const auto text = generate_text(r, set);
  EXPECT_EQ(text[0], "12.35 / 0.9");
  EXPECT_EQ(text[1], "0.88");
  EXPECT_EQ(text[2], "seg 4, 2");
}

TEST(Feedback, ConditionsAllMustHold) {
  const auto set = TemplateSet::from_json(R"({"templates": [
    {"id": "both", "slot": "rom", "when": [{"field": "similarity", "op": ">", "value": 0.5},
                                           {"field": "rom_diff_deg", "op": "!=", "value": 0}], "text": "both"},
    {"id": "rom_default", "slot": "rom", "text": "default"},
    {"id": "s", "slot": "similarity", "text": "s"},
    {"id": "g", "slot": "guidance", "text": "g"}]})");
  EXPECT_EQ(generate_text(report(0.6, 1.0), set)[0], "both");
  EXPECT_EQ(generate_text(report(0.6, 0.0), set)[0], "default");
  EXPECT_EQ(generate_text(report(0.4, 1.0), set)[0], "default");
}

TEST(Feedback, ValidationErrors) {
  const char* cases[] = {
      // unknown placeholder
      R"({"templates": [{"id": "a", "slot": "rom", "text": "{nope}"},
                        {"id": "b", "slot": "similarity", "text": ""}, {"id": "c", "slot": "guidance", "text": ""}]})",
      // missing fallback in a slot
      R"({"templates": [{"id": "a", "slot": "rom", "when": [{"field": "similarity", "op": "<", "value": 1}], "text": ""},
                        {"id": "b", "slot": "similarity", "text": ""}, {"id": "c", "slot": "guidance", "text": ""}]})",
      // duplicate id
      R"({"templates": [{"id": "a", "slot": "rom", "text": ""},
                        {"id": "a", "slot": "similarity", "text": ""}, {"id": "c", "slot": "guidance", "text": ""}]})",
      // bad comparator
      R"({"templates": [{"id": "a", "slot": "rom", "when": [{"field": "similarity", "op": "~", "value": 1}], "text": ""},
                        {"id": "a2", "slot": "rom", "text": ""},
                        {"id": "b", "slot": "similarity", "text": ""}, {"id": "c", "slot": "guidance", "text": ""}]})",
      // unknown slot
      R"({"templates": [{"id": "a", "slot": "tone", "text": ""}]})",
      // unknown key
      R"({"templates": [], "extra": 1})",
      // unbalanced brace
      R"({"templates": [{"id": "a", "slot": "rom", "text": "{similarity"},
                        {"id": "b", "slot": "similarity", "text": ""}, {"id": "c", "slot": "guidance", "text": ""}]})",
      // not JSON
      "{templates",
  };
  for (const char* c : cases) EXPECT_THROW(TemplateSet::from_json(c), ConfigError) << c;
}

TEST(Feedback, LoadFromFile) {
  const auto path = testutil::scratch_dir("templates") / "t.json";
  {
    std::ofstream out(path);
    out << R"({"language": "en", "templates": [{"id": "r", "slot": "rom", "text": "R"},
      {"id": "s", "slot": "similarity", "text": "S"}, {"id": "g", "slot": "guidance", "text": "G"}]})";
  }
  EXPECT_EQ(generate_text(report(0.1, 0.1), TemplateSet::load(path)), (std::vector<std::string>{"R", "S", "G"}));
  EXPECT_THROW(TemplateSet::load(path.parent_path() / "missing.json"), IoError);
}

TEST(Feedback, ReportFieldsResolve) {
  const auto r = report(0.5, 2.0);
  for (const auto& f : report_fields()) EXPECT_NO_THROW(report_field(r, f)) << f;
  EXPECT_THROW(report_field(r, "nope"), ConfigError);
}
