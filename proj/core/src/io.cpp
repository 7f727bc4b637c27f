#include "repx/io.hpp"

#include "repx/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace repx {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw DataError(fmt::format("{}:{}: {}", path.string(), line, what));
}

}  // namespace

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

MotionSeries read_motion_csv(const std::filesystem::path& path, std::optional<double> fs_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++line_no;
  if (trim(line) != kMotionCsvHeader) {
    fail(path, line_no, fmt::format("expected header '{}', got '{}'", kMotionCsvHeader, trim(line)));
  }

  std::vector<double> t;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    double fields[7];
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = row.find(',', pos);
      const std::string_view cell = trim(row.substr(pos, comma == std::string_view::npos ? row.npos : comma - pos));
      if (count == 7) fail(path, line_no, "too many fields (expected 7)");
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size()) {
        fail(path, line_no, fmt::format("field {} is not a number: '{}'", count + 1, cell));
      }
      if (!std::isfinite(v)) fail(path, line_no, fmt::format("field {} is not finite", count + 1));
      fields[count++] = v;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (count != 7) fail(path, line_no, fmt::format("expected 7 fields, got {}", count));
    if (!t.empty() && !(fields[0] > t.back())) fail(path, line_no, "time stamps must increase strictly");
    t.push_back(fields[0]);
    values.insert(values.end(), fields + 1, fields + 7);
  }
  if (t.size() < 2) fail(path, line_no, "need at least two data rows");

  double fs = 0.0;
  if (fs_override) {
    if (!(*fs_override > 0.0)) throw ConfigError("sampling-rate override must be positive");
    fs = *fs_override;
  } else {
    std::vector<double> dt(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) dt[i] = t[i + 1] - t[i];
    std::sort(dt.begin(), dt.end());
    const std::size_t m = dt.size() / 2;
    const double median = dt.size() % 2 == 1 ? dt[m] : 0.5 * (dt[m - 1] + dt[m]);
    fs = 1.0 / median;
  }

  Samples x(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(kImuAxes));
  std::copy(values.begin(), values.end(), x.data());
  SeriesLabel label;
  label.exercise = path.stem().string();
  return MotionSeries(std::move(x), fs, std::move(label));
}

void write_motion_csv(const MotionSeries& series, const std::filesystem::path& path) {
  if (series.axes() != kImuAxes) throw DataError("CSV export needs exactly 6 axes");
  std::ofstream out = open_output(path);
  out << kMotionCsvHeader << '\n';
  std::string row;
  for (std::size_t i = 0; i < series.length(); ++i) {
    row.clear();
    fmt::format_to(std::back_inserter(row), "{}", static_cast<double>(i) / series.fs_hz());
    for (std::size_t k = 0; k < kImuAxes; ++k) fmt::format_to(std::back_inserter(row), ",{}", series(i, k));
    out << row << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace repx
