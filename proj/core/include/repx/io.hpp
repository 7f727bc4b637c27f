#pragma once

#include "repx/motion_series.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string_view>

namespace repx {

/// Header of the repetition CSV format, one timestep per line, t in seconds.
inline constexpr std::string_view kMotionCsvHeader = "t,ax,ay,az,gx,gy,gz";

/// Reads one repetition. The sampling rate is the inverse of the median time
/// step unless `fs_override` is set. Errors carry "path:line:" context.
MotionSeries read_motion_csv(const std::filesystem::path& path, std::optional<double> fs_override = std::nullopt);

/// Writes t = i / fs and the six axes with round-trip precision.
void write_motion_csv(const MotionSeries& series, const std::filesystem::path& path);

/// Opens `path` for writing, creating parent directories; throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace repx
