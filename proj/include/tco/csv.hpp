#pragma once

#include "tco/optimizer.hpp"
#include "tco/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tco {

/// Metadata emitted as the `#`-prefixed block at the top of every CSV.
struct CsvHeader {
  std::string version;
  std::string manifest_file = "manifest.json";
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string series;
};

std::string render_header(const CsvHeader& header);

/// Columns: <x_label>,<value_label>,stderr (stderr empty for single draws).
std::string render_series_csv(const CsvHeader& header, const SeriesResult& series);

/// Columns: k,m_hat,g_hat,a_k,c_k,probe_plus,probe_minus.
std::string render_trajectory_csv(const CsvHeader& header, const FdsaTrajectory& trajectory);

/// Columns: t,n,m_opt,m_continuous.
std::string render_track_csv(const CsvHeader& header, const TrackResult& track);

/// Columns: window_start,window_end,mean_m_opt.
std::string render_averages_csv(const CsvHeader& header, const TrackResult& track, double window,
                                double horizon);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace tco
