#include "tco/csv.hpp"

#include "tco/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace tco {

std::string render_header(const CsvHeader& h) {
  std::string out;
  out += "# tco-sa " + h.version + "\n";
  out += "# manifest: " + h.manifest_file + "\n";
  out += "# config_digest: " + h.config_digest + "\n";
  out += "# seed: " + std::to_string(h.seed) + "\n";
  out += "# series: " + h.series + "\n";
  return out;
}

std::string render_series_csv(const CsvHeader& header, const SeriesResult& series) {
  std::string out = render_header(header);
  out += series.x_label + "," + series.value_label + ",stderr\n";
  for (const auto& p : series.points) {
    out += format_double(p.x) + "," + format_double(p.value) + ",";
    if (p.stderr_) out += format_double(*p.stderr_);
    out += "\n";
  }
  return out;
}

std::string render_trajectory_csv(const CsvHeader& header, const FdsaTrajectory& trajectory) {
  std::string out = render_header(header);
  out += "k,m_hat,g_hat,a_k,c_k,probe_plus,probe_minus\n";
  for (const auto& r : trajectory.records) {
    out += std::to_string(r.k) + "," + format_double(r.m_hat) + "," + format_double(r.g_hat) + "," +
           format_double(r.a_k) + "," + format_double(r.c_k) + "," + format_double(r.probe_plus) +
           "," + format_double(r.probe_minus) + "\n";
  }
  return out;
}

std::string render_track_csv(const CsvHeader& header, const TrackResult& track) {
  std::string out = render_header(header);
  out += "t,n,m_opt,m_continuous\n";
  for (std::size_t j = 0; j < track.optimum.points.size(); ++j) {
    const auto& p = track.optimum.points[j];
    out += format_double(p.x) + "," + std::to_string(track.subscribers[j]) + "," +
           format_double(p.value) + "," + format_double(track.continuous[j]) + "\n";
  }
  return out;
}

std::string render_averages_csv(const CsvHeader& header, const TrackResult& track, double window,
                                double horizon) {
  std::string out = render_header(header);
  out += "window_start,window_end,mean_m_opt\n";
  for (const auto& p : track.averages.points) {
    out += format_double(p.x) + "," + format_double(std::min(p.x + window, horizon)) + "," +
           format_double(p.value) + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace tco
