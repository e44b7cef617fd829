#pragma once

#include "wayfind/config.hpp"
#include "wayfind/engine.hpp"
#include "wayfind/raster.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

namespace wayfind {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// RFC-4180 field: quoted when it contains a comma, quote, or line break.
std::string csv_field(const std::string& s);

void write_trajectories_csv(std::ostream& out, std::span<const RunLogs> runs);
void write_sign_events_csv(std::ostream& out, std::span<const RunLogs> runs);
void write_metrics_csv(std::ostream& out, std::span<const RunLogs> runs);
void write_audit_csv(std::ostream& out, std::span<const SignAudit> audit);
void write_summary_json(std::ostream& out, const BatchResult& result, const SimulationConfig& config);

/// Binary PPM (P6), 8 bits per channel.
void write_ppm(std::ostream& out, const ViewRaster& raster);
/// Binary PGM (P5), 8 bits, values in [0,1] scaled to 0..255.
void write_pgm(std::ostream& out, const Raster<double>& values);
/// Binary PGM (P5), 16 bits big-endian; values saturate at 65535.
void write_pgm16(std::ostream& out, const Raster<std::uint32_t>& values);

/// Sums the heatmaps of all runs per floor.
std::map<std::string, Heatmap> merge_heatmaps(std::span<const RunLogs> runs);

/// Writes trajectories, sign events, metrics, summary, heatmaps and, when requested, the audit
/// table into `dir` (created if absent). Throws OutputError on I/O failure.
void write_outputs(const std::filesystem::path& dir, const BatchResult& result, const SimulationConfig& config,
                   bool with_audit);

/// Opens `path` for binary writing; throws OutputError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace wayfind
