#include "wayfind/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace wayfind {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw OutputError("cannot format number");
  return {buf.data(), end};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_trajectories_csv(std::ostream& out, std::span<const RunLogs> runs) {
  out << "replication,agent,t,floor,x,y,speed,mode,current_goal\n";
  for (const auto& run : runs) {
    for (const auto& r : run.trajectory) {
      out << r.replication << ',' << r.agent << ',' << format_double(r.t) << ',' << csv_field(r.floor) << ','
          << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.speed) << ','
          << to_string(r.mode) << ',' << csv_field(std::to_string(r.leg) + ":" + r.goal) << '\n';
    }
  }
}

void write_sign_events_csv(std::ostream& out, std::span<const RunLogs> runs) {
  out << "replication,agent,t,sign_id,attention,threshold,seen,category,decision\n";
  for (const auto& run : runs) {
    for (const auto& e : run.sign_events) {
      out << e.replication << ',' << e.agent << ',' << format_double(e.t) << ',' << e.sign << ','
          << format_double(e.attention) << ',' << (e.threshold ? format_double(*e.threshold) : "") << ','
          << (e.seen ? 1 : 0) << ',' << (e.category ? std::to_string(static_cast<int>(*e.category)) : "") << ','
          << csv_field(e.decision) << '\n';
    }
  }
}

void write_metrics_csv(std::ostream& out, std::span<const RunLogs> runs) {
  out << "replication,agent,leg,completed,travel_time,path_length\n";
  for (const auto& run : runs) {
    for (const auto& m : run.metrics) {
      out << m.replication << ',' << m.agent << ',' << m.leg << ',' << (m.completed ? 1 : 0) << ','
          << format_double(m.travel_time) << ',' << format_double(m.path_length) << '\n';
    }
  }
}

void write_audit_csv(std::ostream& out, std::span<const SignAudit> audit) {
  out << "sign_id,seen_fraction,mean_attention_when_visible,decisions_triggered\n";
  for (const auto& a : audit) {
    out << a.sign << ',' << format_double(a.seen_fraction) << ',' << format_double(a.mean_attention_when_visible)
        << ',' << a.decisions_triggered << '\n';
  }
}

void write_summary_json(std::ostream& out, const BatchResult& result, const SimulationConfig& config) {
  nlohmann::ordered_json doc;
  doc["master_seed"] = config.master_seed;
  doc["replications"] = config.replications;
  doc["agents_per_replication"] = config.agents_per_replication;
  doc["agent_runs"] = result.agent_runs;
  doc["all_legs_completed"] = result.all_legs_completed;
  doc["all_legs_completion_rate"] =
      result.agent_runs > 0 ? static_cast<double>(result.all_legs_completed) / result.agent_runs : 0.0;
  auto legs = nlohmann::ordered_json::array();
  for (const auto& l : result.legs) {
    legs.push_back({{"leg", l.leg},
                    {"attempted", l.attempted},
                    {"completed", l.completed},
                    {"completion_rate", l.completion_rate},
                    {"travel_time_median", l.travel_time_median},
                    {"travel_time_p90", l.travel_time_p90},
                    {"path_length_median", l.path_length_median},
                    {"path_length_p90", l.path_length_p90}});
  }
  doc["legs"] = legs;
  auto notes = nlohmann::ordered_json::array();
  for (const auto& run : result.runs) {
    for (const auto& n : run.notes) notes.push_back(n);
  }
  doc["notes"] = notes;
  out << doc.dump(2) << '\n';
}

namespace {

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

void write_ppm(std::ostream& out, const ViewRaster& raster) {
  const auto h = raster.red.rows();
  const auto w = raster.red.cols();
  out << "P6\n" << w << ' ' << h << "\n255\n";
  std::string row(static_cast<std::size_t>(3 * w), '\0');
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      row[3 * x] = static_cast<char>(to_byte(raster.red(y, x)));
      row[3 * x + 1] = static_cast<char>(to_byte(raster.green(y, x)));
      row[3 * x + 2] = static_cast<char>(to_byte(raster.blue(y, x)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_pgm(std::ostream& out, const Raster<double>& values) {
  out << "P5\n" << values.cols() << ' ' << values.rows() << "\n255\n";
  std::string row(static_cast<std::size_t>(values.cols()), '\0');
  for (Eigen::Index y = 0; y < values.rows(); ++y) {
    for (Eigen::Index x = 0; x < values.cols(); ++x) row[x] = static_cast<char>(to_byte(values(y, x)));
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_pgm16(std::ostream& out, const Raster<std::uint32_t>& values) {
  out << "P5\n" << values.cols() << ' ' << values.rows() << "\n65535\n";
  std::string row(static_cast<std::size_t>(2 * values.cols()), '\0');
  for (Eigen::Index y = 0; y < values.rows(); ++y) {
    for (Eigen::Index x = 0; x < values.cols(); ++x) {
      const std::uint32_t v = std::min<std::uint32_t>(values(y, x), 65535u);
      row[2 * x] = static_cast<char>(v >> 8);
      row[2 * x + 1] = static_cast<char>(v & 0xff);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

std::map<std::string, Heatmap> merge_heatmaps(std::span<const RunLogs> runs) {
  std::map<std::string, Heatmap> total;
  for (const auto& run : runs) {
    for (const auto& [floor, counts] : run.heatmaps) {
      auto [it, inserted] = total.emplace(floor, counts);
      if (!inserted) it->second += counts;
    }
  }
  return total;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  return out;
}

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out = open_output(path);
  writer(out);
  out.flush();
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace

void write_outputs(const std::filesystem::path& dir, const BatchResult& result, const SimulationConfig& config,
                   bool with_audit) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory " + dir.string());
  }
  const std::span<const RunLogs> runs(result.runs);
  write_file(dir / "trajectories.csv", [&](std::ostream& o) { write_trajectories_csv(o, runs); });
  write_file(dir / "sign_events.csv", [&](std::ostream& o) { write_sign_events_csv(o, runs); });
  write_file(dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, runs); });
  write_file(dir / "summary.json", [&](std::ostream& o) { write_summary_json(o, result, config); });
  if (with_audit) write_file(dir / "audit.csv", [&](std::ostream& o) { write_audit_csv(o, result.audit); });
  for (const auto& [floor, counts] : merge_heatmaps(runs)) {
    // Image row 0 is the top of the plan (largest y).
    const Heatmap flipped = counts.colwise().reverse();
    write_file(dir / ("heatmap_" + floor + ".pgm"), [&](std::ostream& o) { write_pgm16(o, flipped); });
  }
}

}  // namespace wayfind
