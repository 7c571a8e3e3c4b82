#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "toolmorph/errors.hpp"
#include "toolmorph/geometry.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Shortest round-trip decimal form; deterministic for a given build, which is
// what the byte-identical-output contract needs.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// Plain text polygon: one "x y" pair per line, closed implicitly.
inline void write_polygon_text(const std::filesystem::path& path,
                               const std::vector<Vec2>& vertices) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& v : vertices) out << fmt_double(v.x()) << " " << fmt_double(v.y()) << "\n";
}

inline std::vector<Vec2> read_polygon_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<Vec2> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) throw IoError("malformed polygon line: '" + line + "'");
    out.emplace_back(x, y);
  }
  return out;
}

// Per-rollout signal dump: one row per (step, channel) with the value and one
// column per design-space tangent.
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 int tangent_width) {
  std::vector<std::string> header = {"step", "channel", "value"};
  for (int k = 0; k < tangent_width; ++k) header.push_back("d_theta_" + std::to_string(k));
  CsvWriter csv(path, header);
  for (const auto& [name, values] : traj.channels()) {
    for (int t = 0; t < traj.horizon(); ++t) {
      std::vector<std::string> cells = {std::to_string(t + 1), name,
                                        fmt_double(values[static_cast<std::size_t>(t)].value())};
      for (int k = 0; k < tangent_width; ++k)
        cells.push_back(fmt_double(values[static_cast<std::size_t>(t)].tangent(k)));
      csv.row(cells);
    }
  }
}

// Minimal standalone SVG of the polygon, y flipped so +y points up.
inline void write_polygon_svg(const std::filesystem::path& path,
                              const std::vector<Vec2>& vertices) {
  if (vertices.empty()) throw IoError("cannot export an empty polygon");
  double min_x = vertices[0].x(), max_x = min_x, min_y = vertices[0].y(), max_y = min_y;
  for (const auto& v : vertices) {
    min_x = std::min(min_x, v.x());
    max_x = std::max(max_x, v.x());
    min_y = std::min(min_y, v.y());
    max_y = std::max(max_y, v.y());
  }
  const double pad = 0.05 * std::max(max_x - min_x, max_y - min_y) + 1e-6;
  min_x -= pad; max_x += pad; min_y -= pad; max_y += pad;
  const double scale = 512.0 / std::max(max_x - min_x, max_y - min_y);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << fmt_double((max_x - min_x) * scale) << "\" height=\""
      << fmt_double((max_y - min_y) * scale) << "\">\n<path d=\"";
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    out << (i == 0 ? "M " : "L ") << fmt_double((vertices[i].x() - min_x) * scale) << " "
        << fmt_double((max_y - vertices[i].y()) * scale) << " ";
  }
  out << "Z\" fill=\"#8fb4d9\" stroke=\"#1f3a56\" stroke-width=\"2\"/>\n</svg>\n";
}

}  // namespace toolmorph
