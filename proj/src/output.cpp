#include "cpi/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpi/errors.hpp"

namespace cpi {

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

std::string encode_pgm(const Image& image) {
  const int w = image.grid.count();
  const int h = image.grid.dim() == 1 ? 1 : w;
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n65535\n";
  out.reserve(out.size() + 2 * image.values.size());
  for (int row = h - 1; row >= 0; --row) {
    for (int x = 0; x < w; ++x) {
      const double v = image.values[static_cast<std::size_t>(row) * w + x];
      if (v > 1.0 + 1e-12) throw ValidationError("image must be normalized before encoding");
      const auto s = static_cast<unsigned>(std::lround(65535.0 * std::min(v, 1.0)));
      out.push_back(static_cast<char>(s >> 8));
      out.push_back(static_cast<char>(s & 0xff));
    }
  }
  return out;
}

void write_image(const Image& image, const std::filesystem::path& path, const std::string& scenario_hash) {
  write_file(path, encode_pgm(image));
  std::ostringstream side;
  side.precision(12);
  side << "label: " << image.label << '\n';
  side << "dim: " << image.grid.dim() << '\n';
  side << "pitch_mm: " << image.grid.pitch() << '\n';
  side << "count: " << image.grid.count() << '\n';
  side << "extent_mm: " << image.grid.extent() << '\n';
  side << "center_mm: " << image.grid.center().x << ' ' << image.grid.center().y << '\n';
  side << "normalization: " << to_string(image.normalization) << '\n';
  side << "scenario_hash: " << scenario_hash << '\n';
  for (const auto& w : image.warnings) side << "warning: " << w << '\n';
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".txt");
  write_file(sidecar, side.str());
}

std::string encode_profile(const Image& image) {
  if (image.grid.dim() != 1) throw ValidationError("profiles are one-dimensional");
  std::string out = "rho_a_mm,intensity\n";
  char line[64];
  for (int i = 0; i < image.grid.count(); ++i) {
    std::snprintf(line, sizeof line, "%.9g,%.9g\n", image.grid.coordinate(0, i), image.values[static_cast<std::size_t>(i)]);
    out += line;
  }
  return out;
}

void write_profile(const Image& image, const std::filesystem::path& path) { write_file(path, encode_profile(image)); }

std::vector<std::pair<double, double>> read_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "rho_a_mm,intensity") throw ParseError(1, "", "missing profile header");
  std::vector<std::pair<double, double>> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(n, "", "expected two comma-separated values");
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

}  // namespace cpi
