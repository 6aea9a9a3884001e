#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cpi/image.hpp"

namespace cpi {

// Binary 16-bit graymap (P5, maxval 65535, big-endian samples), value
// round(65535 * v). Rows run from the largest y down; a 1D image is one row.
// Values must already lie in [0, 1].
std::string encode_pgm(const Image& image);

// Writes `path` and a sidecar with the same stem and a .txt extension holding
// the grid, normalization, label, warnings and scenario hash.
void write_image(const Image& image, const std::filesystem::path& path, const std::string& scenario_hash);

// Header `rho_a_mm,intensity`, one row per sample, 9 significant digits.
std::string encode_profile(const Image& image);
void write_profile(const Image& image, const std::filesystem::path& path);
std::vector<std::pair<double, double>> read_profile(const std::filesystem::path& path);

}  // namespace cpi
