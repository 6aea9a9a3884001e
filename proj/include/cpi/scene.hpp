#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cpi/grid.hpp"
#include "cpi/vec.hpp"

namespace cpi {

// Sampled complex transmission A(rho_o) on the object plane. Each sample is the
// constant transmission of its grid cell.
class ApertureMask {
 public:
  ApertureMask(SampledGrid grid, std::vector<Complex> values, double smallest_feature);

  const SampledGrid& grid() const { return grid_; }
  const std::vector<Complex>& values() const { return values_; }
  double smallest_feature() const { return smallest_feature_; }
  int dim() const { return grid_.dim(); }

  Complex at(int ix, int iy = 0) const {
    return values_[static_cast<std::size_t>(iy) * (grid_.dim() == 1 ? 0 : grid_.count()) + ix];
  }
  // Transmission at a physical point (nearest cell; zero outside the grid).
  Complex sample(Vec2 rho) const;

  // Sum of |A|^2 times the cell measure.
  double open_area() const;
  bool is_binary() const;

  friend bool operator==(const ApertureMask&, const ApertureMask&) = default;

 private:
  SampledGrid grid_;
  std::vector<Complex> values_;
  double smallest_feature_;
};

ApertureMask make_slit(double width, const SampledGrid& grid, double center = 0.0);
ApertureMask make_double_slit(double width, double center_to_center, const SampledGrid& grid);
// Three horizontal bars joined by a vertical bar on the left; bar thickness
// `stroke`, glyph 5 strokes tall and 3 strokes wide, centered on the grid.
ApertureMask make_letter_E(double stroke, const SampledGrid& grid);
// Real transmission sampled from a function of position (custom objects).
template <class Fn>
ApertureMask make_mask(const SampledGrid& grid, double smallest_feature, Fn&& fn) {
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid.point(i));
  return ApertureMask(grid, std::move(values), smallest_feature);
}

// Plain-text grid: first line `rows cols pitch_mm`, then rows*cols transmission
// values in [0, 1], row-major with the first row at the largest y. A single
// row describes a one-dimensional mask; otherwise rows must equal cols.
ApertureMask read_mask(std::istream& in);
ApertureMask load_mask_file(const std::filesystem::path& path);
void write_mask(std::ostream& out, const ApertureMask& mask);

enum class PumpShape { gaussian, top_hat };

// Transverse pump amplitude. Gaussian: exp(-|rho - center|^2 / (2 sigma^2)).
// Top hat: unit amplitude inside radius `sigma`.
struct PumpProfile {
  PumpShape shape = PumpShape::gaussian;
  double sigma = 0.0;
  Vec2 center{};

  static PumpProfile gaussian(double sigma, Vec2 center = {}) {
    return {PumpShape::gaussian, sigma, center};
  }
  static PumpProfile top_hat(double radius, Vec2 center = {}) {
    return {PumpShape::top_hat, radius, center};
  }

  // D'_s; 2*sqrt(2)*sigma for the Gaussian, the disk diameter for the top hat.
  double effective_diameter() const;
  // Radius beyond which the amplitude is negligible for quadrature purposes.
  double support_radius(double gaussian_sigmas) const;
};

Complex pump_amplitude(Vec2 rho, const PumpProfile& pump);
// Fourier transform h_tr(kappa), normalized so that h_tr(0) = 1 for a
// centered pump. `dim` selects the one- or two-dimensional transform.
Complex pump_fourier(Vec2 kappa, const PumpProfile& pump, int dim = 2);

}  // namespace cpi
