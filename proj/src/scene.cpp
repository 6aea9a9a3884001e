#include "cpi/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cpi/errors.hpp"

namespace cpi {

namespace {

// Cell centers exactly on an edge count as outside.
bool strictly_inside(double v, double lo, double hi, double eps) { return v > lo + eps && v < hi - eps; }

void require_resolved(double feature, const SampledGrid& grid) {
  if (!(feature >= 2.0 * grid.pitch() * (1.0 - 1e-12)))
    throw UnderresolvedMask("feature of " + std::to_string(feature) + " mm needs at least two samples of pitch " +
                            std::to_string(grid.pitch()) + " mm");
}

void require_inside(double lo, double hi, const SampledGrid& grid, int axis) {
  const double half = 0.5 * grid.extent();
  const double c = grid.center()[axis];
  const double tol = 1e-9 * grid.pitch();
  if (lo < c - half - tol || hi > c + half + tol) throw GridTooSmall("object does not fit inside the mask grid");
}

// Shortest run of nonzero transmission along rows and columns, in mm.
double shortest_open_run(const SampledGrid& grid, const std::vector<Complex>& values) {
  const int n = grid.count();
  const int rows = grid.dim() == 1 ? 1 : n;
  int best = std::numeric_limits<int>::max();
  auto scan = [&](auto at) {
    for (int line = 0; line < rows; ++line) {
      int run = 0;
      for (int i = 0; i <= n; ++i) {
        const bool open = i < n && at(line, i) != Complex{};
        if (open) {
          ++run;
        } else if (run > 0) {
          best = std::min(best, run);
          run = 0;
        }
      }
    }
  };
  scan([&](int r, int c) { return values[static_cast<std::size_t>(r) * n * (grid.dim() == 2) + c]; });
  if (grid.dim() == 2) scan([&](int c, int r) { return values[static_cast<std::size_t>(r) * n + c]; });
  if (best == std::numeric_limits<int>::max()) return grid.extent();
  return best * grid.pitch();
}

}  // namespace

ApertureMask::ApertureMask(SampledGrid grid, std::vector<Complex> values, double smallest_feature)
    : grid_(grid), values_(std::move(values)), smallest_feature_(smallest_feature) {
  if (values_.size() != grid_.size()) throw ValidationError("mask values do not match the grid size");
  for (const Complex& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1.0 + 1e-12)
      throw ValidationError("mask transmission must be finite with modulus at most 1");
  }
  if (!(smallest_feature_ > 0.0) || smallest_feature_ > grid_.extent() * (1.0 + 1e-12))
    throw ValidationError("smallest feature must be positive and within the grid extent");
}

Complex ApertureMask::sample(Vec2 rho) const {
  const int n = grid_.count();
  const double half = 0.5 * grid_.extent();
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const double rel = rho[axis] - grid_.center()[axis];
    if (rel < -half || rel >= half) return {};
  }
  const int ix = grid_.nearest(0, rho.x);
  const int iy = grid_.dim() == 1 ? 0 : grid_.nearest(1, rho.y);
  return values_[static_cast<std::size_t>(iy) * n + ix];
}

double ApertureMask::open_area() const {
  double sum = 0.0;
  for (const Complex& v : values_) sum += std::norm(v);
  return sum * grid_.cell_measure();
}

bool ApertureMask::is_binary() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](Complex v) { return v == Complex{0.0} || v == Complex{1.0}; });
}

ApertureMask make_slit(double width, const SampledGrid& grid, double center) {
  require_resolved(width, grid);
  require_inside(center - 0.5 * width, center + 0.5 * width, grid, 0);
  const double eps = 1e-9 * grid.pitch();
  return make_mask(grid, width, [&](Vec2 p) {
    return strictly_inside(p.x, center - 0.5 * width, center + 0.5 * width, eps) ? 1.0 : 0.0;
  });
}

ApertureMask make_double_slit(double width, double center_to_center, const SampledGrid& grid) {
  require_resolved(width, grid);
  if (!(center_to_center > width)) throw OverlapError("double-slit apertures touch or overlap");
  const double c = 0.5 * center_to_center;
  require_inside(-c - 0.5 * width, c + 0.5 * width, grid, 0);
  const double eps = 1e-9 * grid.pitch();
  return make_mask(grid, width, [&](Vec2 p) {
    const bool open = strictly_inside(p.x, -c - 0.5 * width, -c + 0.5 * width, eps) ||
                      strictly_inside(p.x, c - 0.5 * width, c + 0.5 * width, eps);
    return open ? 1.0 : 0.0;
  });
}

ApertureMask make_letter_E(double stroke, const SampledGrid& grid) {
  if (grid.dim() != 2) throw ValidationError("letter E needs a two-dimensional grid");
  require_resolved(stroke, grid);
  const double d = stroke;
  const Vec2 c = grid.center();
  require_inside(c.x - 1.5 * d, c.x + 1.5 * d, grid, 0);
  require_inside(c.y - 2.5 * d, c.y + 2.5 * d, grid, 1);
  const double eps = 1e-9 * grid.pitch();
  return make_mask(grid, stroke, [&](Vec2 p) {
    const double x = p.x - c.x;
    const double y = p.y - c.y;
    const bool spine = strictly_inside(x, -1.5 * d, -0.5 * d, eps) && strictly_inside(y, -2.5 * d, 2.5 * d, eps);
    const bool in_width = strictly_inside(x, -1.5 * d, 1.5 * d, eps);
    const bool bar = in_width && (strictly_inside(y, 1.5 * d, 2.5 * d, eps) || strictly_inside(y, -0.5 * d, 0.5 * d, eps) ||
                                  strictly_inside(y, -2.5 * d, -1.5 * d, eps));
    return spine || bar ? 1.0 : 0.0;
  });
}

ApertureMask read_mask(std::istream& in) {
  int rows = 0;
  int cols = 0;
  double pitch = 0.0;
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "", "empty mask file");
  std::istringstream hs(header);
  if (!(hs >> rows >> cols >> pitch)) throw ParseError(1, "", "expected `rows cols pitch_mm`");
  std::string rest;
  if (hs >> rest) throw ParseError(1, "", "trailing tokens in header");
  if (rows < 1 || cols < 2 || !(pitch > 0.0)) throw ParseError(1, "", "invalid mask dimensions");
  if (rows != 1 && rows != cols) throw ParseError(1, "", "two-dimensional masks must be square");

  const SampledGrid grid = rows == 1 ? SampledGrid::line(pitch, cols) : SampledGrid::square(pitch, cols);
  std::vector<Complex> values(grid.size());
  for (int r = 0; r < rows; ++r) {
    const int iy = rows - 1 - r;
    for (int c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!(in >> v)) throw ParseError(0, "", "expected " + std::to_string(rows * cols) + " values");
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError(0, "", "transmission outside [0, 1]");
      values[static_cast<std::size_t>(iy) * cols * (rows > 1) + c] = v;
    }
  }
  std::string extra;
  if (in >> extra) throw ParseError(0, "", "unexpected trailing data in mask file");
  const double feature = shortest_open_run(grid, values);
  return ApertureMask(grid, std::move(values), feature);
}

ApertureMask load_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mask file " + path.string());
  return read_mask(in);
}

void write_mask(std::ostream& out, const ApertureMask& mask) {
  const SampledGrid& g = mask.grid();
  const int cols = g.count();
  const int rows = g.dim() == 1 ? 1 : cols;
  out.precision(17);
  out << rows << ' ' << cols << ' ' << g.pitch() << '\n';
  for (int r = 0; r < rows; ++r) {
    const int iy = rows - 1 - r;
    for (int c = 0; c < cols; ++c) {
      out << mask.at(c, iy).real() << (c + 1 < cols ? ' ' : '\n');
    }
  }
}

double PumpProfile::effective_diameter() const {
  return shape == PumpShape::gaussian ? 2.0 * std::sqrt(2.0) * sigma : 2.0 * sigma;
}

double PumpProfile::support_radius(double gaussian_sigmas) const {
  return shape == PumpShape::gaussian ? gaussian_sigmas * sigma : sigma;
}

Complex pump_amplitude(Vec2 rho, const PumpProfile& pump) {
  const double r2 = norm2(rho - pump.center);
  if (pump.shape == PumpShape::gaussian) return std::exp(-r2 / (2.0 * pump.sigma * pump.sigma));
  return r2 < pump.sigma * pump.sigma ? 1.0 : 0.0;
}

Complex pump_fourier(Vec2 kappa, const PumpProfile& pump, int dim) {
  const Complex shift = std::polar(1.0, -dot(kappa, pump.center));
  const double s = pump.sigma;
  if (pump.shape == PumpShape::gaussian) return std::exp(-0.5 * s * s * norm2(kappa)) * shift;
  const double kr = (dim == 1 ? std::abs(kappa.x) : norm(kappa)) * s;
  if (kr < 1e-8) return shift;
  if (dim == 1) return std::sin(kr) / kr * shift;
  return 2.0 * std::cyl_bessel_j(1.0, kr) / kr * shift;
}

}  // namespace cpi
