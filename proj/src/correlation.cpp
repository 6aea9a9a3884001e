#include "cpi/correlation.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cpi/errors.hpp"
#include "cpi/kernels/kernels.hpp"
#include "cpi/parallel.hpp"

namespace cpi {

double phase_phi(Vec2 rho_o, Vec2 rho_s, Vec2 rho_a, Vec2 rho_b, const PhaseSpec& spec, double M) {
  return spec.beta * norm2(rho_s) / 2.0 - spec.gamma_a * dot(rho_s, rho_a) - spec.gamma_b * dot(rho_s + rho_b / M, rho_o);
}

namespace {

EvalBounds pair_bounds(Vec2 rho_a, Vec2 rho_b) {
  return {{std::abs(rho_a.x), std::abs(rho_a.y)}, {std::abs(rho_b.x), std::abs(rho_b.y)}};
}

bool on_boundary(const SampledGrid& g, std::size_t j) {
  const auto n = static_cast<std::size_t>(g.count());
  if (g.dim() == 1) return j == 0 || j + 1 == n;
  const std::size_t ix = j % n;
  const std::size_t iy = j / n;
  return ix == 0 || iy == 0 || ix + 1 == n || iy + 1 == n;
}

}  // namespace

TwoPhotonAmplitude amplitude_oracle(Vec2 rho_a, Vec2 rho_b, const ApertureMask& mask, const PumpProfile& pump,
                                    const OpticalSetup& setup, const QuadratureSpec& quad) {
  const AmplitudeEvaluator eval(mask, pump, setup, quad, EvalPath::oracle, pair_bounds(rho_a, rho_b));
  return {eval.amplitude(rho_a, rho_b), Provenance::oracle_quadrature};
}

TwoPhotonAmplitude amplitude_gaussian_fast(Vec2 rho_a, Vec2 rho_b, const ApertureMask& mask, const PumpProfile& pump,
                                           const OpticalSetup& setup, const QuadratureSpec& quad) {
  const AmplitudeEvaluator eval(mask, pump, setup, quad, EvalPath::fast, pair_bounds(rho_a, rho_b));
  return {eval.amplitude(rho_a, rho_b), Provenance::gaussian_fast};
}

EvalBounds grid_bounds(const SampledGrid& grid_a, const SampledGrid& grid_b) {
  EvalBounds b;
  for (int axis = 0; axis < grid_a.dim(); ++axis) b.rho_a[axis] = grid_a.max_abs(axis);
  for (int axis = 0; axis < grid_b.dim(); ++axis) b.rho_b[axis] = grid_b.max_abs(axis);
  return b;
}

CorrelationMap gamma_map(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                         const SampledGrid& grid_a, const SampledGrid& grid_b, EvalPath path,
                         const QuadratureSpec& quad) {
  if (grid_a.dim() != mask.dim() || grid_b.dim() != mask.dim())
    throw ValidationError("sensor grids and mask must share a dimension");
  const AmplitudeEvaluator eval(mask, pump, setup, quad, path, grid_bounds(grid_a, grid_b));
  CorrelationMap map{grid_a, grid_b, std::vector<double>(grid_a.size() * grid_b.size()), setup};
  const std::size_t nb = grid_b.size();
  parallel_for(grid_a.size(), [&](std::size_t i) {
    const Vec2 a = grid_a.point(i);
    for (std::size_t j = 0; j < nb; ++j) map.values[i * nb + j] = std::norm(eval.amplitude(a, grid_b.point(j)));
  });
  return map;
}

Image coherent_ghost_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup_at_focus,
                           const SampledGrid& grid_a, Vec2 rho_b, const QuadratureSpec& quad) {
  const OpticalSetup& setup = setup_at_focus;
  if (!is_at_focus(setup)) throw NotAtFocus("coherent ghost image formula needs z_b = z_bF");
  if (grid_a.dim() != mask.dim()) throw ValidationError("sensor grid and mask must share a dimension");
  const double z_bF = solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f);
  const double m = ghost_magnification(setup.z_a, setup.z_a_img, z_bF);
  const double M = source_magnification(setup);
  const double k = setup.wavenumber();
  const EvalPath path = pump.shape == PumpShape::gaussian ? EvalPath::fast : EvalPath::oracle;
  EvalBounds bounds = grid_bounds(grid_a, grid_a);
  bounds.rho_b = {std::abs(rho_b.x), std::abs(rho_b.y)};
  const AmplitudeEvaluator eval(mask, pump, setup, quad, path, bounds);

  const int dim = mask.dim();
  const double h = eval.fine_pitch();
  const double cell = dim == 1 ? h : h * h;
  const double kz = k / z_bF;
  std::vector<double> values(grid_a.size());
  parallel_for(grid_a.size(), [&](std::size_t i) {
    const Vec2 a = grid_a.point(i);
    kernels::CompensatedComplexSum acc;
    for (const auto& blk : eval.blocks()) {
      const auto& ix = eval.intervals(0)[static_cast<std::size_t>(blk.x_interval)];
      const int ny = dim == 1 ? 1 : eval.fine_count(eval.intervals(1)[static_cast<std::size_t>(blk.y_interval)]);
      kernels::CompensatedComplexSum block;
      for (int jy = 0; jy < ny; ++jy) {
        const double oy =
            dim == 1 ? 0.0 : eval.fine_coordinate(1, eval.intervals(1)[static_cast<std::size_t>(blk.y_interval)], jy);
        for (int jx = 0; jx < eval.fine_count(ix); ++jx) {
          const Vec2 o{eval.fine_coordinate(0, ix, jx), oy};
          const Complex h_tr = pump_fourier(kz * (o + a / m), pump, dim);
          block.add(h_tr * std::polar(1.0, -kz * dot(rho_b / M, o)));
        }
      }
      acc.add(blk.value * block.value() * cell);
    }
    values[i] = std::norm(acc.value());
  });
  Image img(grid_a, std::move(values), "coherent ghost image");
  return img;
}

std::string truncated_envelope_warning(double boundary, double peak) {
  std::ostringstream s;
  s << "TruncatedEnvelope: boundary correlation " << boundary << " exceeds " << kEnvelopeWarnRatio
    << " of the peak " << peak << "; widen grid_b";
  return s.str();
}

Image incoherent_ghost_image(const CorrelationMap& map) {
  const std::size_t na = map.grid_a.size();
  const std::size_t nb = map.grid_b.size();
  const double w = map.grid_b.cell_measure();
  std::vector<double> values(na);
  double peak = 0.0;
  double boundary = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    kernels::CompensatedSum acc;
    for (std::size_t j = 0; j < nb; ++j) {
      const double g = map.at(i, j);
      acc.add(g);
      peak = std::max(peak, g);
      if (on_boundary(map.grid_b, j)) boundary = std::max(boundary, g);
    }
    values[i] = acc.value() * w;
  }
  Image img(map.grid_a, std::move(values), "incoherent ghost image");
  if (peak > 0.0 && boundary > kEnvelopeWarnRatio * peak) img.warnings.push_back(truncated_envelope_warning(boundary, peak));
  return img;
}

Vec2 stationary_object_point(Vec2 rho_a, Vec2 rho_b, const OpticalSetup& setup) {
  const double z_bF = solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f);
  const double m = ghost_magnification(setup.z_a, setup.z_a_img, z_bF);
  const double M = source_magnification(setup);
  const double r = setup.z_b / z_bF;
  return -(r * (rho_a / m)) - (rho_b / M) * (1.0 - r);
}

Vec2 stationary_source_point(Vec2 rho_b, double M) {
  if (M == 0.0) throw ValidationError("source magnification must be nonzero");
  return -(rho_b / M);
}

double geometric_gamma(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup, Vec2 rho_a,
                       Vec2 rho_b) {
  const double M = source_magnification(setup);
  const Vec2 o = stationary_object_point(rho_a, rho_b, setup);
  return std::norm(mask.sample(o)) * std::norm(pump_amplitude(stationary_source_point(rho_b, M), pump));
}

void write_correlation_map(std::ostream& out, const CorrelationMap& map) {
  if (map.grid_a.dim() != 1 || map.grid_b.dim() != 1)
    throw ValidationError("only one-dimensional correlation maps can be archived");
  out.precision(17);
  const OpticalSetup& s = map.setup_snapshot;
  out << "cpi-correlation-map 1\n";
  out << "a " << map.grid_a.pitch() << ' ' << map.grid_a.count() << ' ' << map.grid_a.center().x << '\n';
  out << "b " << map.grid_b.pitch() << ' ' << map.grid_b.count() << ' ' << map.grid_b.center().x << '\n';
  out << "setup " << s.z_a << ' ' << s.z_a_img << ' ' << s.f << ' ' << s.z_b << ' ' << s.z_b_obj_lens << ' '
      << s.z_b_lens_sens << ' ' << s.F_b << ' ' << s.lambda << ' ' << s.sigma << '\n';
  const std::size_t nb = map.grid_b.size();
  for (std::size_t i = 0; i < map.grid_a.size(); ++i)
    for (std::size_t j = 0; j < nb; ++j) out << map.at(i, j) << (j + 1 < nb ? ' ' : '\n');
}

CorrelationMap read_correlation_map(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "cpi-correlation-map" || version != 1)
    throw ParseError(1, "", "not a correlation map archive");
  auto read_grid = [&](const char* name) {
    std::string key;
    double pitch = 0.0;
    int count = 0;
    double center = 0.0;
    if (!(in >> key >> pitch >> count >> center) || key != name) throw ParseError(0, name, "bad grid line");
    return SampledGrid::line(pitch, count, center);
  };
  const SampledGrid a = read_grid("a");
  const SampledGrid b = read_grid("b");
  std::string key;
  OpticalSetup s;
  if (!(in >> key >> s.z_a >> s.z_a_img >> s.f >> s.z_b >> s.z_b_obj_lens >> s.z_b_lens_sens >> s.F_b >> s.lambda >>
        s.sigma) ||
      key != "setup")
    throw ParseError(0, "setup", "bad setup line");
  CorrelationMap map{a, b, std::vector<double>(a.size() * b.size()), s};
  for (double& v : map.values) {
    if (!(in >> v) || !(v >= 0.0)) throw ParseError(0, "", "bad correlation value");
  }
  return map;
}

}  // namespace cpi
