#include "cpi/refocus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpi/errors.hpp"
#include "cpi/kernels/kernels.hpp"
#include "cpi/parallel.hpp"

namespace cpi {

RefocusMap RefocusMap::for_setup(const OpticalSetup& setup) {
  const double z_bF = solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f);
  if (std::abs(setup.z_b - z_bF) <= 1e-9 * z_bF) return {};
  const double m = ghost_magnification(setup.z_a, setup.z_a_img, z_bF);
  const double M = source_magnification(setup);
  const double r = z_bF / setup.z_b;
  return {r, m * (1.0 - r) / M};
}

Vec2 refocus_remap(Vec2 rho_a, Vec2 rho_b, const RefocusMap& map) {
  return map.scale * rho_a + map.shift_coeff * rho_b;
}

namespace {

bool on_edge(const SampledGrid& g, std::size_t j) {
  const auto n = static_cast<std::size_t>(g.count());
  if (g.dim() == 1) return j == 0 || j + 1 == n;
  const std::size_t ix = j % n;
  const std::size_t iy = j / n;
  return ix == 0 || iy == 0 || ix + 1 == n || iy + 1 == n;
}

double axis_reach(const SampledGrid& g, int axis) {
  return std::max(std::abs(g.coordinate(axis, 0)), std::abs(g.coordinate(axis, g.count() - 1)));
}

// Largest |remapped rho_a| per axis over all grid pairs.
EvalBounds remapped_bounds(const SampledGrid& grid_a, const SampledGrid& grid_b, const RefocusMap& map) {
  EvalBounds b = grid_bounds(grid_a, grid_b);
  if (map.is_identity()) return b;
  for (int axis = 0; axis < grid_a.dim(); ++axis) {
    double best = 0.0;
    for (int i : {0, grid_a.count() - 1})
      for (int j : {0, grid_b.count() - 1})
        best = std::max(best, std::abs(map.scale * grid_a.coordinate(axis, i) + map.shift_coeff * grid_b.coordinate(axis, j)));
    b.rho_a[axis] = std::max(best, axis_reach(grid_a, axis));
  }
  return b;
}

struct Envelope {
  double peak = 0.0;
  double boundary = 0.0;
};

void attach_warning(Image& img, const Envelope& env) {
  if (env.peak > 0.0 && env.boundary > kEnvelopeWarnRatio * env.peak)
    img.warnings.push_back(truncated_envelope_warning(env.boundary, env.peak));
}

// Pair-by-pair integration: every 1D case and the 2D oracle path.
Image integrate_pairs(const AmplitudeEvaluator& eval, const SampledGrid& grid_a, const SampledGrid& grid_b,
                      const RefocusMap& map) {
  const std::size_t na = grid_a.size();
  const std::size_t nb = grid_b.size();
  std::vector<double> values(na);
  std::vector<Envelope> env(na);
  parallel_for(na, [&](std::size_t i) {
    const Vec2 a = grid_a.point(i);
    kernels::CompensatedSum acc;
    Envelope e;
    for (std::size_t j = 0; j < nb; ++j) {
      const Vec2 b = grid_b.point(j);
      const double g = std::norm(eval.amplitude(map.is_identity() ? a : refocus_remap(a, b, map), b));
      acc.add(g);
      e.peak = std::max(e.peak, g);
      if (on_edge(grid_b, j)) e.boundary = std::max(e.boundary, g);
    }
    values[i] = acc.value() * grid_b.cell_measure();
    env[i] = e;
  });
  Envelope total;
  for (const Envelope& e : env) {
    total.peak = std::max(total.peak, e.peak);
    total.boundary = std::max(total.boundary, e.boundary);
  }
  Image img(grid_a, std::move(values));
  attach_warning(img, total);
  return img;
}

// Per-axis factors at remapped coordinates, split into re/im planes:
// plane[(i_a * intervals + interval) * n_b + j_b].
struct AxisTable {
  std::size_t intervals = 0;
  std::size_t nb = 0;
  std::vector<double> re;
  std::vector<double> im;

  const double* re_row(std::size_t ia, std::size_t iv) const { return re.data() + (ia * intervals + iv) * nb; }
  const double* im_row(std::size_t ia, std::size_t iv) const { return im.data() + (ia * intervals + iv) * nb; }
  Complex at(std::size_t ia, std::size_t iv, std::size_t jb) const {
    const std::size_t k = (ia * intervals + iv) * nb + jb;
    return {re[k], im[k]};
  }
};

AxisTable build_table(const AmplitudeEvaluator& eval, int axis, const SampledGrid& grid_a, const SampledGrid& grid_b,
                      const RefocusMap& map) {
  AxisTable t;
  const auto na = static_cast<std::size_t>(grid_a.count());
  t.intervals = eval.intervals(axis).size();
  t.nb = static_cast<std::size_t>(grid_b.count());
  t.re.resize(na * t.intervals * t.nb);
  t.im.resize(t.re.size());
  parallel_for(na, [&](std::size_t ia) {
    const double a = grid_a.coordinate(axis, static_cast<int>(ia));
    for (std::size_t iv = 0; iv < t.intervals; ++iv)
      for (std::size_t jb = 0; jb < t.nb; ++jb) {
        const double b = grid_b.coordinate(axis, static_cast<int>(jb));
        const double ra = map.is_identity() ? a : map.scale * a + map.shift_coeff * b;
        const Complex v = eval.axis_factor(axis, static_cast<int>(iv), ra, b);
        const std::size_t k = (ia * t.intervals + iv) * t.nb + jb;
        t.re[k] = v.real();
        t.im[k] = v.imag();
      }
  });
  return t;
}

// 2D closed-form path. The amplitude of a pair is sum_blocks v X(x) Y(y), so
// for a fixed rho_b column the inner sum over rows is a weighted combination
// of Y-table rows.
Image integrate_tables(const AmplitudeEvaluator& eval, const SampledGrid& grid_a, const SampledGrid& grid_b,
                       const RefocusMap& map) {
  const AxisTable tx = build_table(eval, 0, grid_a, grid_b, map);
  const AxisTable ty = build_table(eval, 1, grid_a, grid_b, map);
  const auto& blocks = eval.blocks();
  const std::size_t nblk = blocks.size();
  const auto na = static_cast<std::size_t>(grid_a.count());
  const auto nb = static_cast<std::size_t>(grid_b.count());

  std::vector<double> values(grid_a.size(), 0.0);
  parallel_for(grid_a.size(), [&](std::size_t p) {
    const std::size_t iax = p % na;
    const std::size_t iay = p / na;
    std::vector<Complex> coeffs(nblk);
    std::vector<const double*> re(nblk);
    std::vector<const double*> im(nblk);
    for (std::size_t r = 0; r < nblk; ++r) {
      re[r] = ty.re_row(iay, static_cast<std::size_t>(blocks[r].y_interval));
      im[r] = ty.im_row(iay, static_cast<std::size_t>(blocks[r].y_interval));
    }
    kernels::CompensatedSum acc;
    for (std::size_t jx = 0; jx < nb; ++jx) {
      for (std::size_t r = 0; r < nblk; ++r)
        coeffs[r] = blocks[r].value * tx.at(iax, static_cast<std::size_t>(blocks[r].x_interval), jx);
      acc.add(kernels::combo_power(coeffs, re, im, nb));
    }
    values[p] = acc.value() * grid_b.cell_measure();
  });

  // Envelope check on the central row and column of the rho_a grid.
  Envelope env;
  auto gamma = [&](std::size_t iax, std::size_t iay, std::size_t jx, std::size_t jy) {
    kernels::CompensatedComplexSum s;
    for (const auto& blk : blocks)
      s.add(blk.value * tx.at(iax, static_cast<std::size_t>(blk.x_interval), jx) *
            ty.at(iay, static_cast<std::size_t>(blk.y_interval), jy));
    return std::norm(s.value());
  };
  const std::size_t mid = na / 2;
  for (std::size_t t = 0; t < na; ++t)
    for (auto [iax, iay] : {std::pair{t, mid}, std::pair{mid, t}})
      for (std::size_t jy = 0; jy < nb; ++jy)
        for (std::size_t jx = 0; jx < nb; ++jx) {
          const double g = gamma(iax, iay, jx, jy);
          env.peak = std::max(env.peak, g);
          if (jx == 0 || jy == 0 || jx + 1 == nb || jy + 1 == nb) env.boundary = std::max(env.boundary, g);
        }
  Image img(grid_a, std::move(values));
  attach_warning(img, env);
  return img;
}

}  // namespace

Image integrate_correlation(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                            const SampledGrid& grid_a, const SampledGrid& grid_b, const RefocusMap& map,
                            EvalPath path, const QuadratureSpec& quad) {
  if (grid_a.dim() != mask.dim() || grid_b.dim() != mask.dim())
    throw ValidationError("sensor grids and mask must share a dimension");
  const AmplitudeEvaluator eval(mask, pump, setup, quad, path, remapped_bounds(grid_a, grid_b, map));
  if (mask.dim() == 2 && path == EvalPath::fast) return integrate_tables(eval, grid_a, grid_b, map);
  return integrate_pairs(eval, grid_a, grid_b, map);
}

Image refocused_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                      const SampledGrid& grid_a, const SampledGrid& grid_b, EvalPath path, const QuadratureSpec& quad) {
  Image img = integrate_correlation(mask, pump, setup, grid_a, grid_b, RefocusMap::for_setup(setup), path, quad);
  img.label = "refocused";
  return img;
}

Image unrefocused_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                        const SampledGrid& grid_a, const SampledGrid& grid_b, EvalPath path,
                        const QuadratureSpec& quad) {
  Image img = integrate_correlation(mask, pump, setup, grid_a, grid_b, RefocusMap{}, path, quad);
  img.label = is_at_focus(setup) ? "focused" : "misfocused";
  return img;
}

Image viewpoint_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                      const SampledGrid& grid_a, Vec2 rho_b, EvalPath path, const QuadratureSpec& quad) {
  if (grid_a.dim() != mask.dim()) throw ValidationError("sensor grid and mask must share a dimension");
  EvalBounds bounds = grid_bounds(grid_a, grid_a);
  bounds.rho_b = {std::abs(rho_b.x), std::abs(rho_b.y)};
  const AmplitudeEvaluator eval(mask, pump, setup, quad, path, bounds);
  std::vector<double> values(grid_a.size());
  parallel_for(grid_a.size(), [&](std::size_t i) { values[i] = std::norm(eval.amplitude(grid_a.point(i), rho_b)); });
  const Vec2 s = stationary_source_point(rho_b, eval.source_magnification());
  std::ostringstream label;
  label << "viewpoint source point (" << s.x;
  if (mask.dim() == 2) label << ", " << s.y;
  label << ") mm";
  return Image(grid_a, std::move(values), label.str());
}

Image refocus_tabulated(const CorrelationMap& map, const RefocusMap& remap) {
  if (map.grid_a.dim() != 1 || map.grid_b.dim() != 1)
    throw ValidationError("tabulated refocusing is implemented for one-dimensional maps");
  const SampledGrid& ga = map.grid_a;
  const std::size_t na = ga.size();
  const std::size_t nb = map.grid_b.size();
  auto column_at = [&](std::size_t j, double x) {
    const double u = (x - ga.coordinate(0, 0)) / ga.pitch();
    if (u < 0.0 || u > static_cast<double>(na - 1)) return 0.0;
    const auto i0 = std::min(static_cast<std::size_t>(u), na - 2);
    const double t = u - static_cast<double>(i0);
    return (1.0 - t) * map.at(i0, j) + t * map.at(i0 + 1, j);
  };
  std::vector<double> values(na);
  Envelope env;
  for (std::size_t i = 0; i < na; ++i) {
    const double a = ga.coordinate(0, static_cast<int>(i));
    kernels::CompensatedSum acc;
    for (std::size_t j = 0; j < nb; ++j) {
      const double b = map.grid_b.coordinate(0, static_cast<int>(j));
      const double g = remap.is_identity() ? map.at(i, j) : column_at(j, remap.scale * a + remap.shift_coeff * b);
      acc.add(g);
      env.peak = std::max(env.peak, map.at(i, j));
      if (j == 0 || j + 1 == nb) env.boundary = std::max(env.boundary, map.at(i, j));
    }
    values[i] = acc.value() * map.grid_b.cell_measure();
  }
  Image img(ga, std::move(values), "refocused (tabulated)");
  attach_warning(img, env);
  return img;
}

Image normalize(const Image& image, Normalization mode) {
  Image out = image;
  if (mode == Normalization::none) return out;
  const double ref = mode == Normalization::peak ? image.max() : image.center_value();
  if (!(ref > 0.0)) throw ZeroReference("normalization reference value is zero");
  for (double& v : out.values) v /= ref;
  out.normalization = mode;
  return out;
}

Image geometric_truth(const ApertureMask& mask, const OpticalSetup& setup, const SampledGrid& grid_a) {
  const double z_bF = solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f);
  const double m = ghost_magnification(setup.z_a, setup.z_a_img, z_bF);
  std::vector<double> values(grid_a.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::norm(mask.sample(-(grid_a.point(i) / m)));
  return Image(grid_a, std::move(values), "geometric ground truth");
}

double cross_correlation(const Image& a, const Image& b) {
  if (!(a.grid == b.grid)) throw ValidationError("cross-correlation needs images on the same grid");
  const Image na = normalize(a, Normalization::peak);
  const Image nb = normalize(b, Normalization::peak);
  const auto n = static_cast<double>(na.values.size());
  auto stats = [&](const std::vector<double>& v) {
    kernels::CompensatedSum s;
    for (double x : v) s.add(x);
    const double mean = s.value() / n;
    kernels::CompensatedSum q;
    for (double x : v) q.add((x - mean) * (x - mean));
    return std::pair{mean, std::sqrt(q.value() / n)};
  };
  const auto [ma, sa] = stats(na.values);
  const auto [mb, sb] = stats(nb.values);
  if (!(sa > 0.0) || !(sb > 0.0)) throw ZeroReference("cross-correlation of a constant image");
  kernels::CompensatedSum c;
  for (std::size_t i = 0; i < na.values.size(); ++i) c.add((na.values[i] - ma) * (nb.values[i] - mb));
  return c.value() / (n * sa * sb);
}

namespace {
void require_1d(const Image& image) {
  if (image.grid.dim() != 1) throw ValidationError("profile helpers need a one-dimensional image");
}
}  // namespace

double peak_position(const Image& image) {
  require_1d(image);
  const auto it = std::max_element(image.values.begin(), image.values.end());
  return image.grid.coordinate(0, static_cast<int>(it - image.values.begin()));
}

double fwhm(const Image& image) {
  require_1d(image);
  const auto& v = image.values;
  const double half = 0.5 * image.max();
  if (!(half > 0.0)) throw ZeroReference("profile is identically zero");
  const std::size_t n = v.size();
  std::size_t lo = 0;
  while (v[lo] < half) ++lo;
  std::size_t hi = n - 1;
  while (v[hi] < half) --hi;
  if (lo == 0 || hi == n - 1) throw Error("profile does not fall below half maximum inside the grid");
  const double h = image.grid.pitch();
  const double left = image.grid.coordinate(0, static_cast<int>(lo)) - h * (v[lo] - half) / (v[lo] - v[lo - 1]);
  const double right = image.grid.coordinate(0, static_cast<int>(hi)) + h * (v[hi] - half) / (v[hi] - v[hi + 1]);
  return right - left;
}

std::vector<double> lobe_centroids(const Image& image, double fraction) {
  require_1d(image);
  const double level = fraction * image.max();
  std::vector<double> out;
  const auto& v = image.values;
  std::size_t i = 0;
  while (i < v.size()) {
    if (v[i] <= level) {
      ++i;
      continue;
    }
    double w = 0.0;
    double wx = 0.0;
    for (; i < v.size() && v[i] > level; ++i) {
      w += v[i];
      wx += v[i] * image.grid.coordinate(0, static_cast<int>(i));
    }
    out.push_back(wx / w);
  }
  return out;
}

}  // namespace cpi
