#include "cpi/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "cpi/errors.hpp"
#include "cpi/kernels/kernels.hpp"

namespace cpi {

namespace {

constexpr Complex kI{0.0, 1.0};

// Index of an interval in `list`, appending it when new.
int intern(std::vector<AmplitudeEvaluator::Interval>& list, std::map<std::pair<int, int>, int>& index, int begin,
           int end) {
  auto [it, inserted] = index.try_emplace({begin, end}, static_cast<int>(list.size()));
  if (inserted) list.push_back({begin, end});
  return it->second;
}

}  // namespace

PhaseSpec make_phase_spec(const OpticalSetup& setup) {
  const double z = zeta(setup.z_a, setup.z_a_img, setup.f);
  if (std::isinf(z)) throw InfiniteZeta("correlation phase undefined for collimated two-photon imaging");
  PhaseSpec spec;
  spec.beta = 1.0 / setup.z_b + (1.0 / setup.z_a) * (1.0 - z / setup.z_a);
  spec.gamma_a = z / (setup.z_a * setup.z_a_img);
  spec.gamma_b = 1.0 / setup.z_b;
  return spec;
}

AmplitudeEvaluator::AmplitudeEvaluator(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                                       const QuadratureSpec& quad, EvalPath path, const EvalBounds& bounds)
    : mask_(mask), pump_(pump), setup_(setup), quad_(quad), path_(path) {
  setup_.validate();
  if (!(pump_.sigma > 0.0)) throw ValidationError("pump width must be positive");
  if (path_ == EvalPath::fast && pump_.shape != PumpShape::gaussian)
    throw NonGaussianPump("closed-form source integral needs a Gaussian pump");
  if (!(quad_.target_phase_step > 0.0 && quad_.target_phase_step < kPi))
    throw ValidationError("target phase step must lie in (0, pi)");

  phase_ = make_phase_spec(setup_);
  k_ = setup_.wavenumber();
  M_ = cpi::source_magnification(setup_);
  const double s2 = pump_.sigma * pump_.sigma;
  q_ = Complex(1.0 / (2.0 * s2), -0.5 * k_ * phase_.beta);

  decompose();

  // Object-plane oversampling: resolve the phase within the target step and
  // the Gaussian envelope of the integrand with four samples per width.
  const double cell = mask_.grid().pitch();
  double slope = 0.0;
  for (int axis = 0; axis < dim(); ++axis) {
    for (double a : {-bounds.rho_a[axis], bounds.rho_a[axis]})
      for (double b : {-bounds.rho_b[axis], bounds.rho_b[axis]}) slope = std::max(slope, object_phase_slope(axis, a, b));
  }
  if (quad_.object_oversample > 0) {
    oversample_ = quad_.object_oversample;
    const double step = slope * cell / oversample_;
    if (step >= kPi) throw UndersampledQuadrature("object plane (rho_o)", step);
  } else {
    const double p2_re = (-(k_ * k_) * phase_.gamma_b * phase_.gamma_b / (4.0 * q_)).real();
    double need = slope * cell / quad_.target_phase_step;
    if (p2_re < 0.0) {
      const double width = 1.0 / std::sqrt(-2.0 * p2_re);
      need = std::max(need, 4.0 * cell / width);
    }
    oversample_ = std::max(1, static_cast<int>(std::ceil(need - 1e-9)));
  }

  if (path_ == EvalPath::oracle) {
    const double radius = pump_.support_radius(quad_.source_half_width);
    double s_slope = 0.0;
    for (int axis = 0; axis < dim(); ++axis)
      for (double a : {-bounds.rho_a[axis], bounds.rho_a[axis]}) s_slope = std::max(s_slope, source_phase_slope(axis, a));
    double pitch = quad_.source_pitch;
    if (pitch > 0.0) {
      if (s_slope * pitch >= kPi) throw UndersampledQuadrature("source plane (rho_s)", s_slope * pitch);
    } else {
      pitch = pump_.sigma / 8.0;
      if (s_slope > 0.0) pitch = std::min(pitch, quad_.target_phase_step / s_slope);
    }
    source_count_ = std::max(2, static_cast<int>(std::ceil(2.0 * radius / pitch)));
    source_pitch_ = 2.0 * radius / source_count_;
    for (int axis = 0; axis < dim(); ++axis)
      source_origin_[axis] = pump_.center[axis] - radius + 0.5 * source_pitch_;

    const auto n = static_cast<std::size_t>(source_count_);
    const double measure = dim() == 1 ? source_pitch_ : source_pitch_ * source_pitch_;
    source_weights_.assign(dim() == 1 ? n : n * n, Complex{});
    for (std::size_t iy = 0; iy < (dim() == 1 ? 1 : n); ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) {
        Vec2 s{source_origin_[0] + ix * source_pitch_, 0.0};
        if (dim() == 2) s.y = source_origin_[1] + iy * source_pitch_;
        source_weights_[iy * n + ix] = pump_amplitude(s, pump_) * measure;
      }
    }
  }
}

void AmplitudeEvaluator::decompose() {
  const SampledGrid& g = mask_.grid();
  const int n = g.count();
  std::map<std::pair<int, int>, int> index[2];
  const double half = 0.5 * g.pitch();
  bool any = false;
  auto note_open = [&](int axis, int begin, int end) {
    const double lo = g.coordinate(axis, begin) - half;
    const double hi = g.coordinate(axis, end - 1) + half;
    if (!any) {
      open_lo_[axis] = lo;
      open_hi_[axis] = hi;
    } else {
      open_lo_[axis] = std::min(open_lo_[axis], lo);
      open_hi_[axis] = std::max(open_hi_[axis], hi);
    }
  };

  // Runs of equal nonzero transmission along one row.
  auto row_runs = [&](int iy) {
    std::vector<std::tuple<int, int, Complex>> runs;
    int x = 0;
    while (x < n) {
      const Complex v = mask_.at(x, iy);
      int e = x + 1;
      while (e < n && mask_.at(e, iy) == v) ++e;
      if (v != Complex{}) runs.emplace_back(x, e, v);
      x = e;
    }
    return runs;
  };

  if (dim() == 1) {
    for (auto [b, e, v] : row_runs(0)) {
      note_open(0, b, e);
      any = true;
      blocks_.push_back({intern(intervals_[0], index[0], b, e), 0, v});
    }
    return;
  }

  // Rectangles: identical runs on consecutive rows are merged.
  struct Open {
    int x0, x1;
    Complex v;
    int y0;
  };
  std::vector<Open> active;
  auto close = [&](const Open& o, int y_end) {
    note_open(0, o.x0, o.x1);
    note_open(1, o.y0, y_end);
    any = true;
    blocks_.push_back({intern(intervals_[0], index[0], o.x0, o.x1), intern(intervals_[1], index[1], o.y0, y_end), o.v});
  };
  for (int iy = 0; iy <= n; ++iy) {
    const auto runs = iy < n ? row_runs(iy) : std::vector<std::tuple<int, int, Complex>>{};
    std::vector<Open> next;
    std::vector<bool> continued(active.size(), false);
    for (auto [b, e, v] : runs) {
      bool found = false;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (!continued[a] && active[a].x0 == b && active[a].x1 == e && active[a].v == v) {
          continued[a] = true;
          next.push_back(active[a]);
          found = true;
          break;
        }
      }
      if (!found) next.push_back({b, e, v, iy});
    }
    for (std::size_t a = 0; a < active.size(); ++a)
      if (!continued[a]) close(active[a], iy);
    active = std::move(next);
  }
}

double AmplitudeEvaluator::fine_coordinate(int axis, const Interval& iv, int j) const {
  const SampledGrid& g = mask_.grid();
  const double h = fine_pitch();
  return g.coordinate(axis, iv.begin) - 0.5 * g.pitch() + (j + 0.5) * h;
}

AmplitudeEvaluator::AxisPoly AmplitudeEvaluator::axis_poly(int axis, double rho_a, double rho_b) const {
  const double s2 = pump_.sigma * pump_.sigma;
  const double c = pump_.center[axis];
  const Complex b0 = Complex(c / s2, -k_ * phase_.gamma_a * rho_a);
  const Complex b1 = Complex(0.0, -k_ * phase_.gamma_b);
  AxisPoly p;
  p.p0 = 0.5 * std::log(kPi / q_) - c * c / (2.0 * s2) + b0 * b0 / (4.0 * q_);
  p.p1 = b0 * b1 / (2.0 * q_) - kI * (k_ * rho_b * phase_.gamma_b / M_);
  p.p2 = b1 * b1 / (4.0 * q_);
  return p;
}

double AmplitudeEvaluator::object_phase_slope(int axis, double rho_a, double rho_b) const {
  if (blocks_.empty()) return 0.0;
  if (pump_.shape != PumpShape::gaussian) {
    const double reach = std::abs(pump_.center[axis]) + pump_.sigma;
    return k_ * phase_.gamma_b * (std::abs(rho_b) / M_ + reach);
  }
  const AxisPoly p = axis_poly(axis, rho_a, rho_b);
  const double s_lo = std::abs((2.0 * p.p2 * open_lo_[axis] + p.p1).imag());
  const double s_hi = std::abs((2.0 * p.p2 * open_hi_[axis] + p.p1).imag());
  return std::max(s_lo, s_hi);
}

double AmplitudeEvaluator::source_phase_slope(int axis, double rho_a) const {
  if (blocks_.empty()) return 0.0;
  const double radius = pump_.support_radius(quad_.source_half_width);
  double best = 0.0;
  for (double s : {pump_.center[axis] - radius, pump_.center[axis] + radius})
    for (double o : {open_lo_[axis], open_hi_[axis]}) {
      const double gamma = phase_.gamma_a * rho_a + phase_.gamma_b * o;
      best = std::max(best, k_ * std::abs(phase_.beta * s - gamma));
    }
  return best;
}

void AmplitudeEvaluator::check_sampling(Vec2 rho_a, Vec2 rho_b) const {
  for (int axis = 0; axis < dim(); ++axis) {
    const double step = object_phase_slope(axis, rho_a[axis], rho_b[axis]) * fine_pitch();
    if (step >= kPi) throw UndersampledQuadrature("object plane (rho_o)", step);
    if (path_ == EvalPath::oracle) {
      const double s_step = source_phase_slope(axis, rho_a[axis]) * source_pitch_;
      if (s_step >= kPi) throw UndersampledQuadrature("source plane (rho_s)", s_step);
    }
  }
}

Complex AmplitudeEvaluator::axis_factor(int axis, int interval, double rho_a, double rho_b) const {
  if (path_ != EvalPath::fast) throw Error("axis_factor is only defined for the closed-form path");
  const double step = object_phase_slope(axis, rho_a, rho_b) * fine_pitch();
  if (step >= kPi) throw UndersampledQuadrature("object plane (rho_o)", step);

  const Interval& iv = intervals_[axis][static_cast<std::size_t>(interval)];
  const SampledGrid& g = mask_.grid();
  const int count = fine_count(iv);
  const double h = fine_pitch();
  const double mid = 0.5 * (g.coordinate(axis, iv.begin) + g.coordinate(axis, iv.end - 1));
  const AxisPoly p = axis_poly(axis, rho_a, rho_b);
  kernels::ChirpPoly poly;
  poly.c0 = p.p0 + mid * (p.p1 + mid * p.p2);
  poly.c1 = (p.p1 + 2.0 * mid * p.p2) * h;
  poly.c2 = p.p2 * (h * h);
  poly.t0 = -0.5 * (count - 1);
  return h * kernels::chirp_sum(poly, static_cast<std::size_t>(count));
}

Complex AmplitudeEvaluator::oracle_source_integral(Vec2 gamma) const {
  const auto n = static_cast<std::size_t>(source_count_);
  const double h = source_pitch_;
  auto axis_poly_s = [&](int axis) {
    const double mid = source_origin_[axis] + 0.5 * (source_count_ - 1) * h;
    const double beta = phase_.beta;
    kernels::ChirpPoly p;
    p.c0 = kI * (k_ * (0.5 * beta * mid * mid - gamma[axis] * mid));
    p.c1 = kI * (k_ * (beta * mid - gamma[axis]) * h);
    p.c2 = kI * (0.5 * k_ * beta * h * h);
    p.t0 = -0.5 * (source_count_ - 1);
    return p;
  };
  const kernels::ChirpPoly px = axis_poly_s(0);
  if (dim() == 1) return kernels::chirp_sum(px, n, source_weights_);

  kernels::CompensatedComplexSum acc;
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double sy = source_origin_[1] + iy * h;
    const Complex row = kernels::chirp_sum(px, n, std::span<const Complex>(source_weights_.data() + iy * n, n));
    acc.add(row * std::polar(1.0, k_ * (0.5 * phase_.beta * sy * sy - gamma.y * sy)));
  }
  return acc.value();
}

Complex AmplitudeEvaluator::oracle_amplitude(Vec2 rho_a, Vec2 rho_b) const {
  const double h = fine_pitch();
  const double cell = dim() == 1 ? h : h * h;
  const double tilt = k_ * phase_.gamma_b / M_;
  kernels::CompensatedComplexSum acc;
  for (const Block& blk : blocks_) {
    const Interval& ix = intervals_[0][static_cast<std::size_t>(blk.x_interval)];
    if (dim() == 1) {
      kernels::CompensatedComplexSum run;
      for (int j = 0; j < fine_count(ix); ++j) {
        const double o = fine_coordinate(0, ix, j);
        const Vec2 gamma{phase_.gamma_a * rho_a.x + phase_.gamma_b * o, 0.0};
        run.add(oracle_source_integral(gamma) * std::polar(1.0, -tilt * rho_b.x * o));
      }
      acc.add(blk.value * run.value() * cell);
      continue;
    }
    const Interval& iy = intervals_[1][static_cast<std::size_t>(blk.y_interval)];
    kernels::CompensatedComplexSum rect;
    for (int jy = 0; jy < fine_count(iy); ++jy) {
      const double oy = fine_coordinate(1, iy, jy);
      for (int jx = 0; jx < fine_count(ix); ++jx) {
        const double ox = fine_coordinate(0, ix, jx);
        const Vec2 gamma{phase_.gamma_a * rho_a.x + phase_.gamma_b * ox, phase_.gamma_a * rho_a.y + phase_.gamma_b * oy};
        rect.add(oracle_source_integral(gamma) * std::polar(1.0, -tilt * (rho_b.x * ox + rho_b.y * oy)));
      }
    }
    acc.add(blk.value * rect.value() * cell);
  }
  return acc.value();
}

Complex AmplitudeEvaluator::amplitude(Vec2 rho_a, Vec2 rho_b) const {
  check_sampling(rho_a, rho_b);
  if (path_ == EvalPath::oracle) return oracle_amplitude(rho_a, rho_b);

  if (dim() == 1) {
    kernels::CompensatedComplexSum acc;
    for (const Block& blk : blocks_) acc.add(blk.value * axis_factor(0, blk.x_interval, rho_a.x, rho_b.x));
    return acc.value();
  }
  std::vector<Complex> fx(intervals_[0].size());
  std::vector<Complex> fy(intervals_[1].size());
  for (std::size_t i = 0; i < fx.size(); ++i) fx[i] = axis_factor(0, static_cast<int>(i), rho_a.x, rho_b.x);
  for (std::size_t i = 0; i < fy.size(); ++i) fy[i] = axis_factor(1, static_cast<int>(i), rho_a.y, rho_b.y);
  kernels::CompensatedComplexSum acc;
  for (const Block& blk : blocks_)
    acc.add(blk.value * fx[static_cast<std::size_t>(blk.x_interval)] * fy[static_cast<std::size_t>(blk.y_interval)]);
  return acc.value();
}

}  // namespace cpi
