#pragma once

#include <vector>

#include "cpi/geometry.hpp"
#include "cpi/scene.hpp"
#include "cpi/vec.hpp"

namespace cpi {

enum class EvalPath { oracle, fast };

struct QuadratureSpec {
  // Fine object-plane samples per mask cell and axis; 0 picks the smallest
  // count meeting `target_phase_step`.
  int object_oversample = 0;
  // Source-plane pitch of the oracle path in mm; 0 = min(sigma/8, phase limit).
  double source_pitch = 0.0;
  // Half-width of the oracle source window in Gaussian sigmas.
  double source_half_width = 8.0;
  double target_phase_step = kPi / 4.0;
};

// Largest |coordinate| per axis that the evaluator will be asked about.
struct EvalBounds {
  Vec2 rho_a{};
  Vec2 rho_b{};
};

// Coefficients of the correlation phase: beta |rho_s|^2/2 - gamma_a rho_s.rho_a
// - gamma_b (rho_s + rho_b/M).rho_o.
struct PhaseSpec {
  double beta = 0.0;
  double gamma_a = 0.0;
  double gamma_b = 0.0;
};

PhaseSpec make_phase_spec(const OpticalSetup& setup);

// Two-photon amplitude
//   int d rho_o A(rho_o) int d rho_s F(rho_s) exp(i k phi)
// evaluated either by nested direct quadrature (oracle) or with the source
// integral done in closed form for a Gaussian pump (fast). The object
// integral uses `oversample` midpoint samples per mask cell; both paths share
// it. Binary and piecewise-constant masks are decomposed into runs (1D) or
// rectangles (2D) so that the fast path factorizes per axis.
class AmplitudeEvaluator {
 public:
  struct Interval {
    int begin = 0;  // first mask cell
    int end = 0;    // one past the last mask cell
  };
  struct Block {
    int x_interval = 0;
    int y_interval = 0;  // unused in 1D
    Complex value{};
  };

  AmplitudeEvaluator(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                     const QuadratureSpec& quad, EvalPath path, const EvalBounds& bounds);

  Complex amplitude(Vec2 rho_a, Vec2 rho_b) const;

  // Fast path only: integral along one axis over the fine samples of an
  // interval, source integral in closed form.
  Complex axis_factor(int axis, int interval, double rho_a, double rho_b) const;

  int dim() const { return mask_.dim(); }
  EvalPath path() const { return path_; }
  int oversample() const { return oversample_; }
  double fine_pitch() const { return mask_.grid().pitch() / oversample_; }
  int source_count() const { return source_count_; }
  double source_pitch() const { return source_pitch_; }
  const std::vector<Interval>& intervals(int axis) const { return intervals_[axis]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const ApertureMask& mask() const { return mask_; }
  const OpticalSetup& setup() const { return setup_; }
  const PhaseSpec& phase() const { return phase_; }
  double source_magnification() const { return M_; }

  // Fine sample coordinate j of an interval along an axis.
  double fine_coordinate(int axis, const Interval& iv, int j) const;
  int fine_count(const Interval& iv) const { return (iv.end - iv.begin) * oversample_; }

 private:
  struct AxisPoly {
    Complex p0, p1, p2;  // log of the per-axis integrand: p0 + p1 o + p2 o^2
  };

  AxisPoly axis_poly(int axis, double rho_a, double rho_b) const;
  // Largest |d phase / d rho_o| of the object integrand along an axis.
  double object_phase_slope(int axis, double rho_a, double rho_b) const;
  double source_phase_slope(int axis, double rho_a) const;
  void check_sampling(Vec2 rho_a, Vec2 rho_b) const;
  void decompose();
  Complex oracle_amplitude(Vec2 rho_a, Vec2 rho_b) const;
  Complex oracle_source_integral(Vec2 gamma) const;

  ApertureMask mask_;
  PumpProfile pump_;
  OpticalSetup setup_;
  QuadratureSpec quad_;
  EvalPath path_;
  PhaseSpec phase_;
  double k_ = 0.0;
  double M_ = 0.0;
  Complex q_{};  // 1/(2 sigma^2) - i k beta / 2

  int oversample_ = 1;
  // Physical span of the open part of the mask, per axis.
  double open_lo_[2] = {0.0, 0.0};
  double open_hi_[2] = {0.0, 0.0};
  std::vector<Interval> intervals_[2];
  std::vector<Block> blocks_;

  // Oracle source grid.
  int source_count_ = 0;
  double source_pitch_ = 0.0;
  double source_origin_[2] = {0.0, 0.0};  // first sample per axis
  std::vector<Complex> source_weights_;   // F * cell measure, row-major
};

}  // namespace cpi
