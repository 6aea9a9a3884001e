#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "cpi/geometry.hpp"
#include "cpi/scene.hpp"

namespace fixture {

// Bench with the object at 3 mm from the source (ghost focus at 10 mm).
inline cpi::OpticalSetup bench(double z_b = 3.0) {
  cpi::OpticalSetup s;
  s.z_a = 10.0;
  s.z_a_img = 30.0;
  s.f = 12.0;
  s.z_b = 3.0;
  s.z_b_obj_lens = 42.0;
  s.z_b_lens_sens = 36.0;
  s.F_b = 20.0;
  s.lambda = 1e-3;
  s.sigma = 0.6;
  return z_b == 3.0 ? s : s.with_object_distance(z_b);
}

inline cpi::OpticalSetup focused_bench() { return bench(10.0); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace fixture
