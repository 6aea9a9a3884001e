#include "cpi/grid.hpp"

#include <algorithm>
#include <cmath>

#include "cpi/errors.hpp"

namespace cpi {

SampledGrid::SampledGrid(int dim, double pitch, int count, Vec2 center)
    : dim_(dim), pitch_(pitch), count_(count), center_(center) {
  if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw ValidationError("grid pitch must be positive");
  if (count < 2) throw ValidationError("grid needs at least 2 samples per axis");
  if (dim == 1) center_.y = 0.0;
}

std::size_t SampledGrid::size() const {
  const auto n = static_cast<std::size_t>(count_);
  return dim_ == 1 ? n : n * n;
}

Vec2 SampledGrid::point(std::size_t index) const {
  const auto n = static_cast<std::size_t>(count_);
  if (dim_ == 1) return {coordinate(0, static_cast<int>(index)), 0.0};
  return {coordinate(0, static_cast<int>(index % n)), coordinate(1, static_cast<int>(index / n))};
}

int SampledGrid::nearest(int axis, double coord) const {
  const double f = (coord - center_[axis]) / pitch_ + 0.5 * (count_ - 1);
  const long i = std::lround(f);
  return static_cast<int>(std::clamp<long>(i, 0, count_ - 1));
}

double SampledGrid::max_abs(int axis) const {
  return std::max(std::abs(coordinate(axis, 0)), std::abs(coordinate(axis, count_ - 1)));
}

}  // namespace cpi
