#pragma once

#include <cstddef>

#include "cpi/vec.hpp"

namespace cpi {

// Uniform sample grid, one- or two-dimensional, with the same pitch and
// count along each axis. Sample i along an axis sits at
// center + (i - (count - 1) / 2) * pitch.
class SampledGrid {
 public:
  SampledGrid(int dim, double pitch, int count, Vec2 center = {});

  static SampledGrid line(double pitch, int count, double center = 0.0) {
    return SampledGrid(1, pitch, count, Vec2{center, 0.0});
  }
  static SampledGrid square(double pitch, int count, Vec2 center = {}) {
    return SampledGrid(2, pitch, count, center);
  }

  int dim() const { return dim_; }
  double pitch() const { return pitch_; }
  int count() const { return count_; }
  Vec2 center() const { return center_; }

  // Total number of samples (count^dim).
  std::size_t size() const;
  // Physical width covered by the cells along one axis.
  double extent() const { return pitch_ * count_; }
  // Integration weight of one sample, pitch^dim.
  double cell_measure() const { return dim_ == 1 ? pitch_ : pitch_ * pitch_; }

  double coordinate(int axis, int i) const {
    return center_[axis] + (i - 0.5 * (count_ - 1)) * pitch_;
  }
  // Flat index layout is row-major: index = iy * count + ix.
  Vec2 point(std::size_t index) const;
  // Index of the sample nearest to a coordinate along an axis, clamped.
  int nearest(int axis, double coord) const;

  // Largest |coordinate| reached along an axis.
  double max_abs(int axis) const;

  friend bool operator==(const SampledGrid&, const SampledGrid&) = default;

 private:
  int dim_;
  double pitch_;
  int count_;
  Vec2 center_;
};

}  // namespace cpi
