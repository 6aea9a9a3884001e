#pragma once

#include <string>
#include <vector>

#include "cpi/grid.hpp"

namespace cpi {

enum class Normalization { none, peak, center };

std::string to_string(Normalization n);

// Nonnegative intensity sampled on the rho_a grid, row-major in 2D.
struct Image {
  SampledGrid grid;
  std::vector<double> values;
  Normalization normalization = Normalization::none;
  std::string label;
  std::vector<std::string> warnings;

  Image(SampledGrid g, std::vector<double> v, std::string lbl = {});

  double max() const;
  // Value at the sample nearest to the grid origin rho_a = 0.
  double center_value() const;
};

}  // namespace cpi
