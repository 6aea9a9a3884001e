#include "cpi/image.hpp"

#include <algorithm>
#include <cmath>

#include "cpi/errors.hpp"

namespace cpi {

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::none:
      return "none";
    case Normalization::peak:
      return "peak";
    case Normalization::center:
      return "center";
  }
  return "none";
}

Image::Image(SampledGrid g, std::vector<double> v, std::string lbl)
    : grid(g), values(std::move(v)), label(std::move(lbl)) {
  if (values.size() != grid.size()) throw ValidationError("image values do not match the grid size");
  for (double x : values)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("image intensities must be finite and nonnegative");
}

double Image::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

double Image::center_value() const {
  const int ix = grid.nearest(0, 0.0);
  if (grid.dim() == 1) return values[static_cast<std::size_t>(ix)];
  const int iy = grid.nearest(1, 0.0);
  return values[static_cast<std::size_t>(iy) * grid.count() + ix];
}

}  // namespace cpi
