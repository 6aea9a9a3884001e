#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "cpi/errors.hpp"
#include "cpi/scene.hpp"

using namespace cpi;
using doctest::Approx;

namespace {
int open_count(const ApertureMask& m) {
  int n = 0;
  for (const auto& v : m.values()) n += v != Complex{};
  return n;
}
}  // namespace

TEST_CASE("grid coordinates") {
  const SampledGrid g = SampledGrid::line(0.5, 5, 1.0);
  CHECK(g.coordinate(0, 0) == -0.0);
  CHECK(g.coordinate(0, 2) == 1.0);
  CHECK(g.coordinate(0, 4) == 2.0);
  CHECK(g.size() == 5);
  const SampledGrid sq = SampledGrid::square(1.0, 4);
  CHECK(sq.size() == 16);
  CHECK(sq.point(5).x == -0.5);
  CHECK(sq.point(5).y == -0.5);
  CHECK_THROWS_AS(SampledGrid::line(0.0, 4), ValidationError);
  CHECK_THROWS_AS(SampledGrid::line(1.0, 1), ValidationError);
}

TEST_CASE("slit rasterization") {
  CHECK(open_count(make_slit(0.026, SampledGrid::line(0.002, 65))) == 13);
  CHECK(open_count(make_slit(0.2, SampledGrid::line(0.01, 64))) == 20);
  const SampledGrid g = SampledGrid::line(0.01, 20);
  CHECK(open_count(make_slit(g.extent(), g)) == 20);
  CHECK_THROWS_AS(make_slit(0.015, g), UnderresolvedMask);
  const ApertureMask m = make_slit(0.026, SampledGrid::line(0.002, 65));
  CHECK(m.smallest_feature() == Approx(0.026));
  CHECK(m.is_binary());
}

TEST_CASE("double slit") {
  const ApertureMask m = make_double_slit(0.2, 0.4, SampledGrid::line(0.01, 80));
  CHECK(open_count(m) == 40);
  CHECK(m.sample(Vec2{0.2}) == Complex(1.0));
  CHECK(m.sample(Vec2{-0.2}) == Complex(1.0));
  CHECK(m.sample(Vec2{0.0}) == Complex(0.0));
  CHECK_THROWS_AS(make_double_slit(0.2, 0.2, SampledGrid::line(0.01, 80)), OverlapError);
  // Inner edges at +-0.1 mm leave a 0.2 mm gap.
  const ApertureMask n = make_double_slit(0.1, 0.3, SampledGrid::line(0.005, 100));
  CHECK(n.sample(Vec2{0.095}) == Complex(0.0));
  CHECK(n.sample(Vec2{0.105}) == Complex(1.0));
  CHECK(n.sample(Vec2{-0.095}) == Complex(0.0));
}

TEST_CASE("letter E glyph") {
  const double d = 0.2;
  const SampledGrid g = SampledGrid::square(1.4 / 128, 128);
  const ApertureMask e = make_letter_E(d, g);
  // Spine 5d x d plus three bars of 2d x d.
  const double analytic = 11.0 * d * d;
  const double row = g.pitch() * 3 * d;
  CHECK(std::abs(e.open_area() - analytic) < row * 1.5);
  CHECK(e.is_binary());
  CHECK(e.sample(Vec2{-0.2, 0.0}) == Complex(1.0));    // spine
  CHECK(e.sample(Vec2{0.2, 0.4}) == Complex(1.0));     // top bar
  CHECK(e.sample(Vec2{0.2, 0.2}) == Complex(0.0));     // gap between bars
  CHECK_THROWS_AS(make_letter_E(0.015, SampledGrid::square(0.01, 200)), UnderresolvedMask);
  CHECK_THROWS_AS(make_letter_E(0.2, SampledGrid::square(0.01, 50)), GridTooSmall);
  CHECK_THROWS_AS(make_letter_E(0.2, SampledGrid::line(0.01, 200)), ValidationError);
  // Rebuilding on the same grid gives the same mask.
  CHECK(make_letter_E(d, g) == e);
}

TEST_CASE("mask file round trip") {
  const ApertureMask e = make_letter_E(0.2, SampledGrid::square(0.05, 32));
  std::stringstream io;
  write_mask(io, e);
  const ApertureMask back = read_mask(io);
  CHECK(back.values() == e.values());
  CHECK(back.grid().pitch() == Approx(0.05));
  CHECK(back.smallest_feature() == Approx(0.2));
  std::stringstream bad("2 3 0.1\n0 1 0 1 1 0\n");
  CHECK_THROWS_AS(read_mask(bad), ValidationError);
  std::stringstream over("1 4 0.1\n0 2 1 0\n");
  CHECK_THROWS_AS(read_mask(over), ValidationError);
}

TEST_CASE("pump amplitude and transform") {
  const PumpProfile p = PumpProfile::gaussian(0.6);
  CHECK(pump_amplitude(Vec2{}, p) == Complex(1.0));
  CHECK(std::abs(pump_amplitude(Vec2{0.6 * std::sqrt(2.0)}, p)) == Approx(std::exp(-1.0)));
  CHECK(std::abs(pump_amplitude(Vec2{0.0, 1.2}, p)) == Approx(std::exp(-2.0)));
  CHECK(p.effective_diameter() == Approx(1.6970562748));
  CHECK(pump_fourier(Vec2{}, p) == Complex(1.0));
  CHECK(std::abs(pump_fourier(Vec2{1.0 / 0.6}, p)) == Approx(std::exp(-0.5)));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 kap{N(rng), N(rng)};
    CHECK(std::abs(pump_fourier(kap, p) - pump_fourier(-kap, p)) < 1e-15);
  }
}

TEST_CASE("sampled pump transform matches the closed form") {
  const PumpProfile p = PumpProfile::gaussian(0.6);
  const double h = 0.6 / 16;
  const double norm = 0.6 * std::sqrt(2.0 * kPi);
  for (double kap : {0.0, 0.5, 1.0, 2.5, 4.0}) {
    Complex acc{};
    for (int i = -256; i <= 256; ++i) {
      const double x = i * h;
      acc += pump_amplitude(Vec2{x}, p) * std::polar(1.0, -kap * x) * h;
    }
    CHECK(std::abs(acc / norm - pump_fourier(Vec2{kap}, p, 1)) < 1e-6 * std::max(1e-3, std::abs(pump_fourier(Vec2{kap}, p, 1))) + 1e-12);
  }
}
