// Acceptance runner. `acceptance` runs every criterion; `acceptance N` runs one.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cpi/analysis.hpp"
#include "cpi/correlation.hpp"
#include "cpi/geometry.hpp"
#include "cpi/refocus.hpp"
#include "cpi/scenario.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cpi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Sample of the 1D grid closest to the maximum of a sampled function.
double argmax_on(const SampledGrid& g, const std::function<double(double)>& fn) {
  double best = -1.0;
  double at = 0.0;
  for (int i = 0; i < g.count(); ++i) {
    const double x = g.coordinate(0, i);
    const double v = fn(x);
    if (v > best) {
      best = v;
      at = x;
    }
  }
  return at;
}

Verdict geometry_suite() {
  bool ok = std::abs(zeta(10, 30, 12) - 20.0) < 1e-12;
  const double zbf = solve_ghost_focus(10, 30, 12);
  ok = ok && std::abs(zbf - 10.0) < 1e-12 && std::abs(ghost_magnification(10, 30, zbf) - 1.5) < 1e-12;

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.5, 50.0);
  int checked = 0;
  double worst = 0.0;
  while (checked < 1000) {
    const double z_a = u(rng);
    const double f = u(rng);
    const double z_img = u(rng);
    double focus = 0.0;
    try {
      focus = solve_ghost_focus(z_a, z_img, f);
    } catch (const std::exception&) {
      continue;
    }
    const double lhs = zeta(z_a, z_img, f);
    if (!std::isfinite(lhs)) continue;
    worst = std::max(worst, rel(lhs, (focus + z_a) * z_a / focus));
    ++checked;
  }
  ok = ok && worst <= 1e-9;
  return {ok, fmt("zeta=%.12g z_bF=%.12g m=%.12g; identity worst rel %.2e over %d setups", zeta(10, 30, 12), zbf,
                  ghost_magnification(10, 30, zbf), worst, checked)};
}

Verdict oracle_equivalence() {
  struct Case {
    ApertureMask mask;
    OpticalSetup setup;
    double a_span;
  };
  const OpticalSetup focus = fixture::focused_bench();
  const std::vector<Case> cases = {
      {make_slit(0.026, SampledGrid::line(0.002, 65)), focus, 0.2},
      {make_double_slit(0.2, 0.4, SampledGrid::line(0.025, 32)), fixture::bench(3.0), 4.0},
  };
  const double b_span = 1.44;
  std::mt19937_64 rng(7);
  int total = 0;
  int tight = 0;
  double worst = 0.0;
  for (const Case& c : cases) {
    const PumpProfile pump = PumpProfile::gaussian(c.setup.sigma);
    std::uniform_real_distribution<double> ua(-c.a_span, c.a_span);
    std::uniform_real_distribution<double> ub(-b_span, b_span);
    std::vector<std::pair<Vec2, Vec2>> pairs;
    for (int i = 0; i < 100; ++i) pairs.push_back({{ua(rng), 0.0}, {ub(rng), 0.0}});
    std::vector<double> fast;
    std::vector<double> slow;
    double peak = std::abs(amplitude_gaussian_fast({}, {}, c.mask, pump, c.setup).value);
    for (const auto& [a, b] : pairs) {
      fast.push_back(std::abs(amplitude_gaussian_fast(a, b, c.mask, pump, c.setup).value));
      slow.push_back(std::abs(amplitude_oracle(a, b, c.mask, pump, c.setup).value));
      peak = std::max(peak, slow.back());
    }
    // Both paths bottom out at round-off far from the image; compare above a
    // floor tied to the largest amplitude of the scenario.
    const double floor = 1e-9 * peak;
    for (std::size_t i = 0; i < fast.size(); ++i) {
      const double err = std::abs(fast[i] - slow[i]) / std::max({fast[i], slow[i], floor});
      worst = std::max(worst, err);
      tight += err <= 1e-6;
      ++total;
    }
  }
  const double share = static_cast<double>(tight) / total;
  return {share >= 0.95 && worst <= 1e-4,
          fmt("%d/%d pairs within 1e-6 (%.1f%%), worst rel %.2e", tight, total, 100.0 * share, worst)};
}

Verdict dof_numbers() {
  const Scenario sc = preset("dof");
  const OpticalSetup setup = sc.setup.optical();
  const PumpProfile pump = PumpProfile::gaussian(setup.sigma);
  const SensorSpec sensor = sc.sensor.sensor();
  const double d_s = effective_lens_diameter(pump, setup.z_a, setup.z_b);
  const double ratio = dof_ratio_cpi(sensor, d_s);
  const int nu = required_nu_standard(ratio, sensor.pixel, d_s);
  bool equal = true;
  for (int n_u = 1; n_u <= 40; ++n_u) {
    const SensorSpec square{sensor.pixel, sensor.count_a, n_u * n_u};
    equal = equal && dof_ratio_standard(sensor.pixel, n_u, d_s) == dof_ratio_cpi(square, d_s);
  }
  return {std::abs(ratio - 0.26) <= 0.01 && nu == 18 && equal,
          fmt("ratio_cpi %.4f, required N_u %d, equal-DOF identity exact: %s", ratio, nu, equal ? "yes" : "no")};
}

Verdict focused_ghost_image() {
  const OpticalSetup f = fixture::focused_bench();
  const PumpProfile pump = PumpProfile::gaussian(f.sigma);
  const ApertureMask dot = make_slit(0.002, SampledGrid::line(0.001, 241), 0.1);
  const SampledGrid ga = SampledGrid::line(0.002, 101, -0.15);
  const Image point = incoherent_ghost_image(gamma_map(dot, pump, f, ga, SampledGrid::line(0.03, 97), EvalPath::fast));
  const double peak = peak_position(point);
  const bool point_ok = std::abs(peak + 0.15) <= ga.pitch() + 1e-12;

  const ApertureMask slit = make_slit(0.026, SampledGrid::line(0.002, 65));
  const SampledGrid gs = SampledGrid::line(0.002, 61);
  // The slit's diffraction tails decay as 1/rho_b^2; the angular grid has to
  // reach far past the source image for the sum to converge.
  const Image sigma_f = incoherent_ghost_image(gamma_map(slit, pump, f, gs, SampledGrid::line(0.03, 801), EvalPath::fast));
  std::vector<double> ref(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i)
    ref[i] = oracle::convolution_image([](double) { return 1.0; }, -0.013, 0.013, 2600, f.sigma, f.wavenumber(), 10.0,
                                       1.5, gs.coordinate(0, static_cast<int>(i)));
  const double ref_peak = *std::max_element(ref.begin(), ref.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i)
    worst = std::max(worst, std::abs(sigma_f.values[i] / sigma_f.max() - ref[i] / ref_peak));
  return {point_ok && worst <= 1e-2,
          fmt("point peak %.4f mm (expected -0.15 +- %.3f); slit vs convolution worst %.2e", peak, ga.pitch(), worst)};
}

// Contiguous alpha range around focus where the width stays within 20% of the
// focused width.
std::pair<double, double> band(const std::vector<double>& alphas, const std::vector<double>& widths, std::size_t focus) {
  const double w0 = widths[focus];
  auto inside = [&](std::size_t i) { return widths[i] > 0.0 && std::abs(widths[i] / w0 - 1.0) <= 0.2; };
  std::size_t lo = focus;
  std::size_t hi = focus;
  while (lo > 0 && inside(lo - 1)) --lo;
  while (hi + 1 < alphas.size() && inside(hi + 1)) ++hi;
  return {alphas[lo], alphas[hi]};
}

Verdict coherent_depth_of_focus() {
  const Scenario sc = preset("fig4");
  const OpticalSetup f = sc.setup.optical();
  const PumpProfile pump = PumpProfile::gaussian(f.sigma);
  const ResolvedGrids g = resolve_grids(sc);
  auto widths = [&](double alpha, double& coh, double& inc) {
    const OpticalSetup s = f.with_object_distance(object_distance_for_alpha(f, alpha));
    coh = inc = -1.0;
    try {
      coh = fwhm(viewpoint_image(g.mask, pump, s, g.a, {}, EvalPath::fast));
    } catch (const std::exception&) {
    }
    try {
      inc = fwhm(unrefocused_image(g.mask, pump, s, g.a, g.b, EvalPath::fast));
    } catch (const std::exception&) {
    }
  };

  std::vector<double> alphas;
  for (int i = -40; i <= 40; ++i) alphas.push_back(1.0 + 0.0025 * i);
  std::vector<double> coh(alphas.size());
  std::vector<double> inc(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) widths(alphas[i], coh[i], inc[i]);
  const auto [clo, chi] = band(alphas, coh, 40);
  const auto [ilo, ihi] = band(alphas, inc, 40);
  const bool contains = clo < ilo && chi > ihi;

  // The scenario's own coarse sweep, reported for comparison.
  std::vector<double> pa = sc.run.alpha_list;
  std::sort(pa.begin(), pa.end());
  std::vector<double> pc(pa.size());
  std::vector<double> pi(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) widths(pa[i], pc[i], pi[i]);
  const std::size_t pf = static_cast<std::size_t>(std::find(pa.begin(), pa.end(), 1.0) - pa.begin());
  std::string coarse;
  if (pf < pa.size()) {
    const auto [a, b] = band(pa, pc, pf);
    const auto [c, d] = band(pa, pi, pf);
    coarse = fmt("; scenario alphas: coherent [%.3f, %.3f], incoherent [%.3f, %.3f]", a, b, c, d);
  }
  double narrowest = coh[40];
  for (std::size_t i = 0; i < coh.size(); ++i)
    if (coh[i] > 0.0 && alphas[i] >= ilo && alphas[i] <= ihi) narrowest = std::min(narrowest, coh[i]);
  return {contains,
          fmt("alpha step 0.0025: coherent band [%.4f, %.4f] (focused FWHM %.4f, narrows to %.4f inside the incoherent "
              "band), incoherent band [%.4f, %.4f] (focused FWHM %.4f)%s",
              clo, chi, coh[40], narrowest, ilo, ihi, inc[40], coarse.c_str())};
}

Verdict refocusing_recovery() {
  const Scenario sc = preset("fig3");
  const OpticalSetup s = sc.setup.optical();
  const PumpProfile pump = PumpProfile::gaussian(s.sigma);
  const ResolvedGrids g = resolve_grids(sc);
  const Image truth = geometric_truth(g.mask, s, g.a);
  const double ncc_ref = cross_correlation(refocused_image(g.mask, pump, s, g.a, g.b, EvalPath::fast), truth);
  const double ncc_mis = cross_correlation(unrefocused_image(g.mask, pump, s, g.a, g.b, EvalPath::fast), truth);

  // At focus the remap is the identity and the refocused sum must be the
  // focused image itself.
  const OpticalSetup f = s.with_object_distance(derive(s).z_bF);
  const Image ref = refocused_image(g.mask, pump, f, g.a, g.b, EvalPath::fast);
  const Image focused = unrefocused_image(g.mask, pump, f, g.a, g.b, EvalPath::fast);
  const bool identical = ref.values == focused.values;
  return {ncc_ref >= 0.80 && ncc_mis <= 0.50 && identical,
          fmt("NCC refocused %.3f, misfocused %.3f; focused identity bitwise: %s", ncc_ref, ncc_mis,
              identical ? "yes" : "no")};
}

Verdict viewpoint_parallax() {
  const Scenario sc = preset("fig5");
  const OpticalSetup s = sc.setup.optical();
  const PumpProfile pump = PumpProfile::gaussian(s.sigma);
  const ResolvedGrids g = resolve_grids(sc);
  const double M = source_magnification(s);
  const double half_sep = 0.5 * sc.object.separation_mm;
  // Sensor point imaging object point o from viewpoint rho_b; the stationary
  // object point is affine in rho_a.
  auto expected = [&](double o, double rho_b) {
    const double at0 = stationary_object_point({0.0, 0.0}, {rho_b, 0.0}, s).x;
    const double slope = stationary_object_point({1.0, 0.0}, {rho_b, 0.0}, s).x - at0;
    return (o - at0) / slope;
  };
  bool ok = true;
  std::string detail;
  std::vector<double> shifts;
  for (double rho_b : {M * s.sigma, -M * s.sigma}) {
    const Image v = viewpoint_image(g.mask, pump, s, g.a, {rho_b, 0.0}, EvalPath::fast);
    // Each projected slit is flat-topped with Fresnel ripple down to about
    // 0.45 of the maximum; its position is the centroid of the whole
    // projection, taken above a threshold below the ripple.
    const std::vector<double> centers = lobe_centroids(v, 0.2);
    std::vector<double> want = {expected(-half_sep, rho_b), expected(half_sep, rho_b)};
    std::sort(want.begin(), want.end());
    if (centers.size() != 2) {
      ok = false;
      detail += fmt("rho_b %+.2f: %zu lobes; ", rho_b, centers.size());
      continue;
    }
    for (int k = 0; k < 2; ++k) ok = ok && std::abs(centers[k] - want[k]) <= 2.0 * g.a.pitch() + 1e-12;
    shifts.push_back(0.5 * (centers[0] + centers[1]));
    detail += fmt("rho_b %+.2f: centers %.3f, %.3f vs %.3f, %.3f; ", rho_b, centers[0], centers[1], want[0], want[1]);
  }
  ok = ok && shifts.size() == 2 && shifts[0] * shifts[1] < 0.0;
  return {ok, detail + fmt("tolerance %.3f mm", 2.0 * g.a.pitch())};
}

Verdict geometric_limit() {
  OpticalSetup s = fixture::bench(3.0);
  s.lambda /= 16.0;
  const double M = source_magnification(s);
  const PumpProfile pump = PumpProfile::gaussian(s.sigma);
  // Smooth off-axis object so that the geometric map has a unique maximum. The
  // geometric map is constant across a mask cell, so cells are kept well below
  // the rho_a pitch once projected.
  const double x0 = 0.1;
  const double w = 0.04;
  const ApertureMask blob = make_mask(SampledGrid::line(0.001, 640), w, [&](Vec2 p) {
    const double t = (p.x - x0) / w;
    return Complex(std::exp(-0.5 * t * t), 0.0);
  });
  const SampledGrid ga = SampledGrid::line(0.01, 801);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ub(-M * s.sigma, M * s.sigma);
  bool ok = true;
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double rho_b = ub(rng);
    const CorrelationMap map = gamma_map(blob, pump, s, ga, SampledGrid::line(1e-6, 3, rho_b), EvalPath::fast);
    const double wave = argmax_on(ga, [&](double x) { return map.at(static_cast<std::size_t>(ga.nearest(0, x)), 1); });
    const double geo = argmax_on(ga, [&](double x) { return geometric_gamma(blob, pump, s, {x, 0.0}, {rho_b, 0.0}); });
    worst = std::max(worst, std::abs(wave - geo) / ga.pitch());
  }
  ok = worst <= 2.0;

  // A narrow pump displaced to s0 lights the object from a single point; the
  // angular sensor sees it at -M s0.
  const OpticalSetup n = fixture::bench(3.0);
  const double s0 = 0.1;
  const PumpProfile spot = PumpProfile::gaussian(1e-3, {s0, 0.0});
  const ApertureMask slit = make_slit(0.2, SampledGrid::line(0.005, 64));
  const double tol = spot_source(M, n.z_b, n.lambda, 0.2);
  const SampledGrid gb = SampledGrid::line(2e-4, 201, -M * s0);
  const CorrelationMap line = gamma_map(slit, spot, n, SampledGrid::line(1e-6, 3), gb, EvalPath::fast);
  const double found = argmax_on(gb, [&](double x) { return line.at(1, static_cast<std::size_t>(gb.nearest(0, x))); });
  const bool source_ok = std::abs(found + M * s0) <= tol;
  return {ok && source_ok, fmt("lambda/16 peak offset worst %.2f pitches; displaced pump peak %.5f mm vs %.5f +- %.5f",
                               worst, found, -M * s0, tol)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files[e.path().filename().string()] = read_file(e.path());
  return files;
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / fmt("cpi_acceptance_%d", static_cast<int>(::getpid()));
  bool ok = true;
  std::string detail;
  for (const char* name : {"fig3", "fig4", "fig5"}) {
    std::map<std::string, std::string> runs[2];
    const int threads[2] = {1, 3};
    for (int r = 0; r < 2; ++r) {
      const fs::path dir = root / fmt("%s_t%d", name, threads[r]);
      fs::create_directories(dir);
      const std::string cmd = fmt("\"%s\" %s --out \"%s\" --threads %d > /dev/null 2>&1", CPISIM_PATH, name,
                                  dir.string().c_str(), threads[r]);
      if (std::system(cmd.c_str()) != 0) ok = false;
      runs[r] = snapshot(dir);
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1];
    ok = ok && same;
    detail += fmt("%s %zu files %s; ", name, runs[0].size(), same ? "identical" : "DIFFER");
  }
  fs::remove_all(root);
  return {ok, detail + "threads 1 vs 3"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria = {
      {"geometry suite", geometry_suite},
      {"oracle equivalence", oracle_equivalence},
      {"depth-of-field numbers", dof_numbers},
      {"focused ghost image", focused_ghost_image},
      {"coherent vs incoherent depth of focus", coherent_depth_of_focus},
      {"refocusing recovery", refocusing_recovery},
      {"viewpoint parallax", viewpoint_parallax},
      {"geometric limit", geometric_limit},
      {"determinism", determinism},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "usage: acceptance [1-%zu]\n", criteria.size());
    return 2;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
