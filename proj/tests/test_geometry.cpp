#include <doctest.h>

#include <cmath>
#include <random>

#include "arraycav/geometry.hpp"

using namespace arraycav;

namespace {

// Independent root of the phase-matching condition by plain bisection.
double bisect_curved_z(double rho2, double w0, double L) {
  GaussianBeam beam;
  beam.waist = w0;
  auto f = [&](double z) {
    return k0 * z + 0.5 * k0 * rho2 * beam.inverse_curvature(z) -
           beam.gouy_phase(z) - 0.5 * k0 * L;
  };
  double lo = 0.25 * L, hi = 4.0 * L + 1.0;
  REQUIRE(f(lo) < 0.0);
  REQUIRE(f(hi) > 0.0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("square array basics") {
  auto single = build_square_array(1, 0.47, 0.0, Eigen::Vector3cd(1, 0, 0));
  REQUIRE(single.size() == 1);
  CHECK(single[0].position.norm() == doctest::Approx(0.0));

  auto four = build_square_array(2, 0.5, 0.0, Eigen::Vector3cd(1, 0, 0));
  REQUIRE(four.size() == 4);
  for (const auto& d : four) {
    CHECK(std::abs(d.position.x()) == doctest::Approx(0.25));
    CHECK(std::abs(d.position.y()) == doctest::Approx(0.25));
  }

  auto big = build_square_array(30, 0.47, 0.0, Eigen::Vector3cd(1, 0, 0));
  double extreme = 0.0;
  for (const auto& d : big) extreme = std::max(extreme, d.position.x());
  CHECK(extreme == doctest::Approx(0.5 * 29 * 0.47));  // 6.815

  CHECK_THROWS_AS(build_square_array(0, 0.5, 0.0, Eigen::Vector3cd(1, 0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_square_array(2, -1.0, 0.0, Eigen::Vector3cd(1, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("curved mirror solves the phase-matching condition") {
  const double a = 0.47, L = 1.5, w0 = 2.0;
  auto flat = build_square_array(15, a, 0.5 * L, Eigen::Vector3cd(1, 0, 0));
  auto curved = curve_mirror(flat, w0, L);
  GaussianBeam beam;
  beam.waist = w0;

  for (std::size_t i = 0; i < curved.size(); ++i) {
    // x, y untouched
    CHECK(curved[i].position.x() == flat[i].position.x());
    CHECK(curved[i].position.y() == flat[i].position.y());
    // residual on re-substitution
    double z = curved[i].position.z();
    double rho2 = curved[i].position.head<2>().squaredNorm();
    double residual = k0 * z + 0.5 * k0 * rho2 * beam.inverse_curvature(z) -
                      beam.gouy_phase(z) - 0.5 * k0 * L;
    CHECK(std::abs(residual) < 1e-10);
  }

  SUBCASE("on-axis atom sits beyond L/2 (Gouy compensation)") {
    auto one = curve_mirror(
        build_square_array(1, a, 0.5 * L, Eigen::Vector3cd(1, 0, 0)), w0, L);
    CHECK(one[0].position.z() > 0.5 * L);
  }

  SUBCASE("corner atom agrees with the bisection oracle") {
    double rho2 = 2.0 * std::pow(7.0 * a, 2);  // corner of a 15x15 mirror
    double oracle = bisect_curved_z(rho2, w0, L);
    double corner_z = 0.0;
    for (const auto& d : curved)
      if (d.position.x() > 3.0 && d.position.y() > 3.0)
        corner_z = std::max(corner_z, d.position.z());
    CHECK(std::abs(corner_z - oracle) < 1e-10);
  }

  SUBCASE("w0 -> infinity recovers the flat mirror") {
    auto nearly_flat = curve_mirror(flat, 4e3, L);
    for (const auto& d : nearly_flat)
      CHECK(d.position.z() == doctest::Approx(0.5 * L).epsilon(1e-6));
  }

  SUBCASE("negative-z mirror is the image of the positive one") {
    auto below = curve_mirror(
        build_square_array(15, a, -0.5 * L, Eigen::Vector3cd(1, 0, 0)), w0, L);
    for (std::size_t i = 0; i < below.size(); ++i)
      CHECK(below[i].position.z() == doctest::Approx(-curved[i].position.z()));
  }
}

TEST_CASE("stark detuning profile") {
  const double alpha = 1750.0, w_stark = 500.0;
  auto flat = build_square_array(11, 1.0, 0.0, Eigen::Vector3cd(1, 0, 0));
  auto shifted = stark_detuning_profile(flat, alpha, w_stark);

  for (std::size_t i = 0; i < flat.size(); ++i)
    CHECK(shifted[i].position == flat[i].position);

  // central atom: zero shift
  for (const auto& d : shifted)
    if (d.position.head<2>().norm() < 1e-12)
      CHECK(d.detuning == doctest::Approx(0.0));

  // quadratic limit: alpha/w_stark^2 = 7e-3, r = 5 -> shift ~ 0.35
  auto probe = stark_detuning_profile(
      {Dipole{{5.0, 0.0, 0.0}, Eigen::Vector3cd(1, 0, 0), 0.0, 1.0}},
      7e-3 * w_stark * w_stark, w_stark);
  CHECK(probe[0].detuning == doctest::Approx(0.35).epsilon(2e-4));

  // r << w_stark expansion: 2 alpha r^2 / w_stark^2
  for (const auto& d : shifted) {
    double r2 = d.position.head<2>().squaredNorm();
    CHECK(d.detuning ==
          doctest::Approx(2.0 * alpha * r2 / (w_stark * w_stark)).epsilon(1e-3));
  }
}

TEST_CASE("frozen disorder sampling") {
  DipoleSet ideal = make_cavity(3, 0.6, 2.0, {}, {make_target({0, 0, 0}, 1.0)});

  SUBCASE("zero sigma is the identity") {
    DipoleSet s = sample_frozen_disorder(ideal, Eigen::Vector3d::Zero(), 7);
    for (int i = 0; i < ideal.total(); ++i)
      CHECK(s.atom(i).position == ideal.atom(i).position);
  }

  SUBCASE("equal seeds are bit-reproducible, detunings untouched") {
    Eigen::Vector3d sigma(0.02, 0.02, 0.02);
    DipoleSet s1 = sample_frozen_disorder(ideal, sigma, 42);
    DipoleSet s2 = sample_frozen_disorder(ideal, sigma, 42);
    DipoleSet s3 = sample_frozen_disorder(ideal, sigma, 43);
    bool all_equal = true, any_differs = false;
    for (int i = 0; i < ideal.total(); ++i) {
      all_equal = all_equal && (s1.atom(i).position == s2.atom(i).position);
      any_differs = any_differs || (s1.atom(i).position != s3.atom(i).position);
      CHECK(s1.atom(i).detuning == ideal.atom(i).detuning);
      CHECK(s1.atom(i).orientation == ideal.atom(i).orientation);
    }
    CHECK(all_equal);
    CHECK(any_differs);
  }

  SUBCASE("statistical oracle: empirical std within 1% at 1e5 samples") {
    DipoleSet one;
    one.array_atoms = {Dipole{}};
    const double sigma = 0.02;
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
      DipoleSet s = sample_frozen_disorder(one, {sigma, sigma, sigma},
                                           static_cast<std::uint64_t>(k));
      double x = s.array_atoms[0].position.x();
      sum += x;
      sum2 += x * x;
    }
    double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.01));
  }

  SUBCASE("axis-restricted disorder leaves other axes bit-identical") {
    DipoleSet s = sample_frozen_disorder(ideal, {0.05, 0.0, 0.0}, 11);
    bool x_moved = false;
    for (int i = 0; i < ideal.total(); ++i) {
      x_moved = x_moved || (s.atom(i).position.x() != ideal.atom(i).position.x());
      CHECK(s.atom(i).position.y() == ideal.atom(i).position.y());
      CHECK(s.atom(i).position.z() == ideal.atom(i).position.z());
    }
    CHECK(x_moved);
  }

  SUBCASE("ensemble mean converges to the ideal position") {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    const int m = 4000;
    const double sigma = 0.05;
    for (int k = 0; k < m; ++k) {
      DipoleSet s = sample_frozen_disorder(ideal, {sigma, sigma, sigma},
                                           1000 + static_cast<std::uint64_t>(k));
      mean += s.array_atoms[0].position;
    }
    mean /= m;
    // standard error sigma/sqrt(M); allow 4 standard errors
    double se = sigma / std::sqrt(static_cast<double>(m));
    CHECK((mean - ideal.array_atoms[0].position).norm() < 4.0 * se * std::sqrt(3.0));
  }
}

TEST_CASE("gaussian mode field") {
  GaussianBeam beam;
  beam.waist = 2.0;

  SUBCASE("on-axis value at the focus") {
    Eigen::Vector3cd f = gaussian_mode_field(beam, {0, 0, 0});
    CHECK(f.x().real() == doctest::Approx(std::sqrt(2.0 / pi) / beam.waist));
    CHECK(f.x().imag() == doctest::Approx(0.0));
    CHECK(std::abs(f.y()) == 0.0);
  }

  SUBCASE("amplitude drops to 1/e at rho = w(z)") {
    for (double z : {0.0, 1.3, 4.0}) {
      double w = beam.width(z);
      double on_axis = std::abs(gaussian_mode_field(beam, {0, 0, z}).x());
      double at_w = std::abs(gaussian_mode_field(beam, {w, 0, z}).x());
      CHECK(at_w == doctest::Approx(on_axis / std::exp(1.0)));
    }
  }

  SUBCASE("beam width relation w(L/2)") {
    // w(L/2) = sqrt(w0^2 + (L/(k0 w0))^2) for w0 = 2, L = 5.5
    double expected = std::sqrt(4.0 + std::pow(5.5 / (k0 * 2.0), 2));
    CHECK(beam.width(0.5 * 5.5) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(2.04733).epsilon(1e-5));
  }

  SUBCASE("transverse normalization by quadrature at several planes") {
    for (double z : {0.0, -2.75, 2.75}) {
      double w = beam.width(z);
      const int n = 501;
      const double half = 6.0 * w;
      const double step = 2.0 * half / (n - 1);
      double integral = 0.0;
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          double wx = (ix == 0 || ix == n - 1) ? 0.5 : 1.0;
          double wy = (iy == 0 || iy == n - 1) ? 0.5 : 1.0;
          Eigen::Vector3d r(-half + ix * step, -half + iy * step, z);
          integral += wx * wy * step * step *
                      gaussian_mode_field(beam, r).squaredNorm();
        }
      CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("layout validation and CSV export") {
  DipoleSet cavity = make_cavity(4, 0.47, 1.5, 2.0, {make_target({0, 0, 0}, 0.1)});
  CHECK(cavity.n_array() == 32);
  CHECK(cavity.n_target() == 1);
  CHECK_NOTHROW(cavity.validate());

  DipoleSet clash = cavity;
  clash.target_atoms.push_back(clash.target_atoms[0]);
  CHECK_THROWS_AS(clash.validate(), std::domain_error);

  Dipole bad;
  bad.orientation = Eigen::Vector3cd(1.0, 1.0, 0.0);  // not unit
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  write_layout_csv("layout_test.csv", cavity);
  std::FILE* f = std::fopen("layout_test.csv", "r");
  REQUIRE(f != nullptr);
  char line[512];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line).starts_with("index,x,y,z"));
  int rows = 0;
  while (std::fgets(line, sizeof line, f)) ++rows;
  std::fclose(f);
  CHECK(rows == cavity.total());
  std::remove("layout_test.csv");
}
