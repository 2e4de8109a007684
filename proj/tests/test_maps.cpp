#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hollow/maps.hpp"

using namespace hollow;

namespace {

MapFamily radial2() { return MapFamily::radial(GrowthProfile::build(2, 5.0, 60), 2); }

std::vector<double> roots_fixture() { return {1e1, 1e4, 1e9, 1e16}; }

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("points") {
  const double xy[] = {3.0, -4.0};
  const Point p = Point::from_coords(xy);
  CHECK(p.radius.value() == doctest::Approx(4.0));
  CHECK(p.norm(Norm::Euclidean).value() == doctest::Approx(5.0));
  CHECK(p.coords()[0] == doctest::Approx(3.0));
  CHECK(p.coords()[1] == doctest::Approx(-4.0));
  const Point q = Point::polar({2.0, 1.0}, LogMag::from_value(10.0));
  CHECK(q.coords()[0] == doctest::Approx(10.0));
  CHECK(q.coords()[1] == doctest::Approx(5.0));
  const double bad[] = {NAN, 1.0};
  CHECK_THROWS_AS(Point::from_coords(bad), DomainError);
  CHECK_THROWS_AS(Point::polar({0.0, 0.0}, LogMag::one()), DomainError);
}

TEST_CASE("radial model evaluation") {
  const MapFamily f = radial2();
  CHECK(f.kind() == MapKind::RadialModel);
  CHECK(to_string(f.kind()) == "radial");
  const double x[] = {5.0, -2.0};
  const Point y = eval_map(f, Point::from_coords(x));
  CHECK(y.coords()[0] == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(y.coords()[1] == doctest::Approx(-10.0).epsilon(1e-12));
  // Fixed on the closed unit cube.
  const double u[] = {0.3, -1.0};
  CHECK(eval_map(f, Point::from_coords(u)).radius == LogMag::one());
  const double z[] = {0.0, 0.0};
  CHECK(eval_map(f, Point::from_coords(z)).radius.is_zero());
  const double wrong[] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(eval_map(f, Point::from_coords(wrong)), DomainError);
  // Far out in log scale.
  const Point far = Point::polar({1.0, 0.5}, LogMag::from_log(1e15));
  CHECK(eval_map(f, far).radius > far.radius);
}

TEST_CASE("exact maximum modulus is the same in both norms") {
  const MapFamily f = radial2();
  const MapFamily fe = f.with_norm(Norm::Euclidean);
  for (double r : {0.5, 1.0, 5.0, 12.5, 300.0}) {
    const auto a = max_modulus(f, LogMag::from_value(r));
    const auto b = max_modulus(fe, LogMag::from_value(r));
    CHECK_FALSE(a.sampled);
    CHECK(a.value == b.value);
    // Brute-force check over the Euclidean sphere.
    double best = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double t = 2.0 * M_PI * i / 2000.0;
      const double xy[] = {r * std::cos(t), r * std::sin(t)};
      best = std::max(best, eval_map(f, Point::from_coords(xy)).norm(Norm::Euclidean).value());
    }
    CHECK(best <= a.value.value() * (1.0 + 1e-12));
    CHECK(best >= a.value.value() * (1.0 - 1e-4));
  }
  CHECK_THROWS_AS(max_modulus(f, LogMag::zero()), DomainError);
}

TEST_CASE("sampled maximum modulus is a nested lower estimate") {
  const MapFamily f = radial2();
  for (int n : {8, 16, 64}) {
    const auto s = max_modulus(f.with_mode(MaxModulusMode::Sampled(n)), LogMag::from_value(7.0));
    const auto s2 = max_modulus(f.with_mode(MaxModulusMode::Sampled(2 * n)), LogMag::from_value(7.0));
    CHECK(s.sampled);
    CHECK(s.value <= max_modulus(f, LogMag::from_value(7.0)).value);
    CHECK(s.value <= s2.value);
  }
  for (int d : {2, 3}) {
    const auto a = sphere_samples(d, 32, Norm::Euclidean);
    const auto b = sphere_samples(d, 64, Norm::Euclidean);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] == b[i]);
      CHECK(euclid(a[i]) == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(MapFamily::zorich(1.0).with_mode(MaxModulusMode::Exact()), ConfigError);
}

TEST_CASE("entire product against a complex oracle") {
  const MapFamily f = MapFamily::entire_product(1.5, roots_fixture());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), lr(-2.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const double r = std::exp(lr(rng)), t = ang(rng);
    const std::complex<double> z = std::polar(r, t);
    std::complex<double> w = 1.5 * z * z;
    for (double a : roots_fixture()) w *= 1.0 + z / a;
    const double xy[] = {z.real(), z.imag()};
    const Point y = eval_map(f, Point::from_coords(xy));
    const auto c = y.coords();
    CHECK(std::abs(std::complex<double>(c[0], c[1]) - w) <= 1e-9 * std::abs(w));
  }
  const double root[] = {-10.0, 0.0};
  CHECK(eval_map(f, Point::from_coords(root)).radius.value() < 1e-8);
  const double huge[] = {1e100, 0.0};
  CHECK_THROWS_AS(eval_map(f, Point::from_coords(huge)), EscapedBeyondRange);
  CHECK_THROWS_AS(MapFamily::entire_product(1.0, {5.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(MapFamily::entire_product(1.0, {-1.0}), ConfigError);
}

TEST_CASE("entire product squaring") {
  const MapFamily f = MapFamily::entire_product(1.0, {});
  const double z[] = {2.0, 0.0};
  Point p = Point::from_coords(z);
  for (double expect : {4.0, 16.0, 256.0}) {
    p = eval_map(f, p);
    CHECK(p.norm(Norm::Euclidean).value() == doctest::Approx(expect));
  }
}

TEST_CASE("zorich map") {
  const MapFamily f = MapFamily::zorich(2.0);
  CHECK(f.dimension() == 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double x[] = {u(rng), u(rng), u(rng) / 3.0};
    const Point y = eval_map(f, Point::from_coords(x));
    CHECK(y.norm(Norm::Euclidean).log_value() == doctest::Approx(x[2]).epsilon(1e-12));
    const double xs[] = {x[0] + 4.0, x[1] - 8.0, x[2]};
    const auto a = y.coords(), b = eval_map(f, Point::from_coords(xs)).coords();
    for (int k = 0; k < 3; ++k) CHECK(a[static_cast<std::size_t>(k)] == doctest::Approx(b[static_cast<std::size_t>(k)]).epsilon(1e-9));
  }
  // Centre of the square goes to the pole, edges to the equator.
  const double c0[] = {0.0, 0.0, 0.0}, c1[] = {1.0, 0.3, 0.0};
  CHECK(eval_map(f, Point::from_coords(c0)).coords()[2] == doctest::Approx(1.0));
  CHECK(eval_map(f, Point::from_coords(c1)).coords()[2] == doctest::Approx(0.0));
  // Continuity across a fold line.
  const double l[] = {1.0 - 1e-9, 0.2, 0.5}, r[] = {1.0 + 1e-9, 0.2, 0.5};
  const auto pl = eval_map(f, Point::from_coords(l)).coords(), pr = eval_map(f, Point::from_coords(r)).coords();
  for (int k = 0; k < 3; ++k) CHECK(pl[static_cast<std::size_t>(k)] == doctest::Approx(pr[static_cast<std::size_t>(k)]).epsilon(1e-6));
  const auto m = max_modulus(f, LogMag::from_value(2.0));
  CHECK(m.sampled);
  CHECK(m.value.log_value() <= 2.0 + 1e-12);
  CHECK(m.value.log_value() > 1.9);
}

TEST_CASE("iterated maximum modulus") {
  const MapFamily f = radial2();
  const auto lad = iterate_max_modulus(f, LogMag::from_value(5.0), 6);
  const auto p = f.radial_params()->profile;
  for (int k = 1; k <= 6; ++k)
    CHECK(lad[static_cast<std::size_t>(k - 1)].log_value() == doctest::Approx(p.log_knot(k + 2)).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(iterate_max_modulus(f, LogMag::from_value(0.5), 3), "below escape threshold: M(r) <= r",
                       DomainError);
  CHECK_THROWS_AS(iterate_max_modulus(f, LogMag::from_value(5.0), 0), DomainError);
}

TEST_CASE("dilatation power bound") {
  CHECK(dilatation_power_bound(radial2(), 7) == LogMag::one());
  const MapFamily z = MapFamily::zorich(2.0);
  CHECK(dilatation_power_bound(z, 5).value() == doctest::Approx(32.0));
  CHECK_THROWS_AS(dilatation_power_bound(z, 0), DomainError);
}

TEST_CASE("square rings for the radial model") {
  const MapFamily f = radial2();
  const Ring a2 = square_ring(f, 0.5, 2);
  CHECK(a2.inner.value() == doctest::Approx(10.0));
  CHECK(a2.outer.value() == doctest::Approx(12.5));
  CHECK(a2.contains(LogMag::from_value(11.0)));
  CHECK_FALSE(a2.contains(LogMag::from_value(9.999)));
  CHECK_FALSE(a2.contains(LogMag::from_value(12.5001)));
  CHECK_THROWS_AS(square_ring(f, 1.0, 2), DomainError);

  const RingReport rep = verify_ring_containment(f, 0.5, 2, 6, 1000, 42);
  CHECK(rep.smallest_valid_n == 2);
  CHECK(rep.preconditions_ok);
  CHECK(rep.samples_checked == 5000);
  CHECK(rep.violations.empty());
  CHECK_THROWS_AS(verify_ring_containment(f, 0.5, 1, 3, 10, 1), DomainError);
  CHECK_THROWS_AS(verify_ring_containment(MapFamily::zorich(1.0), 0.5, 1, 1, 10, 1), DomainError);
}

TEST_CASE("ring containment does not depend on thread count") {
  const MapFamily f = radial2();
  const auto a = verify_ring_containment(f, 0.3, 2, 5, 300, 9, 1e-6, 1);
  const auto b = verify_ring_containment(f, 0.3, 2, 5, 300, 9, 1e-6, 4);
  CHECK(a.samples_checked == b.samples_checked);
  CHECK(a.violations.size() == b.violations.size());
  CHECK(a.smallest_valid_n == b.smallest_valid_n);
}

TEST_CASE("square rings for the entire product") {
  const MapFamily f = MapFamily::entire_product(1.0, roots_fixture());
  const Ring r1 = square_ring(f, 0.05, 1);
  CHECK(r1.inner.value() == doctest::Approx(200.0));
  CHECK(r1.outer.value() == doctest::Approx(500.0));
  // Hand estimates: |f| on |z| = 200 lies in [7.4e5, 8.6e5], on |z| = 500 in
  // [1.16e7, 1.34e7]; both inside ring 2 = (2e5, 5e7).
  for (int i = 0; i < 64; ++i) {
    const double t = 2.0 * M_PI * i / 64.0;
    const double a[] = {200.0 * std::cos(t), 200.0 * std::sin(t)};
    const double b[] = {500.0 * std::cos(t), 500.0 * std::sin(t)};
    const double fa = eval_map(f, Point::from_coords(a)).norm(Norm::Euclidean).value();
    const double fb = eval_map(f, Point::from_coords(b)).norm(Norm::Euclidean).value();
    CHECK(fa >= 7.4e5);
    CHECK(fa <= 8.6e5);
    CHECK(fb >= 1.16e7);
    CHECK(fb <= 1.34e7);
  }
  const RingReport rep = verify_ring_containment(f, 0.05, 1, 1, 500, 5);
  CHECK(rep.preconditions_ok);
  CHECK(rep.violations.empty());
  CHECK_THROWS_AS(square_ring(f, 0.05, 4), DomainError);
}
