#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hollow/escape.hpp"

using namespace hollow;

namespace {

MapFamily radial(int d = 2) { return MapFamily::radial(GrowthProfile::build(2, 5.0, 60), d); }

Point at(double r, std::vector<double> dir = {1.0, 0.3}) { return Point::polar(std::move(dir), LogMag::from_value(r)); }

// Ladder M^k = r^{2^k} built directly in logs.
Ladder doubling_ladder(double r, int top) {
  Ladder l;
  l.base_r = LogMag::from_value(r);
  for (int k = 0; k <= top; ++k) l.levels.push_back(LogMag::from_log(std::ldexp(std::log(r), k)));
  return l;
}

}  // namespace

TEST_CASE("orbits") {
  const MapFamily f = radial();
  const auto fixed = compute_orbit(f, at(1.0), 5);
  for (const auto& r : fixed.radii) CHECK(r == LogMag::one());
  const auto o = compute_orbit(f, at(5.0), 2);
  REQUIRE(o.radii.size() == 3);
  CHECK(o.radii[1].value() == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(o.radii[2].value() == doctest::Approx(1136.2).epsilon(1e-4));
  CHECK_FALSE(o.truncated);
  CHECK_THROWS_AS(compute_orbit(f, at(5.0), 0), DomainError);

  const MapFamily sq = MapFamily::entire_product(1.0, {});
  const double z[] = {2.0, 0.0};
  const auto e = compute_orbit(sq, Point::from_coords(z), 3);
  const double expect[] = {2.0, 4.0, 16.0, 256.0};
  for (int k = 0; k <= 3; ++k) CHECK(e.radii[static_cast<std::size_t>(k)].value() == doctest::Approx(expect[k]));

  const auto t = compute_orbit(sq, Point::from_coords(z), 20);
  CHECK(t.truncated);
  CHECK(t.k_max < 20);
  CHECK(t.radii.back().log_value() > std::log(kPlainScaleLimit));
}

TEST_CASE("ladder from base 5 walks the knots") {
  const MapFamily f = radial();
  const Ladder l = make_ladder(f, LogMag::from_value(5.0), 12);
  const auto& p = f.radial_params()->profile;
  CHECK(l.top() == 12);
  for (int k = 0; k <= 12; ++k) CHECK(l.levels[static_cast<std::size_t>(k)].log_value() == doctest::Approx(p.log_knot(k + 2)).epsilon(1e-12));
}

TEST_CASE("classification") {
  const MapFamily f = radial();
  const auto& p = f.radial_params()->profile;
  const Ladder l = make_ladder(f, LogMag::from_value(5.0), 30);

  const auto on = classify(compute_orbit(f, at(5.0), 20), l, 4);
  CHECK(on.tag == EscapeTag::FastEscaping);
  CHECK(on.offset == 0);
  CHECK(classify(compute_orbit(f, at(1.0), 20), l, 4).tag == EscapeTag::BoundedSoFar);
  CHECK(classify(compute_orbit(f, at(0.3), 20), l, 4).tag == EscapeTag::BoundedSoFar);

  // 2 r_4 already exceeds M^2(5) = r_4, so no shift is needed.
  const auto x = Point::polar({1.0, -1.0}, LogMag::from_log(std::log(2.0) + p.log_knot(4)));
  const auto c = classify(compute_orbit(f, x, 20), l, 4);
  CHECK(c.tag == EscapeTag::FastEscaping);
  CHECK(c.offset <= 3);
  CHECK(c.offset == 0);

  // A point below the base sphere but above 1: escapes, shifted.
  const auto s = classify(compute_orbit(f, at(1.5), 20), l, 4);
  CHECK(s.tag != EscapeTag::BoundedSoFar);

  CHECK_THROWS_AS(classify(compute_orbit(f, at(5.0), 20), make_ladder(f, LogMag::from_value(5.0), 10), 4),
                  DomainError);
}

TEST_CASE("classification properties") {
  const MapFamily f = radial();
  const Ladder l = make_ladder(f, LogMag::from_value(5.0), 30);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lr(-1.0, 6.0), u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const LogMag r = LogMag::from_log(lr(rng));
    const Point a = Point::polar({1.0, u(rng)}, r), b = Point::polar({u(rng), -1.0}, r);
    const auto oa = compute_orbit(f, a, 12);
    // Rotation invariance.
    CHECK(classify(oa, l, 4) == classify(compute_orbit(f, b, 12), l, 4));
    // Monotone in ell_max.
    std::optional<int> prev;
    for (int em = 0; em <= 6; ++em) {
      const auto c = classify(oa, l, em);
      if (prev) {
        CHECK(c.tag == EscapeTag::FastEscaping);
        CHECK(c.offset <= *prev);
      }
      if (c.tag == EscapeTag::FastEscaping) prev = c.offset;
    }
    // Larger k_max never turns fast escaping into bounded.
    const auto c12 = classify(oa, l, 4);
    const auto c20 = classify(compute_orbit(f, a, 20), l, 4);
    if (c12.tag == EscapeTag::FastEscaping) CHECK(c20.tag != EscapeTag::BoundedSoFar);
  }
}

TEST_CASE("apart hypothesis") {
  const MapFamily f = radial();
  const Ladder l = make_ladder(f, LogMag::from_value(5.0), 20);
  const auto ox = compute_orbit(f, at(5.0), 10), oy = compute_orbit(f, at(1.0), 10);
  CHECK(check_apart_hypothesis(ox, oy, l, 1, 1));
  CHECK_FALSE(check_apart_hypothesis(ox, ox, l, 1, 1));
  CHECK_FALSE(check_apart_hypothesis(oy, ox, l, 1, 1));
  CHECK_THROWS_AS(check_apart_hypothesis(ox, oy, l, 10, 1), DomainError);
  // A true instance: x classifies fast, y stays ladder dominated.
  CHECK(classify(ox, l, 4).tag == EscapeTag::FastEscaping);
  for (int k = 1; k + 1 <= oy.k_max; ++k) CHECK(oy.radii[static_cast<std::size_t>(k + 1)] <= l.levels[static_cast<std::size_t>(k - 1)]);
}

TEST_CASE("k2 conditions") {
  for (int k = 1; k < 200; ++k) CHECK(k2_condition_iii(2.0, k));
  CHECK_FALSE(k2_condition_iii(1.01, 1));
  const MapFamily f = radial();
  const Ladder l = make_ladder(f, LogMag::from_value(5.0), 16);
  const auto r = find_k2(2.0, l);
  CHECK(r.k2 <= 12);
  CHECK(r.k2 == 11);
  for (int k = r.k2; k <= l.top(); ++k) {
    CHECK(k2_condition_i(2.0, l, k));
    CHECK(k2_condition_ii(l, k));
    CHECK(k2_condition_iii(2.0, k));
    // Pointwise from the raw ladder.
    const double lm1 = l.levels[static_cast<std::size_t>(k - 1)].log_value();
    CHECK(std::log(lm1) >= 2.0 * k * std::log(2.0));
    CHECK(l.levels[static_cast<std::size_t>(k)].log_value() >= 2.0 * lm1);
  }
  CHECK_FALSE(r.diagnostics[static_cast<std::size_t>(r.k2 - 2)].cond_i);
  CHECK_THROWS_AS(find_k2(10.0, make_ladder(f, LogMag::from_value(5.0), 3)), LadderExhausted);
  CHECK_THROWS_AS(find_k2(1.0, l), DomainError);
  try {
    find_k2(10.0, make_ladder(f, LogMag::from_value(5.0), 3));
  } catch (const LadderExhausted& e) {
    CHECK(e.diagnostics.size() == 3);
  }
}

TEST_CASE("loglog growth report") {
  const MapFamily f = radial();
  const auto rep = loglog_growth_report(make_ladder(f, LogMag::from_value(5.0), 30));
  REQUIRE(rep.first_exceeding_k);
  CHECK(*rep.first_exceeding_k <= 30);
  CHECK(rep.eventually_increasing);
  CHECK(rep.verdict == GrowthVerdict::Diverging);

  const auto ctrl = loglog_growth_report(doubling_ladder(5.0, 30));
  for (int k = 1; k <= 30; ++k)
    CHECK(ctrl.ratios[static_cast<std::size_t>(k - 1)] ==
          doctest::Approx(std::log(2.0) + std::log(std::log(5.0)) / k));
  CHECK_FALSE(ctrl.eventually_increasing);
  CHECK(ctrl.verdict == GrowthVerdict::NotDiverging);

  CHECK_THROWS_AS(loglog_growth_report(doubling_ladder(5.0, 2)), DomainError);
  Ladder flat;
  for (int k = 0; k <= 5; ++k) flat.levels.push_back(LogMag::one());
  CHECK_THROWS_AS(loglog_growth_report(flat), DomainError);
}

TEST_CASE("batch classification is thread independent") {
  const MapFamily f = radial(3);
  const Ladder l = make_ladder(f, LogMag::from_value(5.0), 25);
  std::vector<Point> pts;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 500; ++i) {
    const double x[] = {u(rng), u(rng), u(rng)};
    pts.push_back(Point::from_coords(x));
  }
  const auto a = classify_points(f, pts, l, 20, 4, 1);
  const auto b = classify_points(f, pts, l, 20, 4, 8);
  CHECK(a == b);
  std::ostringstream sa, sb;
  write_classification_csv(sa, pts, a);
  write_classification_csv(sb, pts, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("x0,x1,x2,tag,offset,evidence_k\n", 0) == 0);
}

TEST_CASE("orbit csv") {
  const MapFamily f = radial();
  std::ostringstream os;
  write_orbit_csv(os, compute_orbit(f, at(5.0), 2));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,log_radius,truncated");
  std::getline(is, line);
  CHECK(line.rfind("0,1.609437912434100", 0) == 0);
}
