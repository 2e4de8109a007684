#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hollow/error.hpp"
#include "hollow/loggrowth.hpp"

using namespace hollow;

namespace {

// nu(e^u) from knots known so far (plain scale, small n only).
double nu_plain(const std::vector<double>& logk, int n0, double u) {
  if (u <= logk[0]) return n0;
  for (std::size_t m = 0; m + 1 < logk.size(); ++m)
    if (u <= logk[m + 1]) {
      const double a = std::exp(logk[m]), b = std::exp(logk[m + 1]);
      return n0 + static_cast<double>(m) + (std::exp(u) - a) / (b - a);
    }
  return NAN;
}

double simpson(double a, double b, int steps, const std::vector<double>& logk, int n0) {
  const double h = (b - a) / steps;
  double s = nu_plain(logk, n0, a) + nu_plain(logk, n0, b);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * nu_plain(logk, n0, a + i * h);
  return s * h / 3.0;
}

// log r_n for n = n0 .. n0 + count - 1, each knot from quadrature of
// int_0^{log r_n} nu(e^u) du in the substitution t = e^u.
std::vector<double> quadrature_knots(int n0, double rp, int count) {
  std::vector<double> logk{std::log(rp)};
  double acc = simpson(0.0, logk[0], 2000, logk, n0);
  while (static_cast<int>(logk.size()) < count) {
    logk.push_back(acc);
    acc += simpson(logk[logk.size() - 2], logk.back(), 400000, logk, n0);
  }
  return logk;
}

// Independent spacing recurrence in long double.
std::vector<long double> recurrence_deltas(int n0, long double rp, int n_last) {
  std::vector<long double> d{(n0 - 1) * std::log(rp)};
  for (int n = n0 + 1; n <= n_last; ++n) {
    const long double p = d.back();
    const long double corr = p > 11000.0L ? 0.0L : 1.0L / std::expm1(p);
    d.push_back(1.0L + ((n - 1) - corr) * p);
  }
  return d;
}

}  // namespace

TEST_CASE("LogMag arithmetic") {
  CHECK(logmag_mul(LogMag::one(), LogMag::from_log(1.0)).log_value() == doctest::Approx(1.0));
  CHECK(logmag_mul(LogMag::zero(), LogMag::from_value(7.0)).is_zero());
  CHECK(logmag_mul(LogMag::from_value(25.0), LogMag::from_value(45.447)).log_value() ==
        doctest::Approx(std::log(25.0 * 45.447)).epsilon(1e-14));
  CHECK(logmag_pow(LogMag::from_value(5.0), 2.0).value() == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(logmag_pow(LogMag::from_value(3.5), 1.0) == LogMag::from_value(3.5));
  CHECK_THROWS_AS(logmag_pow(LogMag::zero(), 0.0), DomainError);
  CHECK_THROWS_AS(logmag_pow(LogMag::zero(), -1.0), DomainError);
  CHECK(logmag_pow(LogMag::zero(), 2.0).is_zero());
  CHECK_THROWS_AS(LogMag::from_value(-1.0), DomainError);
  CHECK_THROWS_AS(LogMag::from_log(INFINITY), DomainError);
  CHECK((LogMag::from_value(625.0) / LogMag::from_value(25.0)).value() == doctest::Approx(25.0));
}

TEST_CASE("LogMag ordering matches magnitudes") {
  const std::vector<double> vals{0.0, 1e-300, 0.5, 1.0, 2.0, 1e10, 1e300};
  for (double a : vals)
    for (double b : vals) {
      const auto x = LogMag::from_value(a), y = LogMag::from_value(b);
      CHECK((x < y) == (a < b));
      CHECK((x == y) == (a == b));
    }
  CHECK(LogMag::from_log(1e6) > LogMag::from_log(1e5));
  CHECK_FALSE(LogMag::from_log(1e6).representable());
}

TEST_CASE("profile construction matches a quadrature oracle") {
  const auto p = GrowthProfile::build(2, 5.0, 40);
  CHECK(p.knot(2) == LogMag::from_value(5.0));
  CHECK(std::fabs(L_eval(p, LogMag::from_value(5.0)).value() / 25.0 - 1.0) <= 1e-12);

  const auto q = quadrature_knots(2, 5.0, 5);
  for (int n = 2; n <= 5; ++n) {
    CAPTURE(n);
    CHECK(std::fabs(p.log_knot(n) - q[static_cast<std::size_t>(n - 2)]) <= 1e-9 * q[static_cast<std::size_t>(n - 2)]);
  }
  for (int n = 2; n <= 4; ++n) {
    const double dq = q[static_cast<std::size_t>(n - 1)] - q[static_cast<std::size_t>(n - 2)];
    CHECK(std::fabs(p.delta(n) / dq - 1.0) <= 1e-9);
  }
  CHECK(std::fabs(p.delta(3) / (1.0 + 1.75 * std::log(5.0)) - 1.0) <= 1e-12);
  CHECK(std::fabs(p.knot(4).value() / std::exp(q[2]) - 1.0) <= 1e-3);
  CHECK(p.knot(4).value() == doctest::Approx(1136.2).epsilon(1e-4));
}

TEST_CASE("profile invariants up to n = 40") {
  for (double rp : {4.5, 5.0, 12.0}) {
    for (int n0 : {2, 3, 5}) {
      const auto p = GrowthProfile::build(n0, rp, 40);
      CAPTURE(rp);
      CAPTURE(n0);
      CHECK(p.knot(n0) == LogMag::from_value(rp));
      for (int n = n0; n < 40; ++n) {
        CHECK(std::isfinite(p.log_knot(n + 1)));
        CHECK(p.delta(n) > 0.0);
        CHECK(p.log_knot(n + 1) > p.log_knot(n));
        CHECK(p.log_knot(n + 1) >= n0 * p.log_knot(n));
        CHECK(L_eval(p, p.knot(n)).log_value() == doctest::Approx(p.log_knot(n + 1)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("build validation") {
  CHECK_THROWS_AS(GrowthProfile::build(1, 5.0, 10), ConfigError);
  CHECK_THROWS_AS(GrowthProfile::build(2, 4.0, 10), ConfigError);
  CHECK_THROWS_AS(GrowthProfile::build(2, 5.0, 1), ConfigError);
}

TEST_CASE("spacing growth n Delta_n against an independent recurrence") {
  const auto p = GrowthProfile::build(2, 5.0, 40);
  const auto seq = spacing_growth_sequence(p);
  const auto ref = recurrence_deltas(2, 5.0L, 40);
  REQUIRE(seq.size() == ref.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const long double expect = (2 + static_cast<long double>(i)) * ref[i];
    CHECK(std::fabs(static_cast<long double>(seq[i]) / expect - 1.0L) < 1e-12L);
    if (i > 0) CHECK(seq[i] > seq[i - 1]);
  }
  CHECK(seq[12 - 2] > 100.0);
}

TEST_CASE("next_delta") {
  CHECK(next_delta(3, std::log(5.0)) == doctest::Approx(1.0 + (2.0 - 0.25) * std::log(5.0)));
  CHECK(next_delta(10, 800.0) == doctest::Approx(1.0 + 9.0 * 800.0));
}

TEST_CASE("nu is continuous and hits n at r_n") {
  const auto p = GrowthProfile::build(2, 5.0, 30);
  CHECK(nu_eval(p, LogMag::zero()) == 2.0);
  CHECK(nu_eval(p, LogMag::from_value(3.0)) == 2.0);
  for (int n = 2; n < 29; ++n) CHECK(nu_eval(p, p.knot(n)) == doctest::Approx(n));
  // Offsets below stay above the ulp of log r_n only for small n.
  for (int n = 3; n < 10; ++n) {
    const double lr = p.log_knot(n);
    CHECK(nu_eval(p, LogMag::from_log(lr - 1e-9)) == doctest::Approx(n));
    const double mid = nu_eval(p, LogMag::from_log(lr + p.delta(n) - std::log(2.0)));
    const double d = p.delta(n);
    const double frac = d < 700.0 ? (0.5 * std::exp(d) - 1.0) / std::expm1(d) : 0.5;
    CHECK(mid == doctest::Approx(n + frac).epsilon(1e-12));
  }
  CHECK_THROWS_AS(nu_eval(p, LogMag::from_log(p.log_knot(31) + 1.0)), ProfileExhausted);
}

TEST_CASE("L domain and monotonicity") {
  const auto p = GrowthProfile::build(2, 5.0, 30);
  CHECK_THROWS_AS(L_eval(p, LogMag::from_value(0.5)), DomainError);
  CHECK_THROWS_AS(L_eval(p, LogMag::zero()), DomainError);
  CHECK(L_eval(p, LogMag::one()) == LogMag::one());
  CHECK_THROWS_AS(L_eval(p, LogMag::from_log(p.log_knot(31) * 2.0)), ProfileExhausted);
  // L(10) and L(12.5) feed the A_2 -> A_3 ring claim.
  CHECK(L_eval(p, LogMag::from_value(10.0)).value() > 50.0);
  CHECK(L_eval(p, LogMag::from_value(12.5)).value() < 0.5 * p.knot(4).value());
  double prev = 0.0;
  for (double lr = 0.0; lr < p.log_knot(20); lr = lr * 1.1 + 0.05) {
    const double v = L_eval(p, LogMag::from_log(lr)).log_value();
    CHECK(v > prev - 1e-12);
    CHECK(v >= lr);
    prev = v;
  }
}

TEST_CASE("exceptional set") {
  const auto p = GrowthProfile::build(2, 5.0, 20);
  const ExceptionalSet es{0.5, &p};
  CHECK(in_exceptional(es, LogMag::from_value(25.0)));
  CHECK(in_exceptional(es, LogMag::from_value(12.5)));
  CHECK_FALSE(in_exceptional(es, LogMag::from_value(12.0)));
  CHECK_FALSE(in_exceptional(es, LogMag::from_value(5.0)));
  CHECK(in_exceptional(es, LogMag::from_log(p.log_knot(9) - 0.1)));
  CHECK_FALSE(in_exceptional(es, LogMag::from_log(p.log_knot(9) + 0.1)));
}

TEST_CASE("liminf ratio") {
  const auto p = GrowthProfile::build(2, 5.0, 40);
  const auto b = liminf_ratio_sequence(p, 40);
  CHECK(b[20 - 2] < 1.6);
  for (std::size_t i = 8; i < b.size(); ++i) CHECK(b[i] < b[i - 1]);
  CHECK(b.back() > 1.0);
  CHECK_THROWS_AS(liminf_ratio_sequence(p, 3), DomainError);
}

TEST_CASE("profile table round trip is bit identical") {
  const auto p = GrowthProfile::build(3, 6.25, 45);
  std::ostringstream a;
  write_profile_table(a, p);
  CHECK(a.str().rfind("n log_r_n delta_n\n", 0) == 0);
  std::istringstream in("# comment\n" + a.str());
  const auto q = read_profile_table(in);
  std::ostringstream b;
  write_profile_table(b, q);
  CHECK(a.str() == b.str());
  CHECK(q.log_knot(20) == p.log_knot(20));

  std::istringstream bad("n log_r_n delta_n\n2 1.6 5\n3 1.0 2\n");
  CHECK_THROWS_AS(read_profile_table(bad), ConfigError);
}
