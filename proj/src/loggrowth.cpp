#include "hollow/loggrowth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hollow/error.hpp"

namespace hollow {

LogMag LogMag::from_log(double log_value) {
  if (!std::isfinite(log_value)) throw DomainError("LogMag: non-finite logarithm");
  LogMag m;
  m.log_ = log_value;
  m.zero_ = false;
  return m;
}

LogMag LogMag::from_value(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("LogMag: magnitude must be finite and >= 0");
  if (v == 0.0) return zero();
  return from_log(std::log(v));
}

double LogMag::log_value() const {
  return zero_ ? -std::numeric_limits<double>::infinity() : log_;
}

double LogMag::value() const { return zero_ ? 0.0 : std::exp(log_); }

bool LogMag::representable() const { return zero_ || std::isfinite(std::exp(log_)); }

LogMag logmag_mul(LogMag a, LogMag b) {
  if (a.is_zero() || b.is_zero()) return LogMag::zero();
  return LogMag::from_log(a.log_value() + b.log_value());
}

LogMag logmag_pow(LogMag a, double p) {
  if (a.is_zero()) {
    if (p <= 0.0) throw DomainError("LogMag: zero raised to a nonpositive power is undefined");
    return LogMag::zero();
  }
  return LogMag::from_log(a.log_value() * p);
}

LogMag logmag_div(LogMag a, LogMag b) {
  if (b.is_zero()) throw DomainError("LogMag: division by zero magnitude");
  if (a.is_zero()) return a;
  return LogMag::from_log(a.log_value() - b.log_value());
}

std::ostream& operator<<(std::ostream& os, const LogMag& m) {
  if (m.is_zero()) return os << "0";
  return os << "exp(" << m.log_value() << ")";
}

namespace detail {

namespace {

// ln(e^x - 1) for x > 0.
double log_expm1(double x) {
  if (x > 1.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

// e^s - 1 - s, accurate for small s.
double expm1_minus_linear(double s) {
  if (std::fabs(s) < 1e-4) return s * s * (0.5 + s * (1.0 / 6.0 + s / 24.0));
  return std::expm1(s) - s;
}

// ln(e^s - 1 - s) for s > 0.
double log_expm1_minus_linear(double s) {
  if (s > 1.0) return s + std::log1p(-(1.0 + s) * std::exp(-s));
  return std::log(expm1_minus_linear(s));
}

constexpr double kPlainLimit = 700.0;

}  // namespace

double segment_fraction(double s, double delta) {
  if (s <= 0.0) return 0.0;
  if (s >= delta) return 1.0;
  if (delta < kPlainLimit) return std::expm1(s) / std::expm1(delta);
  return std::exp(log_expm1(s) - log_expm1(delta));
}

double segment_integral(int n, double s, double delta) {
  if (s <= 0.0) return 0.0;
  // nu(t) = (t - r_n)/(r_{n+1} - r_n) + n integrates against dt/t to
  // (e^s - 1 - s)/(e^delta - 1) + n s.
  double linear_part;
  if (delta < kPlainLimit) {
    linear_part = expm1_minus_linear(s) / std::expm1(delta);
  } else {
    linear_part = std::exp(log_expm1_minus_linear(s) - log_expm1(delta));
  }
  return linear_part + static_cast<double>(n) * s;
}

}  // namespace detail

double next_delta(int n, double prev_delta) {
  // Full segment [r_{n-1}, r_n]: 1 + ((n-1) - 1/(e^D - 1)) D.
  const double inv = prev_delta < 700.0 ? 1.0 / std::expm1(prev_delta) : 0.0;
  return 1.0 + (static_cast<double>(n - 1) - inv) * prev_delta;
}

GrowthProfile GrowthProfile::build(int n0, double r_prime, int up_to) {
  if (n0 < 2) throw ConfigError("n0 must be an integer >= 2");
  if (!(r_prime > 4.0) || !std::isfinite(r_prime)) throw ConfigError("r_prime must be a finite real > 4");
  if (up_to < n0) throw ConfigError("profile must extend at least to n0");
  GrowthProfile p;
  p.n0_ = n0;
  p.r_prime_ = r_prime;
  p.log_r_.push_back(std::log(r_prime));
  p.delta_.push_back((n0 - 1) * std::log(r_prime));
  return extend_profile(p, up_to);
}

GrowthProfile extend_profile(const GrowthProfile& profile, int up_to) {
  if (up_to < profile.n0()) throw DomainError("extend_profile: up_to must be >= n0");
  GrowthProfile p = profile;
  while (p.last_index() < up_to) {
    const int n = p.last_index();
    const double next_log = p.log_r_.back() + p.delta_.back();
    const double d = next_delta(n + 1, p.delta_.back());
    if (!std::isfinite(next_log) || !std::isfinite(d))
      throw DomainError("extend_profile: knot exponent overflowed double range at n = " + std::to_string(n + 1));
    p.log_r_.push_back(next_log);
    p.delta_.push_back(d);
  }
  return p;
}

GrowthProfile GrowthProfile::from_table(std::vector<int> n, std::vector<double> log_r,
                                        std::vector<double> delta) {
  if (n.empty() || n.size() != log_r.size() || n.size() != delta.size())
    throw ConfigError("profile table: empty or ragged");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] != n[0] + static_cast<int>(i)) throw ConfigError("profile table: knot indices must be consecutive");
    if (!std::isfinite(log_r[i]) || !(delta[i] > 0.0)) throw ConfigError("profile table: bad knot row");
    if (i > 0) {
      if (!(log_r[i] > log_r[i - 1])) throw ConfigError("profile table: log r_n must increase");
      if (log_r[i] < n[0] * log_r[i - 1]) throw ConfigError("profile table: log r_{n+1} >= n0 log r_n violated");
    }
  }
  GrowthProfile p;
  p.n0_ = n[0];
  if (p.n0_ < 2) throw ConfigError("profile table: n0 must be >= 2");
  p.r_prime_ = std::exp(log_r[0]);
  if (!(p.r_prime_ > 4.0)) throw ConfigError("profile table: R' must exceed 4");
  p.log_r_ = std::move(log_r);
  p.delta_ = std::move(delta);
  return p;
}

double GrowthProfile::log_knot(int n) const {
  if (n < n0_ || n > last_index() + 1)
    throw ProfileExhausted("profile has no knot r_" + std::to_string(n));
  if (n == last_index() + 1) return log_r_.back() + delta_.back();
  return log_r_[static_cast<std::size_t>(n - n0_)];
}

double GrowthProfile::delta(int n) const {
  if (!has_knot(n)) throw ProfileExhausted("profile has no spacing delta_" + std::to_string(n));
  return delta_[static_cast<std::size_t>(n - n0_)];
}

std::vector<Knot> GrowthProfile::knots() const {
  std::vector<Knot> out;
  for (int n = n0_; n <= last_index(); ++n) out.push_back({n, knot(n)});
  return out;
}

namespace {

// Segment index n with log r_n <= lr < log r_{n+1}; requires lr >= log R'.
int locate_segment(const GrowthProfile& p, double lr) {
  const int last = p.last_index();
  if (lr >= p.log_knot(last) + p.delta(last))
    throw ProfileExhausted("radius lies beyond the last stored knot (log r = " + std::to_string(lr) + ")");
  int lo = p.n0(), hi = last;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (p.log_knot(mid) <= lr) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

}  // namespace

double nu_eval(const GrowthProfile& profile, LogMag r) {
  if (r.is_zero()) return profile.n0();
  const double lr = r.log_value();
  if (lr <= profile.log_knot(profile.n0())) return profile.n0();
  const int n = locate_segment(profile, lr);
  const double s = lr - profile.log_knot(n);
  return static_cast<double>(n) + detail::segment_fraction(s, profile.delta(n));
}

LogMag L_eval(const GrowthProfile& profile, LogMag r) {
  if (r.is_zero() || r.log_value() < 0.0) throw DomainError("L(r) requires r >= 1");
  const double lr = r.log_value();
  const int n0 = profile.n0();
  if (lr <= profile.log_knot(n0)) return LogMag::from_log(n0 * lr);
  const int n = locate_segment(profile, lr);
  const double s = lr - profile.log_knot(n);
  return LogMag::from_log(profile.log_knot(n + 1) + detail::segment_integral(n, s, profile.delta(n)));
}

bool in_exceptional(const ExceptionalSet& es, LogMag r) {
  if (!(es.epsilon > 0.0 && es.epsilon < 1.0)) throw DomainError("exceptional set: epsilon must lie in (0,1)");
  if (r.is_zero()) return false;
  const GrowthProfile& p = *es.profile;
  const double lr = r.log_value();
  const double le = std::log(es.epsilon);
  for (int n = p.n0() + 1; n <= p.last_index() + 1; ++n) {
    const double top = p.log_knot(n);
    if (lr <= top && lr >= top + le) return true;
    if (top + le > lr) break;
  }
  return false;
}

std::vector<double> liminf_ratio_sequence(const GrowthProfile& profile, int n_max) {
  if (n_max < profile.n0() + 2) throw DomainError("liminf ratio needs n_max >= n0 + 2");
  if (n_max > profile.last_index() + 1) throw ProfileExhausted("liminf ratio: profile too short");
  std::vector<double> out;
  for (int n = profile.n0(); n <= n_max; ++n) {
    const double llr = std::log(std::log(2.0) + profile.log_knot(n));
    out.push_back((std::log(2.0 * (n + 1)) + llr) / llr);
  }
  return out;
}

std::vector<double> spacing_growth_sequence(const GrowthProfile& profile) {
  std::vector<double> out;
  for (int n = profile.n0(); n <= profile.last_index(); ++n) out.push_back(n * profile.delta(n));
  return out;
}

void write_profile_table(std::ostream& os, const GrowthProfile& profile) {
  os << "n log_r_n delta_n\n";
  char buf[96];
  for (int n = profile.n0(); n <= profile.last_index(); ++n) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", n, profile.log_knot(n), profile.delta(n));
    os << buf;
  }
}

GrowthProfile read_profile_table(std::istream& is) {
  std::string line;
  bool header = false;
  std::vector<int> ns;
  std::vector<double> lr, dl;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "n log_r_n delta_n") throw ConfigError("profile table: missing header 'n log_r_n delta_n'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    int n;
    std::string a, b;
    if (!(row >> n >> a >> b)) throw ConfigError("profile table: malformed row '" + line + "'");
    ns.push_back(n);
    lr.push_back(std::strtod(a.c_str(), nullptr));
    dl.push_back(std::strtod(b.c_str(), nullptr));
  }
  if (!header) throw ConfigError("profile table: empty input");
  return GrowthProfile::from_table(std::move(ns), std::move(lr), std::move(dl));
}

}  // namespace hollow
