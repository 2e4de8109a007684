#pragma once

// Log-scale magnitudes and the piecewise-linear growth construction
// nu(r), L(r) = exp(int_1^r nu(t)/t dt), r_{n+1} = L(r_n).
//
// Every magnitude that can leave double range (|x|, r_n, M^k(r,f)) is stored
// as its natural logarithm. Knot spacing grows factorially in n, so plain
// scale overflows after about four knots.

#include <compare>
#include <iosfwd>
#include <vector>

namespace hollow {

/// A nonnegative magnitude stored as its natural logarithm.
class LogMag {
 public:
  LogMag() = default;  // magnitude 0

  static LogMag zero() { return LogMag{}; }
  static LogMag one() { return from_log(0.0); }
  /// Throws DomainError unless log_value is finite.
  static LogMag from_log(double log_value);
  /// Throws DomainError for negative or non-finite v.
  static LogMag from_value(double v);

  bool is_zero() const { return zero_; }
  /// ln of the magnitude; -inf for zero.
  double log_value() const;
  /// Plain-scale value; +inf if it does not fit in a double.
  double value() const;
  /// True when value() is finite.
  bool representable() const;

  friend bool operator==(const LogMag& a, const LogMag& b) {
    if (a.zero_ || b.zero_) return a.zero_ == b.zero_;
    return a.log_ == b.log_;
  }
  friend std::partial_ordering operator<=>(const LogMag& a, const LogMag& b) {
    if (a.zero_ || b.zero_) return !a.zero_ <=> !b.zero_;
    return a.log_ <=> b.log_;
  }

 private:
  double log_ = 0.0;
  bool zero_ = true;
};

LogMag logmag_mul(LogMag a, LogMag b);
/// Throws DomainError for zero raised to a nonpositive power.
LogMag logmag_pow(LogMag a, double p);
/// Quotient a / b; b must be nonzero.
LogMag logmag_div(LogMag a, LogMag b);

inline LogMag operator*(LogMag a, LogMag b) { return logmag_mul(a, b); }
inline LogMag operator/(LogMag a, LogMag b) { return logmag_div(a, b); }

std::ostream& operator<<(std::ostream& os, const LogMag& m);

struct Knot {
  int n;
  LogMag r;
};

/// Knots r_n for n = n0 .. last_index() of the piecewise-linear nu, together
/// with the log-spacing delta_n = log r_{n+1} - log r_n of every stored knot
/// (so the segment [r_last, r_{last+1}] is also available).
class GrowthProfile {
 public:
  /// n0 >= 2, r_prime > 4, up_to >= n0. Throws ConfigError otherwise.
  static GrowthProfile build(int n0, double r_prime, int up_to);
  /// Reassemble from a stored table; validates the profile invariants.
  static GrowthProfile from_table(std::vector<int> n, std::vector<double> log_r,
                                  std::vector<double> delta);

  int n0() const { return n0_; }
  double r_prime() const { return r_prime_; }
  int last_index() const { return n0_ + static_cast<int>(log_r_.size()) - 1; }
  bool has_knot(int n) const { return n >= n0_ && n <= last_index(); }

  /// log r_n; throws ProfileExhausted for n outside [n0, last_index()+1].
  double log_knot(int n) const;
  LogMag knot(int n) const { return LogMag::from_log(log_knot(n)); }
  /// delta_n for n in [n0, last_index()].
  double delta(int n) const;
  std::vector<Knot> knots() const;

 private:
  friend GrowthProfile extend_profile(const GrowthProfile&, int);
  int n0_ = 2;
  double r_prime_ = 5.0;
  std::vector<double> log_r_;
  std::vector<double> delta_;
};

/// One step of the spacing recurrence: delta_n from delta_{n-1}.
double next_delta(int n, double prev_delta);

/// Populates knots up to index up_to (a no-op if already present).
GrowthProfile extend_profile(const GrowthProfile& profile, int up_to);

/// nu(r): n0 on [0, R'], linear in r on each [r_n, r_{n+1}].
double nu_eval(const GrowthProfile& profile, LogMag r);

/// L(r) for r >= 1. Throws DomainError for r < 1 and ProfileExhausted past
/// the last stored segment.
LogMag L_eval(const GrowthProfile& profile, LogMag r);

/// E_eps = union over n > n0 of [eps r_n, r_n].
struct ExceptionalSet {
  double epsilon;
  const GrowthProfile* profile;
};

bool in_exceptional(const ExceptionalSet& es, LogMag r);

/// b_n = (ln(2(n+1)) + ln ln(2 r_n)) / ln ln(2 r_n) for n = n0 .. n_max.
std::vector<double> liminf_ratio_sequence(const GrowthProfile& profile, int n_max);

/// n * delta_n for every stored knot; must increase without bound.
std::vector<double> spacing_growth_sequence(const GrowthProfile& profile);

/// Text table "n log_r_n delta_n", one row per knot, 17 significant digits.
void write_profile_table(std::ostream& os, const GrowthProfile& profile);
/// Inverse of write_profile_table; lines starting with '#' are skipped.
GrowthProfile read_profile_table(std::istream& is);

namespace detail {
/// (e^s - 1) / (e^delta - 1) for 0 <= s <= delta, without overflow.
double segment_fraction(double s, double delta);
/// int_{r_n}^{r} nu(t)/t dt where s = log(r / r_n), delta = log(r_{n+1}/r_n).
double segment_integral(int n, double s, double delta);
}  // namespace detail

}  // namespace hollow
