#include "hollow/maps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "hollow/parallel.hpp"

namespace hollow {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

const double kLogPlainLimit = std::log(kPlainScaleLimit);

// Radical inverse in base b (Halton sequence component).
double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

// ---------------------------------------------------------------------------
// Point

std::vector<double> Point::coords() const {
  if (radius.is_zero()) return std::vector<double>(direction.size(), 0.0);
  const double r = radius.value();
  if (!(r <= kPlainScaleLimit)) throw DomainError("point radius exceeds plain-scale range");
  std::vector<double> out(direction.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = direction[i] * r;
  return out;
}

LogMag Point::norm(Norm n) const {
  if (n == Norm::Maximum || radius.is_zero()) return radius;
  return radius * LogMag::from_value(euclid(direction));
}

Point Point::from_coords(std::span<const double> coords) {
  for (double c : coords)
    if (!std::isfinite(c)) throw DomainError("point coordinates must be finite");
  Point p;
  const double m = max_abs(coords);
  p.direction.assign(coords.size(), 0.0);
  if (m == 0.0) return p;
  for (std::size_t i = 0; i < coords.size(); ++i) p.direction[i] = coords[i] / m;
  p.radius = LogMag::from_value(m);
  return p;
}

Point Point::polar(std::vector<double> direction, LogMag radius) {
  const double m = max_abs(direction);
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("polar point needs a nonzero finite direction");
  for (double& d : direction) d /= m;
  return Point{std::move(direction), radius};
}

// ---------------------------------------------------------------------------
// MapFamily

MapFamily MapFamily::radial(GrowthProfile profile, int dimension, double ki_bound) {
  if (dimension < 2) throw ConfigError("map dimension must be >= 2");
  if (!(ki_bound >= 1.0)) throw ConfigError("ki_bound must be >= 1");
  MapFamily m;
  m.dimension_ = dimension;
  m.ki_bound_ = ki_bound;
  m.params_ = RadialModel{std::move(profile)};
  m.mode_ = MaxModulusMode::Exact();
  m.norm_ = Norm::Maximum;
  return m;
}

MapFamily MapFamily::entire_product(double c, std::vector<double> roots, double ki_bound, int n_samples) {
  if (!(ki_bound >= 1.0)) throw ConfigError("ki_bound must be >= 1");
  if (!(c != 0.0) || !std::isfinite(c)) throw ConfigError("entire product constant must be finite and nonzero");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!(roots[i] > 0.0) || !std::isfinite(roots[i])) throw ConfigError("entire product roots must be positive");
    if (i > 0 && !(roots[i] > roots[i - 1])) throw ConfigError("entire product roots must increase");
  }
  if (n_samples < 1) throw ConfigError("sample count must be positive");
  MapFamily m;
  m.dimension_ = 2;
  m.ki_bound_ = ki_bound;
  m.params_ = EntireProduct{c, std::move(roots)};
  m.mode_ = MaxModulusMode::Sampled(n_samples);
  m.norm_ = Norm::Euclidean;
  return m;
}

MapFamily MapFamily::zorich(double ki_bound, int n_samples) {
  if (!(ki_bound >= 1.0)) throw ConfigError("ki_bound must be >= 1");
  if (n_samples < 1) throw ConfigError("sample count must be positive");
  MapFamily m;
  m.dimension_ = 3;
  m.ki_bound_ = ki_bound;
  m.params_ = Zorich{};
  m.mode_ = MaxModulusMode::Sampled(n_samples);
  m.norm_ = Norm::Euclidean;
  return m;
}

MapKind MapFamily::kind() const {
  switch (params_.index()) {
    case 0: return MapKind::RadialModel;
    case 1: return MapKind::EntireProduct;
    default: return MapKind::Zorich;
  }
}

MapFamily MapFamily::with_mode(MaxModulusMode mode) const {
  if (mode.exact && kind() != MapKind::RadialModel)
    throw ConfigError("exact maximum modulus is available for the radial model only");
  if (!mode.exact && mode.n_samples < 1) throw ConfigError("sample count must be positive");
  MapFamily m = *this;
  m.mode_ = mode;
  return m;
}

MapFamily MapFamily::with_norm(Norm norm) const {
  MapFamily m = *this;
  m.norm_ = norm;
  return m;
}

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::RadialModel: return "radial";
    case MapKind::EntireProduct: return "entire";
    case MapKind::Zorich: return "zorich";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Evaluation

LogMag radial_profile_eval(const GrowthProfile& profile, LogMag r) {
  if (r <= LogMag::one()) return r;
  return L_eval(profile, r);
}

namespace {

Point eval_entire(const EntireProduct& p, const Point& x) {
  const auto xy = x.coords();
  const std::complex<double> z(xy[0], xy[1]);
  if (z == 0.0) return Point{{0.0, 0.0}, LogMag::zero()};
  // Accumulate modulus in log form and the argument separately so large |z|
  // cannot overflow intermediate products.
  double log_mod = std::log(std::fabs(p.c)) + 2.0 * std::log(std::abs(z));
  double arg = (p.c < 0 ? std::numbers::pi : 0.0) + 2.0 * std::arg(z);
  for (double a : p.roots) {
    const std::complex<double> factor = 1.0 + z / a;
    if (factor == 0.0) return Point{{0.0, 0.0}, LogMag::zero()};
    log_mod += std::log(std::abs(factor));
    arg += std::arg(factor);
  }
  std::vector<double> dir{std::cos(arg), std::sin(arg)};
  const double m = max_abs(dir);
  Point out = Point::polar(dir, LogMag::from_log(log_mod + std::log(m)));
  if (out.radius.log_value() > kLogPlainLimit)
    throw EscapedBeyondRange("entire product image escaped beyond representable range",
                             LogMag::from_log(log_mod));
  return out;
}

// Square [-1,1]^2 onto the upper unit hemisphere: lift to the pyramid with
// apex (0,0,1) over the square, then project radially.
std::array<double, 3> square_to_hemisphere(double u, double v) {
  const double h = 1.0 - std::max(std::fabs(u), std::fabs(v));
  const double n = std::sqrt(u * u + v * v + h * h);
  return {u / n, v / n, h / n};
}

// Reflection folding of R onto [-1,1] with period 4; returns the parity of
// the number of reflections.
std::pair<double, int> fold(double t) {
  double s = std::fmod(t + 1.0, 4.0);
  if (s < 0) s += 4.0;
  if (s <= 2.0) return {s - 1.0, 0};
  return {3.0 - s, 1};
}

Point eval_zorich(const Point& x) {
  const auto c = x.coords();
  auto [u, pu] = fold(c[0]);
  auto [v, pv] = fold(c[1]);
  auto h = square_to_hemisphere(u, v);
  if ((pu + pv) % 2 == 1) h[2] = -h[2];
  std::vector<double> dir(h.begin(), h.end());
  const double m = max_abs(dir);
  Point out = Point::polar(dir, LogMag::from_log(c[2] + std::log(m)));
  if (out.radius.log_value() > kLogPlainLimit)
    throw EscapedBeyondRange("zorich image escaped beyond representable range", LogMag::from_log(c[2]));
  return out;
}

}  // namespace

Point eval_map(const MapFamily& map, const Point& x) {
  if (x.dimension() != map.dimension()) throw DomainError("point dimension does not match the map");
  if (const auto* rm = map.radial_params()) {
    if (x.radius.is_zero()) return x;
    return Point{x.direction, radial_profile_eval(rm->profile, x.radius)};
  }
  if (!x.radius.is_zero() && x.radius.log_value() > kLogPlainLimit)
    throw EscapedBeyondRange("input point beyond plain-scale range", x.norm(map.norm()));
  if (const auto* ep = map.entire_params()) return eval_entire(*ep, x);
  return eval_zorich(x);
}

// ---------------------------------------------------------------------------
// Maximum modulus

std::vector<std::vector<double>> sphere_samples(int dimension, int n, Norm norm) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> u(static_cast<std::size_t>(dimension));
    if (dimension == 2) {
      const double t = 2.0 * std::numbers::pi * std::fmod(i * golden, 1.0);
      u = {std::cos(t), std::sin(t)};
    } else if (dimension == 3) {
      const double z = 1.0 - 2.0 * radical_inverse(static_cast<std::uint64_t>(i), 2);
      const double phi = 2.0 * std::numbers::pi * radical_inverse(static_cast<std::uint64_t>(i), 3);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      u = {s * std::cos(phi), s * std::sin(phi), z};
    } else {
      // Halton points of the cube pushed to the sphere; quasi-uniform only.
      for (int j = 0; j < dimension; ++j)
        u[static_cast<std::size_t>(j)] =
            2.0 * radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[j % 12]) - 1.0;
      if (max_abs(u) == 0.0) u[0] = 1.0;
    }
    const double scale = norm == Norm::Maximum ? max_abs(u) : euclid(u);
    for (double& c : u) c /= scale;
    out.push_back(std::move(u));
  }
  return out;
}

MaxModulus max_modulus(const MapFamily& map, LogMag r) {
  if (r.is_zero()) throw DomainError("maximum modulus requires r > 0");
  const auto mode = map.max_modulus_mode();
  if (mode.exact) {
    // g(m) / m is nondecreasing, so on the Euclidean sphere the maximum is
    // attained on a coordinate axis and equals g(r) in either norm.
    return {radial_profile_eval(map.radial_params()->profile, r), false};
  }
  if (!(r.log_value() < kLogPlainLimit))
    throw DomainError("sampling requires plain-scale radius");
  const double rv = r.value();
  LogMag best = LogMag::zero();
  for (const auto& u : sphere_samples(map.dimension(), mode.n_samples, map.norm())) {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] * rv;
    LogMag v;
    try {
      v = eval_map(map, Point::from_coords(x)).norm(map.norm());
    } catch (const EscapedBeyondRange& e) {
      v = e.magnitude();
    }
    best = std::max(best, v, [](const LogMag& a, const LogMag& b) { return a < b; });
  }
  return {best, true};
}

std::vector<LogMag> iterate_max_modulus(const MapFamily& map, LogMag r, int k) {
  if (k < 1) throw DomainError("iterate_max_modulus: k must be >= 1");
  std::vector<LogMag> out;
  LogMag cur = r;
  for (int i = 0; i < k; ++i) {
    const LogMag next = max_modulus(map, cur).value;
    if (!(next > cur)) {
      if (i == 0) throw DomainError("below escape threshold: M(r) <= r");
      throw DomainError("maximum modulus ladder stopped increasing at k = " + std::to_string(i + 1));
    }
    out.push_back(next);
    cur = next;
  }
  return out;
}

LogMag dilatation_power_bound(const MapFamily& map, int k) {
  if (k < 1) throw DomainError("dilatation_power_bound: k must be >= 1");
  return logmag_pow(LogMag::from_value(map.ki_bound()), static_cast<double>(k));
}

// ---------------------------------------------------------------------------
// Rings

Ring square_ring(const MapFamily& map, double eps, int n) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("ring epsilon must lie in (0,1)");
  if (const auto* rm = map.radial_params()) {
    const auto& p = rm->profile;
    return {LogMag::from_log(std::log(2.0) + p.log_knot(n)),
            LogMag::from_log(std::log(eps) + p.log_knot(n + 1))};
  }
  if (const auto* ep = map.entire_params()) {
    if (n < 1 || n + 1 > static_cast<int>(ep->roots.size()))
      throw DomainError("entire product ring index out of range");
    const double an = ep->roots[static_cast<std::size_t>(n - 1)];
    const double an1 = ep->roots[static_cast<std::size_t>(n)];
    return {LogMag::from_value(an / eps), LogMag::from_value(eps * an1)};
  }
  throw DomainError("square rings are defined for the radial model and the entire product only");
}

namespace {

RingConditions ring_conditions(const MapFamily& map, double eps, int n) {
  const Ring ring = square_ring(map, eps, n);
  RingConditions rc{n, ring.inner < ring.outer, true, true};
  if (map.radial_params()) {
    // The radial model realises the envelope with c = C = 1.
    rc.lower = std::pow(2.0, n) >= 2.0;
    rc.upper = std::pow(eps, n) <= eps;
  }
  return rc;
}

// Largest n for which ring n and its target ring n+1 exist.
int last_ring_index(const MapFamily& map) {
  if (const auto* rm = map.radial_params()) return rm->profile.last_index() - 1;
  if (const auto* ep = map.entire_params()) return static_cast<int>(ep->roots.size()) - 2;
  return -1;
}

int first_ring_index(const MapFamily& map) {
  if (const auto* rm = map.radial_params()) return rm->profile.n0();
  return 1;
}

}  // namespace

RingReport verify_ring_containment(const MapFamily& map, double eps, int n_first, int n_last,
                                   int samples_per_ring, std::uint64_t seed, double tol, unsigned threads) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("ring epsilon must lie in (0,1)");
  if (map.kind() == MapKind::Zorich) throw DomainError("ring containment is not defined for the Zorich family");
  if (samples_per_ring < 1) throw DomainError("samples_per_ring must be positive");
  const int lo = first_ring_index(map), hi = last_ring_index(map);
  if (n_first < lo || n_last > hi || n_first > n_last)
    throw DomainError("ring range [" + std::to_string(n_first) + ", " + std::to_string(n_last) +
                      "] outside available rings [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

  RingReport rep;
  rep.n_first = n_first;
  rep.n_last = n_last;
  rep.eps = eps;

  // N0: the smallest n from which every available ring satisfies all three
  // conditions.
  std::vector<RingConditions> all;
  for (int n = lo; n <= hi; ++n) all.push_back(ring_conditions(map, eps, n));
  for (int i = static_cast<int>(all.size()) - 1; i >= 0 && all[static_cast<std::size_t>(i)].all(); --i)
    rep.smallest_valid_n = all[static_cast<std::size_t>(i)].n;
  for (const auto& rc : all) {
    if (rc.n < n_first || rc.n > n_last) continue;
    rep.conditions.push_back(rc);
    if (!rc.separation) rep.precondition_failures.push_back("n=" + std::to_string(rc.n) + ": separation 2r_n < eps r_{n+1} fails");
    if (!rc.lower) rep.precondition_failures.push_back("n=" + std::to_string(rc.n) + ": c 2^n >= 2 fails");
    if (!rc.upper) rep.precondition_failures.push_back("n=" + std::to_string(rc.n) + ": C eps^n <= eps fails");
  }
  rep.preconditions_ok = rep.precondition_failures.empty();
  if (!rep.preconditions_ok) return rep;

  // Draw every sample up front so results do not depend on thread count.
  struct Sample {
    int n;
    Point x;
  };
  std::vector<Sample> samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool radial = map.radial_params() != nullptr;
  for (int n = n_first; n <= n_last; ++n) {
    const Ring ring = square_ring(map, eps, n);
    const double a = ring.inner.log_value(), b = ring.outer.log_value();
    for (int s = 0; s < samples_per_ring; ++s) {
      double t;
      do t = unit(rng);
      while (t == 0.0);
      const LogMag r = LogMag::from_log(a + t * (b - a));
      std::vector<double> dir(static_cast<std::size_t>(map.dimension()));
      if (radial) {
        for (double& d : dir) d = 2.0 * unit(rng) - 1.0;
        const auto axis = static_cast<std::size_t>(rng() % dir.size());
        dir[axis] = unit(rng) < 0.5 ? -1.0 : 1.0;
        samples.push_back({n, Point{dir, r}});
      } else {
        const double th = 2.0 * std::numbers::pi * unit(rng);
        const double rv = r.value();
        const double xy[2] = {rv * std::cos(th), rv * std::sin(th)};
        samples.push_back({n, Point::from_coords(xy)});
      }
    }
  }

  std::vector<std::optional<RingViolation>> found(samples.size());
  const double log_tol = std::log1p(tol);
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto& s = samples[i];
    if (!square_ring(map, eps, s.n).contains(radial ? s.x.radius : s.x.norm(Norm::Euclidean))) return;
    const Ring target = square_ring(map, eps, s.n + 1);
    LogMag img;
    try {
      const Point fx = eval_map(map, s.x);
      img = radial ? fx.radius : fx.norm(Norm::Euclidean);
    } catch (const EscapedBeyondRange& e) {
      img = e.magnitude();
    }
    const LogMag r_in = s.x.norm(radial ? Norm::Maximum : Norm::Euclidean);
    if (radial) {
      if (!(img > target.inner)) found[i] = RingViolation{s.n, r_in, img, "below inner"};
      else if (!(img < target.outer)) found[i] = RingViolation{s.n, r_in, img, "above outer"};
    } else {
      if (img.is_zero() || img.log_value() <= target.inner.log_value() - log_tol)
        found[i] = RingViolation{s.n, r_in, img, "below inner"};
      else if (img.log_value() >= target.outer.log_value() + log_tol)
        found[i] = RingViolation{s.n, r_in, img, "above outer"};
    }
  });
  rep.samples_checked = samples.size();
  for (auto& v : found)
    if (v) rep.violations.push_back(*v);
  return rep;
}

}  // namespace hollow
