#pragma once

// Evaluatable map families on R^d and their maximum modulus.
//
// RadialModel is f(x) = g(|x|_inf) x / |x|_inf with g(r) = r on [0,1] and
// g(r) = L(r) for r >= 1. It reproduces the growth envelope
// c L(|x|) < |f(x)| < C L(|x|) with c = C = 1 and no exceptional set, but it
// is a homeomorphism: a model of modulus dynamics only, not a map of
// transcendental type.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hollow/error.hpp"
#include "hollow/loggrowth.hpp"

namespace hollow {

enum class Norm { Maximum, Euclidean };

/// A point of R^d in polar form: a direction of maximum norm 1 (all zeros
/// for the origin) and the maximum-norm radius.
struct Point {
  std::vector<double> direction;
  LogMag radius;

  int dimension() const { return static_cast<int>(direction.size()); }
  /// Throws DomainError when the radius is not plain-scale representable.
  std::vector<double> coords() const;
  /// |x| in the requested norm.
  LogMag norm(Norm n) const;

  static Point from_coords(std::span<const double> coords);
  static Point polar(std::vector<double> direction, LogMag radius);
};

/// Raised when an image leaves the plain-scale range of a non-radial map.
class EscapedBeyondRange : public Error {
 public:
  EscapedBeyondRange(const std::string& what, LogMag magnitude)
      : Error(what), magnitude_(magnitude) {}
  /// Best available magnitude of the image in the map's norm.
  LogMag magnitude() const { return magnitude_; }

 private:
  LogMag magnitude_;
};

/// Plain-scale coordinates above this switch orbits to truncated log form.
inline constexpr double kPlainScaleLimit = 1e300;

struct RadialModel {
  GrowthProfile profile;
};

/// f(z) = c z^2 prod_k (1 + z / a_k) on C = R^2.
struct EntireProduct {
  double c = 1.0;
  std::vector<double> roots;  // positive, increasing
};

/// f(x) = e^{x_3} h(x_1, x_2); h sends the square [-1,1]^2 onto the upper
/// unit hemisphere and is extended to the plane by reflections.
struct Zorich {};

enum class MapKind { RadialModel, EntireProduct, Zorich };

struct MaxModulusMode {
  bool exact = true;
  int n_samples = 0;

  static MaxModulusMode Exact() { return {true, 0}; }
  static MaxModulusMode Sampled(int n) { return {false, n}; }
};

class MapFamily {
 public:
  static MapFamily radial(GrowthProfile profile, int dimension, double ki_bound = 1.0);
  static MapFamily entire_product(double c, std::vector<double> roots, double ki_bound = 1.0,
                                  int n_samples = 256);
  static MapFamily zorich(double ki_bound, int n_samples = 512);

  int dimension() const { return dimension_; }
  double ki_bound() const { return ki_bound_; }
  MapKind kind() const;
  MaxModulusMode max_modulus_mode() const { return mode_; }
  Norm norm() const { return norm_; }

  MapFamily with_mode(MaxModulusMode mode) const;
  MapFamily with_norm(Norm norm) const;

  const RadialModel* radial_params() const { return std::get_if<RadialModel>(&params_); }
  const EntireProduct* entire_params() const { return std::get_if<EntireProduct>(&params_); }

 private:
  int dimension_ = 2;
  double ki_bound_ = 1.0;
  std::variant<RadialModel, EntireProduct, Zorich> params_;
  MaxModulusMode mode_;
  Norm norm_ = Norm::Maximum;
};

std::string to_string(MapKind kind);

/// g(r): identity on [0,1], L(r) beyond.
LogMag radial_profile_eval(const GrowthProfile& profile, LogMag r);

/// f(x). Non-radial maps throw EscapedBeyondRange once a coordinate of the
/// image would exceed kPlainScaleLimit.
Point eval_map(const MapFamily& map, const Point& x);

struct MaxModulus {
  LogMag value;
  bool sampled = false;
};

/// M(r, f) in the map's norm. Exact mode is available for the RadialModel
/// only; Sampled mode is a lower estimate over a nested quasi-uniform set.
MaxModulus max_modulus(const MapFamily& map, LogMag r);

/// The first n points (on the unit sphere of `norm`) of a fixed nested
/// low-discrepancy sequence.
std::vector<std::vector<double>> sphere_samples(int dimension, int n, Norm norm);

/// [M^1(r), ..., M^k(r)], strictly increasing. Throws DomainError with
/// "below escape threshold" when M(r) <= r.
std::vector<LogMag> iterate_max_modulus(const MapFamily& map, LogMag r, int k);

/// Certified upper bound ki_bound^k for K_I(f^k).
LogMag dilatation_power_bound(const MapFamily& map, int k);

// ---------------------------------------------------------------------------
// Ring containment f(A_n) subset A_{n+1}.

struct Ring {
  LogMag inner;
  LogMag outer;
  /// Open ring: inner < |x| < outer.
  bool contains(LogMag r) const { return inner < r && r < outer; }
};

/// RadialModel: A_n = {2 r_n < |x|_inf < eps r_{n+1}}.
/// EntireProduct: A_n = {a_n / eps < |z| < eps a_{n+1}} (roots 1-indexed).
Ring square_ring(const MapFamily& map, double eps, int n);

struct RingConditions {
  int n;
  bool separation;  // 2 r_n < eps r_{n+1}  (inner < outer for EntireProduct)
  bool lower;       // c 2^n >= 2
  bool upper;       // C eps^n <= eps
  bool all() const { return separation && lower && upper; }
};

struct RingViolation {
  int n;
  LogMag radius;
  LogMag image;
  std::string which;  // "below inner" / "above outer"
};

struct RingReport {
  int n_first = 0;
  int n_last = 0;
  double eps = 0.0;
  std::optional<int> smallest_valid_n;  // N0 over the available range
  std::vector<RingConditions> conditions;
  bool preconditions_ok = true;
  std::vector<std::string> precondition_failures;
  std::size_t samples_checked = 0;
  std::vector<RingViolation> violations;
};

/// Samples points of A_n for n in [n_first, n_last] and checks
/// A_{n+1}.inner < |f(x)| < A_{n+1}.outer. RadialModel comparisons are exact
/// log-scale; EntireProduct uses relative tolerance `tol`.
RingReport verify_ring_containment(const MapFamily& map, double eps, int n_first, int n_last,
                                   int samples_per_ring, std::uint64_t seed, double tol = 1e-6,
                                   unsigned threads = 1);

}  // namespace hollow
