#pragma once

// Orbits, the maximum-modulus ladder M^k(R, f), and classification into the
// fast escaping set A(f) = {x : |f^{k+l}(x)| >= M^k(R,f) for all k, some l}.
//
// All verdicts are relative to the finite number of iterates computed; the
// class names say "SoFar" / "Undetermined" for that reason.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hollow/maps.hpp"

namespace hollow {

struct OrbitRecord {
  Point start;
  std::vector<LogMag> radii;  // |f^k(x)|, k = 0..k_max
  int k_max = 0;
  bool truncated = false;     // the last entry escaped the plain-scale range
};

/// Iterates up to k_max times. Non-radial maps stop early (truncated = true)
/// once an image leaves plain-scale range.
OrbitRecord compute_orbit(const MapFamily& map, const Point& x, int k_max);

/// levels[k] = M^k(base_r, f) for k = 0..K (levels[0] = base_r).
struct Ladder {
  LogMag base_r;
  std::vector<LogMag> levels;

  int top() const { return static_cast<int>(levels.size()) - 1; }
};

/// Ladder with levels M^0 .. M^top.
Ladder make_ladder(const MapFamily& map, LogMag base_r, int top);

enum class EscapeTag { FastEscaping, EscapingUndetermined, BoundedSoFar };

struct EscapeClass {
  EscapeTag tag = EscapeTag::BoundedSoFar;
  int offset = 0;  // l, meaningful for FastEscaping
  int evidence_k = 0;

  friend bool operator==(const EscapeClass&, const EscapeClass&) = default;
};

std::string to_string(EscapeTag tag);

/// Smallest l <= ell_max with radii[k+l] >= M^k(base_r) for 1 <= k <= k_max - l.
/// Otherwise EscapingUndetermined if some radius exceeds `bail` (default
/// 10 x top ladder level), else BoundedSoFar. The ladder must have at least
/// orbit length + ell_max levels.
EscapeClass classify(const OrbitRecord& orbit, const Ladder& ladder, int ell_max,
                     std::optional<LogMag> bail = std::nullopt);

/// |f^{k+l0}(y)| <= M^{k-1}(r) < M^k(r) <= |f^{k+l0}(x)| for every k in
/// [k0, min(k_max) - l0].
bool check_apart_hypothesis(const OrbitRecord& orbit_x, const OrbitRecord& orbit_y, const Ladder& ladder,
                            int ell0, int k0);

struct K2Diagnostics {
  int k;
  bool cond_i;    // ln ln M^{k-1} >= 2k ln c
  bool cond_ii;   // ln M^k >= 2 ln M^{k-1}
  bool cond_iii;  // c^{2k} >= c^k + ln 2
};

class LadderExhausted : public Error {
 public:
  LadderExhausted(const std::string& what, std::vector<K2Diagnostics> diag)
      : Error(what), diagnostics(std::move(diag)) {}
  std::vector<K2Diagnostics> diagnostics;
};

struct K2Result {
  int k2;
  std::vector<K2Diagnostics> diagnostics;  // one row per k = 1..top
};

/// Least k2 such that (i)-(iii) hold for every k in [k2, top], with at least
/// two confirming indices. Throws LadderExhausted otherwise.
K2Result find_k2(double c, const Ladder& ladder);

/// Single-condition checks, exposed for tests and reports.
bool k2_condition_i(double c, const Ladder& ladder, int k);
bool k2_condition_ii(const Ladder& ladder, int k);
bool k2_condition_iii(double c, int k);

enum class GrowthVerdict { Diverging, NotDiverging, Inconclusive };

struct LogLogReport {
  std::vector<double> ratios;  // ln ln M^k / k, k = 1..top
  double threshold = 1.0;
  std::optional<int> first_exceeding_k;
  bool eventually_increasing = false;
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
};

std::string to_string(GrowthVerdict v);

/// ln ln M^k / k over the ladder. Diverging when the last ratio exceeds the
/// threshold and the tail (second half of the range) increases strictly;
/// NotDiverging when the last ratio is below the threshold and the tail does
/// not increase; Inconclusive otherwise.
LogLogReport loglog_growth_report(const Ladder& ladder, double threshold = 1.0);

/// Classifies every point; output order follows input order for any thread
/// count.
std::vector<EscapeClass> classify_points(const MapFamily& map, std::span<const Point> points,
                                         const Ladder& ladder, int k_max, int ell_max, unsigned threads);

/// "k,log_radius,truncated" rows.
void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit);
/// "x0,...,x{d-1},tag,offset,evidence_k" rows.
void write_classification_csv(std::ostream& os, std::span<const Point> points,
                              std::span<const EscapeClass> classes);

}  // namespace hollow
