#include "hollow/escape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hollow/parallel.hpp"

namespace hollow {

OrbitRecord compute_orbit(const MapFamily& map, const Point& x, int k_max) {
  if (k_max < 1) throw DomainError("compute_orbit: k_max must be >= 1");
  OrbitRecord rec;
  rec.start = x;
  rec.radii.push_back(x.norm(map.norm()));
  Point cur = x;
  for (int k = 1; k <= k_max; ++k) {
    try {
      cur = eval_map(map, cur);
    } catch (const EscapedBeyondRange& e) {
      rec.radii.push_back(e.magnitude());
      rec.truncated = true;
      break;
    }
    rec.radii.push_back(cur.norm(map.norm()));
  }
  rec.k_max = static_cast<int>(rec.radii.size()) - 1;
  return rec;
}

Ladder make_ladder(const MapFamily& map, LogMag base_r, int top) {
  Ladder l;
  l.base_r = base_r;
  l.levels.push_back(base_r);
  if (top >= 1) {
    auto up = iterate_max_modulus(map, base_r, top);
    l.levels.insert(l.levels.end(), up.begin(), up.end());
  }
  return l;
}

std::string to_string(EscapeTag tag) {
  switch (tag) {
    case EscapeTag::FastEscaping: return "FastEscaping";
    case EscapeTag::EscapingUndetermined: return "EscapingUndetermined";
    case EscapeTag::BoundedSoFar: return "BoundedSoFar";
  }
  return "?";
}

EscapeClass classify(const OrbitRecord& orbit, const Ladder& ladder, int ell_max, std::optional<LogMag> bail) {
  if (ell_max < 0) throw DomainError("classify: ell_max must be >= 0");
  const std::size_t need = orbit.radii.size() + static_cast<std::size_t>(ell_max);
  if (ladder.levels.size() < need)
    throw DomainError("classify: ladder too short, need " + std::to_string(need) + " levels, have " +
                      std::to_string(ladder.levels.size()));
  const int km = orbit.k_max;
  EscapeClass out;
  out.evidence_k = km;
  for (int ell = 0; ell <= ell_max; ++ell) {
    if (km - ell < 1) break;
    bool ok = true;
    for (int k = 1; k <= km - ell && ok; ++k)
      ok = orbit.radii[static_cast<std::size_t>(k + ell)] >= ladder.levels[static_cast<std::size_t>(k)];
    if (ok) {
      out.tag = EscapeTag::FastEscaping;
      out.offset = ell;
      return out;
    }
  }
  const LogMag limit = bail ? *bail : ladder.levels.back() * LogMag::from_value(10.0);
  const bool exceeded = std::any_of(orbit.radii.begin(), orbit.radii.end(),
                                    [&](const LogMag& r) { return r > limit; });
  out.tag = exceeded ? EscapeTag::EscapingUndetermined : EscapeTag::BoundedSoFar;
  return out;
}

bool check_apart_hypothesis(const OrbitRecord& orbit_x, const OrbitRecord& orbit_y, const Ladder& ladder,
                            int ell0, int k0) {
  if (ell0 < 0 || k0 < 1) throw DomainError("apart hypothesis: need ell0 >= 0 and k0 >= 1");
  const int km = std::min(orbit_x.k_max, orbit_y.k_max);
  const int k_last = km - ell0;
  if (k_last < k0) throw DomainError("apart hypothesis: orbits too short for k0 and ell0");
  if (k_last > ladder.top()) throw DomainError("apart hypothesis: ladder too short");
  for (int k = k0; k <= k_last; ++k) {
    const auto i = static_cast<std::size_t>(k + ell0);
    const LogMag& lo = ladder.levels[static_cast<std::size_t>(k - 1)];
    const LogMag& hi = ladder.levels[static_cast<std::size_t>(k)];
    if (!(orbit_y.radii[i] <= lo && lo < hi && hi <= orbit_x.radii[i])) return false;
  }
  return true;
}

bool k2_condition_i(double c, const Ladder& ladder, int k) {
  const LogMag& m = ladder.levels[static_cast<std::size_t>(k - 1)];
  if (!(m > LogMag::one())) return false;
  return std::log(m.log_value()) >= 2.0 * k * std::log(c);
}

bool k2_condition_ii(const Ladder& ladder, int k) {
  return ladder.levels[static_cast<std::size_t>(k)].log_value() >=
         2.0 * ladder.levels[static_cast<std::size_t>(k - 1)].log_value();
}

bool k2_condition_iii(double c, int k) {
  // c^{2k} >= c^k + ln 2  <=>  c^k (c^k - 1) >= ln 2, evaluated in logs for
  // large k.
  const double lck = k * std::log(c);
  if (lck > 50.0) return true;
  const double ck = std::exp(lck);
  return ck * ck >= ck + std::log(2.0);
}

K2Result find_k2(double c, const Ladder& ladder) {
  if (!(c > 1.0)) throw DomainError("find_k2: c must exceed 1");
  const int top = ladder.top();
  std::vector<K2Diagnostics> diag;
  for (int k = 1; k <= top; ++k)
    diag.push_back({k, k2_condition_i(c, ladder, k), k2_condition_ii(ladder, k), k2_condition_iii(c, k)});
  int k2 = top + 1;
  while (k2 > 1) {
    const auto& d = diag[static_cast<std::size_t>(k2 - 2)];
    if (!(d.cond_i && d.cond_ii && d.cond_iii)) break;
    --k2;
  }
  if (k2 > top - 1)
    throw LadderExhausted("ladder exhausted before k2 found (top level " + std::to_string(top) + ")",
                          std::move(diag));
  return {k2, std::move(diag)};
}

std::string to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::Diverging: return "diverging";
    case GrowthVerdict::NotDiverging: return "not-diverging";
    case GrowthVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

LogLogReport loglog_growth_report(const Ladder& ladder, double threshold) {
  if (ladder.top() < 3) throw DomainError("loglog growth report needs at least 3 ladder levels above the base");
  LogLogReport rep;
  rep.threshold = threshold;
  for (int k = 1; k <= ladder.top(); ++k) {
    const LogMag& m = ladder.levels[static_cast<std::size_t>(k)];
    if (!(m > LogMag::one())) throw DomainError("ln ln M^k undefined: M^k <= 1 at k = " + std::to_string(k));
    const double v = std::log(m.log_value()) / k;
    rep.ratios.push_back(v);
    if (!rep.first_exceeding_k && v > threshold) rep.first_exceeding_k = k;
  }
  const std::size_t n = rep.ratios.size();
  bool inc = true;
  for (std::size_t i = n / 2; i + 1 < n; ++i) inc = inc && rep.ratios[i + 1] > rep.ratios[i];
  rep.eventually_increasing = inc;
  const bool above = rep.ratios.back() > threshold;
  if (above && inc) rep.verdict = GrowthVerdict::Diverging;
  else if (!above && !inc) rep.verdict = GrowthVerdict::NotDiverging;
  else rep.verdict = GrowthVerdict::Inconclusive;
  return rep;
}

std::vector<EscapeClass> classify_points(const MapFamily& map, std::span<const Point> points,
                                         const Ladder& ladder, int k_max, int ell_max, unsigned threads) {
  std::vector<EscapeClass> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    out[i] = classify(compute_orbit(map, points[i], k_max), ladder, ell_max);
  });
  return out;
}

void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit) {
  os << "k,log_radius,truncated\n";
  char buf[64];
  for (std::size_t k = 0; k < orbit.radii.size(); ++k) {
    const bool flag = orbit.truncated && k + 1 == orbit.radii.size();
    if (orbit.radii[k].is_zero()) std::snprintf(buf, sizeof buf, "-inf");
    else std::snprintf(buf, sizeof buf, "%.17g", orbit.radii[k].log_value());
    os << k << ',' << buf << ',' << (flag ? 1 : 0) << '\n';
  }
}

void write_classification_csv(std::ostream& os, std::span<const Point> points,
                              std::span<const EscapeClass> classes) {
  if (points.empty()) {
    os << "tag,offset,evidence_k\n";
    return;
  }
  const int d = points.front().dimension();
  for (int i = 0; i < d; ++i) os << 'x' << i << ',';
  os << "tag,offset,evidence_k\n";
  char buf[64];
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (double c : points[i].coords()) {
      std::snprintf(buf, sizeof buf, "%.17g", c);
      os << buf << ',';
    }
    const auto& e = classes[i];
    os << to_string(e.tag) << ',' << (e.tag == EscapeTag::FastEscaping ? e.offset : -1) << ',' << e.evidence_k
       << '\n';
  }
}

}  // namespace hollow
