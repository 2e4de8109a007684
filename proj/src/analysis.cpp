#include "hollow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "hollow/parallel.hpp"

namespace hollow {

MuEstimate mu_lower_bound(std::span<const double> a, std::span<const double> b, double dist_a, double dist_b,
                          double c_d) {
  if (!(dist_a > 0.0) || !(dist_b > 0.0)) throw DomainError("mu lower bound needs positive boundary distances");
  if (a.size() != b.size()) throw DomainError("mu lower bound: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  MuEstimate m;
  m.c_d = c_d;
  m.separation = std::sqrt(s);
  m.dist_a = dist_a;
  m.dist_b = dist_b;
  m.value = c_d * std::log1p(m.separation / std::min(dist_a, dist_b));
  return m;
}

double mu_chain_bound(double ki_bound, int k, double mu_start) {
  if (!(ki_bound >= 1.0) || !(mu_start >= 0.0) || k < 0) throw DomainError("mu chain bound: bad arguments");
  return std::pow(ki_bound, k) * mu_start;
}

// ---------------------------------------------------------------------------
// Polar regions

LogMag PolarRegion::hull_inradius() const {
  // Gaps between annuli are bounded complementary components, so the hull
  // is the ball bounded by the outermost sphere.
  return annuli.empty() ? LogMag::zero() : annuli.back().outer;
}

LogMag PolarRegion::inner_radius() const {
  if (annuli.empty() || annuli.front().includes_origin) return LogMag::zero();
  return annuli.front().inner;
}

std::optional<PolarRegion> extract_polar_region(const CellMask& mask) {
  const GridSpec& g = mask.grid();
  const double h = g.spacing;
  for (int a = 0; a < g.dimension; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (std::fabs(g.origin[ua] + 0.5 * (g.extents[ua] - 1) * h) > 1e-9 * h) return std::nullopt;
  }
  // Shell index: max-norm radius of the centre in units of h/2 (integral on
  // an origin-centred grid whose extents share parity).
  std::map<long long, int> shell_state;  // 0 = out, 1 = in, 2 = mixed
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto c = g.center(i);
    double m = 0.0;
    for (int a = 0; a < g.dimension; ++a) m = std::max(m, std::fabs(c[static_cast<std::size_t>(a)]));
    const long long key = std::llround(2.0 * m / h);
    const int v = mask.test(i) ? 1 : 0;
    auto [it, fresh] = shell_state.emplace(key, v);
    if (!fresh && it->second != v) return std::nullopt;
  }
  // Shells must be complete cubes: the largest shell fully inside the grid.
  long long complete = std::numeric_limits<long long>::max();
  for (int a = 0; a < g.dimension; ++a)
    complete = std::min<long long>(complete, g.extents[static_cast<std::size_t>(a)] - 1);
  PolarRegion reg;
  std::optional<long long> run_start;
  long long prev = -1;
  auto close_run = [&](long long last) {
    Annulus an;
    const double lo = 0.5 * h * static_cast<double>(run_start.value_or(0)) - 0.5 * h;
    an.includes_origin = lo <= 0.0;
    an.inner = an.includes_origin ? LogMag::zero() : LogMag::from_value(lo);
    an.outer = LogMag::from_value(0.5 * h * static_cast<double>(last) + 0.5 * h);
    reg.annuli.push_back(an);
    run_start.reset();
  };
  const long long step = 2;  // consecutive shells differ by h
  for (const auto& [key, state] : shell_state) {
    if (key > complete) {
      if (state == 1) return std::nullopt;
      continue;
    }
    if (state == 1) {
      if (run_start && key != prev + step) close_run(prev);
      if (!run_start) run_start = key;
      prev = key;
    } else if (run_start) {
      close_run(prev);
    }
  }
  if (run_start) close_run(prev);
  return reg;
}

PolarRegion image_region(const MapFamily& map, const PolarRegion& region, int j) {
  const auto* rm = map.radial_params();
  if (!rm) throw DomainError("exact region imaging is available for the radial model only");
  PolarRegion out = region;
  for (auto& an : out.annuli) {
    for (int s = 0; s < j; ++s) {
      if (!an.inner.is_zero()) an.inner = radial_profile_eval(rm->profile, an.inner);
      an.outer = radial_profile_eval(rm->profile, an.outer);
    }
  }
  return out;
}

std::vector<CellMask> rasterize_warped(int dimension, std::span<const PolarRegion> regions,
                                       std::span<const LogMag> ball_radii) {
  std::vector<LogMag> breaks;
  for (const auto& r : regions)
    for (const auto& an : r.annuli) {
      if (!an.inner.is_zero()) breaks.push_back(an.inner);
      breaks.push_back(an.outer);
    }
  for (const auto& b : ball_radii)
    if (!b.is_zero()) breaks.push_back(b);
  auto less = [](const LogMag& a, const LogMag& b) { return a < b; };
  std::sort(breaks.begin(), breaks.end(), less);
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto rank = [&](const LogMag& v) -> int {
    if (v.is_zero()) return 0;
    return 1 + static_cast<int>(std::lower_bound(breaks.begin(), breaks.end(), v, less) - breaks.begin());
  };

  const int dd = std::min(3, std::max(2, dimension));
  const int half = 2 * static_cast<int>(breaks.size()) + 1;
  const int ext = 2 * half + 1;
  GridSpec g = dd == 2 ? GridSpec::make2({-half * 1.0, -half * 1.0}, 1.0, {ext, ext})
                       : GridSpec::make3({-half * 1.0, -half * 1.0, -half * 1.0}, 1.0, {ext, ext, ext});
  std::vector<int> warped(g.cell_count());
  for (std::size_t i = 0; i < warped.size(); ++i) {
    const auto c = g.cell(i);
    int w = 0;
    for (int a = 0; a < dd; ++a) w = std::max(w, std::abs(c[static_cast<std::size_t>(a)] - half));
    warped[i] = w;
  }

  std::vector<CellMask> out;
  for (const auto& r : regions) {
    CellMask m(g);
    for (const auto& an : r.annuli) {
      const int lo = an.includes_origin ? -1 : 2 * rank(an.inner);
      const int hi = 2 * rank(an.outer);
      for (std::size_t i = 0; i < warped.size(); ++i)
        if (warped[i] > lo && warped[i] < hi) m.set(i);
    }
    out.push_back(std::move(m));
  }
  for (const auto& b : ball_radii) {
    CellMask m(g);
    const int hi = 2 * rank(b);
    for (std::size_t i = 0; i < warped.size(); ++i)
      if (warped[i] < hi) m.set(i);
    out.push_back(std::move(m));
  }
  return out;
}

CellMask square_annulus_mask(int dimension, double spacing, int half_cells, double inner, double outer) {
  const int ext = 2 * half_cells + 1;
  const double o = -half_cells * spacing;
  GridSpec g = dimension == 2 ? GridSpec::make2({o, o}, spacing, {ext, ext})
                              : GridSpec::make3({o, o, o}, spacing, {ext, ext, ext});
  CellMask m(g);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto c = g.center(i);
    double r = 0.0;
    for (int a = 0; a < dimension; ++a) r = std::max(r, std::fabs(c[static_cast<std::size_t>(a)]));
    if (r > inner && r < outer) m.set(i);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Plain-scale imaging for maps without exact region images.

namespace {

Point cell_point(const GridSpec& g, std::size_t i) {
  const auto c = g.center(i);
  return Point::from_coords(std::span<const double>(c.data(), static_cast<std::size_t>(g.dimension)));
}

// Images of a point set under f^j, j = 0..steps; nullopt once a point leaves
// plain-scale range.
std::vector<std::vector<std::optional<Point>>> iterate_points(const MapFamily& map, const std::vector<Point>& pts,
                                                              int steps, unsigned threads) {
  std::vector<std::vector<std::optional<Point>>> out(static_cast<std::size_t>(steps) + 1,
                                                     std::vector<std::optional<Point>>(pts.size()));
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    std::optional<Point> cur = pts[i];
    out[0][i] = cur;
    for (int j = 1; j <= steps; ++j) {
      if (cur) {
        try {
          cur = eval_map(map, *cur);
        } catch (const EscapedBeyondRange&) {
          cur.reset();
        }
      }
      out[static_cast<std::size_t>(j)][i] = cur;
    }
  });
  return out;
}

// Rasterises image points on `g` and closes one-cell gaps by a face
// dilation. Returns nullopt if a point falls on or outside the border.
std::optional<CellMask> rasterize_points(const GridSpec& g, const std::vector<std::optional<Point>>& pts) {
  CellMask m(g);
  for (const auto& p : pts) {
    if (!p) return std::nullopt;
    const auto x = p->coords();
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < g.dimension; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double t = (x[ua] - g.origin[ua]) / g.spacing;
      if (!(t > 0.5 && t < g.extents[ua] - 1.5)) return std::nullopt;
      c[ua] = static_cast<int>(std::lround(t));
    }
    m.set(g.index(c[0], c[1], c[2]));
  }
  CellMask d = m;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m.test(i) || g.on_border(i)) continue;
    const auto c = g.cell(i);
    for (int a = 0; a < g.dimension; ++a) {
      auto lo = c, hi = c;
      lo[static_cast<std::size_t>(a)]--;
      hi[static_cast<std::size_t>(a)]++;
      d.set(g.index(lo[0], lo[1], lo[2]));
      d.set(g.index(hi[0], hi[1], hi[2]));
    }
  }
  return d;
}

double euclid_dist_to_cube(std::span<const double> x, double half_side) {
  double s = 0.0;
  for (double c : x) {
    const double e = std::max(0.0, std::fabs(c) - half_side);
    s += e * e;
  }
  return std::sqrt(s);
}

// Euclidean distance from a point of the region to its boundary.
double boundary_distance(const CellMask& mask, const std::optional<PolarRegion>& region, std::size_t cell) {
  const GridSpec& g = mask.grid();
  const auto c = g.center(cell);
  const std::span<const double> x(c.data(), static_cast<std::size_t>(g.dimension));
  if (region) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    for (const auto& an : region->annuli) {
      const double lo = an.inner.value(), hi = an.outer.value();
      if (m < hi && (an.includes_origin || m > lo)) {
        double d = hi - m;
        if (!an.includes_origin) d = std::min(d, euclid_dist_to_cube(x, lo));
        return d;
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask.test(j)) continue;
    const auto cj = g.center(j);
    double s = 0.0;
    for (int a = 0; a < g.dimension; ++a) s += (cj[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)]) *
                                              (cj[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)]);
    best = std::min(best, std::sqrt(s));
  }
  return std::isfinite(best) ? std::max(best - 0.5 * g.spacing, 0.5 * g.spacing) : 0.5 * g.spacing;
}

GridSpec working_grid(int dimension, double radius) {
  const int half = dimension == 2 ? 96 : 24;
  const int ext = 2 * half + 1;
  const double h = radius / (half - 2);
  const double o = -half * h;
  return dimension == 2 ? GridSpec::make2({o, o}, h, {ext, ext}) : GridSpec::make3({o, o, o}, h, {ext, ext, ext});
}

}  // namespace

// ---------------------------------------------------------------------------
// Engulfing certificate

CertificateReport certify_engulfing(const MapFamily& map, const CellMask& g_mask, LogMag base_r,
                                    const CertifyOptions& opt) {
  if (g_mask.empty()) throw DomainError("certify_engulfing: G is empty");
  if (g_mask.grid().dimension != map.dimension()) throw DomainError("certify_engulfing: grid and map dimension differ");
  if (opt.k_max < 1 || opt.ell_max < 0 || opt.ell0 < 0 || opt.k0 < 1)
    throw DomainError("certify_engulfing: bad iteration bounds");

  CertificateReport rep;
  rep.c = opt.c.value_or(2.0 * map.ki_bound());
  if (!(rep.c > map.ki_bound()) || !(rep.c > 1.0)) throw DomainError("certify_engulfing: c must exceed K_I(f) and 1");
  rep.k_first = 1;
  rep.k_last = opt.k_max;
  rep.ki_power_used = dilatation_power_bound(map, opt.k_max + opt.ell0);

  const int orbit_len = opt.k_max + opt.ell0;
  const int top = std::max(orbit_len + opt.ell_max + 4, 12);
  const Ladder ladder = make_ladder(map, base_r, top);

  try {
    rep.k2 = find_k2(rep.c, ladder).k2;
  } catch (const LadderExhausted& e) {
    rep.failures.emplace_back(0, std::string("k2: ") + e.what());
  }

  // Witnesses.
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < g_mask.size(); ++i)
    if (g_mask.test(i)) cells.push_back(i);
  std::vector<OrbitRecord> orbits(cells.size());
  std::vector<EscapeClass> classes(cells.size());
  parallel_for(cells.size(), opt.threads, [&](std::size_t i) {
    orbits[i] = compute_orbit(map, cell_point(g_mask.grid(), cells[i]), orbit_len);
    classes[i] = classify(orbits[i], ladder, opt.ell_max);
  });
  std::optional<std::size_t> bx, by;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (classes[i].tag == EscapeTag::FastEscaping) {
      if (!bx || classes[i].offset < classes[*bx].offset ||
          (classes[i].offset == classes[*bx].offset && orbits[i].radii.back() > orbits[*bx].radii.back()))
        bx = i;
    }
    if (!by || orbits[i].radii.back() < orbits[*by].radii.back()) by = i;
  }
  const auto region = map.radial_params() ? extract_polar_region(g_mask) : std::nullopt;
  if (bx && by && *bx != *by && orbits[*bx].k_max == orbits[*by].k_max &&
      orbits[*bx].k_max - opt.ell0 >= opt.k0) {
    rep.witness_x = cells[*bx];
    rep.witness_y = cells[*by];
    rep.hypothesis_ok = check_apart_hypothesis(orbits[*bx], orbits[*by], ladder, opt.ell0, opt.k0);
    const auto cx = g_mask.grid().center(cells[*bx]);
    const auto cy = g_mask.grid().center(cells[*by]);
    const auto d = static_cast<std::size_t>(map.dimension());
    rep.witness_mu = mu_lower_bound(std::span<const double>(cx.data(), d), std::span<const double>(cy.data(), d),
                                    boundary_distance(g_mask, region, cells[*bx]),
                                    boundary_distance(g_mask, region, cells[*by]), opt.c_d);
  }
  if (!rep.hypothesis_ok) {
    rep.failures.emplace_back(0, bx ? (by && *by != *bx ? "separation hypothesis fails for the chosen witnesses"
                                                        : "no slow witness y in G")
                                    : "no fast-escaping witness x in G");
    return rep;
  }

  const int n_ell = opt.ell_max + 1;
  rep.checks.resize(static_cast<std::size_t>(n_ell * opt.k_max));
  if (region) {
    parallel_for(rep.checks.size(), opt.threads, [&](std::size_t idx) {
      const int ell = static_cast<int>(idx) / opt.k_max;
      const int k = static_cast<int>(idx) % opt.k_max + 1;
      const PolarRegion img = image_region(map, *region, k + ell);
      const LogMag level = ladder.levels[static_cast<std::size_t>(k)];
      const bool scalar = img.hull_inradius() >= level;
      const PolarRegion regs[] = {img};
      const LogMag balls[] = {level};
      const auto masks = rasterize_warped(map.dimension(), regs, balls);
      const bool grid = masks[1].subset_of(topological_hull(masks[0]));
      rep.checks[idx] = {ell, k, grid, scalar};
    });
  } else {
    rep.approximate = true;
    std::vector<Point> pts;
    for (std::size_t c : cells) pts.push_back(cell_point(g_mask.grid(), c));
    const auto images = iterate_points(map, pts, opt.k_max + opt.ell_max, opt.threads);
    for (std::size_t idx = 0; idx < rep.checks.size(); ++idx) {
      const int ell = static_cast<int>(idx) / opt.k_max;
      const int k = static_cast<int>(idx) % opt.k_max + 1;
      const auto& img = images[static_cast<std::size_t>(k + ell)];
      const LogMag level = ladder.levels[static_cast<std::size_t>(k)];
      bool ok = false;
      LogMag far = level;
      bool finite = level.representable() && level.value() < kPlainScaleLimit;
      for (const auto& p : img) {
        if (!p) finite = false;
        else far = std::max(far, p->radius, [](const LogMag& a, const LogMag& b) { return a < b; });
      }
      if (finite && far.value() < kPlainScaleLimit) {
        const GridSpec wg = working_grid(map.dimension(), 1.05 * far.value());
        if (auto m = rasterize_points(wg, img)) {
          CellMask ball(wg);
          for (std::size_t i = 0; i < ball.size(); ++i) {
            const auto c = wg.center(i);
            double r = 0.0;
            for (int a = 0; a < wg.dimension; ++a) r = std::max(r, std::fabs(c[static_cast<std::size_t>(a)]));
            if (r < level.value()) ball.set(i);
          }
          ok = ball.subset_of(topological_hull(*m));
        }
      } else {
        rep.failures.emplace_back(k, "image beyond plain-scale range at ell=" + std::to_string(ell));
      }
      rep.checks[idx] = {ell, k, ok, ok};
    }
  }

  for (int ell = 0; ell < n_ell && !rep.ell; ++ell) {
    bool all = true;
    for (int k = 1; k <= opt.k_max; ++k) {
      const auto& ch = rep.checks[static_cast<std::size_t>(ell * opt.k_max + k - 1)];
      all = all && ch.grid_verdict && ch.scalar_verdict;
    }
    if (all) rep.ell = ell;
  }
  for (const auto& ch : rep.checks)
    if (ch.grid_verdict != ch.scalar_verdict)
      rep.failures.emplace_back(ch.k, "grid and scalar verdicts disagree at ell=" + std::to_string(ch.ell));
  if (!rep.ell)
    for (const auto& ch : rep.checks)
      if (ch.ell == opt.ell_max && !(ch.grid_verdict && ch.scalar_verdict))
        rep.failures.emplace_back(ch.k, "ball not engulfed at ell=" + std::to_string(ch.ell));

  if (rep.k2 && region) {
    const int hi = std::min(std::max(opt.k_max, *rep.k2 + 2), ladder.top());
    for (int k = *rep.k2; k <= hi; ++k) {
      const LogMag d = image_region(map, *region, k + opt.ell0).hull_inradius();
      const LogMag level = ladder.levels[static_cast<std::size_t>(k - 1)];
      rep.claims.push_back({k, d, level, d >= level});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Wandering rings

namespace {

// Overlapping sets do not surround each other.
bool surrounds_disjoint(const CellMask& u, const CellMask& v) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.test(i) && v.test(i)) return false;
  return surrounds(u, v);
}

}  // namespace

WanderingReport check_wandering_rings(const MapFamily& map, const CellMask& u0_mask, int k_max, LogMag base_r,
                                      const WanderingOptions& opt) {
  if (k_max < 1) throw DomainError("check_wandering_rings: k_max must be >= 1");
  if (u0_mask.empty()) throw DomainError("check_wandering_rings: U0 is empty");
  if (u0_mask.grid().dimension != map.dimension()) throw DomainError("check_wandering_rings: dimension mismatch");
  const RegionLabeling lab0 = label_components(u0_mask);
  for (int c = 0; c < lab0.mask_components(); ++c)
    if (lab0.mask_touches_border[static_cast<std::size_t>(c)])
      throw DomainError("check_wandering_rings: U0 touches the grid border (not bounded)");

  WanderingReport rep;
  if (lab0.mask_components() != 1) {
    rep.applicable = false;
    rep.inapplicable_reason = "U0 is not connected";
    return rep;
  }
  if (is_full(lab0, 0)) {
    rep.applicable = false;
    rep.inapplicable_reason = "U0 is full; the experiment needs a hollow region";
    return rep;
  }

  const auto region = map.radial_params() ? extract_polar_region(u0_mask) : std::nullopt;
  rep.steps.resize(static_cast<std::size_t>(k_max) + 1);
  if (region) {
    std::vector<PolarRegion> imgs;
    for (int k = 0; k <= k_max; ++k) imgs.push_back(image_region(map, *region, k));
    parallel_for(imgs.size(), opt.threads, [&](std::size_t uk) {
      const int k = static_cast<int>(uk);
      WanderingStep st;
      st.k = k;
      st.ring = imgs[uk].annuli.front();
      std::vector<PolarRegion> regs{imgs[uk]};
      if (k >= 1) regs.push_back(imgs[uk - 1]);
      if (k >= 2) regs.push_back(imgs[uk - 2]);
      const auto masks = rasterize_warped(map.dimension(), regs);
      const RegionLabeling lab = label_components(masks[0]);
      st.bounded = lab.mask_components() == 1 && !lab.mask_touches_border[0];
      st.hollow = lab.mask_components() == 1 && !is_full(lab, 0);
      if (k >= 1) {
        st.surrounds_previous = surrounds_disjoint(masks[0], masks[1]);
        st.distance_increasing = imgs[uk].inner_radius() > imgs[uk - 1].inner_radius();
      }
      if (k >= 2) st.surrounds_two_back = surrounds_disjoint(masks[0], masks[2]);
      rep.steps[uk] = st;
    });
  } else {
    rep.approximate = true;
    const GridSpec& g = u0_mask.grid();
    std::vector<Point> pts;
    for (std::size_t i = 0; i < u0_mask.size(); ++i)
      if (u0_mask.test(i)) pts.push_back(cell_point(g, i));
    const auto images = iterate_points(map, pts, k_max, opt.threads);
    std::vector<CellMask> masks;
    for (int k = 0; k <= k_max; ++k) {
      auto m = k == 0 ? std::optional<CellMask>(u0_mask) : rasterize_points(g, images[static_cast<std::size_t>(k)]);
      if (!m) {
        LogMag far;
        for (const auto& p : images[static_cast<std::size_t>(k)])
          if (p) far = std::max(far, p->radius, [](const LogMag& a, const LogMag& b) { return a < b; });
        throw DomainError("box too small: U_" + std::to_string(k) + " needs a half-extent of at least " +
                          std::to_string(far.value()));
      }
      masks.push_back(std::move(*m));
    }
    for (int k = 0; k <= k_max; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      WanderingStep st;
      st.k = k;
      const RegionLabeling lab = label_components(masks[uk]);
      st.bounded = lab.mask_components() >= 1 &&
                   std::none_of(lab.mask_touches_border.begin(), lab.mask_touches_border.end(), [](bool b) { return b; });
      st.hollow = lab.mask_components() == 1 && !is_full(lab, 0);
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& p : images[uk]) dmin = std::min(dmin, p->norm(Norm::Maximum).value());
      st.ring = {LogMag::from_value(dmin), LogMag::zero(), false};
      if (k >= 1) {
        st.surrounds_previous = surrounds_disjoint(masks[uk], masks[uk - 1]);
        st.distance_increasing = st.ring.inner > rep.steps[uk - 1].ring.inner;
      }
      if (k >= 2) st.surrounds_two_back = surrounds_disjoint(masks[uk], masks[uk - 2]);
      rep.steps[uk] = st;
    }
  }

  for (int k = k_max; k >= 0 && rep.steps[static_cast<std::size_t>(k)].passed(); --k) rep.k_first_pass = k;
  for (const auto& st : rep.steps) {
    if (!st.bounded) rep.failures.push_back("U_" + std::to_string(st.k) + " not bounded");
    if (!st.hollow) rep.failures.push_back("U_" + std::to_string(st.k) + " not hollow");
    if (!st.surrounds_previous) rep.failures.push_back("U_" + std::to_string(st.k) + " does not surround U_" + std::to_string(st.k - 1));
    if (!st.surrounds_two_back) rep.failures.push_back("U_" + std::to_string(st.k) + " does not surround U_" + std::to_string(st.k - 2));
    if (!st.distance_increasing) rep.failures.push_back("dist(0,U_" + std::to_string(st.k) + ") did not increase");
  }

  // Closure of U_l inside A_R(f): sampled points, endpoints included.
  if (region) {
    const Ladder ladder = make_ladder(map, base_r, opt.classify_k + 1 + opt.ell_max);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int ell = 0; ell <= opt.ell_max && !rep.closure_ell; ++ell) {
      const Annulus an = image_region(map, *region, ell).annuli.front();
      const double a = an.includes_origin ? an.outer.log_value() - 30.0 : an.inner.log_value();
      const double b = an.outer.log_value();
      std::vector<Point> pts;
      const int ns = std::max(2, opt.closure_samples);
      for (int s = 0; s < ns; ++s) {
        const double t = s == 0 ? 0.0 : (s == 1 ? 1.0 : unit(rng));
        std::vector<double> dir(static_cast<std::size_t>(map.dimension()));
        for (double& d : dir) d = 2.0 * unit(rng) - 1.0;
        dir[static_cast<std::size_t>(rng() % dir.size())] = 1.0;
        pts.push_back(Point{dir, LogMag::from_log(a + t * (b - a))});
      }
      const auto cls = classify_points(map, pts, ladder, opt.classify_k, 0, opt.threads);
      rep.closure_samples += pts.size();
      const bool all = std::all_of(cls.begin(), cls.end(), [](const EscapeClass& c) {
        return c.tag == EscapeTag::FastEscaping && c.offset == 0;
      });
      if (all) rep.closure_ell = ell;
    }
    if (!rep.closure_ell) rep.failures.push_back("no l <= ell_max with closure(U_l) in A_R(f)");
  }
  return rep;
}

}  // namespace hollow
