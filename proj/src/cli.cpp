#include "hollow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hollow/analysis.hpp"
#include "hollow/escape.hpp"
#include "hollow/loggrowth.hpp"
#include "hollow/parallel.hpp"

#ifndef HOLLOW_VERSION
#define HOLLOW_VERSION "0.0.0"
#endif

namespace hollow {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

const char* version_string() { return "hollowlab " HOLLOW_VERSION; }

// ---------------------------------------------------------------------------
// Config fields

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected a real number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + f(xs[i]);
  return s;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field dbl(const char* key, double RunConfig::*m) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
          [=](const RunConfig& c) { return fmt_double(c.*m); }};
}

Field integer(const char* key, int RunConfig::*m) {
  return {key,
          [=](RunConfig& c, const std::string& v) {
            const long long x = parse_int(key, v);
            if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(std::string("config field '") + key + "': out of range");
            c.*m = static_cast<int>(x);
          },
          [=](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field u64(const char* key, std::uint64_t RunConfig::*m) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*m = parse_u64(key, v); },
          [=](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field str(const char* key, std::string RunConfig::*m) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*m = v; }, [=](const RunConfig& c) { return c.*m; }};
}

Field dbl_list(const char* key, std::vector<double> RunConfig::*m) {
  return {key,
          [=](RunConfig& c, const std::string& v) {
            std::vector<double> xs;
            for (const auto& s : split_list(v)) xs.push_back(parse_double(key, s));
            c.*m = std::move(xs);
          },
          [=](const RunConfig& c) { return join(c.*m, fmt_double); }};
}

Field int_list(const char* key, std::vector<int> RunConfig::*m) {
  return {key,
          [=](RunConfig& c, const std::string& v) {
            std::vector<int> xs;
            for (const auto& s : split_list(v)) xs.push_back(static_cast<int>(parse_int(key, s)));
            c.*m = std::move(xs);
          },
          [=](const RunConfig& c) { return join(c.*m, [](int x) { return std::to_string(x); }); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      str("map", &RunConfig::map),
      integer("dimension", &RunConfig::dimension),
      dbl("ki_bound", &RunConfig::ki_bound),
      str("norm", &RunConfig::norm),
      integer("n0", &RunConfig::n0),
      dbl("r_prime", &RunConfig::r_prime),
      dbl("epsilon", &RunConfig::epsilon),
      integer("knots", &RunConfig::knots),
      str("profile_in", &RunConfig::profile_in),
      dbl("entire_c", &RunConfig::entire_c),
      dbl_list("entire_roots", &RunConfig::entire_roots),
      integer("mm_samples", &RunConfig::mm_samples),
      dbl("base_r", &RunConfig::base_r),
      integer("k_max", &RunConfig::k_max),
      integer("ell_max", &RunConfig::ell_max),
      dbl_list("orbit_start", &RunConfig::orbit_start),
      dbl_list("grid_origin", &RunConfig::grid_origin),
      dbl("grid_spacing", &RunConfig::grid_spacing),
      int_list("grid_extents", &RunConfig::grid_extents),
      integer("grid_slice", &RunConfig::grid_slice),
      u64("cell_budget", &RunConfig::cell_budget),
      str("mask_path", &RunConfig::mask_path),
      str("fixture", &RunConfig::fixture),
      integer("ell0", &RunConfig::ell0),
      integer("k0", &RunConfig::k0),
      integer("certify_k_max", &RunConfig::certify_k_max),
      dbl("annulus_inner", &RunConfig::annulus_inner),
      dbl("annulus_outer", &RunConfig::annulus_outer),
      dbl("annulus_spacing", &RunConfig::annulus_spacing),
      dbl("c", &RunConfig::c),
      dbl_list("c_sweep", &RunConfig::c_sweep),
      dbl("c_d", &RunConfig::c_d),
      integer("ring_n_first", &RunConfig::ring_n_first),
      integer("ring_n_count", &RunConfig::ring_n_count),
      integer("samples_per_ring", &RunConfig::samples_per_ring),
      dbl("ring_tol", &RunConfig::ring_tol),
      integer("rings_k_max", &RunConfig::rings_k_max),
      integer("classify_k", &RunConfig::classify_k),
      integer("closure_samples", &RunConfig::closure_samples),
      u64("seed", &RunConfig::seed),
  };
  return f;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config field '" + field + "': " + what);
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields())
    if (key == f.key) {
      f.set(cfg, value);
      return;
    }
  throw ConfigError("unknown config field '" + key + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

void validate_config(const RunConfig& cfg) {
  require(cfg.map == "radial" || cfg.map == "entire" || cfg.map == "zorich", "map", "expected radial, entire or zorich");
  require(cfg.dimension == 2 || cfg.dimension == 3, "dimension", "expected 2 or 3");
  require(cfg.ki_bound >= 1.0, "ki_bound", "must be >= 1");
  require(cfg.norm == "maximum" || cfg.norm == "euclidean", "norm", "expected maximum or euclidean");
  require(cfg.n0 >= 2, "n0", "must be an integer >= 2");
  require(cfg.r_prime > 4.0, "r_prime", "must be > 4");
  require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "epsilon", "must lie in (0,1)");
  require(cfg.knots >= 3 && cfg.knots <= 400, "knots", "must lie in [3, 400]");
  require(cfg.entire_c != 0.0, "entire_c", "must be nonzero");
  require(cfg.mm_samples >= 1, "mm_samples", "must be positive");
  require(cfg.base_r > 1.0, "base_r", "must be > 1");
  require(cfg.k_max >= 1 && cfg.k_max <= 1000, "k_max", "must lie in [1, 1000]");
  require(cfg.ell_max >= 0 && cfg.ell_max <= 100, "ell_max", "must lie in [0, 100]");
  require(cfg.grid_spacing > 0.0, "grid_spacing", "must be > 0");
  require(cfg.grid_slice >= -1, "grid_slice", "must be >= -1");
  require(cfg.fixture == "shell" || cfg.fixture == "ball" || cfg.fixture == "web" || cfg.fixture == "halfspace" ||
              cfg.fixture == "empty",
          "fixture", "expected shell, ball, web, halfspace or empty");
  require(cfg.ell0 >= 0, "ell0", "must be >= 0");
  require(cfg.k0 >= 1, "k0", "must be >= 1");
  require(cfg.certify_k_max >= 1 && cfg.certify_k_max <= 100, "certify_k_max", "must lie in [1, 100]");
  require(cfg.annulus_inner >= 0.0, "annulus_inner", "must be >= 0");
  require(cfg.annulus_outer >= 0.0, "annulus_outer", "must be >= 0 (0 selects 2 r_{n0+1})");
  require(cfg.annulus_spacing > 0.0, "annulus_spacing", "must be > 0");
  require(cfg.c == 0.0 || cfg.c > 1.0, "c", "must be > 1 (0 selects 2 ki_bound)");
  require(cfg.c_d > 0.0, "c_d", "must be > 0");
  require(cfg.ring_n_first >= 0, "ring_n_first", "must be >= 0 (0 selects N0)");
  require(cfg.ring_n_count >= 1, "ring_n_count", "must be >= 1");
  require(cfg.samples_per_ring >= 1, "samples_per_ring", "must be >= 1");
  require(cfg.ring_tol >= 0.0, "ring_tol", "must be >= 0");
  require(cfg.rings_k_max >= 1 && cfg.rings_k_max <= 100, "rings_k_max", "must lie in [1, 100]");
  require(cfg.classify_k >= 1 && cfg.classify_k <= 1000, "classify_k", "must lie in [1, 1000]");
  require(cfg.closure_samples >= 2, "closure_samples", "must be >= 2");
}

// ---------------------------------------------------------------------------
// Map and region construction

namespace {

GrowthProfile load_profile(const RunConfig& cfg) {
  if (!cfg.profile_in.empty()) {
    std::ifstream is(cfg.profile_in);
    if (!is) throw ConfigError("config field 'profile_in': cannot open '" + cfg.profile_in + "'");
    return read_profile_table(is);
  }
  return GrowthProfile::build(cfg.n0, cfg.r_prime, cfg.n0 + cfg.knots - 1);
}

}  // namespace

MapFamily build_map(const RunConfig& cfg) {
  MapFamily m = [&] {
    if (cfg.map == "entire") return MapFamily::entire_product(cfg.entire_c, cfg.entire_roots, cfg.ki_bound, cfg.mm_samples);
    if (cfg.map == "zorich") return MapFamily::zorich(cfg.ki_bound, cfg.mm_samples);
    return MapFamily::radial(load_profile(cfg), cfg.dimension, cfg.ki_bound);
  }();
  if (cfg.map == "radial" && cfg.norm == "euclidean") m = m.with_norm(Norm::Euclidean);
  return m;
}

namespace {

GridSpec config_grid(const RunConfig& cfg, int dimension) {
  std::vector<int> ext = cfg.grid_extents;
  if (ext.empty()) ext.assign(static_cast<std::size_t>(dimension), dimension == 2 ? 41 : 21);
  if (static_cast<int>(ext.size()) != dimension)
    throw ConfigError("config field 'grid_extents': expected " + std::to_string(dimension) + " values");
  std::vector<double> org = cfg.grid_origin;
  if (org.empty())
    for (int e : ext) org.push_back(-0.5 * (e - 1) * cfg.grid_spacing);
  if (static_cast<int>(org.size()) != dimension)
    throw ConfigError("config field 'grid_origin': expected " + std::to_string(dimension) + " values");
  GridSpec g;
  g.dimension = dimension;
  g.spacing = cfg.grid_spacing;
  for (int a = 0; a < dimension; ++a) {
    g.origin[static_cast<std::size_t>(a)] = org[static_cast<std::size_t>(a)];
    g.extents[static_cast<std::size_t>(a)] = ext[static_cast<std::size_t>(a)];
  }
  g.validate(cfg.cell_budget);
  return g;
}

CellMask load_mask(const RunConfig& cfg) {
  const fs::path p(cfg.mask_path);
  std::ifstream side(p.string() + ".json");
  if (!side) throw ConfigError("config field 'mask_path': missing grid sidecar '" + p.string() + ".json'");
  std::stringstream ss;
  ss << side.rdbuf();
  const GridSpec g = grid_spec_from_json(ss.str());
  g.validate(cfg.cell_budget);
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("config field 'mask_path': cannot open '" + p.string() + "'");
  return read_mask_binary(is, g);
}

CellMask fixture_mask(const RunConfig& cfg) {
  const GridSpec g = config_grid(cfg, cfg.dimension);
  CellMask m(g, cfg.cell_budget);
  double half = 1e300;
  for (int a = 0; a < g.dimension; ++a) half = std::min(half, 0.5 * (g.extents[static_cast<std::size_t>(a)] - 1) * g.spacing);
  std::array<int, 3> mid{};
  for (int a = 0; a < 3; ++a) mid[static_cast<std::size_t>(a)] = g.extents[static_cast<std::size_t>(a)] / 2;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto c = g.center(i);
    const auto cell = g.cell(i);
    double r2 = 0.0;
    int w = 0;
    for (int a = 0; a < g.dimension; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double x = c[ua] - (g.origin[ua] + 0.5 * (g.extents[ua] - 1) * g.spacing);
      r2 += x * x;
      w = std::max(w, std::abs(cell[ua] - mid[ua]));
    }
    const double r = std::sqrt(r2);
    bool on = false;
    if (cfg.fixture == "shell") on = r > 0.4 * half && r < 0.75 * half;
    else if (cfg.fixture == "ball") on = r < 0.6 * half;
    else if (cfg.fixture == "halfspace") on = cell[0] < mid[0];
    else if (cfg.fixture == "web") {
      const int edge = std::min(mid[0], mid[1]) - 1;
      const bool crust = w == edge || w == (2 * edge) / 3 || w == edge / 3;
      bool spoke = cell[1] == mid[1] && cell[0] >= mid[0] + edge / 3 && w <= edge;
      for (int a = 2; a < g.dimension; ++a) spoke = spoke && cell[static_cast<std::size_t>(a)] == mid[static_cast<std::size_t>(a)];
      on = crust || spoke;
    }
    if (on) m.set(i);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Output helpers

Json log_json(const LogMag& m) { return m.is_zero() ? Json(nullptr) : Json(m.log_value()); }

Json header_json(const RunConfig& cfg, const std::string& command) {
  Json j;
  j["tool"] = version_string();
  j["command"] = command;
  Json c = Json::object();
  for (const auto& [k, v] : config_echo(cfg)) c[k] = v;
  j["config"] = c;
  return j;
}

std::string comment_header(const RunConfig& cfg, const std::string& command) {
  std::string s = "# " + std::string(version_string()) + " " + command + "\n";
  for (const auto& [k, v] : config_echo(cfg)) s += "# " + k + " = " + v + "\n";
  return s;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw Error("write failed for '" + p.string() + "'");
}

void write_json(const fs::path& p, const Json& j) { write_file(p, j.dump(2) + "\n"); }

std::vector<double> cell_coords(const GridSpec& g, std::size_t i) {
  const auto c = g.center(i);
  return std::vector<double>(c.begin(), c.begin() + g.dimension);
}

int slice_index(const RunConfig& cfg, const GridSpec& g) {
  if (g.dimension == 2) return 0;
  const int s = cfg.grid_slice < 0 ? g.extents[2] / 2 : cfg.grid_slice;
  if (s >= g.extents[2]) throw ConfigError("config field 'grid_slice': outside the grid");
  return s;
}

struct Context {
  RunConfig cfg;
  fs::path out;
  unsigned threads = 1;
  std::ostream* log = nullptr;
};

// ---------------------------------------------------------------------------
// Commands

void cmd_profile(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const GrowthProfile p = load_profile(cfg);
  const std::string head = comment_header(cfg, "profile");

  std::ostringstream table;
  table << head;
  write_profile_table(table, p);
  write_file(ctx.out / "profile.txt", table.str());

  const auto growth = spacing_growth_sequence(p);
  std::ostringstream c4;
  c4 << head << "n,log_r_n,delta_n,n_delta_n,increasing\n";
  for (std::size_t i = 0; i < growth.size(); ++i) {
    const int n = p.n0() + static_cast<int>(i);
    const bool inc = i == 0 || growth[i] > growth[i - 1];
    c4 << n << ',' << fmt_double(p.log_knot(n)) << ',' << fmt_double(p.delta(n)) << ',' << fmt_double(growth[i]) << ','
       << (inc ? 1 : 0) << '\n';
  }
  write_file(ctx.out / "spacing_growth.csv", c4.str());

  const auto b = liminf_ratio_sequence(p, p.last_index());
  std::ostringstream lim;
  lim << head << "n,b_n\n";
  for (std::size_t i = 0; i < b.size(); ++i) lim << p.n0() + static_cast<int>(i) << ',' << fmt_double(b[i]) << '\n';
  write_file(ctx.out / "liminf.csv", lim.str());
  *ctx.log << "profile: " << p.last_index() - p.n0() + 1 << " knots written to " << (ctx.out / "profile.txt").string()
           << '\n';
}

void cmd_orbit(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const MapFamily map = build_map(cfg);
  if (static_cast<int>(cfg.orbit_start.size()) != map.dimension())
    throw ConfigError("config field 'orbit_start': expected " + std::to_string(map.dimension()) + " coordinates");
  const OrbitRecord orbit = compute_orbit(map, Point::from_coords(cfg.orbit_start), cfg.k_max);
  const Ladder ladder = make_ladder(map, LogMag::from_value(cfg.base_r), cfg.k_max + 1 + cfg.ell_max);
  const EscapeClass cls = classify(orbit, ladder, cfg.ell_max);

  std::ostringstream csv;
  csv << comment_header(cfg, "orbit");
  write_orbit_csv(csv, orbit);
  write_file(ctx.out / "orbit.csv", csv.str());

  Json j = header_json(cfg, "orbit");
  j["start"] = cfg.orbit_start;
  j["k_max"] = orbit.k_max;
  j["truncated"] = orbit.truncated;
  Json radii = Json::array();
  for (const auto& r : orbit.radii) radii.push_back(log_json(r));
  j["log_radii"] = radii;
  Json lad = Json::array();
  for (const auto& r : ladder.levels) lad.push_back(log_json(r));
  j["log_ladder"] = lad;
  j["class"] = {{"tag", to_string(cls.tag)}, {"offset", cls.offset}, {"evidence_k", cls.evidence_k}};
  if (ladder.top() >= 3 && ladder.levels[1] > LogMag::one()) {
    try {
      const auto rep = loglog_growth_report(ladder);
      j["loglog"] = {{"ratios", rep.ratios},
                     {"threshold", rep.threshold},
                     {"first_exceeding_k", rep.first_exceeding_k ? Json(*rep.first_exceeding_k) : Json(nullptr)},
                     {"eventually_increasing", rep.eventually_increasing},
                     {"verdict", to_string(rep.verdict)}};
    } catch (const DomainError& e) {
      j["loglog"] = {{"error", e.what()}};
    }
  }
  write_json(ctx.out / "orbit.json", j);
  *ctx.log << "orbit: " << to_string(cls.tag) << '\n';
}

void cmd_classify(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const MapFamily map = build_map(cfg);
  const CellMask region = cfg.mask_path.empty() ? [&] {
    CellMask m(config_grid(cfg, map.dimension()), cfg.cell_budget);
    for (std::size_t i = 0; i < m.size(); ++i) m.set(i);
    return m;
  }()
                                                : load_mask(cfg);
  const GridSpec& g = region.grid();
  if (g.dimension != map.dimension()) throw ConfigError("grid dimension does not match the map");
  std::vector<std::size_t> cells;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < region.size(); ++i)
    if (region.test(i)) {
      cells.push_back(i);
      pts.push_back(Point::from_coords(cell_coords(g, i)));
    }
  const Ladder ladder = make_ladder(map, LogMag::from_value(cfg.base_r), cfg.k_max + 1 + cfg.ell_max);
  const auto classes = classify_points(map, pts, ladder, cfg.k_max, cfg.ell_max, ctx.threads);

  std::ostringstream csv;
  csv << comment_header(cfg, "classify");
  write_classification_csv(csv, pts, classes);
  write_file(ctx.out / "classification.csv", csv.str());

  std::map<std::string, std::size_t> counts;
  std::vector<std::size_t> by_offset(static_cast<std::size_t>(cfg.ell_max) + 1, 0);
  std::string pix(g.cell_count(), '\0');
  for (std::size_t i = 0; i < classes.size(); ++i) {
    counts[to_string(classes[i].tag)]++;
    unsigned char v = 0;
    if (classes[i].tag == EscapeTag::FastEscaping) {
      by_offset[static_cast<std::size_t>(classes[i].offset)]++;
      v = static_cast<unsigned char>(255 - std::min(classes[i].offset, 4) * 35);
    } else if (classes[i].tag == EscapeTag::EscapingUndetermined) {
      v = 60;
    }
    pix[cells[i]] = static_cast<char>(v);
  }
  Json j = header_json(cfg, "classify");
  j["grid"] = Json::parse(grid_spec_json(g));
  j["points"] = pts.size();
  Json cj = Json::object();
  for (const char* t : {"FastEscaping", "EscapingUndetermined", "BoundedSoFar"}) cj[t] = counts[t];
  j["counts"] = cj;
  j["fast_by_offset"] = by_offset;
  write_json(ctx.out / "classification.json", j);

  const int s = slice_index(cfg, g);
  std::ostringstream pgm;
  pgm << "P5\n" << g.extents[0] << ' ' << g.extents[1] << "\n255\n";
  for (int y = 0; y < g.extents[1]; ++y)
    for (int x = 0; x < g.extents[0]; ++x) pgm.put(pix[g.index(x, y, s)]);
  write_file(ctx.out / "classification.pgm", pgm.str());
  *ctx.log << "classify: " << pts.size() << " points\n";
}

void cmd_topology(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const CellMask mask = cfg.mask_path.empty() ? fixture_mask(cfg) : load_mask(cfg);
  const GridSpec& g = mask.grid();
  const RegionLabeling lab = label_components(mask, ctx.threads);
  const CellMask hull = topological_hull(mask);
  const SpidersWebResult web = detect_spiders_web(mask);

  Json j = header_json(cfg, "topology");
  j["source"] = cfg.mask_path.empty() ? "fixture:" + cfg.fixture : "mask:" + cfg.mask_path;
  j["grid"] = Json::parse(grid_spec_json(g));
  j["mask_cells"] = mask.count();
  j["hull_cells"] = hull.count();
  Json comps = Json::array();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(lab.mask_components()), 0);
  for (auto id : lab.mask_labels)
    if (id >= 0) sizes[static_cast<std::size_t>(id)]++;
  bool any_hollow = false;
  for (int id = 0; id < lab.mask_components(); ++id) {
    const bool full = is_full(lab, id);
    any_hollow = any_hollow || !full;
    const OuterBoundary ob = outer_boundary(lab, id);
    comps.push_back({{"id", id},
                     {"cells", sizes[static_cast<std::size_t>(id)]},
                     {"touches_border", static_cast<bool>(lab.mask_touches_border[static_cast<std::size_t>(id)])},
                     {"full", full},
                     {"outer_boundary_cells", ob.cells.size()},
                     {"outer_boundary_meets_grid_edge", ob.meets_grid_edge}});
  }
  j["components"] = comps;
  int bounded = 0;
  for (bool t : lab.complement_touches_border) bounded += t ? 0 : 1;
  j["complement_components"] = lab.complement_components();
  j["bounded_complement_components"] = bounded;
  j["verdict"] = lab.mask_components() == 0 ? "empty" : (any_hollow ? "hollow" : "full");
  j["spiders_web"] = {{"verdict", to_string(web.verdict)}, {"n_levels", web.n_levels}, {"reason", web.reason}};
  write_json(ctx.out / "topology.json", j);

  std::ostringstream hm;
  write_mask_binary(hm, hull);
  write_file(ctx.out / "hull.mask", hm.str());
  write_file(ctx.out / "hull.mask.json", grid_spec_json(g));
  const int s = slice_index(cfg, g);
  std::ostringstream a, b, c;
  write_pgm_slice(a, mask, s);
  write_pgm_slice(b, hull, s);
  write_pgm_slice(c, lab, s);
  write_file(ctx.out / "mask_slice.pgm", a.str());
  write_file(ctx.out / "hull_slice.pgm", b.str());
  write_file(ctx.out / "labels_slice.pgm", c.str());
  *ctx.log << "topology: " << j["verdict"].get<std::string>() << ", spider's web " << to_string(web.verdict) << '\n';
}

double default_annulus_outer(const MapFamily& map, const RunConfig& cfg) {
  if (cfg.annulus_outer > 0.0) return cfg.annulus_outer;
  if (const auto* rm = map.radial_params()) return 2.0 * rm->profile.knot(rm->profile.n0() + 1).value();
  throw ConfigError("config field 'annulus_outer': required for non-radial maps");
}

CellMask annulus_region(const MapFamily& map, const RunConfig& cfg, double inner, double outer) {
  const int half = static_cast<int>(std::ceil(outer / cfg.annulus_spacing)) + 1;
  const std::size_t ext = 2 * static_cast<std::size_t>(half) + 1;
  std::size_t cells = 1;
  for (int a = 0; a < map.dimension(); ++a) cells *= ext;
  if (cells > cfg.cell_budget)
    throw BudgetError("annulus grid needs " + std::to_string(cells) + " cells, above cell_budget " +
                      std::to_string(cfg.cell_budget) + "; increase annulus_spacing (radial maps use exact polar mode)");
  return square_annulus_mask(map.dimension(), cfg.annulus_spacing, half, inner, outer);
}

void cmd_certify(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const MapFamily map = build_map(cfg);
  const CellMask G = cfg.mask_path.empty()
                         ? annulus_region(map, cfg, cfg.annulus_inner, default_annulus_outer(map, cfg))
                         : load_mask(cfg);
  CertifyOptions opt;
  opt.ell0 = cfg.ell0;
  opt.k0 = cfg.k0;
  opt.k_max = cfg.certify_k_max;
  opt.ell_max = cfg.ell_max;
  if (cfg.c > 0.0) opt.c = cfg.c;
  opt.c_d = cfg.c_d;
  opt.threads = ctx.threads;
  const LogMag base = LogMag::from_value(cfg.base_r);
  const CertificateReport rep = certify_engulfing(map, G, base, opt);

  Json j = header_json(cfg, "certify");
  j["hypothesis_ok"] = rep.hypothesis_ok;
  j["ell"] = rep.ell ? Json(*rep.ell) : Json(nullptr);
  j["checked_k_range"] = {rep.k_first, rep.k_last};
  j["k2"] = rep.k2 ? Json(*rep.k2) : Json(nullptr);
  j["c"] = rep.c;
  Json fails = Json::array();
  for (const auto& [k, why] : rep.failures) fails.push_back({{"k", k}, {"reason", why}});
  j["failures"] = fails;
  j["ki_power_used"] = rep.ki_power_used.representable() ? Json(rep.ki_power_used.value()) : Json(nullptr);
  j["log_ki_power_used"] = log_json(rep.ki_power_used);
  j["approximate"] = rep.approximate;
  j["region"] = {{"grid", Json::parse(grid_spec_json(G.grid()))}, {"cells", G.count()}};
  const auto reg = map.radial_params() ? extract_polar_region(G) : std::nullopt;
  if (reg) {
    Json an = Json::array();
    for (const auto& a : reg->annuli) an.push_back({{"log_inner", log_json(a.inner)}, {"log_outer", log_json(a.outer)}});
    j["region"]["annuli"] = an;
  }
  if (rep.witness_x && rep.witness_y) {
    j["witness_x"] = cell_coords(G.grid(), *rep.witness_x);
    j["witness_y"] = cell_coords(G.grid(), *rep.witness_y);
  }
  if (rep.witness_mu) {
    const auto& m = *rep.witness_mu;
    j["mu_scaled_lower_bound"] = {{"value", m.value}, {"c_d", m.c_d}, {"separation", m.separation},
                                  {"dist_x", m.dist_a}, {"dist_y", m.dist_b},
                                  {"chain_bound", mu_chain_bound(map.ki_bound(), rep.k_last + cfg.ell0, m.value)}};
  }
  Json checks = Json::array();
  std::optional<Ladder> check_ladder;
  if (reg && !rep.checks.empty()) check_ladder = make_ladder(map, base, rep.k_last);
  for (const auto& c : rep.checks) {
    Json e = {{"ell", c.ell}, {"k", c.k}, {"grid", c.grid_verdict}, {"scalar", c.scalar_verdict}};
    if (check_ladder) {
      // The scalar verdict compares the hull inradius; dist(0, image) is shown alongside.
      const PolarRegion img = image_region(map, *reg, c.k + c.ell);
      e["log_hull_inradius"] = log_json(img.hull_inradius());
      e["log_dist_origin"] = log_json(img.inner_radius());
      e["log_ladder_level"] = log_json(check_ladder->levels[static_cast<std::size_t>(c.k)]);
    }
    checks.push_back(e);
  }
  j["checks"] = checks;
  Json claims = Json::array();
  for (const auto& c : rep.claims)
    claims.push_back({{"k", c.k}, {"log_outer_distance", log_json(c.outer_distance)},
                      {"log_ladder_level", log_json(c.ladder_level)}, {"holds", c.holds}});
  j["intermediate_claims"] = claims;

  // k2 sensitivity to c.
  const int top = std::max(cfg.certify_k_max + cfg.ell0 + cfg.ell_max + 4, 12);
  const Ladder ladder = make_ladder(map, base, top);
  Json sweep = Json::array();
  for (double c : cfg.c_sweep) {
    Json row = {{"c", c}};
    if (!(c > map.ki_bound()) || !(c > 1.0)) {
      row["k2"] = nullptr;
      row["error"] = "c must exceed K_I(f) and 1";
    } else {
      try {
        row["k2"] = find_k2(c, ladder).k2;
      } catch (const LadderExhausted& e) {
        row["k2"] = nullptr;
        row["error"] = e.what();
      }
    }
    sweep.push_back(row);
  }
  j["k2_sweep"] = sweep;
  write_json(ctx.out / "certificate.json", j);
  *ctx.log << "certify: hypothesis_ok=" << (rep.hypothesis_ok ? "true" : "false")
           << " ell=" << (rep.ell ? std::to_string(*rep.ell) : "none") << '\n';
}

void cmd_rings(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const MapFamily map = build_map(cfg);
  const int lo = map.radial_params() ? map.radial_params()->profile.n0() : 1;
  int n_first = cfg.ring_n_first;
  if (n_first == 0) {
    const RingReport probe = verify_ring_containment(map, cfg.epsilon, lo, lo, 1, cfg.seed, cfg.ring_tol, 1);
    if (!probe.smallest_valid_n) throw Error("no ring index satisfies the ring conditions");
    n_first = *probe.smallest_valid_n;
  }
  const int n_last = n_first + cfg.ring_n_count - 1;
  const RingReport rr = verify_ring_containment(map, cfg.epsilon, n_first, n_last, cfg.samples_per_ring, cfg.seed,
                                                cfg.ring_tol, ctx.threads);
  Json j = header_json(cfg, "rings");
  Json cont;
  cont["n_first"] = rr.n_first;
  cont["n_last"] = rr.n_last;
  cont["epsilon"] = rr.eps;
  cont["N0"] = rr.smallest_valid_n ? Json(*rr.smallest_valid_n) : Json(nullptr);
  cont["preconditions_ok"] = rr.preconditions_ok;
  cont["precondition_failures"] = rr.precondition_failures;
  Json rings = Json::array();
  for (int n = n_first; n <= n_last + 1; ++n) {
    const Ring r = square_ring(map, cfg.epsilon, n);
    rings.push_back({{"n", n}, {"log_inner", log_json(r.inner)}, {"log_outer", log_json(r.outer)}});
  }
  cont["rings"] = rings;
  cont["samples_checked"] = rr.samples_checked;
  Json viol = Json::array();
  for (const auto& v : rr.violations)
    viol.push_back({{"n", v.n}, {"log_radius", log_json(v.radius)}, {"log_image", log_json(v.image)}, {"which", v.which}});
  cont["violations"] = viol;
  j["containment"] = cont;

  // Wandering rings with U0 = A_{n_first}.
  const Ring r0 = square_ring(map, cfg.epsilon, n_first);
  Json w;
  w["U0"] = {{"n", n_first}, {"log_inner", log_json(r0.inner)}, {"log_outer", log_json(r0.outer)}};
  if (!r0.outer.representable() || r0.outer.value() > 1e6) {
    w["skipped"] = "U0 too large for a plain-scale grid";
  } else {
    const double inner = r0.inner.value(), outer = r0.outer.value();
    RunConfig local = cfg;
    local.annulus_spacing = std::min(cfg.annulus_spacing, (outer - inner) / 4.0);
    const CellMask u0 = annulus_region(map, local, inner, outer);
    WanderingOptions wo;
    wo.ell_max = cfg.ell_max;
    wo.classify_k = cfg.classify_k;
    wo.closure_samples = cfg.closure_samples;
    wo.seed = cfg.seed;
    wo.threads = ctx.threads;
    w["grid"] = Json::parse(grid_spec_json(u0.grid()));
    std::optional<WanderingReport> report;
    try {
      report = check_wandering_rings(map, u0, cfg.rings_k_max, LogMag::from_value(cfg.base_r), wo);
    } catch (const DomainError& e) {
      // Approximate imaging leaves the grid; containment results still stand.
      w["skipped"] = e.what();
    }
    if (report) {
      const WanderingReport& wr = *report;
      w["applicable"] = wr.applicable;
      if (!wr.applicable) w["inapplicable_reason"] = wr.inapplicable_reason;
      w["approximate"] = wr.approximate;
      Json steps = Json::array();
      for (const auto& s : wr.steps)
        steps.push_back({{"k", s.k},
                         {"log_dist", log_json(s.ring.includes_origin ? LogMag::zero() : s.ring.inner)},
                         {"log_outer", log_json(s.ring.outer)},
                         {"bounded", s.bounded},
                         {"hollow", s.hollow},
                         {"surrounds_previous", s.surrounds_previous},
                         {"surrounds_two_back", s.surrounds_two_back},
                         {"distance_increasing", s.distance_increasing},
                         {"passed", s.passed()}});
      w["steps"] = steps;
      w["k_first_pass"] = wr.k_first_pass ? Json(*wr.k_first_pass) : Json(nullptr);
      w["closure_ell"] = wr.closure_ell ? Json(*wr.closure_ell) : Json(nullptr);
      w["closure_samples"] = wr.closure_samples;
      w["failures"] = wr.failures;
    }
  }
  j["wandering"] = w;
  write_json(ctx.out / "rings.json", j);
  *ctx.log << "rings: " << rr.violations.size() << " violations in " << rr.samples_checked << " samples\n";
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for hollow quasi-Fatou components"};
  app.set_version_flag("--version", version_string());
  std::string config_path, out_dir = ".";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "Flat key = value config file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (0 = auto)");
  app.add_option("--seed", seed, "Sampling seed (overrides the config)");
  app.add_option("--set", sets, "Override a config entry: key=value");
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, void (*)(const Context&)>> commands = {
      {"profile", cmd_profile}, {"orbit", cmd_orbit},     {"classify", cmd_classify},
      {"topology", cmd_topology}, {"certify", cmd_certify}, {"rings", cmd_rings}};
  const std::map<std::string, std::string> help = {
      {"profile", "Knot table, spacing growth sequence and liminf ratios"},
      {"orbit", "Orbit of one point and its escape class"},
      {"classify", "Escape classes of every grid cell"},
      {"topology", "Components, hull, hollowness and spider's-web verdict of a mask"},
      {"certify", "Engulfing certificate for a region G"},
      {"rings", "Ring containment and wandering-ring checks"}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    Context ctx;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot open config file '" + config_path + "'");
      std::stringstream ss;
      ss << is.rdbuf();
      apply_config_text(ctx.cfg, ss.str());
      // Relative paths in a config file are relative to that file.
      const fs::path base = fs::path(config_path).parent_path();
      for (std::string* p : {&ctx.cfg.mask_path, &ctx.cfg.profile_in})
        if (!p->empty() && fs::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_config_entry(ctx.cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    if (seed) ctx.cfg.seed = *seed;
    validate_config(ctx.cfg);
    if (ctx.cfg.map == "entire") ctx.cfg.dimension = 2;
    if (ctx.cfg.map == "zorich") ctx.cfg.dimension = 3;
    ctx.out = out_dir;
    ctx.threads = resolve_threads(threads);
    ctx.log = &out;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw Error("cannot create output directory '" + out_dir + "': " + ec.message());
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) fn(ctx);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace hollow
