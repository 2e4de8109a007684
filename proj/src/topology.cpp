#include "hollow/topology.hpp"

#include <algorithm>
#include <numeric>

#include "hollow/error.hpp"
#include "hollow/parallel.hpp"

namespace hollow {

// ---------------------------------------------------------------------------
// GridSpec / CellMask

void GridSpec::validate(std::size_t budget) const {
  if (dimension != 2 && dimension != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
  for (int a = 0; a < dimension; ++a)
    if (extents[static_cast<std::size_t>(a)] < 1) throw ConfigError("grid extents must be positive");
  if (dimension == 2 && extents[2] != 1) throw ConfigError("2-D grid must have extents[2] == 1");
  double cells = 1.0;
  for (int e : extents) cells *= e;
  if (cells > static_cast<double>(budget))
    throw BudgetError("grid of " + std::to_string(static_cast<long long>(cells)) + " cells exceeds budget of " +
                      std::to_string(budget));
}

std::size_t GridSpec::cell_count() const {
  return static_cast<std::size_t>(extents[0]) * static_cast<std::size_t>(extents[1]) *
         static_cast<std::size_t>(extents[2]);
}

std::array<int, 3> GridSpec::cell(std::size_t idx) const {
  const auto e0 = static_cast<std::size_t>(extents[0]);
  const auto e1 = static_cast<std::size_t>(extents[1]);
  return {static_cast<int>(idx % e0), static_cast<int>((idx / e0) % e1), static_cast<int>(idx / (e0 * e1))};
}

bool GridSpec::on_border(std::size_t idx) const {
  const auto c = cell(idx);
  for (int a = 0; a < dimension; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (c[ua] == 0 || c[ua] == extents[ua] - 1) return true;
  }
  return false;
}

std::array<double, 3> GridSpec::center(std::size_t idx) const {
  const auto c = cell(idx);
  std::array<double, 3> out{};
  for (std::size_t a = 0; a < 3; ++a) out[a] = origin[a] + spacing * c[a];
  if (dimension == 2) out[2] = 0.0;
  return out;
}

GridSpec GridSpec::make2(std::array<double, 2> origin, double spacing, std::array<int, 2> extents) {
  GridSpec g;
  g.dimension = 2;
  g.origin = {origin[0], origin[1], 0.0};
  g.spacing = spacing;
  g.extents = {extents[0], extents[1], 1};
  return g;
}

GridSpec GridSpec::make3(std::array<double, 3> origin, double spacing, std::array<int, 3> extents) {
  GridSpec g;
  g.dimension = 3;
  g.origin = origin;
  g.spacing = spacing;
  g.extents = extents;
  return g;
}

CellMask::CellMask(GridSpec grid, std::size_t budget) : grid_(grid) {
  grid_.validate(budget);
  bits_.assign(grid_.cell_count(), 0);
}

CellMask::CellMask(GridSpec grid, std::vector<std::uint8_t> bits) : grid_(grid), bits_(std::move(bits)) {
  grid_.validate();
  if (bits_.size() != grid_.cell_count()) throw ConfigError("mask bit count does not match grid extents");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t CellMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

CellMask CellMask::complement() const {
  CellMask m = *this;
  for (auto& b : m.bits_) b = b ? 0 : 1;
  return m;
}

bool CellMask::subset_of(const CellMask& other) const {
  if (!(grid_ == other.grid_)) throw DomainError("masks live on different grids");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Labeling

namespace {

// Union-find whose root is always the smallest index of its set, so roots are
// the row-major first cells regardless of union order.
struct MinRootForest {
  std::vector<std::size_t> parent;
  explicit MinRootForest(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

// Visits the lower face neighbours (axis a, index - 1) of every cell in
// [lo, hi) that also lie in [lo, hi).
template <typename F>
void for_lower_neighbours(const GridSpec& g, std::size_t lo, std::size_t hi, F&& f) {
  const std::size_t stride[3] = {1, static_cast<std::size_t>(g.extents[0]),
                                 static_cast<std::size_t>(g.extents[0]) * static_cast<std::size_t>(g.extents[1])};
  for (std::size_t i = lo; i < hi; ++i) {
    const auto c = g.cell(i);
    for (int a = 0; a < g.dimension; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (c[ua] == 0) continue;
      const std::size_t j = i - stride[ua];
      if (j >= lo) f(i, j);
    }
  }
}

}  // namespace

RegionLabeling label_components(const CellMask& mask, unsigned threads) {
  const GridSpec& g = mask.grid();
  const std::size_t n = mask.size();
  MinRootForest forest(n);
  const auto& bits = mask.bits();
  auto same = [&](std::size_t i, std::size_t j) {
    if (bits[i] == bits[j]) forest.unite(i, j);
  };

  // Slabs along the slowest axis are contiguous index ranges.
  const int slow_axis = g.dimension - 1;
  const int layers = g.extents[static_cast<std::size_t>(slow_axis)];
  const std::size_t layer_size = n / static_cast<std::size_t>(layers);
  const unsigned t = std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(layers)));
  const int per = (layers + static_cast<int>(t) - 1) / static_cast<int>(t);
  std::vector<std::size_t> cuts;
  for (int l = 0; l < layers; l += per) cuts.push_back(static_cast<std::size_t>(l) * layer_size);
  cuts.push_back(n);
  const std::size_t slabs = cuts.size() - 1;
  parallel_for(slabs, t, [&](std::size_t s) { for_lower_neighbours(g, cuts[s], cuts[s + 1], same); });
  // Stitch slab interfaces.
  for (std::size_t s = 1; s < slabs; ++s)
    for (std::size_t i = cuts[s]; i < cuts[s] + layer_size; ++i) same(i, i - layer_size);

  RegionLabeling lab;
  lab.grid = g;
  lab.mask_labels.assign(n, -1);
  lab.complement_labels.assign(n, -1);
  std::vector<std::int32_t> id_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = forest.find(i);
    const bool in = bits[i] != 0;
    auto& touches = in ? lab.mask_touches_border : lab.complement_touches_border;
    if (id_of_root[r] < 0) {
      id_of_root[r] = static_cast<std::int32_t>(touches.size());
      touches.push_back(false);
    }
    const std::int32_t id = id_of_root[r];
    (in ? lab.mask_labels : lab.complement_labels)[i] = id;
    if (!touches[static_cast<std::size_t>(id)] && g.on_border(i)) touches[static_cast<std::size_t>(id)] = true;
  }
  return lab;
}

CellMask RegionLabeling::component_mask(int id) const {
  if (id < 0 || id >= mask_components()) throw DomainError("unknown mask component id " + std::to_string(id));
  CellMask m(grid);
  for (std::size_t i = 0; i < mask_labels.size(); ++i)
    if (mask_labels[i] == id) m.set(i);
  return m;
}

CellMask topological_hull(const CellMask& mask) {
  const RegionLabeling lab = label_components(mask);
  CellMask out = mask;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto c = lab.complement_labels[i];
    if (c >= 0 && !lab.complement_touches_border[static_cast<std::size_t>(c)]) out.set(i);
  }
  return out;
}

bool is_full(const RegionLabeling& labeling, int component_id) {
  const CellMask comp = labeling.component_mask(component_id);
  return topological_hull(comp) == comp;
}

bool is_full(const CellMask& mask, int component_id) { return is_full(label_components(mask), component_id); }

bool surrounds(const CellMask& u, const CellMask& v) {
  if (!(u.grid() == v.grid())) throw DomainError("surrounds: masks live on different grids");
  std::int32_t region = -1;
  const RegionLabeling lab = label_components(u);
  bool any = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v.test(i)) continue;
    if (u.test(i)) throw DomainError("surrounds: sets overlap");
    any = true;
    const auto c = lab.complement_labels[i];
    if (region < 0) region = c;
    else if (c != region) return false;
  }
  if (!any) throw DomainError("surrounds: inner set is empty");
  return !lab.complement_touches_border[static_cast<std::size_t>(region)];
}

bool surrounds(const RegionLabeling& labeling, int component_u, int component_v) {
  if (component_u == component_v) throw DomainError("surrounds: sets overlap (same component)");
  return surrounds(labeling.component_mask(component_u), labeling.component_mask(component_v));
}

OuterBoundary outer_boundary(const RegionLabeling& labeling, int component_id) {
  const CellMask hull = topological_hull(labeling.component_mask(component_id));
  const GridSpec& g = hull.grid();
  const std::size_t stride[3] = {1, static_cast<std::size_t>(g.extents[0]),
                                 static_cast<std::size_t>(g.extents[0]) * static_cast<std::size_t>(g.extents[1])};
  OuterBoundary ob;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (!hull.test(i)) continue;
    if (g.on_border(i)) {
      ob.meets_grid_edge = true;
      ob.cells.push_back(i);
      continue;
    }
    for (int a = 0; a < g.dimension; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (!hull.test(i - stride[ua]) || !hull.test(i + stride[ua])) {
        ob.cells.push_back(i);
        break;
      }
    }
  }
  return ob;
}

OuterBoundary outer_boundary(const CellMask& mask, int component_id) {
  return outer_boundary(label_components(mask), component_id);
}

// ---------------------------------------------------------------------------
// Spider's web

std::string to_string(WebVerdict v) {
  return v == WebVerdict::ConsistentWithSpidersWeb ? "ConsistentWithSpidersWeb" : "NotDetected";
}

namespace {

bool reaches_inner_layer(const CellMask& level) {
  const GridSpec& g = level.grid();
  for (int a = 0; a < g.dimension; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    bool low = false, high = false;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (!level.test(i)) continue;
      const auto c = g.cell(i);
      low = low || c[ua] == 1;
      high = high || c[ua] == g.extents[ua] - 2;
    }
    if (!low || !high) return false;
  }
  return true;
}

}  // namespace

SpidersWebResult detect_spiders_web(const CellMask& mask) {
  SpidersWebResult res;
  if (mask.empty()) {
    res.reason = "empty";
    return res;
  }
  const GridSpec& g = mask.grid();
  const std::size_t n = mask.size();
  const std::size_t stride[3] = {1, static_cast<std::size_t>(g.extents[0]),
                                 static_cast<std::size_t>(g.extents[0]) * static_cast<std::size_t>(g.extents[1])};
  auto neighbours = [&](std::size_t i, auto&& f) {
    const auto c = g.cell(i);
    for (int a = 0; a < g.dimension; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (c[ua] > 0) f(i - stride[ua]);
      if (c[ua] + 1 < g.extents[ua]) f(i + stride[ua]);
    }
  };

  // outside[i]: cell already reached from the border.
  const RegionLabeling lab = label_components(mask);
  std::vector<std::uint8_t> outside(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = lab.complement_labels[i];
    if (c >= 0 && lab.complement_touches_border[static_cast<std::size_t>(c)]) outside[i] = 1;
  }

  std::vector<CellMask> levels;  // outermost first
  std::vector<std::size_t> frontier;
  for (;;) {
    CellMask region(g);
    bool any = false, bounded = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (outside[i]) continue;
      region.set(i);
      any = true;
      if (g.on_border(i)) bounded = false;
    }
    if (!any) break;

    // Peel one crust layer of the region.
    frontier.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (outside[i]) continue;
      bool crust = g.on_border(i);
      if (!crust) neighbours(i, [&](std::size_t j) { crust = crust || outside[j]; });
      if (crust) frontier.push_back(i);
    }
    for (std::size_t i : frontier) outside[i] = 1;
    // Flood the complement cells now reachable.
    bool breakthrough = false;
    std::vector<std::size_t> stack = frontier;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      neighbours(i, [&](std::size_t j) {
        if (!outside[j] && !mask.test(j)) {
          outside[j] = 1;
          breakthrough = true;
          stack.push_back(j);
        }
      });
    }
    if (breakthrough && bounded) levels.push_back(std::move(region));
  }

  if (levels.empty()) {
    res.reason = "no bounded enclosing level";
    return res;
  }
  res.n_levels = static_cast<int>(levels.size());
  res.nested_sequence.assign(levels.rbegin(), levels.rend());
  if (lab.mask_components() != 1) {
    res.reason = "mask is not connected";
    return res;
  }
  if (!reaches_inner_layer(levels.front())) {
    res.reason = "outermost level does not reach the layer next to the grid border";
    return res;
  }
  res.verdict = WebVerdict::ConsistentWithSpidersWeb;
  return res;
}

}  // namespace hollow
