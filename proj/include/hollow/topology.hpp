#pragma once

// Voxel-grid topology with face adjacency on both the set and its complement.
//
// "Bounded" is proxied by "does not touch the grid border": a complement
// component that reaches the border is treated as part of the unbounded
// complementary component. Every verdict is therefore relative to the grid
// box.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hollow {

/// Default cell budget: 512^3.
inline constexpr std::size_t kDefaultCellBudget = std::size_t{512} * 512 * 512;

struct GridSpec {
  int dimension = 2;                     // 2 or 3
  std::array<double, 3> origin{};        // centre of cell (0,0,0)
  double spacing = 1.0;
  std::array<int, 3> extents{1, 1, 1};   // extents[2] == 1 when dimension == 2

  /// Throws ConfigError on bad fields and BudgetError above `budget` cells.
  void validate(std::size_t budget = kDefaultCellBudget) const;
  std::size_t cell_count() const;
  /// Row-major with axis 0 fastest.
  std::size_t index(int i0, int i1, int i2 = 0) const {
    return static_cast<std::size_t>(i0) +
           static_cast<std::size_t>(extents[0]) *
               (static_cast<std::size_t>(i1) + static_cast<std::size_t>(extents[1]) * static_cast<std::size_t>(i2));
  }
  std::array<int, 3> cell(std::size_t idx) const;
  bool on_border(std::size_t idx) const;
  std::array<double, 3> center(std::size_t idx) const;

  static GridSpec make2(std::array<double, 2> origin, double spacing, std::array<int, 2> extents);
  static GridSpec make3(std::array<double, 3> origin, double spacing, std::array<int, 3> extents);

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(GridSpec grid, std::size_t budget = kDefaultCellBudget);
  CellMask(GridSpec grid, std::vector<std::uint8_t> bits);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return bits_.size(); }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  CellMask complement() const;
  /// True if every set cell of *this is set in other (same grid).
  bool subset_of(const CellMask& other) const;

  friend bool operator==(const CellMask&, const CellMask&) = default;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> bits_;
};

/// Face-connected components of a mask and of its complement. Ids are
/// 0-based, assigned in row-major order of each component's first cell.
struct RegionLabeling {
  GridSpec grid;
  std::vector<std::int32_t> mask_labels;        // -1 on complement cells
  std::vector<std::int32_t> complement_labels;  // -1 on mask cells
  std::vector<bool> mask_touches_border;
  std::vector<bool> complement_touches_border;

  int mask_components() const { return static_cast<int>(mask_touches_border.size()); }
  int complement_components() const { return static_cast<int>(complement_touches_border.size()); }
  /// Mask holding only the given mask component.
  CellMask component_mask(int id) const;
};

/// Labels both sides. threads > 1 labels slabs concurrently and merges; the
/// result is identical to the sequential one.
RegionLabeling label_components(const CellMask& mask, unsigned threads = 1);

/// mask plus every complement component that does not touch the border.
CellMask topological_hull(const CellMask& mask);

/// The component equals its own hull. Throws DomainError for an unknown id.
bool is_full(const RegionLabeling& labeling, int component_id);
bool is_full(const CellMask& mask, int component_id);

/// Every cell of V lies in one complement component of U that does not touch
/// the border. Throws DomainError if U and V overlap or ids are invalid.
bool surrounds(const RegionLabeling& labeling, int component_u, int component_v);
bool surrounds(const CellMask& u, const CellMask& v);

struct OuterBoundary {
  std::vector<std::size_t> cells;  // hull cells face-adjacent to the hull's complement
  bool meets_grid_edge = false;    // hull reaches the border: unbounded proxy
};

OuterBoundary outer_boundary(const CellMask& mask, int component_id);
OuterBoundary outer_boundary(const RegionLabeling& labeling, int component_id);

enum class WebVerdict { ConsistentWithSpidersWeb, NotDetected };

struct SpidersWebResult {
  WebVerdict verdict = WebVerdict::NotDetected;
  int n_levels = 0;
  std::string reason;
  std::vector<CellMask> nested_sequence;  // innermost first
};

/// Peels the complement from the border inward. Each breakthrough of a crust
/// of the mask into new complement cells records the region enclosed by that
/// crust as a level. Levels are full by construction and their boundaries lie
/// in the mask. The verdict requires a connected mask, at least one bounded
/// level, and an outermost level reaching the cell layer next to the border
/// on every side.
SpidersWebResult detect_spiders_web(const CellMask& mask);

std::string to_string(WebVerdict v);

// ---------------------------------------------------------------------------
// I/O

/// 16-byte header (uint32 LE: dimension, extents[0..2]) then one byte per
/// cell, row-major with axis 0 fastest.
void write_mask_binary(std::ostream& os, const CellMask& mask);
/// Grid origin and spacing come from `grid`; extents must match the header.
CellMask read_mask_binary(std::istream& is, const GridSpec& grid);
std::string grid_spec_json(const GridSpec& grid);
GridSpec grid_spec_from_json(const std::string& text);

/// Binary P5 image of the 2-D slice at axis-2 index `slice`. Cells outside
/// `mask` are 0; cells of component i map to 1 + (37 i mod 255).
void write_pgm_slice(std::ostream& os, const CellMask& mask, int slice = 0);
void write_pgm_slice(std::ostream& os, const RegionLabeling& labeling, int slice = 0);

}  // namespace hollow
