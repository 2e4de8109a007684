#include <istream>
#include <ostream>

#include <json.hpp>

#include "hollow/error.hpp"
#include "hollow/topology.hpp"

namespace hollow {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ConfigError("mask file: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint8_t palette(std::int32_t id) { return static_cast<std::uint8_t>(1 + (37 * id) % 255); }

template <typename Value>
void write_pgm(std::ostream& os, const GridSpec& g, int slice, Value&& value) {
  if (slice < 0 || slice >= g.extents[2]) throw DomainError("PGM slice index out of range");
  os << "P5\n" << g.extents[0] << ' ' << g.extents[1] << "\n255\n";
  std::string row(static_cast<std::size_t>(g.extents[0]), '\0');
  for (int y = 0; y < g.extents[1]; ++y) {
    for (int x = 0; x < g.extents[0]; ++x) row[static_cast<std::size_t>(x)] = static_cast<char>(value(g.index(x, y, slice)));
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace

void write_mask_binary(std::ostream& os, const CellMask& mask) {
  const GridSpec& g = mask.grid();
  put_u32(os, static_cast<std::uint32_t>(g.dimension));
  for (int e : g.extents) put_u32(os, static_cast<std::uint32_t>(e));
  os.write(reinterpret_cast<const char*>(mask.bits().data()), static_cast<std::streamsize>(mask.size()));
}

CellMask read_mask_binary(std::istream& is, const GridSpec& grid) {
  const auto dim = get_u32(is);
  std::array<int, 3> ext{};
  for (auto& e : ext) e = static_cast<int>(get_u32(is));
  if (static_cast<int>(dim) != grid.dimension || ext != grid.extents)
    throw ConfigError("mask file header does not match the grid sidecar");
  std::vector<std::uint8_t> bits(grid.cell_count());
  if (!is.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size())))
    throw ConfigError("mask file: truncated cell data");
  return CellMask(grid, std::move(bits));
}

std::string grid_spec_json(const GridSpec& g) {
  nlohmann::ordered_json j;
  j["dimension"] = g.dimension;
  j["origin"] = std::vector<double>(g.origin.begin(), g.origin.begin() + g.dimension);
  j["spacing"] = g.spacing;
  j["extents"] = std::vector<int>(g.extents.begin(), g.extents.begin() + g.dimension);
  return j.dump(2) + "\n";
}

GridSpec grid_spec_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GridSpec g;
    g.dimension = j.at("dimension").get<int>();
    const auto o = j.at("origin").get<std::vector<double>>();
    const auto e = j.at("extents").get<std::vector<int>>();
    if (static_cast<int>(o.size()) != g.dimension || static_cast<int>(e.size()) != g.dimension)
      throw ConfigError("grid sidecar: origin/extents length must equal dimension");
    for (std::size_t a = 0; a < o.size(); ++a) {
      g.origin[a] = o[a];
      g.extents[a] = e[a];
    }
    g.spacing = j.at("spacing").get<double>();
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("grid sidecar: ") + ex.what());
  }
}

void write_pgm_slice(std::ostream& os, const CellMask& mask, int slice) {
  write_pgm(os, mask.grid(), slice, [&](std::size_t i) { return mask.test(i) ? 255 : 0; });
}

void write_pgm_slice(std::ostream& os, const RegionLabeling& labeling, int slice) {
  write_pgm(os, labeling.grid, slice, [&](std::size_t i) -> int {
    const auto id = labeling.mask_labels[i];
    return id < 0 ? 0 : palette(id);
  });
}

}  // namespace hollow
