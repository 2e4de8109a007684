#pragma once

// Command-line front end. Configuration is flat "key = value" text with '#'
// comments; every output embeds the resolved configuration and the tool
// version so it can be reproduced with no other state.
//
// Exit codes: 0 success, 1 computation failed, 2 configuration error,
// 3 budget exceeded.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hollow/maps.hpp"
#include "hollow/topology.hpp"

namespace hollow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;

const char* version_string();

struct RunConfig {
  std::string map = "radial";  // radial | entire | zorich
  int dimension = 2;
  double ki_bound = 1.0;
  std::string norm = "maximum";  // maximum | euclidean

  int n0 = 2;
  double r_prime = 5.0;
  double epsilon = 0.5;
  int knots = 60;
  std::string profile_in;

  double entire_c = 1.0;
  std::vector<double> entire_roots{10.0, 1e4, 1e9, 1e16};  // a_k = 10^{k^2}
  int mm_samples = 256;

  double base_r = 5.0;
  int k_max = 20;
  int ell_max = 4;
  std::vector<double> orbit_start{5.0, 0.0};

  std::vector<double> grid_origin;  // empty: centred on the origin
  double grid_spacing = 0.5;
  std::vector<int> grid_extents;    // empty: 41 per axis (2-D), 21 (3-D)
  int grid_slice = -1;              // -1: middle slice
  std::uint64_t cell_budget = kDefaultCellBudget;
  std::string mask_path;
  std::string fixture = "shell";    // shell | ball | web | halfspace | empty

  int ell0 = 1;
  int k0 = 1;
  int certify_k_max = 8;
  double annulus_inner = 0.9;
  double annulus_outer = 0.0;  // 0: 2 r_{n0+1}
  double annulus_spacing = 0.5;
  double c = 0.0;              // 0: 2 ki_bound
  std::vector<double> c_sweep{1.5, 2.0, 3.0, 4.0};
  double c_d = 1.0;

  int ring_n_first = 0;  // 0: N0
  int ring_n_count = 5;
  int samples_per_ring = 1000;
  double ring_tol = 1e-6;
  int rings_k_max = 4;
  int classify_k = 20;
  int closure_samples = 200;

  std::uint64_t seed = 1;
};

/// Applies "key = value" lines. Unknown keys and malformed values raise
/// ConfigError naming the field.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
/// Checks documented ranges; throws ConfigError naming the field.
void validate_config(const RunConfig& cfg);
/// Every key with its canonical value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

MapFamily build_map(const RunConfig& cfg);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hollow
