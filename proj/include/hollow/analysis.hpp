#pragma once

// Experiment drivers: the logarithmic lower bound for the mu_G point-pair
// function, the engulfing certificate B(0, M^k(r,f)) subset T(f^{k+l}(G)),
// and the wandering-ring checks for hollow regions.
//
// For the radial model, regions that are unions of max-norm annuli are imaged
// exactly (endpoints pushed through g). Topological verdicts on such regions
// are computed on a warped grid: the radial coordinate is replaced by its rank
// among the breakpoints involved, which is an order-preserving homeomorphism
// and leaves hulls, fullness and "surrounds" unchanged.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hollow/escape.hpp"
#include "hollow/maps.hpp"
#include "hollow/topology.hpp"

namespace hollow {

struct MuEstimate {
  double value = 0.0;  // scaled lower bound c_d ln(1 + |a-b| / min(dist))
  double c_d = 1.0;
  double separation = 0.0;
  double dist_a = 0.0;
  double dist_b = 0.0;
};

/// Throws DomainError for nonpositive distances.
MuEstimate mu_lower_bound(std::span<const double> a, std::span<const double> b, double dist_a, double dist_b,
                          double c_d = 1.0);

/// ki_bound^k * mu_start.
double mu_chain_bound(double ki_bound, int k, double mu_start);

/// {inner < |x|_inf < outer}, or the ball {|x|_inf < outer} when
/// includes_origin is set (inner is then zero).
struct Annulus {
  LogMag inner;
  LogMag outer;
  bool includes_origin = false;
};

/// Disjoint annuli sorted by radius.
struct PolarRegion {
  std::vector<Annulus> annuli;

  /// Radius of the largest origin-centred ball inside the hull.
  LogMag hull_inradius() const;
  /// dist(0, region).
  LogMag inner_radius() const;
  bool includes_origin() const { return !annuli.empty() && annuli.front().includes_origin; }
};

/// Recovers the annuli when the mask depends on |x|_inf only and the grid is
/// centred on the origin; nullopt otherwise. Cell centres at radius rho
/// contribute the shell (rho - h/2, rho + h/2) for spacing h.
std::optional<PolarRegion> extract_polar_region(const CellMask& mask);

/// f^j(region) for the radial model.
PolarRegion image_region(const MapFamily& map, const PolarRegion& region, int j);

/// Rasterises regions and balls on one shared warped grid of dimension
/// min(3, max(2, d)). Element i of the result is the mask of regions[i]; the
/// balls follow.
std::vector<CellMask> rasterize_warped(int dimension, std::span<const PolarRegion> regions,
                                       std::span<const LogMag> ball_radii = {});

struct EngulfingCheck {
  int ell;
  int k;
  bool grid_verdict;
  bool scalar_verdict;
};

struct IntermediateClaim {
  int k;
  LogMag outer_distance;  // dist(0, boundary_out f^{k+l0}(G))
  LogMag ladder_level;    // M^{k-1}
  bool holds;
};

struct CertificateReport {
  bool hypothesis_ok = false;
  std::optional<int> ell;
  int k_first = 1;
  int k_last = 0;
  std::optional<int> k2;
  double c = 2.0;
  std::vector<std::pair<int, std::string>> failures;
  LogMag ki_power_used;
  bool approximate = false;
  std::optional<std::size_t> witness_x;  // cell indices in G
  std::optional<std::size_t> witness_y;
  std::optional<MuEstimate> witness_mu;
  std::vector<EngulfingCheck> checks;
  std::vector<IntermediateClaim> claims;
};

struct CertifyOptions {
  int ell0 = 1;
  int k0 = 1;
  int k_max = 8;
  int ell_max = 4;
  std::optional<double> c;  // default 2 * ki_bound
  double c_d = 1.0;
  unsigned threads = 1;
};

/// Engulfing certificate for a region G given as a mask. Witnesses x, y for
/// the separation hypothesis are the best fast-escaping cell and the cell of
/// slowest growth.
CertificateReport certify_engulfing(const MapFamily& map, const CellMask& g_mask, LogMag base_r,
                                    const CertifyOptions& opt);

struct WanderingStep {
  int k;
  Annulus ring;  // U_k (exact for the radial model)
  bool bounded = false;
  bool hollow = false;
  bool surrounds_previous = true;   // U_k surrounds U_{k-1}
  bool surrounds_two_back = true;   // U_k surrounds U_{k-2}
  bool distance_increasing = true;  // dist(0,U_k) > dist(0,U_{k-1})
  bool passed() const {
    return bounded && hollow && surrounds_previous && surrounds_two_back && distance_increasing;
  }
};

struct WanderingReport {
  bool applicable = true;
  std::string inapplicable_reason;
  bool approximate = false;
  std::vector<WanderingStep> steps;  // k = 0..k_max
  std::optional<int> k_first_pass;   // all assertions hold on [k_first_pass, k_max]
  std::optional<int> closure_ell;    // smallest l with closure(U_l) fast escaping at offset 0
  std::size_t closure_samples = 0;
  std::vector<std::string> failures;
};

struct WanderingOptions {
  int ell_max = 4;
  int classify_k = 20;
  int closure_samples = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Requires U0 not to touch the grid border. A full U0 is reported as
/// inapplicable. Non-radial maps are imaged approximately on U0's own grid
/// and raise DomainError ("box too small") when an image reaches the border.
WanderingReport check_wandering_rings(const MapFamily& map, const CellMask& u0_mask, int k_max, LogMag base_r,
                                      const WanderingOptions& opt = {});

/// Square annulus fixture {inner < |x|_inf < outer} on a grid centred on the
/// origin with the given half-width (in cells).
CellMask square_annulus_mask(int dimension, double spacing, int half_cells, double inner, double outer);

}  // namespace hollow
