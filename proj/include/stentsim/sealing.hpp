#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stentsim/stent_mesh.hpp"
#include "stentsim/wall_model.hpp"

namespace stentsim {

inline constexpr double kDefaultSealThresholdMm = 1.0;
inline constexpr double kDefaultRingThresholdPct = 75.0;
inline constexpr double kDefaultMinZoneAreaMm2 = 300.0;

/// Stent-to-wall gap per vertex and the resulting tight/loose flag.
struct FitGrid {
  int rings = 0;
  int segments = 0;
  double t_seal_mm = kDefaultSealThresholdMm;
  std::vector<std::optional<double>> gap_mm;  // empty where no wall was found
  std::vector<unsigned char> tight;

  std::optional<double> gap(int i, int j) const { return gap_mm.at(slot(i, j)); }
  bool is_tight(int i, int j) const { return tight.at(slot(i, j)) != 0; }
  std::size_t slot(int i, int j) const { return static_cast<std::size_t>(i) * segments + j; }
};

/// gap = max(wall - stent, 0); tight iff gap < t_seal. Missing walls are loose.
FitGrid classify_fit(const StentMesh& m, const WallModel& w,
                     double t_seal_mm = kDefaultSealThresholdMm);

/// 100 * (tight segments in ring) / S, for every ring.
std::vector<double> per_ring_percentages(const FitGrid& f);

/// Inclusive ring interval; empty when end < begin.
struct RingRange {
  int begin = 0;
  int end = -1;

  bool empty() const noexcept { return end < begin; }
  int count() const noexcept { return empty() ? 0 : end - begin + 1; }
  bool contains(int i) const noexcept { return i >= begin && i <= end; }
  friend bool operator==(const RingRange&, const RingRange&) = default;
};

struct ZoneSplit {
  RingRange proximal;
  RingRange distal;
};

/// Proximal zone: longest run of sealing rings (pct >= threshold) starting
/// at ring 0; distal zone: longest run ending at ring R-1. When every ring
/// seals, the first floor(R/2) rings go proximal and the rest distal.
ZoneSplit separate_zones(const FitGrid& f, double ring_threshold_pct = kDefaultRingThresholdPct);

/// Triangles with all three vertices tight whose lowest ring lies in `zone`.
std::vector<int> zone_triangles(const StentMesh& m, const FitGrid& f, RingRange zone);
double zone_area(const StentMesh& m, const FitGrid& f, RingRange zone);

/// Area of A's collision-enabled triangles whose three vertices all lie
/// within `collision_radius_mm` of a collision-enabled vertex of B.
double bifurcation_overlap_area(const StentMesh& a, const StentMesh& b,
                                double collision_radius_mm);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kTightColor{0, 0, 255};
inline constexpr Rgb kLooseColor{0, 255, 0};

/// The ring x segment grid flattened to 2-D, ring 0 on top.
struct UnfoldedMap {
  int rings = 0;
  int segments = 0;
  std::vector<unsigned char> tight;

  Rgb color(int i, int j) const {
    return tight.at(static_cast<std::size_t>(i) * segments + j) ? kTightColor : kLooseColor;
  }
};

UnfoldedMap build_unfolded_map(const FitGrid& f);

/// Binary PPM (P6), each cell a `cell_px` square block.
void write_ppm(const UnfoldedMap& map, std::ostream& out, int cell_px = 8);

enum class ZoneKind { kProximal, kDistal };
enum class Verdict { kAdequate, kInadequate };

std::string_view to_string(ZoneKind kind);
std::string_view to_string(Verdict verdict);

struct SealingZone {
  ZoneKind which = ZoneKind::kProximal;
  std::string limb;
  RingRange rings;
  double area_mm2 = 0.0;
  std::vector<std::pair<int, double>> per_ring_pct;
  bool required = true;
};

struct LimbSealing {
  std::string limb;
  SealingZone proximal;
  SealingZone distal;
  std::vector<double> per_ring_pct;  // every ring
};

/// Sealing analysis of one limb as it enters the report.
struct LimbSealingInput {
  std::string limb;
  ZoneSplit zones;
  double proximal_area_mm2 = 0.0;
  double distal_area_mm2 = 0.0;
  std::vector<double> per_ring_pct;
};

struct SealingReport {
  StentKind kind = StentKind::kI;
  std::vector<LimbSealing> limbs;
  double total_sealing_area_mm2 = 0.0;
  std::optional<double> bifurcation_overlap_area_mm2;
  double a_min_mm2 = kDefaultMinZoneAreaMm2;
  double t_seal_mm = kDefaultSealThresholdMm;
  double ring_threshold_pct = kDefaultRingThresholdPct;
  Verdict verdict = Verdict::kInadequate;
};

/// Required zones: proximal + distal of the single limb (I); the first
/// limb's proximal zone (the shared trunk) plus both distal zones (Y). The
/// second limb's proximal zone repeats the trunk and is reported but not
/// counted. Adequate iff every required zone area >= a_min.
SealingReport build_report(std::span<const LimbSealingInput> limbs, StentKind kind,
                           std::optional<double> bifurcation_overlap_area_mm2,
                           double a_min_mm2 = kDefaultMinZoneAreaMm2,
                           double t_seal_mm = kDefaultSealThresholdMm,
                           double ring_threshold_pct = kDefaultRingThresholdPct);

/// classify -> percentages -> zones -> areas for one limb.
LimbSealingInput analyze_limb(const StentMesh& m, const FitGrid& f,
                              double ring_threshold_pct = kDefaultRingThresholdPct);

}  // namespace stentsim
