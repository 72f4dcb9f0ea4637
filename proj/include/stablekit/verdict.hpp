#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablekit/ops.hpp"
#include "stablekit/scalar.hpp"

namespace stablekit {

enum class VerdictKind { Certified, Falsified, ProbePassed };

// Three-strength answer to any stability query.  Certified carries a
// replayable derivation chain; Falsified carries a re-checkable witness;
// ProbePassed records the probe budget and master seed.  "ProbePassed"
// is deliberately never rendered as "stable".
struct StabilityVerdict {
  VerdictKind kind = VerdictKind::ProbePassed;
  PointC witness;                        // Falsified
  std::vector<std::string> derivation;   // Certified
  int probes = 0;
  std::uint64_t seed = 0;
  int pair_i = -1, pair_j = -1;          // set by the Delta-criterion falsifier
  double violation = 0.0;                // Delta value at the witness

  static StabilityVerdict certified(std::vector<std::string> chain) {
    StabilityVerdict v;
    v.kind = VerdictKind::Certified;
    v.derivation = std::move(chain);
    return v;
  }
  static StabilityVerdict falsified(PointC z) {
    StabilityVerdict v;
    v.kind = VerdictKind::Falsified;
    v.witness = std::move(z);
    return v;
  }
  static StabilityVerdict probe_passed(int probes, std::uint64_t seed) {
    StabilityVerdict v;
    v.kind = VerdictKind::ProbePassed;
    v.probes = probes;
    v.seed = seed;
    return v;
  }

  bool falsified_p() const { return kind == VerdictKind::Falsified; }
  bool positive() const { return kind != VerdictKind::Falsified; }

  const char* kind_name() const {
    switch (kind) {
      case VerdictKind::Certified: return "certified";
      case VerdictKind::Falsified: return "falsified";
      default: return "probe-passed";
    }
  }
};

// Coordinatewise image of the upper half-plane under a Moebius map; the
// region every stability question is conjugated back from.
struct RegionSpec {
  enum class Kind { UpperHalfPlane, RightHalfPlane, UnitDisc, Moebius };
  Kind kind = Kind::UpperHalfPlane;
  std::vector<MoebiusMap> maps;  // Kind::Moebius only, one per coordinate

  static RegionSpec upper_half_plane() { return {}; }
  static RegionSpec right_half_plane() { return {Kind::RightHalfPlane, {}}; }
  static RegionSpec unit_disc() { return {Kind::UnitDisc, {}}; }
  static RegionSpec moebius(std::vector<MoebiusMap> m) {
    for (const auto& mm : m)
      require(std::abs(mm.determinant()) > kEpsZero, "RegionSpec: singular map");
    return {Kind::Moebius, std::move(m)};
  }

  MoebiusMap map_for(int axis) const {
    switch (kind) {
      case Kind::UpperHalfPlane: return MoebiusMap::identity();
      case Kind::RightHalfPlane: return MoebiusMap::upper_to_right();
      case Kind::UnitDisc: return MoebiusMap::upper_to_disc();
      case Kind::Moebius:
        require(axis < static_cast<int>(maps.size()), "RegionSpec: missing coordinate map");
        return maps[axis];
    }
    return MoebiusMap::identity();
  }

  bool is_half_plane() const { return kind == Kind::UpperHalfPlane; }

  // Is w strictly inside the region on this axis?
  bool interior(int axis, Scalar w) const {
    switch (kind) {
      case Kind::UpperHalfPlane: return w.imag() > 0.0;
      case Kind::RightHalfPlane: return w.real() > 0.0;
      case Kind::UnitDisc: return std::abs(w) < 1.0;
      case Kind::Moebius: {
        Scalar z = map_for(axis).inverse().apply(w);
        return z.imag() > 0.0;
      }
    }
    return false;
  }
};

}  // namespace stablekit
