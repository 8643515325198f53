#ifndef FALLBALL_DEFAULTS_HPP
#define FALLBALL_DEFAULTS_HPP

#include <cstdint>

namespace fallball::defaults {

/// Absolute tolerance on |H - energy_target| when validating a state.
inline constexpr double kEnergyValidationTol = 1e-9;

/// A particle counts as exactly frozen when |q| and |v| are below this.
inline constexpr double kDegeneracyTol = 1e-12;

/// Two candidate event times closer than this (relative to the earlier one)
/// constitute a numerical singularity.
inline constexpr double kEventTieTol = 1e-12;

/// Event-accumulation guard: more than kBurstLimit events inside any window
/// of length kBurstWindow aborts the run.
inline constexpr std::int64_t kBurstLimit = 10000;
inline constexpr double kBurstWindow = 1.0;

/// Post-collision velocity samples retained for burst diagnostics.
inline constexpr int kBurstTailCapacity = 512;

/// Relative step for the finite-difference tangent oracle.
inline constexpr double kFdStep = 1e-6;

/// Tolerance on the section sum constraints when accepting outside input.
inline constexpr double kSectionSumTol = 1e-10;

/// |Q| <= band * |tv|^2 counts as the cone boundary.
inline constexpr double kConeBoundaryBand = 1e-12;

/// Q > band * |tv|^2 counts as strictly inside the cone.
inline constexpr double kStrictConeBand = 1e-10;

/// Singular values below this fraction of the largest are treated as zero
/// in rank decisions (neutral space computation).
inline constexpr double kRankThreshold = 1e-10;

}  // namespace fallball::defaults

#endif
