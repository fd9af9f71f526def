#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rcs/qam.hpp"

namespace rcs {

enum class BranchKind { direct, relay };

/// One receive branch: the noisy observation and the effective complex
/// channel gain it saw (perfect channel knowledge at the destination).
struct BranchObservation {
    std::complex<double> r;
    std::complex<double> h_eff;
    BranchKind kind = BranchKind::direct;
    int relay_index = -1;
};

/// Conjugate-weighted combination across branches. `r` carries
/// sum_b conj(h_b) r_b and `h` the real composite gain sum_b |h_b|^2.
struct MrcOutput {
    std::complex<double> r;
    double h = 0.0;
};

/// Maximum ratio combining; throws on an empty branch list.
MrcOutput mrc_combine(std::span<const BranchObservation> branches);

/// Index of the minimum metric (lower is more reliable); ties resolve to
/// the lowest index. Throws on an empty list.
std::size_t select_relay(std::span<const double> metrics);

/// Symbol decision on the combined observation.
int detect_mrc(const MrcOutput& combined, const Constellation& constellation);

} // namespace rcs
