#include "rcs/combining.hpp"

#include "rcs/errors.hpp"

namespace rcs {

MrcOutput mrc_combine(std::span<const BranchObservation> branches) {
    if (branches.empty()) {
        throw ParameterError("cannot combine an empty branch list");
    }
    MrcOutput out;
    for (const BranchObservation& branch : branches) {
        out.r += std::conj(branch.h_eff) * branch.r;
        out.h += std::norm(branch.h_eff);
    }
    return out;
}

std::size_t select_relay(std::span<const double> metrics) {
    if (metrics.empty()) {
        throw ParameterError("cannot select from an empty metric list");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < metrics.size(); ++i) {
        if (metrics[i] < metrics[best]) {
            best = i;
        }
    }
    return best;
}

int detect_mrc(const MrcOutput& combined, const Constellation& constellation) {
    return demodulate_ml(combined.r, combined.h, constellation);
}

} // namespace rcs
