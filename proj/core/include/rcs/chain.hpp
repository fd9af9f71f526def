#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rcs/combining.hpp"
#include "rcs/mlp.hpp"
#include "rcs/ris.hpp"
#include "rcs/scenario.hpp"

namespace rcs {

/// Everything random about one transmission, drawn up front in a fixed
/// order (symbol, direct link, relay hops, branch noise) so that paired
/// configurations sharing a seed see identical realizations. Per-relay
/// element coefficients are flattened as [relay * N + element].
struct TrialDraws {
    int symbol = 0;
    ChannelCoefficient h_sd;
    std::vector<ChannelCoefficient> h_sr;
    std::vector<ChannelCoefficient> h_rd;
    std::vector<std::complex<double>> noise; // [0] direct, [1..L] relays
};

/// Precomputed per-config state shared by every trial.
class ChainContext {
public:
    explicit ChainContext(const ScenarioConfig& config);

    const ScenarioConfig& config() const { return config_; }
    const std::vector<RelayGeometry>& geometries() const { return geometries_; }
    const Constellation& constellation() const { return constellation_; }

    void draw(const NoiseModel& noise, RngStream& rng, TrialDraws& out) const;

    /// Reflection phases for every relay element under the analytic rule,
    /// flattened like the draws.
    std::vector<double> analytic_phases(const TrialDraws& draws) const;

    /// Combined observation under the configured scheme. `phases` is the
    /// flattened per-element phase vector actually applied at the relays.
    struct Combined {
        std::complex<double> r;
        std::complex<double> h_eff;
        int selected_relay = -1; // -1 under MRC
    };
    Combined combine(const TrialDraws& draws, std::span<const double> phases) const;

private:
    ScenarioConfig config_;
    std::vector<RelayGeometry> geometries_;
    Constellation constellation_;
    CascadeSampler direct_sampler_;
    CascadeSampler hop_sampler_;
};

} // namespace rcs
