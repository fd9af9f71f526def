#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rcs/channel.hpp"
#include "rcs/rng.hpp"

namespace rcs {

/// One reflecting relay: per-element coefficients for the two hops, the
/// applied reflection phases (radians in [0, 2*pi)), and the placement.
struct RisRelayState {
    std::vector<ChannelCoefficient> h_sr;
    std::vector<ChannelCoefficient> h_rd;
    std::vector<double> phi;
    RelayGeometry geometry;

    std::size_t elements() const { return h_sr.size(); }
    void validate() const;
};

/// Complex-baseband noise description. `n0` is the total noise power with
/// unit symbol energy, half per dimension. A disabled model adds nothing.
struct NoiseModel {
    double n0 = 1.0;
    bool enabled = true;

    /// n0 = 10^(-snr_db / 10) with unit symbol energy.
    static NoiseModel from_snr_db(double snr_db);
    static NoiseModel disabled();

    double sigma_per_dim() const;
    void validate() const;
};

/// Reflection phases that make every element's two-hop product real and
/// nonnegative: phi_n = -(arg h_sr,n + arg h_rd,n) wrapped to [0, 2*pi).
/// This maximises the coherent sum magnitude over all phase choices.
std::vector<double> optimal_phases(std::span<const ChannelCoefficient> h_sr,
                                   std::span<const ChannelCoefficient> h_rd);

/// Round phases to a 2^bits-level uniform grid on [0, 2*pi); bits == 0
/// leaves them continuous.
std::vector<double> quantize_phases(std::span<const double> phases, int bits);

/// Noiseless composite gain of a reflecting relay:
/// sqrt(gain_sr * gain_rd) * sum_n h_sr,n e^{j phi_n} h_rd,n.
std::complex<double> effective_relay_channel(const RisRelayState& state);

/// Direct-link observation: h_sd * s + n.
std::complex<double> receive_direct(std::complex<double> s, ChannelCoefficient h_sd,
                                    const NoiseModel& noise, RngStream& rng);

/// Relay-path observation: effective_relay_channel(state) * s + n.
std::complex<double> receive_relay(std::complex<double> s, const RisRelayState& state,
                                   const NoiseModel& noise, RngStream& rng);

/// One complex noise draw under the model (zero when disabled).
std::complex<double> draw_noise(const NoiseModel& noise, RngStream& rng);

} // namespace rcs
