#include "rcs/ris.hpp"

#include <cmath>
#include <numbers>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) {
        phi += kTwoPi;
    }
    return phi;
}

} // namespace

void RisRelayState::validate() const {
    if (h_sr.size() != h_rd.size() || h_sr.size() != phi.size()) {
        throw ParameterError("relay state vectors must share one element count");
    }
    if (h_sr.empty()) {
        throw ParameterError("relay must carry at least one reflecting element");
    }
}

NoiseModel NoiseModel::from_snr_db(double snr_db) {
    NoiseModel model;
    model.n0 = std::pow(10.0, -snr_db / 10.0);
    model.enabled = true;
    return model;
}

NoiseModel NoiseModel::disabled() {
    NoiseModel model;
    model.enabled = false;
    return model;
}

double NoiseModel::sigma_per_dim() const {
    return enabled ? std::sqrt(0.5 * n0) : 0.0;
}

void NoiseModel::validate() const {
    if (enabled && !(n0 > 0.0)) {
        throw ParameterError("noise power must be positive when enabled");
    }
}

std::vector<double> optimal_phases(std::span<const ChannelCoefficient> h_sr,
                                   std::span<const ChannelCoefficient> h_rd) {
    if (h_sr.size() != h_rd.size()) {
        throw ParameterError("hop coefficient lists differ in length");
    }
    std::vector<double> phases(h_sr.size());
    for (std::size_t n = 0; n < h_sr.size(); ++n) {
        phases[n] = wrap_angle(-(std::arg(h_sr[n]) + std::arg(h_rd[n])));
    }
    return phases;
}

std::vector<double> quantize_phases(std::span<const double> phases, int bits) {
    std::vector<double> out(phases.begin(), phases.end());
    if (bits <= 0) {
        return out;
    }
    const double levels = static_cast<double>(1 << bits);
    const double step = kTwoPi / levels;
    for (double& phi : out) {
        phi = wrap_angle(std::round(wrap_angle(phi) / step) * step);
    }
    return out;
}

std::complex<double> effective_relay_channel(const RisRelayState& state) {
    state.validate();
    std::complex<double> sum = 0.0;
    for (std::size_t n = 0; n < state.h_sr.size(); ++n) {
        sum += state.h_sr[n] * std::polar(1.0, state.phi[n]) * state.h_rd[n];
    }
    return state.geometry.amplitude_gain() * sum;
}

std::complex<double> receive_direct(std::complex<double> s, ChannelCoefficient h_sd,
                                    const NoiseModel& noise, RngStream& rng) {
    return h_sd * s + draw_noise(noise, rng);
}

std::complex<double> receive_relay(std::complex<double> s, const RisRelayState& state,
                                   const NoiseModel& noise, RngStream& rng) {
    return effective_relay_channel(state) * s + draw_noise(noise, rng);
}

std::complex<double> draw_noise(const NoiseModel& noise, RngStream& rng) {
    noise.validate();
    if (!noise.enabled) {
        return 0.0;
    }
    return rng.complex_normal(noise.sigma_per_dim());
}

} // namespace rcs
