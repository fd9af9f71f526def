#include "rcs/chain.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

std::string to_string(Scheme s) {
    return s == Scheme::rs ? "rs" : "mrc";
}
std::string to_string(PhaseMode m) {
    return m == PhaseMode::analytic ? "analytic" : "dnn";
}
std::string to_string(DetectorMode m) {
    return m == DetectorMode::ml ? "ml" : "dnn";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "rs") return Scheme::rs;
    if (s == "mrc") return Scheme::mrc;
    throw ConfigError("unknown combining scheme '" + s + "' (expected rs or mrc)");
}
PhaseMode phase_mode_from_string(const std::string& s) {
    if (s == "analytic") return PhaseMode::analytic;
    if (s == "dnn") return PhaseMode::dnn;
    throw ConfigError("unknown phase mode '" + s + "' (expected analytic or dnn)");
}
DetectorMode detector_mode_from_string(const std::string& s) {
    if (s == "ml") return DetectorMode::ml;
    if (s == "dnn") return DetectorMode::dnn;
    throw ConfigError("unknown detector mode '" + s + "' (expected ml or dnn)");
}

CascadeSpec ScenarioConfig::direct_spec() const {
    return CascadeSpec::iid(cascade_degree, m, omega);
}

CascadeSpec ScenarioConfig::relay_hop_spec() const {
    // Scenario 2 models the hops to and from the stationary relays as
    // single-stage fading; the moving-endpoint direct link keeps degree K.
    return CascadeSpec::iid(scenario == 2 ? 1 : cascade_degree, m, omega);
}

void ScenarioConfig::validate() const {
    if (scenario != 1 && scenario != 2) {
        throw ConfigError("scenario must be 1 or 2");
    }
    if (relays.empty()) {
        throw ConfigError("at least one relay is required");
    }
    for (const RelayPlacement& placement : relays) {
        if (!(placement.theta >= std::numbers::pi / 2.0) ||
            !(placement.theta < std::numbers::pi)) {
            throw ConfigError("relay angle must lie in [pi/2, pi)");
        }
        if (!(placement.d_sr > 0.0)) {
            throw ConfigError("relay distance must be positive");
        }
    }
    if (elements < 1) {
        throw ConfigError("element count must be at least 1");
    }
    if (cascade_degree < 1) {
        throw ConfigError("cascade degree must be at least 1");
    }
    if (phase_bits < 0) {
        throw ConfigError("phase quantization bits must be nonnegative");
    }
    direct_spec().validate();
    if (modulation_order < 4) {
        throw ConfigError("modulation order must be at least 4");
    }
    if (max_trials < 1) {
        throw ConfigError("trial cap must be positive");
    }
}

ChainContext::ChainContext(const ScenarioConfig& config)
    : config_(config),
      constellation_(Constellation::square_qam(config.modulation_order)),
      direct_sampler_(config.direct_spec()),
      hop_sampler_(config.relay_hop_spec()) {
    config_.validate();
    geometries_.reserve(config_.relays.size());
    for (const RelayPlacement& placement : config_.relays) {
        geometries_.push_back(
            solve_geometry(placement.d_sr, placement.theta, config_.path_loss_exponent));
    }
}

void ChainContext::draw(const NoiseModel& noise, RngStream& rng, TrialDraws& out) const {
    const std::size_t relays = config_.relays.size();
    const auto n = static_cast<std::size_t>(config_.elements);

    out.symbol = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(config_.modulation_order)));
    out.h_sd = direct_sampler_.coefficient(rng);

    out.h_sr.resize(relays * n);
    out.h_rd.resize(relays * n);
    for (std::size_t rel = 0; rel < relays; ++rel) {
        for (std::size_t e = 0; e < n; ++e) {
            out.h_sr[rel * n + e] = hop_sampler_.coefficient(rng);
        }
        for (std::size_t e = 0; e < n; ++e) {
            out.h_rd[rel * n + e] = hop_sampler_.coefficient(rng);
        }
    }

    out.noise.resize(relays + 1);
    for (std::size_t b = 0; b < out.noise.size(); ++b) {
        out.noise[b] = draw_noise(noise, rng);
    }
}

std::vector<double> ChainContext::analytic_phases(const TrialDraws& draws) const {
    std::vector<double> phases = optimal_phases(draws.h_sr, draws.h_rd);
    if (config_.phase_bits > 0) {
        phases = quantize_phases(phases, config_.phase_bits);
    }
    return phases;
}

ChainContext::Combined ChainContext::combine(const TrialDraws& draws,
                                             std::span<const double> phases) const {
    const std::size_t relays = config_.relays.size();
    const auto n = static_cast<std::size_t>(config_.elements);
    if (phases.size() != relays * n) {
        throw ParameterError("phase vector does not cover every relay element");
    }
    const std::complex<double> s = constellation_.point(draws.symbol);

    // Per-relay composite gains and branch observations.
    std::vector<std::complex<double>> h_relay(relays);
    for (std::size_t rel = 0; rel < relays; ++rel) {
        std::complex<double> sum = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t i = rel * n + e;
            sum += draws.h_sr[i] * std::polar(1.0, phases[i]) * draws.h_rd[i];
        }
        h_relay[rel] = geometries_[rel].amplitude_gain() * sum;
    }

    Combined out;
    if (config_.scheme == Scheme::mrc) {
        std::vector<BranchObservation> branches;
        branches.reserve(relays + 1);
        branches.push_back({draws.h_sd * s + draws.noise[0], draws.h_sd, BranchKind::direct, -1});
        for (std::size_t rel = 0; rel < relays; ++rel) {
            branches.push_back({h_relay[rel] * s + draws.noise[rel + 1], h_relay[rel],
                                BranchKind::relay, static_cast<int>(rel)});
        }
        const MrcOutput combined = mrc_combine(branches);
        out.r = combined.r;
        out.h_eff = combined.h;
        out.selected_relay = -1;
        return out;
    }

    // Relay selection: strongest instantaneous composite power wins, which
    // tracks the lowest conditional error probability. Metrics are negated
    // powers so that the generic lowest-metric rule applies.
    std::vector<double> metrics(relays);
    for (std::size_t rel = 0; rel < relays; ++rel) {
        metrics[rel] = -std::norm(h_relay[rel]);
    }
    const std::size_t best = select_relay(metrics);
    out.selected_relay = static_cast<int>(best);

    const std::complex<double> r_best = h_relay[best] * s + draws.noise[best + 1];
    if (config_.rs_include_direct) {
        const std::vector<BranchObservation> branches = {
            {draws.h_sd * s + draws.noise[0], draws.h_sd, BranchKind::direct, -1},
            {r_best, h_relay[best], BranchKind::relay, static_cast<int>(best)},
        };
        const MrcOutput combined = mrc_combine(branches);
        out.r = combined.r;
        out.h_eff = combined.h;
    } else {
        out.r = r_best;
        out.h_eff = h_relay[best];
    }
    return out;
}

} // namespace rcs
