#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcs/channel.hpp"

namespace rcs {

enum class Scheme { rs, mrc };
enum class PhaseMode { analytic, dnn };
enum class DetectorMode { ml, dnn };

std::string to_string(Scheme s);
std::string to_string(PhaseMode m);
std::string to_string(DetectorMode m);
Scheme scheme_from_string(const std::string& s);
PhaseMode phase_mode_from_string(const std::string& s);
DetectorMode detector_mode_from_string(const std::string& s);

struct RelayPlacement {
    double d_sr = 0.5;
    double theta = 2.0943951023931953; // 2*pi/3, the documented default
};

/// Full description of one simulated configuration. Scenario 1 puts the
/// cascade of degree K on every link; scenario 2 keeps it on the direct
/// link only and leaves the relay hops single-stage.
struct ScenarioConfig {
    int scenario = 1;
    std::vector<RelayPlacement> relays{{0.5}, {0.7}};
    int elements = 8;       // reflecting elements per relay
    int cascade_degree = 2; // K
    double m = 3.0;
    double omega = 1.0;
    double path_loss_exponent = 4.0;
    int modulation_order = 4;
    Scheme scheme = Scheme::rs;
    PhaseMode phase_mode = PhaseMode::analytic;
    DetectorMode detector_mode = DetectorMode::ml;
    bool rs_include_direct = false; // add the direct branch after selection
    bool noise_enabled = true;
    int phase_bits = 0; // 0 = continuous reflection phases

    std::vector<double> snr_grid_db;
    std::uint64_t max_trials = 2'000'000;
    std::uint64_t min_bit_errors = 200;
    std::uint64_t seed = 1;

    std::size_t relay_count() const { return relays.size(); }
    CascadeSpec direct_spec() const;
    CascadeSpec relay_hop_spec() const;
    void validate() const;
};

/// One swept point: the configuration echo plus the measured rate.
struct BerRecord {
    int scenario = 1;
    Scheme scheme = Scheme::rs;
    PhaseMode phase_mode = PhaseMode::analytic;
    DetectorMode detector_mode = DetectorMode::ml;
    std::size_t relay_count = 2;
    int elements = 8;
    int cascade_degree = 2;
    double m = 3.0;
    double path_loss_exponent = 4.0;
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    std::uint64_t seed = 1;
    double wall_seconds = 0.0;
};

} // namespace rcs
