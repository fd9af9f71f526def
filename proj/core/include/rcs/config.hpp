#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcs/detector_dnn.hpp"
#include "rcs/scenario.hpp"

namespace rcs {

struct ChannelsSection {
    int scenario = 1;
    int cascade_degree = 2;
    double m = 3.0;
    double omega = 1.0;
};

struct GeometrySection {
    double path_loss_exponent = 4.0;
    std::vector<RelayPlacement> relays{{0.5}, {0.7}};
};

struct RisSection {
    int elements = 8;
    int phase_bits = 0;
};

struct ModemSection {
    int order = 4;
};

struct TrainingSection {
    int batch_size = 256;
    double learning_rate = 0.003;
    double validation_split = 0.1;
    int validation_frequency = 10;
    std::uint64_t relay_samples = 400'000;
    int relay_steps = 600;
    std::uint64_t detector_samples = 50'000;
    int detector_steps = 400;
    std::string detector_snr_policy = "uniform_grid"; // or "fixed"
    double detector_fixed_snr_db = 10.0;
};

/// Sweep variants. The axis lists multiply out into one scenario per
/// combination; empty axes fall back to the base sections.
struct SweepSection {
    std::vector<std::string> schemes{"rs"};
    std::vector<std::string> phase_modes{"analytic"};
    std::vector<std::string> detector_modes{"ml"};
    std::vector<int> elements;        // overrides ris.elements
    std::vector<int> cascade_degrees; // overrides channels.cascade_degree
    std::vector<double> m_values;     // overrides channels.m
    std::vector<double> snr_grid_db;  // default 0..30 dB in 2.5 dB steps
    std::uint64_t max_trials = 2'000'000;
    std::uint64_t min_bit_errors = 200;
    bool rs_include_direct = false;
    bool noise_enabled = true;
};

struct RunConfig {
    ChannelsSection channels;
    GeometrySection geometry;
    RisSection ris;
    ModemSection modem;
    TrainingSection training;
    SweepSection sweep;

    /// The resolved document (presets applied, defaults filled in); loading
    /// this echo again reproduces the same RunConfig.
    std::string echo_json() const;
};

/// Parse a config document. Unknown keys anywhere are rejected. When
/// `preset` is set, the named entry of the document's "presets" section is
/// deep-merged over the base sections first.
RunConfig load_config(const std::filesystem::path& path,
                      const std::optional<std::string>& preset = std::nullopt);
RunConfig parse_config(const std::string& json_text,
                       const std::optional<std::string>& preset = std::nullopt);

/// Preset names defined by a document, in declaration order.
std::vector<std::string> list_presets(const std::filesystem::path& path);

/// Expand the sweep axes into concrete scenarios, in axis-major order:
/// elements, cascade degrees, m values, schemes, phase modes, detector
/// modes.
std::vector<ScenarioConfig> expand_scenarios(const RunConfig& config, std::uint64_t seed);

/// Base scenario (first point of every axis), used for training runs.
ScenarioConfig base_scenario(const RunConfig& config, std::uint64_t seed);

/// Training settings for one of the two networks.
TrainConfig relay_train_config(const RunConfig& config, std::uint64_t seed);
TrainConfig detector_train_config(const RunConfig& config, std::uint64_t seed);
SnrPolicy detector_snr_policy(const RunConfig& config);

/// Reproducibility sidecar written next to every artifact-producing run.
struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_echo_json;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> inputs;  // name -> path:crc32
    std::map<std::string, std::string> outputs; // name -> path:crc32
    std::string started_utc;
    std::string finished_utc;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Current UTC time as an ISO-8601 string.
std::string utc_timestamp();

} // namespace rcs
