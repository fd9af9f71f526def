#include "rcs/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value type for '") + key + "'");
    }
}

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (double snr = 0.0; snr <= 30.0 + 1e-9; snr += 2.5) {
        grid.push_back(snr);
    }
    return grid;
}

std::vector<double> parse_snr_grid(const json& node) {
    if (node.is_array()) {
        auto grid = node.get<std::vector<double>>();
        if (grid.empty()) {
            throw ConfigError("sweep.snr_db list is empty");
        }
        return grid;
    }
    if (node.is_object()) {
        reject_unknown_keys(node, {"start", "stop", "step"}, "sweep.snr_db");
        const double start = get_or(node, "start", 0.0);
        const double stop = get_or(node, "stop", 30.0);
        const double step = get_or(node, "step", 2.5);
        if (!(step > 0.0) || stop < start) {
            throw ConfigError("sweep.snr_db range must have positive step and stop >= start");
        }
        std::vector<double> grid;
        for (double snr = start; snr <= stop + 1e-9; snr += step) {
            grid.push_back(snr);
        }
        return grid;
    }
    throw ConfigError("sweep.snr_db must be a list or a {start, stop, step} object");
}

void merge_patch(json& base, const json& patch, const std::string& where) {
    if (!patch.is_object()) {
        throw ConfigError("preset entry " + where + " must be an object");
    }
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && base.contains(key) && base.at(key).is_object()) {
            merge_patch(base.at(key), value, where + "." + key);
        } else {
            base[key] = value;
        }
    }
}

RunConfig parse_document(const json& doc) {
    reject_unknown_keys(doc, {"channels", "geometry", "ris", "modem", "training", "sweep",
                              "presets"},
                        "config root");

    RunConfig cfg;

    if (doc.contains("channels")) {
        const json& node = doc.at("channels");
        reject_unknown_keys(node, {"scenario", "cascade_degree", "m", "omega"}, "channels");
        cfg.channels.scenario = get_or(node, "scenario", cfg.channels.scenario);
        cfg.channels.cascade_degree =
            get_or(node, "cascade_degree", cfg.channels.cascade_degree);
        cfg.channels.m = get_or(node, "m", cfg.channels.m);
        cfg.channels.omega = get_or(node, "omega", cfg.channels.omega);
    }

    if (doc.contains("geometry")) {
        const json& node = doc.at("geometry");
        reject_unknown_keys(node, {"path_loss_exponent", "relays"}, "geometry");
        cfg.geometry.path_loss_exponent =
            get_or(node, "path_loss_exponent", cfg.geometry.path_loss_exponent);
        if (node.contains("relays")) {
            if (!node.at("relays").is_array() || node.at("relays").empty()) {
                throw ConfigError("geometry.relays must be a non-empty list");
            }
            cfg.geometry.relays.clear();
            for (const json& relay : node.at("relays")) {
                reject_unknown_keys(relay, {"d_sr", "theta"}, "geometry.relays[]");
                RelayPlacement placement;
                placement.d_sr = get_or(relay, "d_sr", placement.d_sr);
                placement.theta = get_or(relay, "theta", placement.theta);
                cfg.geometry.relays.push_back(placement);
            }
        }
    }

    if (doc.contains("ris")) {
        const json& node = doc.at("ris");
        reject_unknown_keys(node, {"elements", "phase_bits"}, "ris");
        cfg.ris.elements = get_or(node, "elements", cfg.ris.elements);
        cfg.ris.phase_bits = get_or(node, "phase_bits", cfg.ris.phase_bits);
    }

    if (doc.contains("modem")) {
        const json& node = doc.at("modem");
        reject_unknown_keys(node, {"order"}, "modem");
        cfg.modem.order = get_or(node, "order", cfg.modem.order);
    }

    if (doc.contains("training")) {
        const json& node = doc.at("training");
        reject_unknown_keys(node,
                            {"batch_size", "learning_rate", "validation_split",
                             "validation_frequency", "relay", "detector"},
                            "training");
        cfg.training.batch_size = get_or(node, "batch_size", cfg.training.batch_size);
        cfg.training.learning_rate = get_or(node, "learning_rate", cfg.training.learning_rate);
        cfg.training.validation_split =
            get_or(node, "validation_split", cfg.training.validation_split);
        cfg.training.validation_frequency =
            get_or(node, "validation_frequency", cfg.training.validation_frequency);
        if (node.contains("relay")) {
            const json& relay = node.at("relay");
            reject_unknown_keys(relay, {"samples", "steps"}, "training.relay");
            cfg.training.relay_samples = get_or(relay, "samples", cfg.training.relay_samples);
            cfg.training.relay_steps = get_or(relay, "steps", cfg.training.relay_steps);
        }
        if (node.contains("detector")) {
            const json& det = node.at("detector");
            reject_unknown_keys(det, {"samples", "steps", "snr_policy", "fixed_snr_db"},
                                "training.detector");
            cfg.training.detector_samples = get_or(det, "samples", cfg.training.detector_samples);
            cfg.training.detector_steps = get_or(det, "steps", cfg.training.detector_steps);
            cfg.training.detector_snr_policy =
                get_or(det, "snr_policy", cfg.training.detector_snr_policy);
            cfg.training.detector_fixed_snr_db =
                get_or(det, "fixed_snr_db", cfg.training.detector_fixed_snr_db);
        }
        if (cfg.training.detector_snr_policy != "uniform_grid" &&
            cfg.training.detector_snr_policy != "fixed") {
            throw ConfigError("training.detector.snr_policy must be uniform_grid or fixed");
        }
    }

    cfg.sweep.snr_grid_db = default_snr_grid();
    if (doc.contains("sweep")) {
        const json& node = doc.at("sweep");
        reject_unknown_keys(node,
                            {"schemes", "phase_modes", "detector_modes", "elements",
                             "cascade_degrees", "m_values", "snr_db", "max_trials",
                             "min_bit_errors", "rs_include_direct", "noise_enabled"},
                            "sweep");
        cfg.sweep.schemes = get_or(node, "schemes", cfg.sweep.schemes);
        cfg.sweep.phase_modes = get_or(node, "phase_modes", cfg.sweep.phase_modes);
        cfg.sweep.detector_modes = get_or(node, "detector_modes", cfg.sweep.detector_modes);
        cfg.sweep.elements = get_or(node, "elements", cfg.sweep.elements);
        cfg.sweep.cascade_degrees = get_or(node, "cascade_degrees", cfg.sweep.cascade_degrees);
        cfg.sweep.m_values = get_or(node, "m_values", cfg.sweep.m_values);
        if (node.contains("snr_db")) {
            cfg.sweep.snr_grid_db = parse_snr_grid(node.at("snr_db"));
        }
        cfg.sweep.max_trials = get_or(node, "max_trials", cfg.sweep.max_trials);
        cfg.sweep.min_bit_errors = get_or(node, "min_bit_errors", cfg.sweep.min_bit_errors);
        cfg.sweep.rs_include_direct =
            get_or(node, "rs_include_direct", cfg.sweep.rs_include_direct);
        cfg.sweep.noise_enabled = get_or(node, "noise_enabled", cfg.sweep.noise_enabled);
    }

    // Surface contradictions now rather than mid-run.
    for (const std::string& s : cfg.sweep.schemes) {
        scheme_from_string(s);
    }
    for (const std::string& s : cfg.sweep.phase_modes) {
        phase_mode_from_string(s);
    }
    for (const std::string& s : cfg.sweep.detector_modes) {
        detector_mode_from_string(s);
    }
    base_scenario(cfg, 1).validate();
    return cfg;
}

json document_echo(const RunConfig& cfg) {
    json relays = json::array();
    for (const RelayPlacement& placement : cfg.geometry.relays) {
        relays.push_back({{"d_sr", placement.d_sr}, {"theta", placement.theta}});
    }
    json doc = {
        {"channels",
         {{"scenario", cfg.channels.scenario},
          {"cascade_degree", cfg.channels.cascade_degree},
          {"m", cfg.channels.m},
          {"omega", cfg.channels.omega}}},
        {"geometry",
         {{"path_loss_exponent", cfg.geometry.path_loss_exponent}, {"relays", relays}}},
        {"ris", {{"elements", cfg.ris.elements}, {"phase_bits", cfg.ris.phase_bits}}},
        {"modem", {{"order", cfg.modem.order}}},
        {"training",
         {{"batch_size", cfg.training.batch_size},
          {"learning_rate", cfg.training.learning_rate},
          {"validation_split", cfg.training.validation_split},
          {"validation_frequency", cfg.training.validation_frequency},
          {"relay", {{"samples", cfg.training.relay_samples}, {"steps", cfg.training.relay_steps}}},
          {"detector",
           {{"samples", cfg.training.detector_samples},
            {"steps", cfg.training.detector_steps},
            {"snr_policy", cfg.training.detector_snr_policy},
            {"fixed_snr_db", cfg.training.detector_fixed_snr_db}}}}},
        {"sweep",
         {{"schemes", cfg.sweep.schemes},
          {"phase_modes", cfg.sweep.phase_modes},
          {"detector_modes", cfg.sweep.detector_modes},
          {"elements", cfg.sweep.elements},
          {"cascade_degrees", cfg.sweep.cascade_degrees},
          {"m_values", cfg.sweep.m_values},
          {"snr_db", cfg.sweep.snr_grid_db},
          {"max_trials", cfg.sweep.max_trials},
          {"min_bit_errors", cfg.sweep.min_bit_errors},
          {"rs_include_direct", cfg.sweep.rs_include_direct},
          {"noise_enabled", cfg.sweep.noise_enabled}}},
    };
    return doc;
}

} // namespace

std::string RunConfig::echo_json() const {
    return document_echo(*this).dump(2);
}

RunConfig parse_config(const std::string& json_text, const std::optional<std::string>& preset) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    if (preset.has_value()) {
        if (!doc.contains("presets") || !doc.at("presets").is_object()) {
            throw ConfigError("config defines no presets");
        }
        const json& presets = doc.at("presets");
        if (!presets.contains(*preset)) {
            throw ConfigError("unknown preset '" + *preset + "'");
        }
        json merged = doc;
        merged.erase("presets");
        merge_patch(merged, presets.at(*preset), "presets." + *preset);
        return parse_document(merged);
    }
    return parse_document(doc);
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::optional<std::string>& preset) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), preset);
}

std::vector<std::string> list_presets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<std::string> names;
    if (doc.contains("presets")) {
        for (const auto& [key, value] : doc.at("presets").items()) {
            names.push_back(key);
        }
    }
    return names;
}

ScenarioConfig base_scenario(const RunConfig& cfg, std::uint64_t seed) {
    ScenarioConfig scenario;
    scenario.scenario = cfg.channels.scenario;
    scenario.relays = cfg.geometry.relays;
    scenario.elements = cfg.sweep.elements.empty() ? cfg.ris.elements : cfg.sweep.elements.front();
    scenario.cascade_degree = cfg.sweep.cascade_degrees.empty() ? cfg.channels.cascade_degree
                                                                : cfg.sweep.cascade_degrees.front();
    scenario.m = cfg.sweep.m_values.empty() ? cfg.channels.m : cfg.sweep.m_values.front();
    scenario.omega = cfg.channels.omega;
    scenario.path_loss_exponent = cfg.geometry.path_loss_exponent;
    scenario.modulation_order = cfg.modem.order;
    scenario.scheme = scheme_from_string(cfg.sweep.schemes.front());
    scenario.phase_mode = phase_mode_from_string(cfg.sweep.phase_modes.front());
    scenario.detector_mode = detector_mode_from_string(cfg.sweep.detector_modes.front());
    scenario.rs_include_direct = cfg.sweep.rs_include_direct;
    scenario.noise_enabled = cfg.sweep.noise_enabled;
    scenario.phase_bits = cfg.ris.phase_bits;
    scenario.snr_grid_db = cfg.sweep.snr_grid_db;
    scenario.max_trials = cfg.sweep.max_trials;
    scenario.min_bit_errors = cfg.sweep.min_bit_errors;
    scenario.seed = seed;
    return scenario;
}

std::vector<ScenarioConfig> expand_scenarios(const RunConfig& cfg, std::uint64_t seed) {
    const std::vector<int> elements =
        cfg.sweep.elements.empty() ? std::vector<int>{cfg.ris.elements} : cfg.sweep.elements;
    const std::vector<int> degrees = cfg.sweep.cascade_degrees.empty()
                                         ? std::vector<int>{cfg.channels.cascade_degree}
                                         : cfg.sweep.cascade_degrees;
    const std::vector<double> ms =
        cfg.sweep.m_values.empty() ? std::vector<double>{cfg.channels.m} : cfg.sweep.m_values;

    std::vector<ScenarioConfig> scenarios;
    for (int n : elements) {
        for (int k : degrees) {
            for (double m : ms) {
                for (const std::string& scheme : cfg.sweep.schemes) {
                    for (const std::string& phase : cfg.sweep.phase_modes) {
                        for (const std::string& detector : cfg.sweep.detector_modes) {
                            ScenarioConfig scenario = base_scenario(cfg, seed);
                            scenario.elements = n;
                            scenario.cascade_degree = k;
                            scenario.m = m;
                            scenario.scheme = scheme_from_string(scheme);
                            scenario.phase_mode = phase_mode_from_string(phase);
                            scenario.detector_mode = detector_mode_from_string(detector);
                            scenario.validate();
                            scenarios.push_back(std::move(scenario));
                        }
                    }
                }
            }
        }
    }
    return scenarios;
}

TrainConfig relay_train_config(const RunConfig& cfg, std::uint64_t seed) {
    TrainConfig config;
    config.batch_size = cfg.training.batch_size;
    config.learning_rate = cfg.training.learning_rate;
    config.steps = cfg.training.relay_steps;
    config.validation_split = cfg.training.validation_split;
    config.validation_frequency = cfg.training.validation_frequency;
    config.seed = seed;
    return config;
}

TrainConfig detector_train_config(const RunConfig& cfg, std::uint64_t seed) {
    TrainConfig config;
    config.batch_size = cfg.training.batch_size;
    config.learning_rate = cfg.training.learning_rate;
    config.steps = cfg.training.detector_steps;
    config.validation_split = cfg.training.validation_split;
    config.validation_frequency = cfg.training.validation_frequency;
    config.seed = seed;
    return config;
}

SnrPolicy detector_snr_policy(const RunConfig& cfg) {
    if (cfg.training.detector_snr_policy == "fixed") {
        return SnrPolicy::fixed(cfg.training.detector_fixed_snr_db);
    }
    return SnrPolicy::uniform(cfg.sweep.snr_grid_db);
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    json inputs = json::object();
    for (const auto& [name, value] : manifest.inputs) {
        inputs[name] = value;
    }
    json outputs = json::object();
    for (const auto& [name, value] : manifest.outputs) {
        outputs[name] = value;
    }
    const json doc = {
        {"command", manifest.command},
        {"config_path", manifest.config_path},
        {"config", json::parse(manifest.config_echo_json)},
        {"seed", manifest.seed},
        {"inputs", inputs},
        {"outputs", outputs},
        {"started_utc", manifest.started_utc},
        {"finished_utc", manifest.finished_utc},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ModelIoError("cannot open manifest for writing: " + path.string());
    }
    out << doc.dump(2) << '\n';
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace rcs
