// rcsim: link-level Monte Carlo tool for cooperative reflecting-relay
// networks over cascaded fading, with trainable phase and symbol
// estimators.
//
// Subcommands: validate-channels, train, simulate, report.
// Exit codes: 0 success, 1 validation/acceptance failure, 2 usage or
// configuration error, 3 I/O error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcs/config.hpp"
#include "rcs/errors.hpp"
#include "rcs/model_io.hpp"
#include "rcs/relay_dnn.hpp"
#include "rcs/report.hpp"
#include "rcs/simulator.hpp"
#include "rcs/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::string> preset;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out_dir = ".";
};

unsigned threads_from_env() {
    const char* env = std::getenv("RCS_THREADS");
    if (env == nullptr) {
        return 0;
    }
    const long parsed = std::strtol(env, nullptr, 10);
    return parsed > 0 ? static_cast<unsigned>(parsed) : 0;
}

std::string crc_hex(const std::filesystem::path& path) {
    std::ostringstream out;
    out << std::hex << rcs::file_crc32(path);
    return out.str();
}

rcs::RunManifest begin_manifest(const std::string& command, const GlobalOptions& global,
                                const rcs::RunConfig& config) {
    rcs::RunManifest manifest;
    manifest.command = command;
    manifest.config_path = global.config_path;
    manifest.config_echo_json = config.echo_json();
    manifest.seed = global.seed;
    manifest.started_utc = rcs::utc_timestamp();
    return manifest;
}

int cmd_validate_channels(const GlobalOptions& global) {
    const rcs::RunConfig config = rcs::load_config(global.config_path, global.preset);
    const std::vector<rcs::CheckResult> results =
        rcs::validate_channel_model(config, global.seed);
    bool all_passed = true;
    for (const rcs::CheckResult& check : results) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": "
                  << check.detail << '\n';
        all_passed = all_passed && check.passed;
    }
    std::cout << (all_passed ? "channel validation passed" : "channel validation FAILED")
              << '\n';
    return all_passed ? kExitOk : kExitCheckFailed;
}

int cmd_train(const GlobalOptions& global, const std::string& target) {
    const rcs::RunConfig config = rcs::load_config(global.config_path, global.preset);
    std::filesystem::create_directories(global.out_dir);
    rcs::RunManifest manifest = begin_manifest("train " + target, global, config);

    rcs::RngStream rng(global.seed, target == "relay" ? 0x72656c61 : 0x64657465);
    rcs::TrainResult trained;
    std::filesystem::path model_path;

    if (target == "relay") {
        const rcs::ScenarioConfig scenario = rcs::base_scenario(config, global.seed);
        const rcs::Dataset dataset = rcs::build_relay_dataset(
            config.training.relay_samples, scenario.relay_hop_spec(),
            scenario.relay_hop_spec(), rng);
        trained = rcs::train_relay_dnn(dataset, rcs::relay_train_config(config, global.seed));
        model_path = std::filesystem::path(global.out_dir) / "relay_dnn.rcnn";
    } else {
        const rcs::ScenarioConfig scenario = rcs::base_scenario(config, global.seed);
        const rcs::SnrPolicy policy = rcs::detector_snr_policy(config);
        // The detector learns from the same pipeline it will serve. When the
        // run uses estimated phases, that estimator must already exist.
        std::optional<rcs::NetworkParams> relay_net;
        if (scenario.phase_mode == rcs::PhaseMode::dnn) {
            const std::filesystem::path relay_path =
                std::filesystem::path(global.out_dir) / "relay_dnn.rcnn";
            relay_net = rcs::load_params(relay_path);
            manifest.inputs["relay_model"] = relay_path.string() + ":" + crc_hex(relay_path);
        }
        const rcs::Dataset dataset = rcs::build_detector_dataset(
            config.training.detector_samples, scenario, policy,
            relay_net ? &*relay_net : nullptr, rng);
        trained = rcs::train_detector_dnn(
            dataset, rcs::detector_train_config(config, global.seed), config.modem.order);
        model_path = std::filesystem::path(global.out_dir) / "detector_dnn.rcnn";
    }

    rcs::save_params(trained.params, model_path);

    std::cout << "final training loss: " << trained.train_loss.back() << '\n';
    if (!trained.validation_loss.empty()) {
        std::cout << "final validation loss: " << trained.validation_loss.back().second
                  << '\n';
    }
    std::cout << "model written to " << model_path.string() << '\n';

    manifest.outputs["model"] = model_path.string() + ":" + crc_hex(model_path);
    manifest.finished_utc = rcs::utc_timestamp();
    rcs::write_manifest(manifest,
                        std::filesystem::path(global.out_dir) / (target + "_train_manifest.json"));
    return kExitOk;
}

int cmd_simulate(const GlobalOptions& global, const std::string& relay_model_path,
                 const std::string& detector_model_path) {
    const rcs::RunConfig config = rcs::load_config(global.config_path, global.preset);
    std::filesystem::create_directories(global.out_dir);
    rcs::RunManifest manifest = begin_manifest("simulate", global, config);

    const std::vector<rcs::ScenarioConfig> scenarios =
        rcs::expand_scenarios(config, global.seed);

    const bool needs_relay = std::any_of(
        scenarios.begin(), scenarios.end(),
        [](const rcs::ScenarioConfig& s) { return s.phase_mode == rcs::PhaseMode::dnn; });
    const bool needs_detector = std::any_of(
        scenarios.begin(), scenarios.end(),
        [](const rcs::ScenarioConfig& s) { return s.detector_mode == rcs::DetectorMode::dnn; });

    std::optional<rcs::NetworkParams> relay_net;
    std::optional<rcs::NetworkParams> detector_net;
    if (needs_relay) {
        if (relay_model_path.empty()) {
            throw rcs::ConfigError("sweep uses phase mode dnn but no --relay-model was given");
        }
        relay_net = rcs::load_params(relay_model_path);
        manifest.inputs["relay_model"] = relay_model_path + ":" + crc_hex(relay_model_path);
    }
    if (needs_detector) {
        if (detector_model_path.empty()) {
            throw rcs::ConfigError(
                "sweep uses detector mode dnn but no --detector-model was given");
        }
        detector_net = rcs::load_params(detector_model_path);
        manifest.inputs["detector_model"] =
            detector_model_path + ":" + crc_hex(detector_model_path);
    }

    rcs::RunModels models;
    models.relay = relay_net ? &*relay_net : nullptr;
    models.detector = detector_net ? &*detector_net : nullptr;

    std::vector<rcs::BerRecord> all_records;
    for (const rcs::ScenarioConfig& scenario : scenarios) {
        std::cerr << "sweep: scenario " << scenario.scenario << " "
                  << rcs::to_string(scenario.scheme) << " N=" << scenario.elements
                  << " K=" << scenario.cascade_degree << " m=" << scenario.m << " "
                  << rcs::to_string(scenario.phase_mode) << "+"
                  << rcs::to_string(scenario.detector_mode) << '\n';
        const std::vector<rcs::BerRecord> records =
            rcs::run_sweep(scenario, models, global.threads);
        all_records.insert(all_records.end(), records.begin(), records.end());
    }

    const std::filesystem::path results_path =
        std::filesystem::path(global.out_dir) / "results.csv";
    rcs::write_ber_csv(all_records, results_path);
    std::cout << "wrote " << all_records.size() << " rows to " << results_path.string()
              << '\n';

    manifest.outputs["results"] = results_path.string() + ":" + crc_hex(results_path);
    manifest.finished_utc = rcs::utc_timestamp();
    rcs::write_manifest(manifest,
                        std::filesystem::path(global.out_dir) / "simulate_manifest.json");
    return kExitOk;
}

int cmd_report(const GlobalOptions& global, const std::vector<std::string>& results_paths,
               const std::vector<double>& target_bers) {
    std::filesystem::create_directories(global.out_dir);

    std::vector<std::filesystem::path> paths(results_paths.begin(), results_paths.end());
    const std::vector<rcs::BerCurve> curves = rcs::load_curves(paths);
    if (curves.empty()) {
        throw rcs::ModelIoError("no curves found in the given results files");
    }

    const std::vector<rcs::GapRow> rows = rcs::gap_table(curves, target_bers);
    rcs::write_gap_table_csv(rows, std::cout);

    const std::filesystem::path gap_path =
        std::filesystem::path(global.out_dir) / "gap_table.csv";
    std::ofstream gap_file(gap_path, std::ios::trunc | std::ios::binary);
    if (!gap_file) {
        throw rcs::ModelIoError("cannot open gap table for writing: " + gap_path.string());
    }
    rcs::write_gap_table_csv(rows, gap_file);

    const std::vector<std::filesystem::path> plots = rcs::write_plot_data(
        curves, std::filesystem::path(global.out_dir) / "plot_data");
    std::cout << "wrote " << plots.size() << " plot data files and " << gap_path.string()
              << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo BER studies of cooperative reflecting relays with trainable "
                 "phase and symbol estimators"};
    app.require_subcommand(1);

    GlobalOptions global;
    global.threads = threads_from_env();

    app.add_option("--config", global.config_path, "JSON run configuration")->required();
    app.add_option("--preset", global.preset, "named preset from the config's presets section");
    app.add_option("--seed", global.seed, "master seed (default 1)");
    app.add_option("--threads", global.threads,
                   "worker threads (default: RCS_THREADS or hardware)");
    app.add_option("--out", global.out_dir, "output directory (default .)");

    CLI::App* validate = app.add_subcommand("validate-channels",
                                            "moment, density, and geometry self checks");

    CLI::App* train = app.add_subcommand("train", "train one of the two estimators");
    std::string train_target;
    train->add_option("--target", train_target, "relay or detector")
        ->required()
        ->check(CLI::IsMember({"relay", "detector"}));

    CLI::App* simulate = app.add_subcommand("simulate", "run the configured BER sweeps");
    std::string relay_model_path;
    std::string detector_model_path;
    simulate->add_option("--relay-model", relay_model_path, "trained phase estimator file");
    simulate->add_option("--detector-model", detector_model_path,
                         "trained symbol classifier file");

    CLI::App* report = app.add_subcommand("report", "gap table and plot data from results");
    std::vector<std::string> results_paths;
    std::vector<double> target_bers{1e-3};
    report->add_option("--results", results_paths, "results CSV files")->required();
    report->add_option("--target-ber", target_bers, "BER levels for gap measurement");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate_channels(global);
        }
        if (train->parsed()) {
            return cmd_train(global, train_target);
        }
        if (simulate->parsed()) {
            return cmd_simulate(global, relay_model_path, detector_model_path);
        }
        if (report->parsed()) {
            return cmd_report(global, results_paths, target_bers);
        }
    } catch (const rcs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const rcs::UnsupportedDepthError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const rcs::ModelIoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const rcs::DivergenceError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const rcs::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}
