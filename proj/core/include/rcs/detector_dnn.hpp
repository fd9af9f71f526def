#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "rcs/chain.hpp"
#include "rcs/mlp.hpp"
#include "rcs/qam.hpp"
#include "rcs/rng.hpp"

namespace rcs {

/// Bijection between constellation symbols and classifier classes; class v
/// is the symbol with label v.
struct ClassMap {
    Constellation constellation;

    int classes() const { return constellation.order; }
    int to_class(int symbol_index) const { return symbol_index; }
    int to_symbol(int class_index) const { return class_index; }
};

/// Training-time SNR selection for dataset generation: one fixed point, or
/// a uniform draw over the evaluation grid so a single network serves the
/// whole sweep.
struct SnrPolicy {
    enum class Kind { fixed, uniform_grid };
    Kind kind = Kind::uniform_grid;
    double fixed_db = 10.0;
    std::vector<double> grid_db;

    static SnrPolicy fixed(double snr_db);
    static SnrPolicy uniform(std::vector<double> grid_db);
    void validate() const;
};

/// Full-chain classification samples: each row is one transmission through
/// fresh channels under `config` (phases analytic, or from `relay_net` when
/// the config says so), recorded as the post-combining observation
/// [Re r, Im r] with the transmitted class as a one-hot target.
Dataset build_detector_dataset(std::size_t count, const ScenarioConfig& config,
                               const SnrPolicy& snr_policy, const NetworkParams* relay_net,
                               RngStream& rng);

/// Train the 2 -> 256x4 ReLU -> M softmax classifier under cross entropy.
TrainResult train_detector_dnn(const Dataset& dataset, const TrainConfig& config, int classes);

/// Arg-max class for one observation; ties resolve to the lowest class.
int classify_symbol(const NetworkParams& params, std::complex<double> r, const ClassMap& map);

/// Batched variant, one decision per observation.
std::vector<int> classify_symbols(const NetworkParams& params,
                                  std::span<const std::complex<double>> rs, const ClassMap& map);

/// Dataset cache, CSV with header re_r,im_r,label.
void write_detector_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_detector_dataset_csv(const std::filesystem::path& path, int classes);

} // namespace rcs
