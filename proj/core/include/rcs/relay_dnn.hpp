#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "rcs/channel.hpp"
#include "rcs/mlp.hpp"
#include "rcs/rng.hpp"

namespace rcs {

/// Per-element phase regression samples: features are the real and
/// imaginary parts of the two hop coefficients, the target is the aligning
/// phase encoded as a unit phasor (cos, sin). The phasor encoding keeps the
/// regression target continuous across the 2*pi wrap.
Dataset build_relay_dataset(std::size_t count, const CascadeSpec& sr_spec,
                            const CascadeSpec& rd_spec, RngStream& rng);

/// Train the 4 -> 256x4 ReLU -> 2 linear phase regressor under MSE.
TrainResult train_relay_dnn(const Dataset& dataset, const TrainConfig& config);

/// Per-element phase estimates: the network output is renormalised to the
/// unit circle and decoded with atan2, wrapped to [0, 2*pi). The output
/// order matches the element order.
std::vector<double> estimate_phases(const NetworkParams& params,
                                    std::span<const ChannelCoefficient> h_sr,
                                    std::span<const ChannelCoefficient> h_rd);

/// Dataset cache, CSV with header
/// feat_re_sr,feat_im_sr,feat_re_rd,feat_im_rd,tgt_cos,tgt_sin.
void write_relay_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_relay_dataset_csv(const std::filesystem::path& path);

} // namespace rcs
