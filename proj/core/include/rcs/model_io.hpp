#pragma once

#include <cstdint>
#include <filesystem>

#include "rcs/mlp.hpp"

namespace rcs {

/// Binary network file, version 1:
///   magic "RCNN" | u16 version | u32 layer count |
///   per layer: u32 in dim | u32 out dim | u8 activation |
///              weights row-major f64 | biases f64 |
///   u32 CRC32 of everything before it.
/// All integers and floats little-endian. Round trips are bit exact.
inline constexpr std::uint16_t kModelFormatVersion = 1;

void save_params(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_params(const std::filesystem::path& path);

/// CRC32 of a whole file, as used for manifest digests.
std::uint32_t file_crc32(const std::filesystem::path& path);

} // namespace rcs
