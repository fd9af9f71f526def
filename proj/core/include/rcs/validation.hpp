#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcs/config.hpp"

namespace rcs {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t draws = 1'000'000;
    int histogram_bins = 100;
    double histogram_span = 5.0;
};

/// Sample second moment against an expected mean square amplitude,
/// tolerance 1%. The expectation is a parameter so that deliberately wrong
/// values surface as named failures.
CheckResult check_stage_second_moment(const NakagamiStage& stage, double expected_omega,
                                      RngStream& rng, std::uint64_t draws);

/// Sample fourth moment against omega^2 (m + 1) / m, tolerance 2%.
CheckResult check_stage_fourth_moment(const NakagamiStage& stage, RngStream& rng,
                                      std::uint64_t draws);

/// Cascade power E[|h|^2] against the product of stage omegas, tolerance 2%.
CheckResult check_cascade_power(const CascadeSpec& spec, RngStream& rng, std::uint64_t draws);

/// Product density integrates to one within 1e-4.
CheckResult check_pdf_normalization(const CascadeSpec& spec);

/// Product density against a sampled histogram, max bin error < 0.02.
CheckResult check_pdf_histogram(const CascadeSpec& spec, RngStream& rng,
                                const ValidationOptions& options);

/// Law-of-cosines back-substitution within 1e-12.
CheckResult check_geometry_roundtrip(const RelayPlacement& placement, double path_loss_exponent);

/// The full channel-model check suite for a run configuration. Throws
/// UnsupportedDepthError when the configured cascade degree exceeds the
/// density evaluator's depth limit.
std::vector<CheckResult> validate_channel_model(const RunConfig& config, std::uint64_t seed,
                                                const ValidationOptions& options = {});

} // namespace rcs
