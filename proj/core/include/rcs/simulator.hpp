#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcs/chain.hpp"
#include "rcs/mlp.hpp"
#include "rcs/qam.hpp"
#include "rcs/scenario.hpp"

namespace rcs {

/// Trained networks a configuration may require. Nulls are fine as long as
/// the corresponding mode is not requested.
struct RunModels {
    const NetworkParams* relay = nullptr;
    const NetworkParams* detector = nullptr;
};

struct TrialResult {
    std::vector<std::uint8_t> tx_bits;
    std::vector<std::uint8_t> rx_bits;
};

/// One transmission through freshly drawn channels at the given SNR.
TrialResult run_trial(const ScenarioConfig& config, double snr_db, const RunModels& models,
                      RngStream& rng);

/// Sweep every SNR point of the config. Each point runs trials in fixed
/// 2048-trial chunks with per-chunk substreams until at least
/// `min_bit_errors` have accumulated over a contiguous chunk prefix, or the
/// trial cap is reached. Results depend only on (config, seed), never on
/// the worker count. `threads` 0 means hardware concurrency.
std::vector<BerRecord> run_sweep(const ScenarioConfig& config, const RunModels& models,
                                 unsigned threads = 0);

/// A BER curve: the config echo of its first record plus (snr, ber) points
/// in sweep order.
struct BerCurve {
    BerRecord id; // snr/trials/errors fields are not meaningful here
    std::vector<std::pair<double, double>> points;

    std::string label() const;
};

/// Group records into curves by their config echo (everything but the SNR
/// and the measured counts), preserving first-seen order.
std::vector<BerCurve> group_into_curves(const std::vector<BerRecord>& records);

/// SNR (dB) at which the curve crosses the target BER, by piecewise-linear
/// interpolation of log10(BER) against SNR over the positive-BER points.
/// Throws ParameterError when the target is not bracketed.
double snr_at_ber(const BerCurve& curve, double target_ber);

/// Horizontal distance snr_a(target) - snr_b(target).
double gap_at_ber(const BerCurve& a, const BerCurve& b, double target_ber);

struct PipelineGap {
    double target_ber = 1e-3;
    double gap_db = 0.0;
};

/// Gap report between two completed sweeps at each requested BER level.
std::vector<PipelineGap> compare_pipelines(const std::vector<BerRecord>& a,
                                           const std::vector<BerRecord>& b,
                                           const std::vector<double>& target_bers);

/// Results CSV, one row per record:
/// scenario,scheme,phase_mode,detector_mode,L,N,K,m,c,snr_db,trials,bit_errors,ber,seed
void write_ber_csv(const std::vector<BerRecord>& records, std::ostream& out);
void write_ber_csv(const std::vector<BerRecord>& records, const std::filesystem::path& path);
std::vector<BerRecord> read_ber_csv(const std::filesystem::path& path);

} // namespace rcs
