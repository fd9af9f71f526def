#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcs/simulator.hpp"

namespace rcs {

struct GapRow {
    std::string curve_a;
    std::string curve_b;
    double target_ber = 1e-3;
    double gap_db = 0.0;
};

/// Horizontal gaps between every unordered curve pair at each target BER.
/// Throws when some curve never crosses a requested target.
std::vector<GapRow> gap_table(const std::vector<BerCurve>& curves,
                              const std::vector<double>& target_bers);

void write_gap_table_csv(const std::vector<GapRow>& rows, std::ostream& out);

/// One plot-data file per curve, named <label>.csv with columns
/// snr_db,ber. Returns the written paths in curve order.
std::vector<std::filesystem::path> write_plot_data(const std::vector<BerCurve>& curves,
                                                   const std::filesystem::path& directory);

/// Load and merge results from several CSVs into curves (first-seen order).
std::vector<BerCurve> load_curves(const std::vector<std::filesystem::path>& csv_paths);

} // namespace rcs
