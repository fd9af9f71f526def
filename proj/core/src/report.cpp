#include "rcs/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

std::vector<GapRow> gap_table(const std::vector<BerCurve>& curves,
                              const std::vector<double>& target_bers) {
    std::vector<GapRow> rows;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            for (double target : target_bers) {
                GapRow row;
                row.curve_a = curves[i].label();
                row.curve_b = curves[j].label();
                row.target_ber = target;
                row.gap_db = gap_at_ber(curves[i], curves[j], target);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_gap_table_csv(const std::vector<GapRow>& rows, std::ostream& out) {
    out << "curve_a,curve_b,target_ber,gap_db\n";
    for (const GapRow& row : rows) {
        out << row.curve_a << ',' << row.curve_b << ',' << format_double(row.target_ber)
            << ',' << format_double(row.gap_db) << '\n';
    }
}

std::vector<std::filesystem::path> write_plot_data(const std::vector<BerCurve>& curves,
                                                   const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> written;
    written.reserve(curves.size());
    for (const BerCurve& curve : curves) {
        const std::filesystem::path path = directory / (curve.label() + ".csv");
        std::ofstream out(path, std::ios::trunc | std::ios::binary);
        if (!out) {
            throw ModelIoError("cannot open plot data file for writing: " + path.string());
        }
        out << "snr_db,ber\n";
        for (const auto& [snr, ber] : curve.points) {
            out << format_double(snr) << ',' << format_double(ber) << '\n';
        }
        written.push_back(path);
    }
    return written;
}

std::vector<BerCurve> load_curves(const std::vector<std::filesystem::path>& csv_paths) {
    std::vector<BerRecord> merged;
    for (const std::filesystem::path& path : csv_paths) {
        const std::vector<BerRecord> records = read_ber_csv(path);
        merged.insert(merged.end(), records.begin(), records.end());
    }
    return group_into_curves(merged);
}

} // namespace rcs
