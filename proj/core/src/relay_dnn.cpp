#include "rcs/relay_dnn.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rcs/errors.hpp"
#include "rcs/ris.hpp"

namespace rcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
    phi = std::fmod(phi, kTwoPi);
    return phi < 0.0 ? phi + kTwoPi : phi;
}

} // namespace

Dataset build_relay_dataset(std::size_t count, const CascadeSpec& sr_spec,
                            const CascadeSpec& rd_spec, RngStream& rng) {
    if (count < 1) {
        throw ParameterError("relay dataset needs at least one sample");
    }
    const CascadeSampler sr(sr_spec);
    const CascadeSampler rd(rd_spec);

    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(count), 4);
    data.targets.resize(static_cast<Eigen::Index>(count), 2);
    for (std::size_t i = 0; i < count; ++i) {
        const ChannelCoefficient a = sr.coefficient(rng);
        const ChannelCoefficient b = rd.coefficient(rng);
        const double phi = -(std::arg(a) + std::arg(b));
        const auto row = static_cast<Eigen::Index>(i);
        data.features(row, 0) = a.real();
        data.features(row, 1) = a.imag();
        data.features(row, 2) = b.real();
        data.features(row, 3) = b.imag();
        data.targets(row, 0) = std::cos(phi);
        data.targets(row, 1) = std::sin(phi);
    }
    return data;
}

TrainResult train_relay_dnn(const Dataset& dataset, const TrainConfig& config) {
    dataset.validate();
    if (dataset.features.cols() != 4 || dataset.targets.cols() != 2) {
        throw ParameterError("relay dataset must be 4 features to 2 targets");
    }
    NetworkParams net = make_network(hidden_stack(4, 2, Activation::linear), config.seed);
    return train(std::move(net), dataset, config, LossKind::mse);
}

std::vector<double> estimate_phases(const NetworkParams& params,
                                    std::span<const ChannelCoefficient> h_sr,
                                    std::span<const ChannelCoefficient> h_rd) {
    params.validate();
    if (params.input_dim() != 4 || params.output_dim() != 2) {
        throw ParameterError("phase estimator must map 4 inputs to 2 outputs");
    }
    if (h_sr.size() != h_rd.size()) {
        throw ParameterError("hop coefficient lists differ in length");
    }
    if (h_sr.empty()) {
        return {};
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(h_sr.size()), 4);
    for (std::size_t n = 0; n < h_sr.size(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        x(row, 0) = h_sr[n].real();
        x(row, 1) = h_sr[n].imag();
        x(row, 2) = h_rd[n].real();
        x(row, 3) = h_rd[n].imag();
    }
    const Eigen::MatrixXd out = forward_batch(params, x);

    std::vector<double> phases(h_sr.size());
    for (std::size_t n = 0; n < phases.size(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        phases[n] = wrap_angle(std::atan2(out(row, 1), out(row, 0)));
    }
    return phases;
}

void write_relay_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ModelIoError("cannot open dataset file for writing: " + path.string());
    }
    out << "feat_re_sr,feat_im_sr,feat_re_rd,feat_im_rd,tgt_cos,tgt_sin\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < dataset.features.rows(); ++r) {
        out << dataset.features(r, 0) << ',' << dataset.features(r, 1) << ','
            << dataset.features(r, 2) << ',' << dataset.features(r, 3) << ','
            << dataset.targets(r, 0) << ',' << dataset.targets(r, 1) << '\n';
    }
}

Dataset read_relay_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ModelIoError("cannot open dataset file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) ||
        line != "feat_re_sr,feat_im_sr,feat_re_rd,feat_im_rd,tgt_cos,tgt_sin") {
        throw ModelIoError("unexpected relay dataset header in " + path.string());
    }
    std::vector<std::array<double, 6>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::array<double, 6> row{};
        std::istringstream ss(line);
        std::string field;
        for (double& cell : row) {
            if (!std::getline(ss, field, ',')) {
                throw ModelIoError("short relay dataset row in " + path.string());
            }
            cell = std::stod(field);
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ModelIoError("relay dataset file has no rows: " + path.string());
    }
    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(rows.size()), 4);
    data.targets.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (int c = 0; c < 4; ++c) {
            data.features(r, c) = rows[i][static_cast<std::size_t>(c)];
        }
        data.targets(r, 0) = rows[i][4];
        data.targets(r, 1) = rows[i][5];
    }
    return data;
}

} // namespace rcs
