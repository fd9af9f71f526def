#include "rcs/detector_dnn.hpp"

#include <fstream>
#include <sstream>

#include "rcs/errors.hpp"
#include "rcs/relay_dnn.hpp"

namespace rcs {

SnrPolicy SnrPolicy::fixed(double snr_db) {
    SnrPolicy policy;
    policy.kind = Kind::fixed;
    policy.fixed_db = snr_db;
    return policy;
}

SnrPolicy SnrPolicy::uniform(std::vector<double> grid_db) {
    SnrPolicy policy;
    policy.kind = Kind::uniform_grid;
    policy.grid_db = std::move(grid_db);
    return policy;
}

void SnrPolicy::validate() const {
    if (kind == Kind::uniform_grid && grid_db.empty()) {
        throw ParameterError("SNR policy grid is empty");
    }
}

Dataset build_detector_dataset(std::size_t count, const ScenarioConfig& config,
                               const SnrPolicy& snr_policy, const NetworkParams* relay_net,
                               RngStream& rng) {
    if (count < 1) {
        throw ParameterError("detector dataset needs at least one sample");
    }
    snr_policy.validate();
    if (config.phase_mode == PhaseMode::dnn && relay_net == nullptr) {
        throw ParameterError("phase mode dnn needs a trained phase estimator");
    }

    const ChainContext chain(config);
    const int classes = config.modulation_order;

    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(count), 2);
    data.targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), classes);

    TrialDraws draws;
    for (std::size_t i = 0; i < count; ++i) {
        double snr_db = snr_policy.fixed_db;
        if (snr_policy.kind == SnrPolicy::Kind::uniform_grid) {
            snr_db = snr_policy.grid_db[rng.uniform_int(
                static_cast<std::uint32_t>(snr_policy.grid_db.size()))];
        }
        const NoiseModel noise =
            config.noise_enabled ? NoiseModel::from_snr_db(snr_db) : NoiseModel::disabled();
        chain.draw(noise, rng, draws);
        const std::vector<double> phases =
            config.phase_mode == PhaseMode::dnn
                ? estimate_phases(*relay_net, draws.h_sr, draws.h_rd)
                : chain.analytic_phases(draws);
        const ChainContext::Combined combined = chain.combine(draws, phases);

        const auto row = static_cast<Eigen::Index>(i);
        data.features(row, 0) = combined.r.real();
        data.features(row, 1) = combined.r.imag();
        data.targets(row, draws.symbol) = 1.0;
    }
    return data;
}

TrainResult train_detector_dnn(const Dataset& dataset, const TrainConfig& config, int classes) {
    dataset.validate();
    if (dataset.features.cols() != 2 || dataset.targets.cols() != classes) {
        throw ParameterError("detector dataset shape does not match the class count");
    }
    NetworkParams net =
        make_network(hidden_stack(2, classes, Activation::softmax), config.seed);
    return train(std::move(net), dataset, config, LossKind::cross_entropy);
}

int classify_symbol(const NetworkParams& params, std::complex<double> r, const ClassMap& map) {
    const std::complex<double> obs[] = {r};
    return classify_symbols(params, obs, map)[0];
}

std::vector<int> classify_symbols(const NetworkParams& params,
                                  std::span<const std::complex<double>> rs, const ClassMap& map) {
    params.validate();
    if (params.input_dim() != 2 || params.output_dim() != map.classes()) {
        throw ParameterError("classifier dimensions do not match the class map");
    }
    if (rs.empty()) {
        return {};
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rs.size()), 2);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        x(row, 0) = rs[i].real();
        x(row, 1) = rs[i].imag();
    }
    const Eigen::MatrixXd probs = forward_batch(params, x);

    std::vector<int> decisions(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        int best = 0;
        for (int c = 1; c < map.classes(); ++c) {
            if (probs(row, c) > probs(row, best)) {
                best = c;
            }
        }
        decisions[i] = map.to_symbol(best);
    }
    return decisions;
}

void write_detector_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ModelIoError("cannot open dataset file for writing: " + path.string());
    }
    out << "re_r,im_r,label\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < dataset.features.rows(); ++r) {
        Eigen::Index label;
        dataset.targets.row(r).maxCoeff(&label);
        out << dataset.features(r, 0) << ',' << dataset.features(r, 1) << ',' << label << '\n';
    }
}

Dataset read_detector_dataset_csv(const std::filesystem::path& path, int classes) {
    std::ifstream in(path);
    if (!in) {
        throw ModelIoError("cannot open dataset file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "re_r,im_r,label") {
        throw ModelIoError("unexpected detector dataset header in " + path.string());
    }
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::array<double, 3> row{};
        std::istringstream ss(line);
        std::string field;
        for (double& cell : row) {
            if (!std::getline(ss, field, ',')) {
                throw ModelIoError("short detector dataset row in " + path.string());
            }
            cell = std::stod(field);
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ModelIoError("detector dataset file has no rows: " + path.string());
    }
    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(rows.size()), 2);
    data.targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), classes);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        data.features(r, 0) = rows[i][0];
        data.features(r, 1) = rows[i][1];
        const int label = static_cast<int>(rows[i][2]);
        if (label < 0 || label >= classes) {
            throw ModelIoError("detector dataset label out of range in " + path.string());
        }
        data.targets(r, label) = 1.0;
    }
    return data;
}

} // namespace rcs
