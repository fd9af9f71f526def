#include "rcs/validation.hpp"

#include <cmath>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

std::string describe(double measured, double expected, double rel_err, double tol) {
    std::ostringstream out;
    out << "measured " << measured << ", expected " << expected << ", relative error "
        << rel_err << " (tolerance " << tol << ")";
    return out.str();
}

} // namespace

CheckResult check_stage_second_moment(const NakagamiStage& stage, double expected_omega,
                                      RngStream& rng, std::uint64_t draws) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        const double h = sample_nakagami_amplitude(stage, rng);
        sum += h * h;
    }
    const double mean = sum / static_cast<double>(draws);
    const double rel = std::abs(mean - expected_omega) / expected_omega;
    std::ostringstream name;
    name << "stage_second_moment(m=" << stage.m << ")";
    return {name.str(), rel <= 0.01, describe(mean, expected_omega, rel, 0.01)};
}

CheckResult check_stage_fourth_moment(const NakagamiStage& stage, RngStream& rng,
                                      std::uint64_t draws) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        const double h = sample_nakagami_amplitude(stage, rng);
        sum += h * h * h * h;
    }
    const double mean = sum / static_cast<double>(draws);
    const double expected = stage.omega * stage.omega * (stage.m + 1.0) / stage.m;
    const double rel = std::abs(mean - expected) / expected;
    std::ostringstream name;
    name << "stage_fourth_moment(m=" << stage.m << ")";
    return {name.str(), rel <= 0.02, describe(mean, expected, rel, 0.02)};
}

CheckResult check_cascade_power(const CascadeSpec& spec, RngStream& rng, std::uint64_t draws) {
    const CascadeSampler sampler(spec);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        sum += std::norm(sampler.coefficient(rng));
    }
    const double mean = sum / static_cast<double>(draws);
    double expected = 1.0;
    for (const NakagamiStage& stage : spec.stages) {
        expected *= stage.omega;
    }
    const double rel = std::abs(mean - expected) / expected;
    std::ostringstream name;
    name << "cascade_power(K=" << spec.degree() << ")";
    return {name.str(), rel <= 0.02, describe(mean, expected, rel, 0.02)};
}

CheckResult check_pdf_normalization(const CascadeSpec& spec) {
    const double integral = cascaded_pdf_mass(spec);
    const double err = std::abs(integral - 1.0);
    std::ostringstream name;
    name << "pdf_normalization(K=" << spec.degree() << ")";
    return {name.str(), err <= 1e-4, describe(integral, 1.0, err, 1e-4)};
}

CheckResult check_pdf_histogram(const CascadeSpec& spec, RngStream& rng,
                                const ValidationOptions& options) {
    const CascadeSampler sampler(spec);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(options.histogram_bins), 0);
    const double bin_width = options.histogram_span / options.histogram_bins;
    for (std::uint64_t i = 0; i < options.draws; ++i) {
        const double amplitude = sampler.amplitude(rng);
        const auto bin = static_cast<long>(amplitude / bin_width);
        if (bin >= 0 && bin < options.histogram_bins) {
            ++counts[static_cast<std::size_t>(bin)];
        }
    }
    double worst = 0.0;
    double worst_center = 0.0;
    for (int b = 0; b < options.histogram_bins; ++b) {
        const double lo = b * bin_width;
        const double empirical = static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                                 (static_cast<double>(options.draws) * bin_width);
        const double density = cascaded_pdf_bin_average(spec, lo, lo + bin_width);
        const double err = std::abs(empirical - density);
        if (err > worst) {
            worst = err;
            worst_center = lo + 0.5 * bin_width;
        }
    }
    std::ostringstream name;
    name << "pdf_histogram(K=" << spec.degree() << ")";
    std::ostringstream detail;
    detail << "max bin error " << worst << " at h=" << worst_center << " (tolerance 0.02)";
    return {name.str(), worst < 0.02, detail.str()};
}

CheckResult check_geometry_roundtrip(const RelayPlacement& placement,
                                     double path_loss_exponent) {
    const RelayGeometry geom =
        solve_geometry(placement.d_sr, placement.theta, path_loss_exponent);
    const double lhs = geom.d_sr * geom.d_sr + geom.d_rd * geom.d_rd -
                       2.0 * geom.d_sr * geom.d_rd * std::cos(geom.theta);
    const double err = std::abs(lhs - 1.0);
    std::ostringstream name;
    name << "geometry_roundtrip(d_sr=" << placement.d_sr << ")";
    std::ostringstream detail;
    detail << "law-of-cosines residual " << err << " (tolerance 1e-12)";
    return {name.str(), err <= 1e-12, detail.str()};
}

std::vector<CheckResult> validate_channel_model(const RunConfig& config, std::uint64_t seed,
                                                const ValidationOptions& options) {
    std::vector<CheckResult> results;
    const NakagamiStage stage{config.channels.m, config.channels.omega};
    const CascadeSpec direct =
        CascadeSpec::iid(config.channels.cascade_degree, config.channels.m,
                         config.channels.omega);

    RngStream rng(seed, 0x76616c69);
    {
        RngStream sub = rng.substream(1);
        results.push_back(
            check_stage_second_moment(stage, config.channels.omega, sub, options.draws));
    }
    {
        RngStream sub = rng.substream(2);
        results.push_back(check_stage_fourth_moment(stage, sub, options.draws));
    }
    {
        RngStream sub = rng.substream(3);
        results.push_back(check_cascade_power(direct, sub, options.draws));
    }
    results.push_back(check_pdf_normalization(direct));
    {
        RngStream sub = rng.substream(4);
        results.push_back(check_pdf_histogram(direct, sub, options));
    }
    for (const RelayPlacement& placement : config.geometry.relays) {
        results.push_back(
            check_geometry_roundtrip(placement, config.geometry.path_loss_exponent));
    }
    return results;
}

} // namespace rcs
