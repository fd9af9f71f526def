#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "rcs/errors.hpp"
#include "rcs/ris.hpp"
#include "rcs/rng.hpp"

using namespace rcs;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ChannelCoefficient> random_coefficients(RngStream& rng, std::size_t n) {
    std::vector<ChannelCoefficient> h(n);
    for (auto& coeff : h) {
        coeff = {rng.normal(), rng.normal()};
    }
    return h;
}

RelayGeometry unit_geometry() {
    RelayGeometry geom;
    geom.gain_sr = 1.0;
    geom.gain_rd = 1.0;
    return geom;
}

} // namespace

TEST_CASE("phase cancellation for matched quarter-turn channels") {
    const std::vector<ChannelCoefficient> h1 = {std::polar(1.0, -kPi / 4.0)};
    const std::vector<ChannelCoefficient> h2 = {std::polar(1.0, -kPi / 4.0)};
    const std::vector<double> phi = optimal_phases(h1, h2);
    CHECK(phi[0] == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    const std::complex<double> aligned = h1[0] * std::polar(1.0, phi[0]) * h2[0];
    CHECK(aligned.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(aligned.imag()) < 1e-12);
}

TEST_CASE("aligned products are real and carry the full amplitude") {
    RngStream rng(11);
    const auto h1 = random_coefficients(rng, 1000);
    const auto h2 = random_coefficients(rng, 1000);
    const std::vector<double> phi = optimal_phases(h1, h2);
    for (std::size_t n = 0; n < h1.size(); ++n) {
        CHECK(phi[n] >= 0.0);
        CHECK(phi[n] < 2.0 * kPi);
        const std::complex<double> aligned = h1[n] * std::polar(1.0, phi[n]) * h2[n];
        CHECK(std::abs(aligned.imag()) < 1e-12);
        CHECK(aligned.real() == doctest::Approx(std::abs(h1[n]) * std::abs(h2[n])).epsilon(1e-12));
    }
}

TEST_CASE("aligned sum dominates random phase choices") {
    RngStream rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const auto h1 = random_coefficients(rng, 8);
        const auto h2 = random_coefficients(rng, 8);
        const std::vector<double> phi = optimal_phases(h1, h2);
        std::complex<double> aligned = 0.0;
        for (std::size_t n = 0; n < 8; ++n) {
            aligned += h1[n] * std::polar(1.0, phi[n]) * h2[n];
        }
        for (int alt = 0; alt < 200; ++alt) {
            std::complex<double> other = 0.0;
            for (std::size_t n = 0; n < 8; ++n) {
                other += h1[n] * std::polar(1.0, rng.uniform(0.0, 2.0 * kPi)) * h2[n];
            }
            CHECK(std::abs(other) <= aligned.real() + 1e-12);
        }
    }
}

TEST_CASE("length mismatch is rejected") {
    RngStream rng(13);
    const auto h1 = random_coefficients(rng, 4);
    const auto h2 = random_coefficients(rng, 5);
    CHECK_THROWS_AS(optimal_phases(h1, h2), ParameterError);
}

TEST_CASE("phase quantization snaps to the grid and zero bits is a no-op") {
    const std::vector<double> phases = {0.1, 1.0, 3.0, 6.2};
    CHECK(quantize_phases(phases, 0) == phases);
    const std::vector<double> q = quantize_phases(phases, 2);
    const double step = kPi / 2.0;
    for (double phi : q) {
        const double ratio = phi / step;
        CHECK(std::abs(ratio - std::round(ratio)) < 1e-12);
    }
}

TEST_CASE("single aligned element with unit gains") {
    RisRelayState state;
    state.h_sr = {1.0};
    state.h_rd = {1.0};
    state.phi = {0.0};
    state.geometry = unit_geometry();
    CHECK(effective_relay_channel(state) == std::complex<double>(1.0, 0.0));

    state.geometry.gain_sr = 16.0;
    state.geometry.gain_rd = 16.0;
    CHECK(effective_relay_channel(state).real() == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("optimal phases make the composite real nonnegative") {
    RngStream rng(14);
    RisRelayState state;
    state.h_sr = random_coefficients(rng, 16);
    state.h_rd = random_coefficients(rng, 16);
    state.phi = optimal_phases(state.h_sr, state.h_rd);
    state.geometry = unit_geometry();
    const std::complex<double> composite = effective_relay_channel(state);
    CHECK(std::abs(composite.imag()) < 1e-10);
    double expected = 0.0;
    for (std::size_t n = 0; n < state.h_sr.size(); ++n) {
        expected += std::abs(state.h_sr[n]) * std::abs(state.h_rd[n]);
    }
    CHECK(composite.real() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("relay state validation") {
    RisRelayState state;
    state.h_sr = {1.0, 2.0};
    state.h_rd = {1.0};
    state.phi = {0.0, 0.0};
    CHECK_THROWS_AS(state.validate(), ParameterError);
    state.h_sr.clear();
    state.h_rd.clear();
    state.phi.clear();
    CHECK_THROWS_AS(state.validate(), ParameterError);
}

TEST_CASE("noise model calibration") {
    const NoiseModel ten_db = NoiseModel::from_snr_db(10.0);
    CHECK(ten_db.n0 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(ten_db.sigma_per_dim() == doctest::Approx(std::sqrt(0.05)).epsilon(1e-12));
    CHECK(NoiseModel::disabled().sigma_per_dim() == 0.0);

    // Per-dimension sample variance within 1% at 1e6 draws.
    RngStream rng(15);
    const NoiseModel model = NoiseModel::from_snr_db(3.0);
    double sum_re = 0.0;
    double sum_im = 0.0;
    const int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) {
        const std::complex<double> n = draw_noise(model, rng);
        sum_re += n.real() * n.real();
        sum_im += n.imag() * n.imag();
    }
    CHECK(sum_re / draws == doctest::Approx(model.n0 / 2.0).epsilon(0.01));
    CHECK(sum_im / draws == doctest::Approx(model.n0 / 2.0).epsilon(0.01));
}

TEST_CASE("direct reception is exact without noise and reproducible with a seed") {
    const std::complex<double> s(0.6, -0.8);
    const ChannelCoefficient h(1.5, 0.5);
    RngStream rng(16);
    CHECK(std::abs(receive_direct(s, h, NoiseModel::disabled(), rng) - h * s) < 1e-15);

    RngStream a(17, 3);
    RngStream b(17, 3);
    const NoiseModel model = NoiseModel::from_snr_db(5.0);
    CHECK(receive_direct(s, h, model, a) == receive_direct(s, h, model, b));
}

TEST_CASE("zero symbol leaves pure noise with the configured power") {
    RngStream rng(18);
    const NoiseModel model = NoiseModel::from_snr_db(0.0);
    double power = 0.0;
    const int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) {
        power += std::norm(receive_direct(0.0, 1.0, model, rng));
    }
    CHECK(power / draws == doctest::Approx(model.n0).epsilon(0.01));
}

TEST_CASE("relay reception composes gain, phases, and noise") {
    RngStream rng(19);
    RisRelayState state;
    state.h_sr = random_coefficients(rng, 8);
    state.h_rd = random_coefficients(rng, 8);
    state.phi = optimal_phases(state.h_sr, state.h_rd);
    state.geometry = unit_geometry();
    state.geometry.gain_sr = 16.0;
    state.geometry.gain_rd = 5.554;

    const std::complex<double> s(1.0, 0.0);
    const std::complex<double> expected = effective_relay_channel(state) * s;
    CHECK(std::abs(receive_relay(s, state, NoiseModel::disabled(), rng) - expected) < 1e-9);

    // Zeroed channels leave only noise.
    RisRelayState dead = state;
    dead.h_sr.assign(8, 0.0);
    const NoiseModel model = NoiseModel::from_snr_db(10.0);
    RngStream noise_rng(20, 1);
    RngStream noise_ref(20, 1);
    CHECK(receive_relay(s, dead, model, noise_rng) == draw_noise(model, noise_ref));
}

TEST_CASE("doubling the element count doubles the mean aligned gain") {
    RngStream rng(21);
    const int reps = 100'000;
    double sum8 = 0.0;
    double sum16 = 0.0;
    for (int i = 0; i < reps; ++i) {
        for (int n = 0; n < 16; ++n) {
            const std::complex<double> a{rng.normal(), rng.normal()};
            const std::complex<double> b{rng.normal(), rng.normal()};
            const double gain = std::abs(a) * std::abs(b);
            sum16 += gain;
            if (n < 8) {
                sum8 += gain;
            }
        }
    }
    CHECK(sum16 / sum8 == doctest::Approx(2.0).epsilon(0.05));
}
