#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "rcs/errors.hpp"
#include "rcs/qam.hpp"
#include "rcs/rng.hpp"

using namespace rcs;

namespace {

std::vector<std::uint8_t> random_bits(RngStream& rng, std::size_t count) {
    std::vector<std::uint8_t> bits(count);
    for (std::uint8_t& b : bits) {
        b = static_cast<std::uint8_t>(rng.uniform_int(2));
    }
    return bits;
}

} // namespace

TEST_CASE("only powers of four are accepted") {
    CHECK_THROWS_AS(Constellation::square_qam(8), ParameterError);
    CHECK_THROWS_AS(Constellation::square_qam(0), ParameterError);
    CHECK_THROWS_AS(Constellation::square_qam(-4), ParameterError);
    CHECK_NOTHROW(Constellation::square_qam(4));
    CHECK_NOTHROW(Constellation::square_qam(16));
    CHECK_NOTHROW(Constellation::square_qam(64));
}

TEST_CASE("quadrature constellation has the four unit-energy points") {
    const Constellation c = Constellation::square_qam(4);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::vector<std::uint8_t> bits = {0, 0, 0, 1, 1, 1, 1, 0};
    const std::vector<std::complex<double>> symbols = modulate(bits, c);
    REQUIRE(symbols.size() == 4);
    CHECK(std::abs(symbols[0] - std::complex<double>(-inv_sqrt2, -inv_sqrt2)) < 1e-15);
    CHECK(std::abs(symbols[1] - std::complex<double>(-inv_sqrt2, inv_sqrt2)) < 1e-15);
    CHECK(std::abs(symbols[2] - std::complex<double>(inv_sqrt2, inv_sqrt2)) < 1e-15);
    CHECK(std::abs(symbols[3] - std::complex<double>(inv_sqrt2, -inv_sqrt2)) < 1e-15);
    for (const auto& s : symbols) {
        CHECK(std::abs(s) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("mean symbol energy is exactly one") {
    for (int order : {4, 16, 64}) {
        const Constellation c = Constellation::square_qam(order);
        double energy = 0.0;
        for (const auto& point : c.points) {
            energy += std::norm(point);
        }
        CHECK(energy / order == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("modulate rejects ragged bit strings") {
    const Constellation c = Constellation::square_qam(4);
    CHECK_THROWS_AS(modulate({1, 0, 1}, c), FramingError);
    const Constellation c16 = Constellation::square_qam(16);
    CHECK_THROWS_AS(modulate({1, 0, 1, 1, 0, 1}, c16), FramingError);
}

TEST_CASE("noiseless round trip is the identity") {
    RngStream rng(7);
    for (int order : {4, 16, 64}) {
        const Constellation c = Constellation::square_qam(order);
        const std::vector<std::uint8_t> bits =
            random_bits(rng, static_cast<std::size_t>(c.bits_per_symbol) * 64);
        const std::vector<std::complex<double>> symbols = modulate(bits, c);
        std::vector<std::uint8_t> recovered;
        for (const auto& y : symbols) {
            const int index = demodulate_ml(y, 1.0, c);
            const std::vector<std::uint8_t> chunk = bits_of_symbol(index, c);
            recovered.insert(recovered.end(), chunk.begin(), chunk.end());
        }
        CHECK(recovered == bits);
    }
}

TEST_CASE("nearest neighbours differ in exactly one bit") {
    for (int order : {4, 16}) {
        const Constellation c = Constellation::square_qam(order);
        double min_dist = 1e9;
        for (int a = 0; a < order; ++a) {
            for (int b = a + 1; b < order; ++b) {
                min_dist = std::min(min_dist, std::abs(c.point(a) - c.point(b)));
            }
        }
        for (int a = 0; a < order; ++a) {
            for (int b = a + 1; b < order; ++b) {
                if (std::abs(c.point(a) - c.point(b)) < min_dist * 1.001) {
                    CHECK(label_bit_errors(a, b) == 1);
                }
            }
        }
    }
}

TEST_CASE("ml decision is exact without noise and ties break low") {
    const Constellation c = Constellation::square_qam(16);
    const std::complex<double> h_eff(0.3, -1.2);
    for (int v = 0; v < c.order; ++v) {
        CHECK(demodulate_ml(h_eff * c.point(v), h_eff, c) == v);
    }
    // Equidistant from everything: lowest index wins.
    CHECK(demodulate_ml({0.0, 0.0}, {1.0, 0.0}, Constellation::square_qam(4)) == 0);
}

TEST_CASE("ml decision is invariant to positive scaling") {
    const Constellation c = Constellation::square_qam(16);
    RngStream rng(21);
    for (int i = 0; i < 500; ++i) {
        const std::complex<double> y(rng.normal(), rng.normal());
        const std::complex<double> h(rng.normal(), rng.normal());
        const double k = std::exp(rng.uniform(-3.0, 3.0));
        CHECK(demodulate_ml(y, h, c) == demodulate_ml(k * y, k * h, c));
    }
}

TEST_CASE("bit error counting is the Hamming distance") {
    CHECK(count_bit_errors({1, 0, 1, 0}, {1, 0, 1, 0}) == 0);
    CHECK(count_bit_errors({1, 0, 1, 0}, {0, 1, 0, 1}) == 4);
    CHECK(count_bit_errors({1, 0, 1, 0}, {1, 0, 1, 1}) == 1);
    CHECK_THROWS_AS(count_bit_errors({1, 0}, {1}), FramingError);
    CHECK(label_bit_errors(0b1010, 0b1011) == 1);
    CHECK(label_bit_errors(3, 3) == 0);
}

TEST_CASE("pure-noise error rate matches the Gaussian tail") {
    // Gray QPSK over a clean channel: BER = Q(sqrt(Es/N0)), about 7.83e-4
    // at 10 dB. 1e7 bits keep the sampling error well inside 10%.
    const Constellation c = Constellation::square_qam(4);
    const double n0 = std::pow(10.0, -1.0);
    const double sigma = std::sqrt(n0 / 2.0);

    RngStream rng(88);
    const std::uint64_t symbols = 5'000'000;
    std::uint64_t errors = 0;
    for (std::uint64_t i = 0; i < symbols; ++i) {
        const int tx = static_cast<int>(rng.uniform_int(4));
        const std::complex<double> y = c.point(tx) + rng.complex_normal(sigma);
        errors += static_cast<std::uint64_t>(label_bit_errors(tx, demodulate_ml(y, 1.0, c)));
    }
    const double ber = static_cast<double>(errors) / (2.0 * static_cast<double>(symbols));
    const double q_tail = 0.5 * std::erfc(std::sqrt(10.0) / std::sqrt(2.0));
    CHECK(ber == doctest::Approx(q_tail).epsilon(0.10));
}
