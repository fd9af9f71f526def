#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace rcs {

/// Square M-QAM constellation with unit average symbol energy. Symbols are
/// indexed by their bit label: the high half of the label selects the
/// in-phase level, the low half the quadrature level, each half Gray coded
/// so that nearest neighbours differ in exactly one bit.
struct Constellation {
    int order = 4;
    int bits_per_symbol = 2;
    std::vector<std::complex<double>> points;

    /// Build a square constellation; `order` must be a power of 4.
    static Constellation square_qam(int order);

    const std::complex<double>& point(int index) const { return points[static_cast<std::size_t>(index)]; }
};

/// Map a bit string onto symbols, log2(M) bits per symbol, first bit is the
/// label MSB. Throws FramingError when the length does not divide evenly.
std::vector<std::complex<double>> modulate(const std::vector<std::uint8_t>& bits,
                                           const Constellation& constellation);

/// Nearest-symbol decision: arg min over the constellation of
/// |y - h_eff * s|^2. Ties resolve to the lowest index.
int demodulate_ml(std::complex<double> y, std::complex<double> h_eff,
                  const Constellation& constellation);

/// Bits of a symbol label, MSB first.
std::vector<std::uint8_t> bits_of_symbol(int index, const Constellation& constellation);

/// Hamming distance between equal-length bit strings.
std::size_t count_bit_errors(const std::vector<std::uint8_t>& tx,
                             const std::vector<std::uint8_t>& rx);

/// Hamming distance between two symbol labels.
int label_bit_errors(int tx_index, int rx_index);

} // namespace rcs
