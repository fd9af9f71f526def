#include "rcs/qam.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

int gray_decode(int g) {
    int b = 0;
    for (; g != 0; g >>= 1) {
        b ^= g;
    }
    return b;
}

bool is_power_of_four(int n) {
    return n > 0 && std::has_single_bit(static_cast<unsigned>(n)) &&
           (std::countr_zero(static_cast<unsigned>(n)) % 2 == 0);
}

} // namespace

Constellation Constellation::square_qam(int order) {
    if (!is_power_of_four(order)) {
        std::ostringstream msg;
        msg << "square QAM order must be a power of 4, got " << order;
        throw ParameterError(msg.str());
    }
    const int bits = std::countr_zero(static_cast<unsigned>(order));
    const int side = 1 << (bits / 2);
    // Mean energy of the +-1, +-3, ... grid is 2 (M - 1) / 3.
    const double scale = std::sqrt(3.0 / (2.0 * (order - 1)));

    Constellation c;
    c.order = order;
    c.bits_per_symbol = bits;
    c.points.resize(static_cast<std::size_t>(order));
    for (int label = 0; label < order; ++label) {
        const int gray_i = label >> (bits / 2);
        const int gray_q = label & (side - 1);
        const int level_i = gray_decode(gray_i);
        const int level_q = gray_decode(gray_q);
        c.points[static_cast<std::size_t>(label)] = {
            scale * (2.0 * level_i - (side - 1)),
            scale * (2.0 * level_q - (side - 1)),
        };
    }
    return c;
}

std::vector<std::complex<double>> modulate(const std::vector<std::uint8_t>& bits,
                                           const Constellation& constellation) {
    const int bps = constellation.bits_per_symbol;
    if (bits.size() % static_cast<std::size_t>(bps) != 0) {
        std::ostringstream msg;
        msg << "bit string length " << bits.size() << " is not a multiple of " << bps;
        throw FramingError(msg.str());
    }
    std::vector<std::complex<double>> symbols;
    symbols.reserve(bits.size() / static_cast<std::size_t>(bps));
    for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(bps)) {
        int label = 0;
        for (int k = 0; k < bps; ++k) {
            label = (label << 1) | (bits[i + static_cast<std::size_t>(k)] & 1);
        }
        symbols.push_back(constellation.point(label));
    }
    return symbols;
}

int demodulate_ml(std::complex<double> y, std::complex<double> h_eff,
                  const Constellation& constellation) {
    int best = 0;
    double best_metric = std::norm(y - h_eff * constellation.points[0]);
    for (int v = 1; v < constellation.order; ++v) {
        const double metric = std::norm(y - h_eff * constellation.points[static_cast<std::size_t>(v)]);
        if (metric < best_metric) {
            best_metric = metric;
            best = v;
        }
    }
    return best;
}

std::vector<std::uint8_t> bits_of_symbol(int index, const Constellation& constellation) {
    const int bps = constellation.bits_per_symbol;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(bps));
    for (int k = 0; k < bps; ++k) {
        bits[static_cast<std::size_t>(k)] =
            static_cast<std::uint8_t>((index >> (bps - 1 - k)) & 1);
    }
    return bits;
}

std::size_t count_bit_errors(const std::vector<std::uint8_t>& tx,
                             const std::vector<std::uint8_t>& rx) {
    if (tx.size() != rx.size()) {
        throw FramingError("bit strings differ in length");
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        errors += static_cast<std::size_t>((tx[i] ^ rx[i]) & 1);
    }
    return errors;
}

int label_bit_errors(int tx_index, int rx_index) {
    return std::popcount(static_cast<unsigned>(tx_index ^ rx_index));
}

} // namespace rcs
