#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rcs {

/// Seedable random stream. A stream is identified by a (seed, stream id)
/// pair; the same pair always replays the same draw sequence. Child streams
/// are split off by id, so Monte Carlo workers can own disjoint streams that
/// depend only on the logical work unit, never on scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    /// Derive an independent child stream. Children of the same parent with
    /// distinct ids never share a sequence.
    RngStream substream(std::uint64_t id) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer on [0, n).
    std::uint32_t uniform_int(std::uint32_t n);

    /// Standard normal draw.
    double normal();
    /// Gamma draw with the given shape and scale.
    double gamma(double shape, double scale);
    /// Circular complex Gaussian with the given per-dimension deviation.
    std::complex<double> complex_normal(double sigma_per_dim);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used for stream-id mixing.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace rcs
