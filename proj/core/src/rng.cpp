#include "rcs/rng.hpp"

namespace rcs {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{seed, splitmix64(stream), stream};
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

RngStream RngStream::substream(std::uint64_t id) const {
    return RngStream(seed_, splitmix64(stream_ ^ splitmix64(id + 1)));
}

std::uint64_t RngStream::next_u64() {
    return engine_();
}

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint32_t RngStream::uniform_int(std::uint32_t n) {
    std::uniform_int_distribution<std::uint32_t> dist(0, n - 1);
    return dist(engine_);
}

double RngStream::normal() {
    return normal_(engine_);
}

double RngStream::gamma(double shape, double scale) {
    std::gamma_distribution<double> dist(shape, scale);
    return dist(engine_);
}

std::complex<double> RngStream::complex_normal(double sigma_per_dim) {
    const double re = normal();
    const double im = normal();
    return {sigma_per_dim * re, sigma_per_dim * im};
}

} // namespace rcs
