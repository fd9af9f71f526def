#include "rcs/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <zlib.h>

#include "rcs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; byte swapping is not implemented");

namespace rcs {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'N', 'N'};

void append_bytes(std::vector<std::uint8_t>& buf, const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf.insert(buf.end(), p, p + n);
}

template <typename T>
void append_scalar(std::vector<std::uint8_t>& buf, T value) {
    append_bytes(buf, &value, sizeof(T));
}

std::uint8_t activation_tag(Activation act) {
    switch (act) {
    case Activation::linear:
        return 0;
    case Activation::relu:
        return 1;
    case Activation::softmax:
        return 2;
    }
    throw ModelIoError("unknown activation");
}

Activation activation_from_tag(std::uint8_t tag) {
    switch (tag) {
    case 0:
        return Activation::linear;
    case 1:
        return Activation::relu;
    case 2:
        return Activation::softmax;
    default:
        throw ModelIoError("model file carries an unknown activation tag");
    }
}

class Reader {
public:
    explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    template <typename T>
    T scalar() {
        if (pos_ + sizeof(T) > bytes_.size()) {
            throw ModelIoError("model file is truncated");
        }
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    void raw(void* out, std::size_t n) {
        if (pos_ + n > bytes_.size()) {
            throw ModelIoError("model file is truncated");
        }
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t position() const { return pos_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

} // namespace

void save_params(const NetworkParams& params, const std::filesystem::path& path) {
    params.validate();

    std::vector<std::uint8_t> buf;
    append_bytes(buf, kMagic, sizeof(kMagic));
    append_scalar<std::uint16_t>(buf, kModelFormatVersion);
    append_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(params.layers.size()));
    for (const Layer& layer : params.layers) {
        append_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(layer.w.cols()));
        append_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(layer.w.rows()));
        append_scalar<std::uint8_t>(buf, activation_tag(layer.activation));
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
                append_scalar<double>(buf, layer.w(r, c));
            }
        }
        for (Eigen::Index r = 0; r < layer.b.size(); ++r) {
            append_scalar<double>(buf, layer.b(r));
        }
    }
    append_scalar<std::uint32_t>(buf, crc_of(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ModelIoError("cannot open model file for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw ModelIoError("failed writing model file: " + path.string());
    }
}

NetworkParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelIoError("cannot open model file: " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof(kMagic) + sizeof(std::uint16_t) + 2 * sizeof(std::uint32_t)) {
        throw ModelIoError("model file is truncated");
    }

    const std::size_t body = bytes.size() - sizeof(std::uint32_t);
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + body, sizeof(stored_crc));
    if (crc_of(bytes.data(), body) != stored_crc) {
        throw ModelIoError("model file checksum mismatch");
    }

    Reader reader(std::move(bytes));
    char magic[4];
    reader.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ModelIoError("not a network model file (bad magic)");
    }
    const auto version = reader.scalar<std::uint16_t>();
    if (version != kModelFormatVersion) {
        throw ModelIoError("unsupported model format version " + std::to_string(version));
    }

    const auto layer_count = reader.scalar<std::uint32_t>();
    NetworkParams params;
    params.layers.reserve(layer_count);
    for (std::uint32_t k = 0; k < layer_count; ++k) {
        const auto in_dim = reader.scalar<std::uint32_t>();
        const auto out_dim = reader.scalar<std::uint32_t>();
        const Activation act = activation_from_tag(reader.scalar<std::uint8_t>());
        Layer layer;
        layer.activation = act;
        layer.w.resize(out_dim, in_dim);
        for (std::uint32_t r = 0; r < out_dim; ++r) {
            for (std::uint32_t c = 0; c < in_dim; ++c) {
                layer.w(r, c) = reader.scalar<double>();
            }
        }
        layer.b.resize(out_dim);
        for (std::uint32_t r = 0; r < out_dim; ++r) {
            layer.b(r) = reader.scalar<double>();
        }
        params.layers.push_back(std::move(layer));
    }
    if (reader.position() != reader.bytes().size() - sizeof(std::uint32_t)) {
        throw ModelIoError("model file carries trailing bytes");
    }
    params.validate();
    return params;
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelIoError("cannot open file for digest: " + path.string());
    }
    std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, Z_NULL, 0));
    char chunk[1 << 16];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        crc = static_cast<std::uint32_t>(crc32(
            crc, reinterpret_cast<const Bytef*>(chunk), static_cast<uInt>(in.gcount())));
    }
    return crc;
}

} // namespace rcs
