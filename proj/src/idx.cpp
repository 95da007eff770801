#include "ntkae/idx.hpp"

#include <fstream>
#include <limits>

namespace ntkae {

namespace {

std::vector<std::uint8_t> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IdxError(IdxErrorKind::io, 0, "cannot open " + path);
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw IdxError(IdxErrorKind::io, 0, "read failed for " + path);
    return bytes;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

IdxTensor parse(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4) {
        throw IdxError(IdxErrorKind::truncated, bytes.size(),
                       "file shorter than the 4-byte magic");
    }
    const std::uint32_t magic = be32(bytes, 0);
    if ((magic & 0xFFFFFF00u) != 0x00000800u) {
        throw IdxError(IdxErrorKind::bad_magic, 0,
                       "bad magic (expected 0x000008NN for unsigned-byte data)");
    }
    const std::size_t rank = magic & 0xFFu;
    if (rank == 0 || rank > 8) {
        throw IdxError(IdxErrorKind::bad_magic, 3, "unsupported tensor rank");
    }
    if (bytes.size() < 4 + 4 * rank) {
        throw IdxError(IdxErrorKind::truncated, bytes.size(), "dimension header truncated");
    }
    IdxTensor t;
    std::size_t total = 1;
    for (std::size_t d = 0; d < rank; ++d) {
        const std::size_t off = 4 + 4 * d;
        const std::uint32_t dim = be32(bytes, off);
        if (dim != 0 && total > std::numeric_limits<std::size_t>::max() / dim) {
            throw IdxError(IdxErrorKind::dimension_overflow, off,
                           "dimension product overflows at byte offset " +
                               std::to_string(off));
        }
        total *= dim;
        t.dims.push_back(dim);
    }
    const std::size_t payload_off = 4 + 4 * rank;
    if (bytes.size() != payload_off + total) {
        throw IdxError(
            IdxErrorKind::truncated, std::min(bytes.size(), payload_off + total),
            "payload size mismatch: expected " + std::to_string(total) + " bytes, have " +
                std::to_string(bytes.size() - payload_off));
    }
    t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(payload_off), bytes.end());
    return t;
}

}  // namespace

IdxTensor read_idx_raw(const std::string& path) { return parse(read_all(path)); }

void write_idx(const std::string& path, const IdxTensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IdxError(IdxErrorKind::io, 0, "cannot open " + path);
    const std::uint32_t magic = 0x00000800u | static_cast<std::uint32_t>(t.dims.size());
    const auto put32 = [&](std::uint32_t v) {
        const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                           static_cast<char>(v >> 8), static_cast<char>(v)};
        out.write(b, 4);
    };
    put32(magic);
    for (std::uint32_t d : t.dims) put32(d);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size()));
    if (!out) throw IdxError(IdxErrorKind::io, 0, "write failed for " + path);
}

IdxTensor read_idx_images_raw(const std::string& path) {
    IdxTensor t = read_idx_raw(path);
    if (t.dims.size() != 3) {
        throw IdxError(IdxErrorKind::bad_magic, 3,
                       "bad magic for image tensor (expected rank 3, magic 0x00000803)");
    }
    return t;
}

MnistBatch read_idx(const std::string& path, double r, int count, int offset) {
    if (!(r > 0.0)) throw std::invalid_argument("read_idx: target norm must be positive");
    const IdxTensor t = read_idx_images_raw(path);
    const long total = t.dims[0];
    const long pixels = static_cast<long>(t.dims[1]) * t.dims[2];
    if (offset < 0 || offset > total) {
        throw std::invalid_argument("read_idx: offset out of range");
    }
    const long take = (count < 0) ? total - offset
                                  : std::min<long>(count, total - offset);
    if (take <= 0) throw std::invalid_argument("read_idx: no images in selection");

    MnistBatch batch;
    batch.r = r;
    batch.offset = offset;
    batch.X.resize(pixels, take);
    for (long i = 0; i < take; ++i) {
        const std::uint8_t* img = t.data.data() + (offset + i) * pixels;
        for (long p = 0; p < pixels; ++p) batch.X(p, i) = static_cast<double>(img[p]);
        batch.X.col(i).array() -= batch.X.col(i).mean();
        const double norm = batch.X.col(i).norm();
        if (norm < 1e-12) {
            throw IdxError(IdxErrorKind::bad_image, 0,
                           "image " + std::to_string(offset + i) +
                               " is constant; cannot rescale after mean subtraction");
        }
        batch.X.col(i) *= r / norm;
    }
    return batch;
}

}  // namespace ntkae
