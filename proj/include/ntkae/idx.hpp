#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ntkae {

enum class IdxErrorKind { bad_magic, truncated, dimension_overflow, io, bad_image };

struct IdxError : std::runtime_error {
    IdxErrorKind error_kind;
    std::size_t byte_offset;
    IdxError(IdxErrorKind k, std::size_t offset, const std::string& what)
        : std::runtime_error(what), error_kind(k), byte_offset(offset) {}
};

// Raw IDX tensor: big-endian magic 0x0000'08'NN (unsigned byte payload,
// NN = rank), big-endian u32 dimension sizes, then the payload bytes.
struct IdxTensor {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;
};

IdxTensor read_idx_raw(const std::string& path);
void write_idx(const std::string& path, const IdxTensor& t);

// Image reader: requires rank-3 magic 0x00000803.
IdxTensor read_idx_images_raw(const std::string& path);

struct MnistBatch {
    Eigen::MatrixXd X;   // pixels x images, every column rescaled to norm r
    double r = 0.0;
    bool mean_subtracted = true;
    int offset = 0;
};

// Parses an IDX image file and applies the preprocessing: per-image mean
// subtraction, then rescaling each column to norm r. count < 0 keeps all
// images from `offset` on.
MnistBatch read_idx(const std::string& path, double r, int count = -1, int offset = 0);

}  // namespace ntkae
