#pragma once
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

// IDX-format image/label loading and the 1-vs-1 pair tasks the trainers
// consume. Also ships a deterministic synthetic generator that writes a
// corpus in the same four-file layout, for environments without the real
// dataset.

namespace mnist {

struct RawDataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> images; // count * rows * cols, row-major
    std::vector<std::uint8_t> labels;

    std::size_t count() const { return labels.size(); }
    std::size_t dim() const { return rows * cols; }
};

/// Binary task digit_a (+1) vs digit_b (-1) with pixels scaled to [0, 1].
struct PairTask {
    int positive_digit = 0;
    int negative_digit = 0;
    std::size_t dim = 0;
    std::vector<double> x; // count * dim
    std::vector<int> y;    // +1 or -1

    std::size_t count() const { return y.size(); }
    const double* example(std::size_t i) const { return x.data() + i * dim; }
};

/// Parse an IDX3 image file. Throws std::runtime_error naming the problem
/// (unreadable file, wrong magic, truncated payload).
void load_idx_images(const std::string& path, std::size_t& rows, std::size_t& cols,
                     std::vector<std::uint8_t>& out);

/// Parse an IDX1 label file; same error contract.
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

/// Load an image/label file pair and check the counts agree.
RawDataset load_dataset(const std::string& image_path, const std::string& label_path);

void write_idx_images(const std::string& path, std::size_t rows, std::size_t cols,
                      const std::vector<std::uint8_t>& data);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

/// Extract the two-digit task. Throws std::invalid_argument when the digits
/// are equal or either digit has no examples.
PairTask make_pair_task(const RawDataset& data, int positive_digit, int negative_digit);

/// Deterministic permutation of 0..count-1.
std::vector<std::size_t> shuffled_order(std::size_t count, std::uint64_t seed);

/// Write a synthetic 28x28 ten-class corpus under dir using the standard
/// file names (train-images-idx3-ubyte, ...). Classes are distinct blob
/// patterns; examples vary by translation, intensity, and pixel noise, so
/// one-vs-one tasks are learnable by a linear model but not trivially clean.
void write_synthetic_mnist(const std::string& dir, std::size_t train_count,
                           std::size_t test_count, std::uint64_t seed);

} // namespace mnist
