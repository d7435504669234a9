#include "attentive/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "attentive/rng.hpp"

namespace mnist {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open idx file", path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {char((v >> 24) & 0xff), char((v >> 16) & 0xff), char((v >> 8) & 0xff),
                           char(v & 0xff)};
    out.write(bytes, 4);
}

} // namespace

void load_idx_images(const std::string& path, std::size_t& rows, std::size_t& cols,
                     std::vector<std::uint8_t>& out) {
    const auto bytes = slurp(path);
    if (bytes.size() < 16) fail("truncated idx image header", path);
    if (read_u32_be(bytes, 0) != kImageMagic) fail("bad idx image magic", path);
    const std::size_t count = read_u32_be(bytes, 4);
    rows = read_u32_be(bytes, 8);
    cols = read_u32_be(bytes, 12);
    const std::size_t want = 16 + count * rows * cols;
    if (bytes.size() < want) fail("truncated idx image payload", path);
    out.assign(bytes.begin() + 16, bytes.begin() + static_cast<std::ptrdiff_t>(want));
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
    const auto bytes = slurp(path);
    if (bytes.size() < 8) fail("truncated idx label header", path);
    if (read_u32_be(bytes, 0) != kLabelMagic) fail("bad idx label magic", path);
    const std::size_t count = read_u32_be(bytes, 4);
    if (bytes.size() < 8 + count) fail("truncated idx label payload", path);
    return std::vector<std::uint8_t>(bytes.begin() + 8,
                                     bytes.begin() + static_cast<std::ptrdiff_t>(8 + count));
}

RawDataset load_dataset(const std::string& image_path, const std::string& label_path) {
    RawDataset data;
    load_idx_images(image_path, data.rows, data.cols, data.images);
    data.labels = load_idx_labels(label_path);
    if (data.rows == 0 || data.cols == 0) fail("idx image file has zero-sized images", image_path);
    if (data.images.size() != data.labels.size() * data.rows * data.cols)
        fail("image/label count mismatch", image_path);
    return data;
}

void write_idx_images(const std::string& path, std::size_t rows, std::size_t cols,
                      const std::vector<std::uint8_t>& data) {
    if (rows == 0 || cols == 0 || data.size() % (rows * cols) != 0)
        throw std::invalid_argument("write_idx_images: data size must be a multiple of rows*cols");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write idx file", path);
    write_u32_be(out, kImageMagic);
    write_u32_be(out, static_cast<std::uint32_t>(data.size() / (rows * cols)));
    write_u32_be(out, static_cast<std::uint32_t>(rows));
    write_u32_be(out, static_cast<std::uint32_t>(cols));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) fail("short write", path);
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write idx file", path);
    write_u32_be(out, kLabelMagic);
    write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    if (!out) fail("short write", path);
}

PairTask make_pair_task(const RawDataset& data, int positive_digit, int negative_digit) {
    if (positive_digit == negative_digit)
        throw std::invalid_argument("make_pair_task: digits must differ");
    PairTask task;
    task.positive_digit = positive_digit;
    task.negative_digit = negative_digit;
    task.dim = data.dim();
    std::size_t pos_seen = 0, neg_seen = 0;
    for (std::size_t i = 0; i < data.count(); ++i) {
        const int label = data.labels[i];
        if (label != positive_digit && label != negative_digit) continue;
        const bool pos = (label == positive_digit);
        pos_seen += pos;
        neg_seen += !pos;
        task.y.push_back(pos ? 1 : -1);
        const std::uint8_t* px = data.images.data() + i * task.dim;
        for (std::size_t j = 0; j < task.dim; ++j)
            task.x.push_back(static_cast<double>(px[j]) / 255.0);
    }
    if (pos_seen == 0 || neg_seen == 0)
        throw std::invalid_argument("make_pair_task: a requested digit has no examples");
    return task;
}

std::vector<std::size_t> shuffled_order(std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(attentive::mix64(seed ^ 0x9e3779b97f4a7c15ULL));
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

namespace {

constexpr std::size_t kSide = 28;

struct Blob {
    double cx, cy, sigma, amp;
};

// Every class owns a disjoint set of dot positions drawn from one shared
// grid, so any digit pair stays linearly separable no matter the seed. Dots
// drop out per example the way ink strokes do, which keeps the informative
// pixels variance-heavy rather than mean-heavy.
constexpr int kDotsPerClass = 12;
constexpr double kDotPresence = 0.85;

std::vector<std::vector<Blob>> all_class_blobs(std::uint64_t seed) {
    std::vector<std::pair<double, double>> slots;
    for (int r = 0; r < 11; ++r)
        for (int c = 0; c < 11; ++c) slots.emplace_back(3.0 + 2.2 * c, 3.0 + 2.2 * r);
    std::mt19937_64 rng(attentive::seed_chain(seed, 1000u));
    std::shuffle(slots.begin(), slots.end(), rng);
    std::uniform_real_distribution<double> sig(0.9, 1.3);
    std::uniform_real_distribution<double> amp(0.75, 1.0);
    std::uniform_real_distribution<double> wobble(-0.5, 0.5);
    std::vector<std::vector<Blob>> all(10);
    std::size_t next = 0;
    for (auto& blobs : all)
        for (int k = 0; k < kDotsPerClass; ++k) {
            const auto [cx, cy] = slots[next++];
            blobs.push_back(Blob{cx + wobble(rng), cy + wobble(rng), sig(rng), amp(rng)});
        }
    return all;
}

double proto_value(const std::vector<Blob>& blobs, const std::vector<double>& amp_jitter,
                   double x, double y) {
    double v = 0.0;
    for (std::size_t k = 0; k < blobs.size(); ++k) {
        const auto& b = blobs[k];
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        v += amp_jitter[k] * b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
    }
    return std::min(1.0, v);
}

void render_split(std::vector<std::uint8_t>& images, std::vector<std::uint8_t>& labels,
                  std::size_t count, std::uint64_t seed, std::uint64_t split_tag,
                  const std::vector<std::vector<Blob>>& blobs) {
    images.resize(count * kSide * kSide);
    labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int cls = static_cast<int>(i % 10);
        labels[i] = static_cast<std::uint8_t>(cls);
        std::mt19937_64 rng(
            attentive::seed_chain(seed, split_tag, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> shift(-1, 1);
        std::uniform_real_distribution<double> scale(0.85, 1.15);
        std::uniform_real_distribution<double> jitter(0.6, 1.4);
        std::normal_distribution<double> noise(0.0, 0.05);
        std::bernoulli_distribution present(kDotPresence);
        const int dx = shift(rng);
        const int dy = shift(rng);
        const double s = scale(rng);
        std::vector<double> amp_jitter(blobs[cls].size());
        for (double& aj : amp_jitter) aj = present(rng) ? jitter(rng) : 0.0;
        std::uint8_t* out = images.data() + i * kSide * kSide;
        for (std::size_t r = 0; r < kSide; ++r) {
            for (std::size_t c = 0; c < kSide; ++c) {
                const double v =
                    proto_value(blobs[cls], amp_jitter, static_cast<double>(c) - dx,
                                static_cast<double>(r) - dy) *
                        s +
                    noise(rng);
                out[r * kSide + c] =
                    static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
            }
        }
    }
}

} // namespace

void write_synthetic_mnist(const std::string& dir, std::size_t train_count,
                           std::size_t test_count, std::uint64_t seed) {
    if (train_count < 10 || test_count < 10)
        throw std::invalid_argument("write_synthetic_mnist: need at least 10 examples per split");
    std::filesystem::create_directories(dir);
    const std::vector<std::vector<Blob>> blobs = all_class_blobs(seed);

    std::vector<std::uint8_t> images, labels;
    render_split(images, labels, train_count, seed, 0, blobs);
    write_idx_images(dir + "/train-images-idx3-ubyte", kSide, kSide, images);
    write_idx_labels(dir + "/train-labels-idx1-ubyte", labels);
    render_split(images, labels, test_count, seed, 1, blobs);
    write_idx_images(dir + "/t10k-images-idx3-ubyte", kSide, kSide, images);
    write_idx_labels(dir + "/t10k-labels-idx1-ubyte", labels);
}

} // namespace mnist
