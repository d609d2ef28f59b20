#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hullforge {

// Dense row-major matrix of doubles. Deliberately minimal: the learning
// code only needs storage, row views and element access.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }
};

// Deterministic random source. All randomness in the library flows
// through this class so results are reproducible bit-for-bit across
// platforms: mt19937_64 is fully specified by the standard, and the
// uniform/normal transforms below avoid the implementation-defined
// std::*_distribution adaptors.
class RandomEngine {
public:
    explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 bits of mantissa.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal();

    // Unbiased integer in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Global worker-thread count for parallel_for. 0 means auto-detect.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n) using a static block partition. Each
// index must write only to its own output slots; reductions are the
// caller's job and must stay sequential for determinism.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Shortest round-trip decimal representation of a double. Used for all
// numeric serialization so repeated runs produce identical bytes.
std::string format_double(double v);

// Strict double parse; the whole token must be consumed.
bool parse_double(const std::string& token, double& out);

// FNV-1a over raw bytes, used to fingerprint parameter vectors.
std::uint64_t fnv1a(const void* bytes, std::size_t len);
std::string hex64(std::uint64_t v);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
// Computed by Newton iteration on the Legendre recurrence and cached.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace hullforge
