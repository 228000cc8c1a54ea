#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lgha {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// ----------------------------------------------------------------------------
// Errors
// ----------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SymplecticViolation : Error { using Error::Error; };
struct NearSingular : Error { using Error::Error; };
struct AxisKindMismatch : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct ParityViolation : Error { using Error::Error; };
struct DegreeOverflow : Error { using Error::Error; };
struct IncompatibleRHS : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// ----------------------------------------------------------------------------
// Pairwise summation
// ----------------------------------------------------------------------------

template <typename T> T pairwise_sum(std::span<const T> xs)
{
    constexpr std::size_t base = 16;
    if (xs.size() <= base) {
        T s{};
        for (const auto& x : xs) s += x;
        return s;
    }
    const std::size_t h = xs.size() / 2;
    return pairwise_sum(xs.first(h)) + pairwise_sum(xs.subspan(h));
}

template <typename T> T pairwise_sum(const std::vector<T>& xs)
{
    return pairwise_sum(std::span<const T>(xs.data(), xs.size()));
}

// ----------------------------------------------------------------------------
// Threads
// ----------------------------------------------------------------------------

/// Worker count: hardware concurrency capped by LGHA_THREADS when set.
inline unsigned thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LGHA_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Runs body(block) for every block index in [0, blocks). Blocks are
/// claimed in strided order so the partition never depends on thread count.
inline void parallel_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < blocks; b += workers) body(b);
        });
    for (auto& t : pool) t.join();
}

inline constexpr std::size_t reduce_block = 4096;

/// Deterministic sum of term(i) for i in [0, n): pairwise inside fixed-size
/// blocks, then pairwise over block partials.
template <typename T, typename F> T reduce_sum(std::size_t n, F&& term)
{
    const std::size_t blocks = (n + reduce_block - 1) / reduce_block;
    std::vector<T> partial(blocks);
    parallel_blocks(blocks, [&](std::size_t b) {
        const std::size_t lo = b * reduce_block, hi = std::min(n, lo + reduce_block);
        std::vector<T> buf(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = term(i);
        partial[b] = pairwise_sum(buf);
    });
    return pairwise_sum(partial);
}

// ----------------------------------------------------------------------------
// Philox4x32-10
// ----------------------------------------------------------------------------

class Philox {
public:
    using block = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }

    block operator()(std::uint64_t counter) const
    {
        block ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_), k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return ctr;
    }

    /// Two uniforms in (0, 1) from one counter.
    std::array<double, 2> uniform2(std::uint64_t counter) const
    {
        const block b = (*this)(counter);
        auto u = [](std::uint32_t hi, std::uint32_t lo) {
            const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
            return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
        };
        return {u(b[0], b[1]), u(b[2], b[3])};
    }

    /// Two standard normals (Box-Muller) from one counter.
    std::array<double, 2> normal2(std::uint64_t counter) const
    {
        const auto [u1, u2] = uniform2(counter);
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * pi * u2), r * std::sin(2.0 * pi * u2)};
    }

    /// Fills out with standard normals for sample index i.
    void normals(std::uint64_t i, std::span<double> out) const
    {
        const std::size_t pairs = (out.size() + 1) / 2;
        for (std::size_t p = 0; p < pairs; ++p) {
            const auto z = normal2(i * 64 + p);
            out[2 * p] = z[0];
            if (2 * p + 1 < out.size()) out[2 * p + 1] = z[1];
        }
    }

    double uniform(std::uint64_t i, double lo, double hi) const { return lo + (hi - lo) * uniform2(i)[0]; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Sequential convenience wrapper over a counter-based stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : gen_(seed, stream) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * gen_.uniform2(next_++)[0]; }

    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto z = gen_.normal2(next_++);
        spare_ = z[1];
        have_spare_ = true;
        return z[0];
    }

private:
    Philox gen_;
    std::uint64_t next_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace lgha
