#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace walkrank
{
    /// SplitMix64 finalizer. Bijective on 64-bit words.
    constexpr std::uint64_t mix64(std::uint64_t z) noexcept
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Folds a sequence of words into a single stream key.
    constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept
    {
        std::uint64_t k = mix64(seed);
        k = mix64(k ^ mix64(a + 0x632be59bd9b4e019ULL));
        k = mix64(k ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
        k = mix64(k ^ mix64(c + 0x4f1bbcdcbfa53e0bULL));
        return k;
    }

    /**
     * Small counter-based generator (SplitMix64 stream).
     *
     * Each random walk owns one stream keyed by (rng seed, walk id, epoch), so
     * resampling walk k never shifts the draws of walk j. The output sequence is
     * fully specified here and does not depend on the standard library's
     * distribution implementations.
     */
    class StreamRng
    {
    public:
        using result_type = std::uint64_t;

        constexpr explicit StreamRng(std::uint64_t key) noexcept
            : m_state(key)
        {
        }

        StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t epoch = 0, std::uint64_t domain = 0) noexcept
            : m_state(derive_key(seed, stream, epoch, domain))
        {
        }

        static constexpr result_type min() noexcept { return 0; }
        static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

        constexpr result_type operator()() noexcept
        {
            m_state += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = m_state;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

        /// Uniform double in [0, 1) with 53 random bits.
        constexpr double uniform() noexcept
        {
            return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
        }

        /// Uniform double in (low, high].
        constexpr double uniform_open_closed(double low, double high) noexcept
        {
            return low + (high - low) * (1.0 - uniform());
        }

        /// Unbiased integer in [0, n). n must be positive.
        constexpr std::uint64_t below(std::uint64_t n) noexcept
        {
            // Lemire's multiply-shift with rejection.
            unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
            auto low = static_cast<std::uint64_t>(m);
            if (low < n)
            {
                const std::uint64_t threshold = (0 - n) % n;
                while (low < threshold)
                {
                    m = static_cast<unsigned __int128>((*this)()) * n;
                    low = static_cast<std::uint64_t>(m);
                }
            }
            return static_cast<std::uint64_t>(m >> 64);
        }

        constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

    private:
        std::uint64_t m_state;
    };

    /// Fisher-Yates shuffle with a fixed, library-independent draw sequence.
    template <typename T>
    void shuffle(std::span<T> items, StreamRng& rng)
    {
        for (std::size_t i = items.size(); i > 1; --i)
        {
            const auto j = static_cast<std::size_t>(rng.below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }
}
