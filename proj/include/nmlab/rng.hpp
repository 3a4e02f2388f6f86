#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "nmlab/bits.hpp"
#include "nmlab/prob.hpp"

namespace nmlab {

// Counter-based generator: output i of stream s under seed k is a fixed
// mixing function of (k, s, i). Forked streams never share outputs.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(seed), stream_(stream) {}

    std::uint64_t next();
    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

    // Uniform in [0, n), n >= 1, without modulo bias.
    std::uint64_t uniform(std::uint64_t n);
    bool bit() { return next() >> 63; }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    BitString bits(std::size_t n);

    CounterRng fork(std::uint64_t stream) const;

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform(i)]);
    }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
};

// Uniform random subset of {0,1}^n of size 2^k (k <= n <= 32).
FlatSource sample_flat_source(CounterRng& rng, unsigned n, unsigned k);
// Uniform random subset of size `size`.
FlatSource sample_flat_support(CounterRng& rng, unsigned n, std::uint64_t size);

}  // namespace nmlab
