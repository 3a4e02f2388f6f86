#include "nmlab/rng.hpp"

#include <algorithm>
#include <unordered_set>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next() {
    std::uint64_t c = ctr_++;
    return mix(mix(key_ ^ mix(stream_ + 0x9e3779b97f4a7c15ull)) + c * 0x9e3779b97f4a7c15ull);
}

std::uint64_t CounterRng::uniform(std::uint64_t n) {
    if (n == 0) throw ParameterError("n>0", "uniform draw from an empty range");
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        std::uint64_t t = (0 - n) % n;
        while (lo < t) {
            m = static_cast<unsigned __int128>(next()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

BitString CounterRng::bits(std::size_t n) {
    BitString b(n);
    for (std::size_t pos = 0; pos < n; pos += 64) {
        std::size_t k = std::min<std::size_t>(64, n - pos);
        b.write(pos, k, next() >> (64 - k));
    }
    return b;
}

CounterRng CounterRng::fork(std::uint64_t stream) const {
    return CounterRng(mix(key_ ^ mix(stream_ * 0xd1b54a32d192ed03ull + ctr_)), stream);
}

FlatSource sample_flat_support(CounterRng& rng, unsigned n, std::uint64_t size) {
    if (n > 32) throw DomainCapError("flat sources are sampled on at most 32 bits");
    std::uint64_t universe = std::uint64_t{1} << n;
    if (size == 0 || size > universe) throw ParameterError("support size", "support size must lie in [1, 2^n]");
    FlatSource f{n, {}};
    if (size * 2 > universe) {
        std::vector<std::uint64_t> all(universe);
        for (std::uint64_t v = 0; v < universe; ++v) all[v] = v;
        // Partial Fisher-Yates over the prefix.
        for (std::uint64_t i = 0; i < size; ++i) std::swap(all[i], all[i + rng.uniform(universe - i)]);
        f.support.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
    } else {
        // Floyd's algorithm.
        std::unordered_set<std::uint64_t> seen;
        for (std::uint64_t j = universe - size; j < universe; ++j) {
            std::uint64_t t = rng.uniform(j + 1);
            if (!seen.insert(t).second) seen.insert(j);
        }
        f.support.assign(seen.begin(), seen.end());
    }
    std::sort(f.support.begin(), f.support.end());
    return f;
}

FlatSource sample_flat_source(CounterRng& rng, unsigned n, unsigned k) {
    if (k > n) throw ParameterError("k<=n", "min-entropy exceeds source length");
    return sample_flat_support(rng, n, std::uint64_t{1} << k);
}

}  // namespace nmlab
