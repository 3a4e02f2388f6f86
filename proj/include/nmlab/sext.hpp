#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/bits.hpp"

namespace nmlab {

// Polynomial-hash extractor descriptor.
//
// The input is cut into b-bit blocks B_0..B_D (the last one zero-padded on
// the right) and read as p(a) = B_0 a^D + ... + B_D over GF(2^b). The output is
// the top m_out bits of c * p(a). With d_seed >= 2b the seed supplies a and c
// and the leftover hash lemma applies. A shorter seed supplies only a and
// c = a; when d_seed < b the seed is followed by one 1 bit and zeros, so a is
// never zero. Short-seed schemes carry no hash-lemma certificate and are
// validated by the exact oracles instead.
struct ExtScheme {
    std::size_t n_in = 0;
    std::size_t d_seed = 0;
    std::size_t m_out = 0;
    double claimed_k = 0;
    double claimed_eps = 0.5;
    std::string family = "poly-hash-lhl";
    unsigned block = 8;

    bool two_element_seed() const { return d_seed >= 2 * static_cast<std::size_t>(block); }
    // Strong-extraction error bound 2^((m-k)/2 - 1); meaningful only for two-element seeds.
    double lhl_bound(double k) const;
};

// block = max(m_out, 8) unless given; throws ShapeError / ParameterError.
ExtScheme make_scheme(std::size_t n_in, std::size_t d_seed, std::size_t m_out, double claimed_k,
                      double claimed_eps, unsigned block = 0);

BitString ext(const ExtScheme& s, const BitString& x, const BitString& seed);
// Same map on inputs of at most 64 bits packed as integers (first bit most
// significant). Allocation-free; the exhaustive oracles run on this path.
std::uint64_t ext_u64(const ExtScheme& s, std::uint64_t x, std::uint64_t seed);

// `count` indices in [0, universe): consecutive ceil(log2 universe)-bit chunks of r, each mod universe.
std::vector<std::size_t> sample_positions(const BitString& r, std::size_t count, std::size_t universe);

unsigned ceil_log2(std::uint64_t v);

void to_json(nlohmann::json& j, const ExtScheme& s);
void from_json(const nlohmann::json& j, ExtScheme& s);

}  // namespace nmlab
