#include "nmlab/gf2.hpp"

#include <array>
#include <memory>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

using u128 = unsigned __int128;

// Index b-1 holds the low part of the least irreducible polynomial of degree b.
constexpr std::array<std::uint64_t, 64> kIrreducibleLow = {
    0x0,  0x3,  0x3,  0x3,  0x5,  0x3,  0x3,  0x1b, 0x3,  0x9,  0x5,  0x9,  0x1b, 0x21, 0x3,  0x2b,
    0x9,  0x9,  0x27, 0x9,  0x5,  0x3,  0x21, 0x1b, 0x9,  0x1b, 0x27, 0x3,  0x5,  0x3,  0x9,  0x8d,
    0x4b, 0x1b, 0x5,  0x35, 0x3f, 0x63, 0x11, 0x39, 0x9,  0x27, 0x59, 0x21, 0x1b, 0x3,  0x21, 0x2d,
    0x71, 0x1d, 0x4b, 0x9,  0x47, 0x7d, 0x47, 0x95, 0x11, 0x63, 0x7b, 0x3,  0x27, 0x69, 0x3,  0x1b,
};

// Carry-less product of two 64-bit polynomials, 4 bits of c at a time.
u128 clmul(std::uint64_t a, std::uint64_t c) {
    std::array<u128, 16> t{};
    for (unsigned k = 1; k < 16; ++k) {
        u128 v = 0;
        for (unsigned j = 0; j < 4; ++j)
            if ((k >> j) & 1) v ^= u128(a) << j;
        t[k] = v;
    }
    u128 r = 0;
    for (int i = 60; i >= 0; i -= 4) r = (r << 4) ^ t[(c >> i) & 15];
    return r;
}

}  // namespace

std::uint64_t irreducible_low(unsigned b) {
    if (b < 1 || b > 64) throw ShapeError("field degree must lie in [1, 64]");
    return kIrreducibleLow[b - 1];
}

GF2b::GF2b(unsigned b) : b_(b), low_(irreducible_low(b)), mask_(b == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << b) - 1) {}

std::uint64_t GF2b::mul(std::uint64_t a, std::uint64_t c) const {
    u128 p = clmul(a & mask_, c & mask_);
    // x^b = low, so fold the part above degree b back down until none is left.
    while (true) {
        u128 hi = p >> b_;
        if (!hi) break;
        p &= mask_;
        u128 fold = 0;
        for (unsigned j = 0; j < 64 && (low_ >> j); ++j)
            if ((low_ >> j) & 1) fold ^= hi << j;
        p ^= fold;
    }
    return static_cast<std::uint64_t>(p);
}

std::uint64_t GF2b::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1, base = a & mask_;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

const GF2b& field(unsigned b) {
    static const auto table = [] {
        std::array<std::unique_ptr<GF2b>, 65> t;
        for (unsigned k = 1; k <= 64; ++k) t[k] = std::make_unique<GF2b>(k);
        return t;
    }();
    if (b < 1 || b > 64) throw ShapeError("field degree must lie in [1, 64]");
    return *table[b];
}

}  // namespace nmlab
