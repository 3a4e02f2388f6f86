#pragma once

#include <cstdint>

namespace nmlab {

// GF(2^b) for 1 <= b <= 64. Elements are b-bit integers; bit b-1 is the
// coefficient of x^(b-1). The modulus is the numerically least irreducible
// polynomial of degree b (see docs/irreducible.md).
class GF2b {
public:
    explicit GF2b(unsigned b);

    unsigned bits() const { return b_; }
    // Modulus without its leading x^b term.
    std::uint64_t modulus_low() const { return low_; }
    std::uint64_t mask() const { return mask_; }

    std::uint64_t mul(std::uint64_t a, std::uint64_t c) const;
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;

private:
    unsigned b_;
    std::uint64_t low_;
    std::uint64_t mask_;
};

// Shared instance per degree.
const GF2b& field(unsigned b);

// Low part of the least irreducible polynomial of degree b, 1 <= b <= 64.
std::uint64_t irreducible_low(unsigned b);

}  // namespace nmlab
