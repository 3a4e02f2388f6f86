#include <doctest.h>

#include "nmlab/errors.hpp"
#include "nmlab/gf2.hpp"
#include "nmlab/rng.hpp"
#include "nmlab/sext.hpp"
#include "nmlab/verify.hpp"
#include "support/ext_oracle.hpp"

using namespace nmlab;

namespace {

using namespace oracle;

std::uint64_t ref_mul(unsigned b, std::uint64_t x, std::uint64_t y) { return oracle::mul(b, x, y); }

u128 poly_gcd(u128 a, u128 b) {
    while (b) {
        a = poly_mod(a, b);
        std::swap(a, b);
    }
    return a;
}

// x^(2^k) mod f by repeated squaring with the reference multiply.
u128 frobenius(unsigned b, unsigned k) {
    std::uint64_t v = b == 1 ? static_cast<std::uint64_t>(poly_mod(2, modulus(1))) : 2;
    for (unsigned i = 0; i < k; ++i) v = ref_mul(b, v, v);
    return v;
}

// Rabin: f of degree b is irreducible iff x^(2^b) = x mod f and
// gcd(x^(2^(b/q)) - x, f) = 1 for every prime q dividing b.
bool rabin_irreducible(unsigned b) {
    const u128 f = modulus(b), x = poly_mod(2, f);
    if (frobenius(b, b) != x) return false;
    for (unsigned q = 2; q <= b; ++q) {
        bool prime = true;
        for (unsigned r = 2; r * r <= q; ++r) prime = prime && q % r != 0;
        if (!prime || b % q) continue;
        if (degree(poly_gcd(f, frobenius(b, b / q) ^ x)) != 0) return false;
    }
    return true;
}

// Trial division by every polynomial of degree 1..deg/2.
bool has_factor(u128 f) {
    const int d = degree(f);
    for (u128 g = 2; degree(g) <= d / 2; ++g)
        if (poly_mod(f, g) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("every field modulus is irreducible") {
    for (unsigned b = 1; b <= 64; ++b) {
        CAPTURE(b);
        CHECK(rabin_irreducible(b));
    }
}

TEST_CASE("each modulus is the least irreducible of its degree") {
    for (unsigned b = 2; b <= 14; ++b) {
        CAPTURE(b);
        const u128 f = modulus(b);
        CHECK_FALSE(has_factor(f));
        for (u128 g = u128(1) << b; g < f; ++g) CHECK(has_factor(g));
    }
}

TEST_CASE("field multiply agrees with carry-less multiply and reduction") {
    CounterRng rng(17);
    for (unsigned b = 1; b <= 64; ++b) {
        const GF2b& f = field(b);
        for (int i = 0; i < 50; ++i) {
            const std::uint64_t x = rng.next() & f.mask(), y = rng.next() & f.mask();
            CHECK(f.mul(x, y) == ref_mul(b, x, y));
        }
        CHECK(f.mul(1, 1) == 1);
    }
}

TEST_CASE("ext evaluates the block polynomial for long and short seeds") {
    CounterRng rng(23);
    for (int i = 0; i < 300; ++i) {
        const std::size_t m = 1 + rng.uniform(12);
        const std::size_t n = m + rng.uniform(60);
        const unsigned block = static_cast<unsigned>(std::max<std::size_t>(m, 8));
        const std::size_t d = 1 + rng.uniform(2 * block + 4);
        const ExtScheme s = make_scheme(n, d, m, 1, 0.25);
        const BitString x = rng.bits(n), y = rng.bits(d);
        CAPTURE(n);
        CAPTURE(d);
        CAPTURE(m);
        const BitString z = ext(s, x, y);
        CHECK(z.size() == m);
        CHECK(z.to_uint() == oracle::poly_hash(s, x, y));
        if (n <= 64 && d <= 64) CHECK(ext_u64(s, x.to_uint(), y.to_uint()) == z.to_uint());
    }
}

TEST_CASE("ext is linear in the source") {
    CounterRng rng(29);
    const ExtScheme s = make_scheme(40, 16, 6, 20, 0.25);
    for (int i = 0; i < 100; ++i) {
        const BitString a = rng.bits(40), b = rng.bits(40), y = rng.bits(16);
        CHECK((ext(s, a, y) ^ ext(s, b, y)) == ext(s, a ^ b, y));
    }
}

TEST_CASE("leftover hash lemma holds exactly on small flat sources") {
    CounterRng rng(31);
    const ExtScheme s = make_scheme(10, 16, 2, 6, 0.125);
    CHECK(s.two_element_seed());
    LinearStrongOracle fast(s);
    for (int i = 0; i < 20; ++i) {
        const FlatSource src = sample_flat_source(rng, 10, 6);
        const Rational exact = strong_distance(s, src.dist());
        CHECK(fast.distance(src) == exact);
        CHECK(to_double(exact) <= s.lhl_bound(6));
    }
}

TEST_CASE("sample_positions reads fixed-width chunks") {
    const BitString r = BitString::parse_binary("110001101");
    const auto pos = sample_positions(r, 3, 5);
    REQUIRE(pos.size() == 3);
    CHECK(pos[0] == 1);  // 110 = 6
    CHECK(pos[1] == 1);  // 001
    CHECK(pos[2] == 0);  // 101 = 5
    // Chunks are ceil(log2 5) = 3 bits wide, so twelve ones give 7 mod 5 three times.
    CHECK(sample_positions(BitString::parse_binary("111111111111"), 3, 5) == std::vector<std::size_t>{2, 2, 2});
    CHECK(sample_positions(BitString(9), 3, 8) == std::vector<std::size_t>{0, 0, 0});
    CHECK_THROWS_AS(sample_positions(r, 4, 5), LengthError);
    CHECK_THROWS_AS(sample_positions(r, 1, 0), ParameterError);
}

TEST_CASE("scheme validation and serialization") {
    CHECK_THROWS_AS(make_scheme(4, 8, 5, 4, 0.1), ParameterError);
    CHECK_THROWS_AS(make_scheme(8, 8, 4, 4, 0), ParameterError);
    CHECK_THROWS_AS(make_scheme(8, 8, 70, 4, 0.1, 70), ParameterError);
    const ExtScheme s = make_scheme(30, 20, 3, 12, 0.1);
    nlohmann::json j = s;
    const ExtScheme back = j.get<ExtScheme>();
    CHECK(back.n_in == 30);
    CHECK(back.d_seed == 20);
    CHECK(back.block == 8);
    CHECK(back.two_element_seed());
    j["family"] = "other";
    CHECK_THROWS_AS(j.get<ExtScheme>(), ParameterError);
    CHECK(s.lhl_bound(3) == doctest::Approx(0.5));
}
