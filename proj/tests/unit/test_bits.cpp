#include <doctest.h>

#include <string>

#include "nmlab/bits.hpp"
#include "nmlab/errors.hpp"
#include "nmlab/rng.hpp"

using namespace nmlab;

namespace {

// Reference model: one char per bit.
std::string random_bits(CounterRng& rng, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(rng.bit() ? '1' : '0');
    return s;
}

std::uint64_t naive_read(const std::string& s, std::size_t pos, std::size_t n) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v = (v << 1) | static_cast<std::uint64_t>(s[pos + i] == '1');
    return v;
}

}  // namespace

TEST_CASE("from_uint packs the low bits, most significant first") {
    BitString b = BitString::from_uint(0b1011, 6);
    CHECK(b.to_binary() == "001011");
    CHECK(b.to_uint() == 0b1011);
    CHECK(BitString::from_uint(~0ull, 64).popcount() == 64);
    CHECK_THROWS_AS(BitString::from_uint(1, 65), LengthError);
}

TEST_CASE("read and write agree with a per-bit model across word boundaries") {
    CounterRng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.uniform(200);
        std::string s = random_bits(rng, n);
        BitString b = BitString::parse_binary(s);
        REQUIRE(b.to_binary() == s);
        const std::size_t pos = rng.uniform(n);
        const std::size_t len = rng.uniform(std::min<std::size_t>(64, n - pos) + 1);
        CHECK(b.read(pos, len) == naive_read(s, pos, len));
        const std::uint64_t v = len ? rng.next() >> (64 - len) : 0;
        b.write(pos, len, v);
        for (std::size_t i = 0; i < len; ++i) s[pos + i] = ((v >> (len - 1 - i)) & 1) ? '1' : '0';
        CHECK(b.to_binary() == s);
    }
}

TEST_CASE("hex and binary parsing") {
    CHECK(BitString::parse_hex("a5").to_binary() == "10100101");
    CHECK(BitString::parse_hex("A5") == BitString::parse_hex("a5"));
    CHECK(BitString::parse_binary("10100101").to_hex() == "a5");
    CHECK_THROWS_AS(BitString::parse_binary("102"), ShapeError);
    CHECK_THROWS_AS(BitString::parse_hex("g0"), ShapeError);
    CHECK_THROWS_AS(BitString::parse_binary("101").to_hex(), ShapeError);
}

TEST_CASE("slice, suffix and concat partition a string") {
    CounterRng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.uniform(150);
        BitString b = rng.bits(n);
        const std::size_t w = rng.uniform(n + 1);
        CHECK(slice(b, w).size() == w);
        CHECK(concat(slice(b, w), suffix(b, w)) == b);
    }
    CHECK_THROWS_AS(slice(BitString(3), 4), LengthError);
}

TEST_CASE("xor, popcount and the unused tail") {
    BitString a = BitString::parse_binary("1100110011");
    BitString b = BitString::parse_binary("1010101010");
    CHECK((a ^ b).to_binary() == "0110011001");
    CHECK((a ^ a).is_zero());
    CHECK(a.popcount() == 6);
    CHECK_THROWS_AS(a ^ BitString(9), ShapeError);
    // Equal strings must compare equal regardless of how they were built.
    BitString c(70);
    c.write(60, 10, 0x3ff);
    BitString d = BitString::parse_binary(std::string(60, '0') + std::string(10, '1'));
    CHECK(c == d);
    CHECK(BitStringHash{}(c) == BitStringHash{}(d));
}

TEST_CASE("ordering is lexicographic on equal lengths") {
    CHECK(BitString::parse_binary("0111") < BitString::parse_binary("1000"));
    CHECK(BitString::parse_binary("0100") > BitString::parse_binary("0011"));
}

TEST_CASE("row matrix shapes") {
    RowMatrix m(3, 5);
    CHECK(m.rows() == 3);
    CHECK(m.width() == 5);
    CHECK(m.block(2, 4).rows() == 1);
    CHECK_THROWS_AS(m.block(3, 1), ShapeError);
    CHECK_THROWS_AS(RowMatrix(std::vector<BitString>{BitString(2), BitString(3)}), ShapeError);
    CHECK_THROWS_AS(RowMatrix(0, 4), ShapeError);
}
