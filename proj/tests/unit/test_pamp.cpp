#include <doctest.h>

#include <cmath>

#include "nmlab/errors.hpp"
#include "nmlab/pamp.hpp"
#include "nmlab/suite.hpp"
#include "support/gf_oracle.hpp"

using namespace nmlab;

namespace {

// b + sum_{i>=1} m_i a^i with message blocks right-padded.
std::uint64_t tag_oracle(std::uint64_t a, std::uint64_t b, unsigned bits, const BitString& msg) {
    std::uint64_t acc = b;
    for (std::size_t i = 0; i * bits < msg.size(); ++i) {
        const std::size_t pos = i * bits, n = std::min<std::size_t>(bits, msg.size() - pos);
        acc ^= oracle::mul(bits, msg.read(pos, n) << (bits - n), oracle::pow(bits, a, i + 1));
    }
    return acc;
}

const PampParams& params() {
    static const PampParams p = build_pamp(pamp_default_spec());
    return p;
}

}  // namespace

TEST_CASE("MAC tag is the keyed polynomial") {
    CounterRng rng(109);
    for (unsigned bits : {4u, 8u, 16u, 31u}) {
        for (int i = 0; i < 100; ++i) {
            const BitString z = rng.bits(2 * bits + rng.uniform(5));
            const MacKey key = mac_key(z, bits);
            CHECK(key.a == z.read(0, bits));
            CHECK(key.b == z.read(bits, bits));
            const BitString msg = rng.bits(1 + rng.uniform(70));
            const BitString tag = mac_tag(key, bits, msg);
            CHECK(tag.size() == bits);
            CHECK(tag.to_uint() == tag_oracle(key.a, key.b, bits, msg));
        }
    }
    CHECK_THROWS_AS(mac_key(BitString(7), 4), ParameterError);
}

TEST_CASE("one-time forgery probability is at most blocks / field size") {
    const unsigned bits = 4;
    const std::size_t len = 8, blocks = 2;
    std::size_t worst = 0;
    for (std::uint64_t m = 0; m < 256; ++m)
        for (std::uint64_t m2 = 0; m2 < 256; ++m2) {
            if (m == m2) continue;
            std::size_t joint[16][16] = {};
            for (std::uint64_t a = 0; a < 16; ++a)
                for (std::uint64_t b = 0; b < 16; ++b) {
                    const MacKey k{a, b};
                    ++joint[mac_tag(k, bits, BitString::from_uint(m, len)).to_uint()]
                           [mac_tag(k, bits, BitString::from_uint(m2, len)).to_uint()];
                }
            for (auto& row : joint)
                for (std::size_t c : row) worst = std::max(worst, c);
        }
    // Each tag of m is produced by 16 keys; a forgery succeeds on at most `worst` of them.
    CHECK(double(worst) / 16 <= double(blocks) / 16);
}

TEST_CASE("passive runs agree on the key") {
    const PampParams& p = params();
    CHECK(p.mac_blocks() == (p.final_ext.d_seed + p.mac_bits - 1) / p.mac_bits);
    CHECK(p.mac_bound() == doctest::Approx(p.mac_blocks() / std::pow(2.0, p.mac_bits)));
    CHECK(p.final_ext.m_out <= p.k - p.s);
    CHECK(p.loss_constant == doctest::Approx(p.entropy_loss - p.s - std::log2(double(p.n))));
    const SubcubeSource src = make_subcube(p.n, static_cast<std::size_t>(p.k), 11);
    const SecurityReport r = security_experiment(p, passive_adversary(), 50, src, 3);
    CHECK(r.consistent == 50);
    CHECK(r.abort_count == 0);
    CHECK(r.attack_successes == 0);
    CHECK(r.key_distance == 0);

    std::vector<Transcript> keep;
    const SecurityReport again = security_experiment(p, flip2_adversary(), 20, src, 3, &keep);
    CHECK(keep.size() == 20);
    CHECK(again.to_json() == security_experiment(p, flip2_adversary(), 20, src, 3).to_json());
    for (const auto& t : keep) {
        CHECK(t.w_recv != t.w_sent);
        CHECK(t.key_b.has_value());
        CHECK(t.to_json().contains("alice_accept"));
    }
}

TEST_CASE("table adversaries parse strictly") {
    const PampParams& p = params();
    const std::string ones(p.nmx.d / 4, 'f');
    const Adversary a = table_adversary({{"name", "t"}, {"round1", {{"xor", ones}}}, {"round2", {{"tag_xor", "0b" + std::string(p.mac_bits, '1')}}}}, p);
    CHECK(a.name == "t");
    CounterRng rng(113);
    const BitString y = rng.bits(p.nmx.d);
    CHECK(a.round1(y, rng) == (y ^ BitString::parse_hex(ones)));
    const BitString w = rng.bits(p.final_ext.d_seed), t = rng.bits(p.mac_bits);
    const auto [w2, t2] = a.round2(y, y, w, t, rng);
    CHECK(w2 == w);
    CHECK(t2.popcount() == p.mac_bits - t.popcount());
    CHECK_THROWS_AS(table_adversary({{"round3", {}}}, p), ParameterError);
    CHECK_THROWS_AS(table_adversary({{"round1", {{"swap", ones}}}}, p), ParameterError);
    CHECK_THROWS_AS(table_adversary({{"round1", {{"set", "ff"}}}}, p), ShapeError);
    CHECK_THROWS_AS(named_adversary("sneaky"), ParameterError);
    for (const char* n : {"passive", "flip1", "flip2", "replace", "random"}) CHECK(named_adversary(n).name == n);
}

TEST_CASE("fixed adversaries never leave y unchanged where they promise not to") {
    CounterRng rng(127);
    for (int i = 0; i < 50; ++i) {
        const BitString y = rng.bits(16);
        CHECK(flip1_adversary().round1(y, rng) != y);
        CHECK(replace_adversary().round1(y, rng) != y);
        CHECK(passive_adversary().round1(y, rng) == y);
    }
    CHECK(replace_adversary().round1(BitString(16), rng) == BitString::parse_hex("0001"));
}

TEST_CASE("subcube sources and confidence widths") {
    const SubcubeSource s = make_subcube(40, 12, 5);
    CHECK(s.free.size() == 12);
    CounterRng rng(131);
    for (int i = 0; i < 50; ++i) {
        BitString x = s.sample(rng);
        for (auto pos : s.free) x.set(pos, s.base.get(pos));
        CHECK(x == s.base);
    }
    CHECK_THROWS_AS(make_subcube(4, 5, 1), ParameterError);
    CHECK(hoeffding99(1000) == doctest::Approx(std::sqrt(std::log(200.0) / 2000.0)));
}

TEST_CASE("MAC key must fit the extractor output") {
    NmDeskSpec d = nmx_micro_spec();
    const NmExtParams small = desk_nmext(d);
    CHECK_THROWS_AS(make_pamp(small, 12, 2, 16, 1), ParameterError);
}
