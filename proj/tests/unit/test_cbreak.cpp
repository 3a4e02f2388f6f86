#include <doctest.h>

#include <set>

#include "nmlab/cbreak.hpp"
#include "nmlab/errors.hpp"
#include "nmlab/rng.hpp"
#include "nmlab/suite.hpp"
#include "support/gf_oracle.hpp"

using namespace nmlab;

namespace {

// Coefficient j is the j-th b-bit chunk of y, right-padded; symbol i is the
// power sum at point i.
std::vector<std::uint64_t> rs_oracle(unsigned b, std::size_t K, const BitString& y) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t pt = 0; pt < 2 * K; ++pt) {
        std::uint64_t v = 0;
        for (std::size_t j = 0; j < K; ++j) {
            const std::size_t pos = j * b;
            if (pos >= y.size()) break;
            const std::size_t n = std::min<std::size_t>(b, y.size() - pos);
            v ^= oracle::mul(b, y.read(pos, n) << (b - n), oracle::pow(b, pt, j));
        }
        out.push_back(v);
    }
    return out;
}

std::size_t agreements(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] == b[i];
    return n;
}

}  // namespace

TEST_CASE("RS symbols are power sums of the seed chunks") {
    CounterRng rng(73);
    for (unsigned b : {3u, 4u, 8u, 13u}) {
        for (std::size_t d : {1u, 5u, 16u, 23u}) {
            const RsCode code{b, (d + b - 1) / b};
            if (code.points() > (std::uint64_t{1} << b)) continue;
            for (int i = 0; i < 20; ++i) {
                const BitString y = rng.bits(d);
                CHECK(rs_encode(code, y) == rs_oracle(b, code.K, y));
            }
        }
    }
    CHECK_THROWS_AS(rs_encode(RsCode{2, 3}, BitString(6)), ParameterError);
}

TEST_CASE("distinct seeds share at most K-1 symbols") {
    const RsCode code{4, 2};
    std::vector<std::vector<std::uint64_t>> words;
    for (std::uint64_t v = 0; v < 256; ++v) words.push_back(rs_encode(code, BitString::from_uint(v, 8)));
    std::size_t worst = 0;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j) worst = std::max(worst, agreements(words[i], words[j]));
    CHECK(worst == code.K - 1);

    CounterRng rng(79);
    const RsCode big{8, 6};
    for (int i = 0; i < 2000; ++i) {
        const BitString y = rng.bits(48), z = rng.bits(48);
        if (y == z) continue;
        CHECK(agreements(rs_encode(big, y), rs_encode(big, z)) <= big.K - 1);
    }
}

TEST_CASE("advice is the raw prefix followed by sampled symbols") {
    const CBreakParams p = make_cbreak(adv_micro_spec());
    CHECK(p.L_adv == p.spec.a0_raw + p.spec.positions * p.spec.rs_bits);
    CounterRng rng(83);
    for (int i = 0; i < 300; ++i) {
        const BitString x = rng.bits(p.spec.n), y = rng.bits(p.spec.d);
        const BitString adv = adv_gen(x, y, p);
        REQUIRE(adv.size() == p.L_adv);
        CHECK(slice(adv, p.spec.a0_raw) == slice(y, p.spec.a0_raw));
        const auto pos = adv_positions(x, y, p);
        CHECK(pos == sample_positions(ext(p.pos_ext, x, slice(y, p.spec.a0)), p.spec.positions, p.code.points()));
        const auto sym = rs_oracle(p.code.b, p.code.K, y);
        for (std::size_t j = 0; j < pos.size(); ++j) {
            CHECK(pos[j] < p.code.points());
            CHECK(adv.read(p.spec.a0_raw + j * p.code.b, p.code.b) == sym[pos[j]]);
        }
        CHECK(adv_gen(x, y, p) == adv);
    }
    CHECK_THROWS_AS(adv_gen(rng.bits(p.spec.n + 1), rng.bits(p.spec.d), p), ShapeError);
}

TEST_CASE("flip-flop follows its recipe on both paths") {
    for (const CBreakSpec& spec : {ff_micro_spec(), nmx_micro_spec().cb}) {
        const CBreakParams p = make_cbreak(spec);
        CounterRng rng(89);
        for (int i = 0; i < 300; ++i) {
            const BitString x = rng.bits(spec.n), y = rng.bits(spec.d_ff);
            const BitString s1 = slice(y, spec.a);
            const BitString r1 = ext(p.ext_x, x, s1);
            const BitString via0 = ext(p.ext_wide, x, ext(p.ext_ty, s1, r1));
            const BitString via1 = ext(p.ext_wide, x, ext(p.ext_y, y, r1));
            for (bool b : {false, true}) {
                const BitString want = b ? via1 : via0;
                const FlipFlopTrace t = flip_flop_trace(x, y, b, p);
                CHECK(t.out == want);
                CHECK(t.y_tilde == (b ? t.s2 : t.s1));
                CHECK(flip_flop(x, y, b, p) == want);
                CHECK(flip_flop_u64(x.to_uint(), y.to_uint(), b, p) == want.to_uint());
            }
        }
    }
    CHECK(flip_flop_steps() == 3);
}

TEST_CASE("correlation-breaker parameters are validated") {
    CBreakSpec s = adv_micro_spec();
    const CBreakParams ok = make_cbreak(s);
    CHECK(nlohmann::json(ok)["code"]["points"] == ok.code.points());
    auto fails = [](CBreakSpec bad, const std::string& name) {
        try {
            make_cbreak(bad);
        } catch (const ParameterError& e) {
            return e.constraint == name;
        }
        return false;
    };
    CBreakSpec t = s;
    t.a0_raw = 0;
    t.positions = 1;
    t.rs_bits = 4;
    CHECK(fails(t, "L_adv>=8"));
    t = s;
    t.lambda = s.d_ff / 2.0;
    CHECK(fails(t, "lambda<d_ff/2"));
    t = s;
    t.a = s.d_ff + 1;
    CHECK(fails(t, "a<=d_ff"));
    t = s;
    t.rs_bits = 2;
    CHECK(fails(t, "2K<=2^b"));
    t = s;
    t.d_ff = s.d + 1;
    t.a = 1;
    CHECK(fails(t, "d_ff<=d"));
}
