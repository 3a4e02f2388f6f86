#include <doctest.h>

#include "nmlab/altx.hpp"
#include "nmlab/errors.hpp"
#include "nmlab/rng.hpp"

using namespace nmlab;

namespace {

// Recursive restatement: the output after rows 0..i is ext(row i, R) where R
// is w hashed under the output after rows 0..i-1; row 0 alone is its prefix.
BitString unrolled(const std::vector<BitString>& rows, std::size_t i, const BitString& w, const LookAheadSchemes& s) {
    if (i == 0) return slice(rows[0], s.d1);
    const BitString r = ext(s.ext2, w, unrolled(rows, i - 1, w, s));
    return ext(i + 1 == rows.size() ? s.ext3 : s.ext1, rows[i], r);
}

BitString reference(const std::vector<BitString>& rows, const BitString& w, const LookAheadSchemes& s) {
    if (rows.size() == 1) return ext(s.ext3, rows[0], slice(w, s.d1));
    return unrolled(rows, rows.size() - 1, w, s);
}

}  // namespace

TEST_CASE("look-ahead matches the unrolled recursion") {
    CounterRng rng(41);
    for (int i = 0; i < 400; ++i) {
        const std::size_t d1 = 1 + rng.uniform(4);
        const std::size_t m = d1 + rng.uniform(10), d = d1 + rng.uniform(10);
        const std::size_t m1 = 1 + rng.uniform(m);
        const LookAheadSchemes s = make_look_ahead(m, d, d1, m1);
        const std::size_t l = 1 + rng.uniform(5);
        std::vector<BitString> rows;
        std::vector<std::uint64_t> packed;
        for (std::size_t j = 0; j < l; ++j) {
            rows.push_back(rng.bits(m));
            packed.push_back(rows.back().to_uint());
        }
        const BitString w = rng.bits(d);
        const RowMatrix mat(rows);
        const BitString out = look_ahead(mat, w, s);
        CAPTURE(l);
        CHECK(out == reference(rows, w, s));
        CHECK(out.size() == m1);
        CHECK(look_ahead_u64(packed.data(), l, w.to_uint(), s) == out.to_uint());
        const AltTrace t = look_ahead_trace(mat, w, s);
        CHECK(t.s_seq.size() == l);
        CHECK(t.r_seq.size() == l - 1);
        CHECK(t.s_seq.back() == out);
    }
}

TEST_CASE("alternating extraction ping-pongs between the two sources") {
    CounterRng rng(43);
    const std::size_t d1 = 4;
    const ExtScheme eq = make_scheme(20, d1, d1, 10, 0.25), ew = make_scheme(12, d1, d1, 6, 0.25);
    const BitString q = rng.bits(20), w = rng.bits(12);
    const AltTrace t = alt_extract(q, w, 5, eq, ew, d1);
    REQUIRE(t.s_seq.size() == 5);
    REQUIRE(t.r_seq.size() == 4);
    CHECK(t.s_seq[0] == slice(q, d1));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(t.r_seq[i] == ext(ew, w, t.s_seq[i]));
        CHECK(t.s_seq[i + 1] == ext(eq, q, t.r_seq[i]));
    }
    CHECK_THROWS_AS(alt_extract(q, w, 0, eq, ew, d1), ShapeError);
    CHECK_THROWS_AS(alt_extract(q, w, 2, eq, ew, 3), ShapeError);
}

TEST_CASE("look-ahead rejects mismatched shapes") {
    const LookAheadSchemes s = make_look_ahead(8, 6, 2, 3);
    CHECK(s.row_width() == 8);
    CHECK(s.seed_width() == 6);
    CHECK(s.out_width() == 3);
    CounterRng rng(47);
    const RowMatrix wide(std::vector<BitString>{rng.bits(9), rng.bits(9)});
    CHECK_THROWS_AS(look_ahead(wide, rng.bits(6), s), ShapeError);
    const RowMatrix ok(std::vector<BitString>{rng.bits(8), rng.bits(8)});
    CHECK_THROWS_AS(look_ahead(ok, rng.bits(5), s), ShapeError);
    CHECK_THROWS_AS(make_look_ahead(8, 6, 0, 3), ParameterError);
    CHECK_THROWS_AS(make_look_ahead(8, 1, 2, 3), ParameterError);  // ext2 cannot emit 2 bits from 1
    LookAheadSchemes bad = s;
    bad.ext3 = make_scheme(7, 2, 3, 4, 0.25);
    CHECK_THROWS_AS(validate(bad), ShapeError);
}
