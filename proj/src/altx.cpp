#include "nmlab/altx.hpp"

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ShapeError(what);
}

std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

}  // namespace

AltTrace alt_extract(const BitString& q, const BitString& w, std::size_t rounds, const ExtScheme& ext_q,
                     const ExtScheme& ext_w, std::size_t d1) {
    require(rounds >= 1, "alt_extract needs at least one round");
    require(d1 <= q.size(), "alt_extract: d1 exceeds the length of q");
    require(ext_q.n_in == q.size() && ext_w.n_in == w.size(), "alt_extract: source lengths disagree with the schemes");
    require(ext_q.d_seed == d1 && ext_q.m_out == d1 && ext_w.d_seed == d1 && ext_w.m_out == d1,
            "alt_extract: schemes must map d1-bit seeds to d1-bit outputs");
    AltTrace t;
    t.rounds = rounds;
    t.s_seq.push_back(slice(q, d1));
    for (std::size_t i = 1; i < rounds; ++i) {
        t.r_seq.push_back(ext(ext_w, w, t.s_seq.back()));
        t.s_seq.push_back(ext(ext_q, q, t.r_seq.back()));
    }
    return t;
}

LookAheadSchemes make_look_ahead(std::size_t m, std::size_t d, std::size_t d1, std::size_t m1, double eps) {
    LookAheadSchemes s;
    s.d1 = d1;
    s.ext1 = make_scheme(m, d1, d1, m / 2.0, eps);
    s.ext2 = make_scheme(d, d1, d1, d / 2.0, eps);
    s.ext3 = make_scheme(m, d1, m1, m / 2.0, eps);
    validate(s);
    return s;
}

void validate(const LookAheadSchemes& s) {
    const std::size_t d1 = s.d1;
    if (d1 == 0) throw ParameterError("d1>0", "look-ahead intermediates need a positive width");
    require(s.ext1.d_seed == d1 && s.ext1.m_out == d1, "look-ahead ext1 must map d1-bit seeds to d1 bits");
    require(s.ext2.d_seed == d1 && s.ext2.m_out == d1, "look-ahead ext2 must map d1-bit seeds to d1 bits");
    require(s.ext3.d_seed == d1, "look-ahead ext3 must take a d1-bit seed");
    require(s.ext1.n_in == s.ext3.n_in, "look-ahead ext1 and ext3 must read rows of one width");
    require(d1 <= s.ext1.n_in, "look-ahead d1 exceeds the row width");
    require(d1 <= s.ext2.n_in, "look-ahead d1 exceeds the width of w");
}

AltTrace look_ahead_trace(const RowMatrix& rows, const BitString& w, const LookAheadSchemes& s) {
    require(rows.width() == s.row_width(), "look_ahead: row width " + std::to_string(rows.width()) +
                                               " disagrees with the schemes (" + std::to_string(s.row_width()) + ")");
    require(w.size() == s.seed_width(), "look_ahead: w has " + std::to_string(w.size()) + " bits, schemes expect " +
                                            std::to_string(s.seed_width()));
    const std::size_t l = rows.rows();
    AltTrace t;
    t.rounds = l;
    if (l == 1) {
        t.s_seq.push_back(ext(s.ext3, rows.row(0), slice(w, s.d1)));
        return t;
    }
    t.s_seq.push_back(slice(rows.row(0), s.d1));
    for (std::size_t i = 1; i < l; ++i) {
        t.r_seq.push_back(ext(s.ext2, w, t.s_seq.back()));
        const ExtScheme& q = i + 1 == l ? s.ext3 : s.ext1;
        t.s_seq.push_back(ext(q, rows.row(i), t.r_seq.back()));
    }
    return t;
}

BitString look_ahead(const RowMatrix& rows, const BitString& w, const LookAheadSchemes& s) {
    if (rows.width() <= 64 && w.size() <= 64 && rows.width() == s.row_width() && w.size() == s.seed_width()) {
        std::uint64_t buf[64];
        std::vector<std::uint64_t> big;
        std::uint64_t* p = buf;
        if (rows.rows() > 64) {
            big.resize(rows.rows());
            p = big.data();
        }
        for (std::size_t i = 0; i < rows.rows(); ++i) p[i] = rows.row(i).to_uint();
        return BitString::from_uint(look_ahead_u64(p, rows.rows(), w.to_uint(), s), s.out_width());
    }
    return look_ahead_trace(rows, w, s).s_seq.back();
}

std::uint64_t look_ahead_u64(const std::uint64_t* rows, std::size_t count, std::uint64_t w, const LookAheadSchemes& s) {
    require(count >= 1, "look_ahead needs at least one row");
    const std::size_t m = s.row_width(), d1 = s.d1;
    if (count == 1) return ext_u64(s.ext3, rows[0], (w >> (s.seed_width() - d1)) & low_mask(d1));
    std::uint64_t sv = (rows[0] >> (m - d1)) & low_mask(d1);
    for (std::size_t i = 1; i < count; ++i) {
        std::uint64_t r = ext_u64(s.ext2, w, sv);
        sv = ext_u64(i + 1 == count ? s.ext3 : s.ext1, rows[i], r);
    }
    return sv;
}

}  // namespace nmlab
