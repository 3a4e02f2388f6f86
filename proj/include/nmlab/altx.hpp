#pragma once

#include <cstddef>
#include <vector>

#include "nmlab/bits.hpp"
#include "nmlab/sext.hpp"

namespace nmlab {

// Intermediates of an alternating extraction. s_seq holds S_1..S_rounds and
// r_seq holds R_1..R_{rounds-1}; every entry is d1 bits wide except a final S
// produced by a wide-output scheme.
struct AltTrace {
    std::vector<BitString> s_seq;
    std::vector<BitString> r_seq;
    std::size_t rounds = 0;
};

// S_1 = slice(q, d1), R_i = ext_w(w, S_i), S_{i+1} = ext_q(q, R_i).
AltTrace alt_extract(const BitString& q, const BitString& w, std::size_t rounds, const ExtScheme& ext_q,
                     const ExtScheme& ext_w, std::size_t d1);

// The three extractor roles of a look-ahead run: ext1 maps a row to the
// next S, ext2 maps w to the next R, ext3 maps the last row to the output.
// All seeds and all intermediates share the width d1.
struct LookAheadSchemes {
    ExtScheme ext1;
    ExtScheme ext2;
    ExtScheme ext3;
    std::size_t d1 = 0;

    std::size_t row_width() const { return ext1.n_in; }
    std::size_t seed_width() const { return ext2.n_in; }
    std::size_t out_width() const { return ext3.m_out; }
};

// Schemes for rows of width m, a w of width d, intermediates of width d1 and
// an output of width m1. `eps` is the nominal error recorded in each scheme.
LookAheadSchemes make_look_ahead(std::size_t m, std::size_t d, std::size_t d1, std::size_t m1, double eps = 0.25);
void validate(const LookAheadSchemes& s);

// Runs row i in round i and returns S_l. With a single row the output is
// ext3(row_1, slice(w, d1)) so the result still depends on w.
BitString look_ahead(const RowMatrix& rows, const BitString& w, const LookAheadSchemes& s);
AltTrace look_ahead_trace(const RowMatrix& rows, const BitString& w, const LookAheadSchemes& s);

// Same computation on rows and w of at most 64 bits packed as integers.
std::uint64_t look_ahead_u64(const std::uint64_t* rows, std::size_t count, std::uint64_t w, const LookAheadSchemes& s);

}  // namespace nmlab
