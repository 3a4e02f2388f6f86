#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/bits.hpp"
#include "nmlab/sext.hpp"

namespace nmlab {

// Reed-Solomon code over GF(2^b): a d-bit string is cut into K = ceil(d/b)
// coefficients (last one zero-padded) and evaluated at field points 0..2K-1.
// Two distinct strings agree on at most K-1 of the 2K symbols.
struct RsCode {
    unsigned b = 8;
    std::size_t K = 0;
    std::size_t points() const { return 2 * K; }
};

std::vector<std::uint64_t> rs_encode(const RsCode& code, const BitString& y);

struct CBreakSpec {
    std::size_t n = 0;        // source length
    std::size_t d = 0;        // seed length
    double eps = 0.25;        // distinctness target
    double lambda = 0;        // tolerated seed deficiency of the flip-flop seed
    unsigned rs_bits = 8;     // RS symbol width b
    std::size_t a0 = 8;       // seed slice keying the position extractor
    std::size_t a0_raw = 8;   // raw seed prefix copied into the advice
    std::size_t positions = 4;
    std::size_t d_ff = 8;     // flip-flop seed width
    std::size_t a = 8;        // flip-flop intermediate width
    std::size_t m_ff = 8;     // flip-flop output width
    double k = 0;             // source min-entropy the schemes are sized for
};

struct CBreakParams {
    CBreakSpec spec;
    RsCode code;
    std::size_t L_adv = 0;     // a0_raw + positions * rs_bits
    ExtScheme pos_ext;         // x -> position randomness, seed slice(y, a0)
    ExtScheme ext_x;           // x -> a bits, seed a bits
    ExtScheme ext_y;           // flip-flop seed -> a bits, seed a bits
    ExtScheme ext_ty;          // selected intermediate -> a bits, seed a bits
    ExtScheme ext_wide;        // x -> m_ff bits, seed a bits
};

// Throws ParameterError naming the first failing constraint (L_adv >= 8, lambda < d_ff/2, ...).
CBreakParams make_cbreak(const CBreakSpec& spec);

// Advice = slice(y, a0_raw) followed by the RS symbols of y at positions drawn
// from ext(pos_ext, x, slice(y, a0)).
BitString adv_gen(const BitString& x, const BitString& y, const CBreakParams& p);
std::vector<std::size_t> adv_positions(const BitString& x, const BitString& y, const CBreakParams& p);

struct FlipFlopTrace {
    BitString s1, r1, s2, r2;  // phase 1 on (x, y)
    BitString y_tilde;         // S_{1+b}
    BitString s1p, r1p, s2p;   // phase 2 on (x, y_tilde)
    BitString out;             // ext_wide(x, S'_{2-b})
};

// Phase 1: S1 = slice(y, a), R1 = ext_x(x, S1), S2 = ext_y(y, R1), R2 = ext_x(x, S2); y~ = S_{1+b}.
// Phase 2: S'1 = y~, R'1 = ext_x(x, S'1), S'2 = ext_ty(y~, R'1). Output ext_wide(x, S'_{2-b}).
FlipFlopTrace flip_flop_trace(const BitString& x, const BitString& y, bool b, const CBreakParams& p);
BitString flip_flop(const BitString& x, const BitString& y, bool b, const CBreakParams& p);
// Same map on x and y of at most 64 bits packed as integers.
std::uint64_t flip_flop_u64(std::uint64_t x, std::uint64_t y, bool b, const CBreakParams& p);
// Extractor applications on the path to the output; the same for both bits.
std::size_t flip_flop_steps();

void to_json(nlohmann::json& j, const CBreakParams& p);

}  // namespace nmlab
