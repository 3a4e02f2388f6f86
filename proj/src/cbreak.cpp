#include "nmlab/cbreak.hpp"

#include "nmlab/errors.hpp"
#include "nmlab/gf2.hpp"

namespace nmlab {

namespace {

void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) throw ParameterError(name, detail);
}

std::uint64_t top(std::uint64_t v, std::size_t width, std::size_t w) { return w == 0 ? 0 : v >> (width - w); }

}  // namespace

std::vector<std::uint64_t> rs_encode(const RsCode& code, const BitString& y) {
    if (code.b == 0 || code.b > 64) throw ParameterError("1<=b<=64", "RS symbol width out of range");
    if ((code.b < 64) && code.points() > (std::uint64_t{1} << code.b))
        throw ParameterError("2K<=2^b", "not enough field points for the RS code");
    const GF2b& f = field(code.b);
    std::vector<std::uint64_t> coef(code.K, 0);
    for (std::size_t j = 0; j < code.K; ++j) {
        std::size_t pos = j * code.b;
        if (pos >= y.size()) break;
        std::size_t n = std::min<std::size_t>(code.b, y.size() - pos);
        coef[j] = y.read(pos, n) << (code.b - n);
    }
    std::vector<std::uint64_t> out(code.points());
    for (std::uint64_t pt = 0; pt < code.points(); ++pt) {
        std::uint64_t v = 0;
        for (std::size_t j = code.K; j-- > 0;) v = f.mul(v, pt) ^ coef[j];
        out[pt] = v;
    }
    return out;
}

CBreakParams make_cbreak(const CBreakSpec& s) {
    check(s.n >= 1 && s.d >= 1, "n,d>=1", "source and seed need positive length");
    check(s.eps > 0 && s.eps < 1, "eps in (0,1)", "distinctness target must lie in (0,1)");
    CBreakParams p;
    p.spec = s;
    p.code.b = s.rs_bits;
    p.code.K = (s.d + s.rs_bits - 1) / s.rs_bits;
    check(s.rs_bits < 64 && p.code.points() <= (std::uint64_t{1} << s.rs_bits), "2K<=2^b",
          "GF(2^" + std::to_string(s.rs_bits) + ") has too few points for " + std::to_string(p.code.points()) + " evaluations");
    p.L_adv = s.a0_raw + s.positions * s.rs_bits;
    check(p.L_adv >= 8, "L_adv>=8", "advice length " + std::to_string(p.L_adv) + " is below 8");
    check(s.a0 <= s.d && s.a0_raw <= s.d, "a0<=d", "advice seed slices exceed the seed");
    check(s.lambda < s.d_ff / 2.0, "lambda<d_ff/2", "seed deficiency must stay below half the flip-flop seed");
    check(s.a <= s.d_ff, "a<=d_ff", "flip-flop intermediate wider than its seed");
    check(s.d_ff <= s.d, "d_ff<=d", "flip-flop seed slice exceeds the seed");
    const std::size_t r_bits = s.positions * ceil_log2(p.code.points());
    const double k = s.k > 0 ? s.k : static_cast<double>(s.n);
    p.pos_ext = make_scheme(s.n, s.a0, r_bits, k, s.eps);
    p.ext_x = make_scheme(s.n, s.a, s.a, k, s.eps);
    p.ext_y = make_scheme(s.d_ff, s.a, s.a, s.d_ff - s.lambda, s.eps);
    p.ext_ty = make_scheme(s.a, s.a, s.a, s.a / 2.0, s.eps);
    p.ext_wide = make_scheme(s.n, s.a, s.m_ff, k, s.eps);
    return p;
}

std::vector<std::size_t> adv_positions(const BitString& x, const BitString& y, const CBreakParams& p) {
    if (x.size() != p.spec.n || y.size() != p.spec.d) throw ShapeError("adv_gen: input lengths disagree with the parameters");
    BitString r = ext(p.pos_ext, x, slice(y, p.spec.a0));
    return sample_positions(r, p.spec.positions, p.code.points());
}

BitString adv_gen(const BitString& x, const BitString& y, const CBreakParams& p) {
    auto pos = adv_positions(x, y, p);
    auto sym = rs_encode(p.code, y);
    BitString out(p.L_adv);
    if (p.spec.a0_raw) out.write(0, p.spec.a0_raw, y.read(0, p.spec.a0_raw));
    for (std::size_t i = 0; i < pos.size(); ++i) out.write(p.spec.a0_raw + i * p.code.b, p.code.b, sym[pos[i]]);
    return out;
}

FlipFlopTrace flip_flop_trace(const BitString& x, const BitString& y, bool b, const CBreakParams& p) {
    if (x.size() != p.spec.n || y.size() != p.spec.d_ff) throw ShapeError("flip_flop: input lengths disagree with the parameters");
    FlipFlopTrace t;
    t.s1 = slice(y, p.spec.a);
    t.r1 = ext(p.ext_x, x, t.s1);
    t.s2 = ext(p.ext_y, y, t.r1);
    t.r2 = ext(p.ext_x, x, t.s2);
    t.y_tilde = b ? t.s2 : t.s1;
    t.s1p = t.y_tilde;
    t.r1p = ext(p.ext_x, x, t.s1p);
    t.s2p = ext(p.ext_ty, t.y_tilde, t.r1p);
    t.out = ext(p.ext_wide, x, b ? t.s1p : t.s2p);
    return t;
}

BitString flip_flop(const BitString& x, const BitString& y, bool b, const CBreakParams& p) {
    if (x.size() <= 64 && x.size() == p.spec.n && y.size() == p.spec.d_ff)
        return BitString::from_uint(flip_flop_u64(x.to_uint(), y.to_uint(), b, p), p.spec.m_ff);
    return flip_flop_trace(x, y, b, p).out;
}

std::uint64_t flip_flop_u64(std::uint64_t x, std::uint64_t y, bool b, const CBreakParams& p) {
    const std::size_t a = p.spec.a;
    std::uint64_t s1 = top(y, p.spec.d_ff, a);
    std::uint64_t yt = s1;
    if (b) yt = ext_u64(p.ext_y, y, ext_u64(p.ext_x, x, s1));
    if (b) return ext_u64(p.ext_wide, x, yt);
    std::uint64_t s2p = ext_u64(p.ext_ty, yt, ext_u64(p.ext_x, x, yt));
    return ext_u64(p.ext_wide, x, s2p);
}

std::size_t flip_flop_steps() { return 3; }

void to_json(nlohmann::json& j, const CBreakParams& p) {
    const auto& s = p.spec;
    j = nlohmann::json{{"n", s.n},
                       {"d", s.d},
                       {"eps", s.eps},
                       {"lambda", s.lambda},
                       {"L_adv", p.L_adv},
                       {"a0", s.a0},
                       {"a0_raw", s.a0_raw},
                       {"positions", s.positions},
                       {"d_ff", s.d_ff},
                       {"a", s.a},
                       {"m_ff", s.m_ff},
                       {"code", {{"field_bits", p.code.b}, {"coefficients", p.code.K}, {"points", p.code.points()}}},
                       {"schemes",
                        {{"pos_ext", p.pos_ext}, {"ext_x", p.ext_x}, {"ext_y", p.ext_y}, {"ext_ty", p.ext_ty}, {"ext_wide", p.ext_wide}}}};
}

}  // namespace nmlab
