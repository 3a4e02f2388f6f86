#include "nmlab/sext.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "nmlab/errors.hpp"
#include "nmlab/gf2.hpp"

namespace nmlab {

namespace {

std::uint64_t short_point(std::uint64_t seed, std::size_t d, unsigned b);

struct SeedElements {
    std::uint64_t a, c;
};

SeedElements seed_elements(const ExtScheme& s, const BitString& seed) {
    const unsigned b = s.block;
    std::uint64_t a = s.d_seed >= b ? seed.read(0, b) : short_point(seed.read(0, s.d_seed), s.d_seed, b);
    std::uint64_t c = s.two_element_seed() ? seed.read(b, b) : a;
    return {a, c};
}

// Seed left-aligned inside its field element, followed by a single 1 bit so
// the evaluation point is never zero.
std::uint64_t short_point(std::uint64_t seed, std::size_t d, unsigned b) {
    return (seed << (b - d)) | (std::uint64_t{1} << (b - d - 1));
}

std::uint64_t finish(const ExtScheme& s, const GF2b& f, std::uint64_t v, std::uint64_t c) {
    std::uint64_t h = f.mul(c, v);
    return s.m_out == 0 ? 0 : h >> (s.block - s.m_out);
}

}  // namespace

double ExtScheme::lhl_bound(double k) const {
    return std::pow(2.0, (static_cast<double>(m_out) - k) / 2.0 - 1.0);
}

unsigned ceil_log2(std::uint64_t v) { return v <= 1 ? 0u : static_cast<unsigned>(std::bit_width(v - 1)); }

ExtScheme make_scheme(std::size_t n_in, std::size_t d_seed, std::size_t m_out, double claimed_k,
                      double claimed_eps, unsigned block) {
    ExtScheme s;
    s.n_in = n_in;
    s.d_seed = d_seed;
    s.m_out = m_out;
    s.claimed_k = claimed_k;
    s.claimed_eps = claimed_eps;
    s.block = block ? block : static_cast<unsigned>(std::max<std::size_t>(m_out, 8));
    if (s.block > 64) throw ParameterError("block<=64", "field block " + std::to_string(s.block) + " exceeds 64 bits");
    if (m_out > s.block) throw ParameterError("m_out<=block", "output " + std::to_string(m_out) + " exceeds field block " + std::to_string(s.block));
    if (m_out > n_in) throw ParameterError("m_out<=n_in", "output " + std::to_string(m_out) + " exceeds input " + std::to_string(n_in));
    if (n_in == 0 || d_seed == 0) throw ParameterError("nonempty", "scheme needs nonempty input and seed");
    if (!(claimed_eps > 0 && claimed_eps < 1)) throw ParameterError("eps in (0,1)", "claimed error must lie in (0,1)");
    return s;
}

BitString ext(const ExtScheme& s, const BitString& x, const BitString& seed) {
    if (x.size() != s.n_in) throw ShapeError("ext: source has " + std::to_string(x.size()) + " bits, scheme expects " + std::to_string(s.n_in));
    if (seed.size() != s.d_seed) throw ShapeError("ext: seed has " + std::to_string(seed.size()) + " bits, scheme expects " + std::to_string(s.d_seed));
    const GF2b& f = field(s.block);
    const unsigned b = s.block;
    auto [a, c] = seed_elements(s, seed);
    std::uint64_t v = 0;
    for (std::size_t pos = 0; pos < s.n_in; pos += b) {
        std::size_t n = std::min<std::size_t>(b, s.n_in - pos);
        v = f.mul(v, a) ^ (x.read(pos, n) << (b - n));
    }
    return BitString::from_uint(finish(s, f, v, c), s.m_out);
}

std::uint64_t ext_u64(const ExtScheme& s, std::uint64_t x, std::uint64_t seed) {
    if (s.n_in > 64 || s.d_seed > 64) throw ShapeError("ext_u64 needs input and seed of at most 64 bits");
    const GF2b& f = field(s.block);
    const unsigned b = s.block;
    std::uint64_t a, c;
    if (s.d_seed >= b) {
        a = (seed >> (s.d_seed - b)) & f.mask();
        c = s.two_element_seed() ? (seed >> (s.d_seed - 2 * b)) & f.mask() : a;
    } else {
        a = c = short_point(seed, s.d_seed, b);
    }
    std::uint64_t v = 0;
    for (std::size_t pos = 0; pos < s.n_in; pos += b) {
        std::size_t n = std::min<std::size_t>(b, s.n_in - pos);
        std::uint64_t blk = (x >> (s.n_in - pos - n)) & (n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
        v = f.mul(v, a) ^ (blk << (b - n));
    }
    return finish(s, f, v, c);
}

std::vector<std::size_t> sample_positions(const BitString& r, std::size_t count, std::size_t universe) {
    if (universe == 0) throw ParameterError("universe>0", "sample_positions needs a nonempty universe");
    unsigned w = ceil_log2(universe);
    if (r.size() < count * w)
        throw LengthError("sample_positions needs " + std::to_string(count * w) + " bits, got " + std::to_string(r.size()));
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<std::size_t>(r.read(i * w, w) % universe);
    return out;
}

void to_json(nlohmann::json& j, const ExtScheme& s) {
    j = nlohmann::json{{"family", s.family}, {"n_in", s.n_in},           {"d_seed", s.d_seed},
                       {"m_out", s.m_out},   {"claimed_k", s.claimed_k}, {"claimed_eps", s.claimed_eps},
                       {"block", s.block},   {"two_element_seed", s.two_element_seed()}};
}

void from_json(const nlohmann::json& j, ExtScheme& s) {
    s = make_scheme(j.at("n_in").get<std::size_t>(), j.at("d_seed").get<std::size_t>(), j.at("m_out").get<std::size_t>(),
                    j.at("claimed_k").get<double>(), j.at("claimed_eps").get<double>(), j.at("block").get<unsigned>());
    if (j.contains("family") && j.at("family").get<std::string>() != s.family)
        throw ParameterError("family", "unknown extractor family " + j.at("family").get<std::string>());
}

}  // namespace nmlab
