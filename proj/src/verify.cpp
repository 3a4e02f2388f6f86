#include "nmlab/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

using u128 = unsigned __int128;

BigInt big(u128 v) {
    BigInt r = static_cast<std::uint64_t>(v >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(v);
    return r;
}

void cap(unsigned arity, const std::string& what) {
    if (arity > N_MAX)
        throw DomainCapError(what + " needs a joint of " + std::to_string(arity) + " bits, cap is " + std::to_string(N_MAX));
}

// Accumulates weights of (rest, o) pairs and sums |w(rest,o) 2^m - w(rest)| over them.
// That sum over 2 * total * 2^m is the distance of (O, Rest) from (U_m, Rest).
class CondUniform {
public:
    CondUniform(unsigned m, unsigned rest_bits) : m_(m) {
        unsigned bits = m + rest_bits;
        if (bits <= 22) {
            dense_.assign(std::size_t{1} << bits, 0);
            marks_.assign(std::size_t{1} << rest_bits, 0);
        }
    }

    void add(std::uint64_t rest, std::uint64_t o, std::uint64_t w) {
        if (!dense_.empty()) {
            if (!marks_[rest]) {
                marks_[rest] = 1;
                rests_.push_back(rest);
            }
            dense_[(rest << m_) | o] += w;
        } else {
            auto& row = sparse_[rest];
            if (row.empty()) {
                row.assign(std::size_t{1} << m_, 0);
                rests_.push_back(rest);
            }
            row[o] += w;
        }
    }

    // Sum of |w 2^m - marg| over touched rests; resets the accumulator.
    u128 drain() {
        u128 acc = 0;
        const std::uint64_t outs = std::uint64_t{1} << m_;
        for (auto rest : rests_) {
            std::uint64_t* row = dense_.empty() ? sparse_[rest].data() : dense_.data() + (rest << m_);
            if (!dense_.empty()) marks_[rest] = 0;
            u128 marg = 0;
            for (std::uint64_t o = 0; o < outs; ++o) marg += row[o];
            for (std::uint64_t o = 0; o < outs; ++o) {
                u128 scaled = static_cast<u128>(row[o]) << m_;
                acc += scaled > marg ? scaled - marg : marg - scaled;
                row[o] = 0;
            }
        }
        rests_.clear();
        sparse_.clear();
        return acc;
    }

private:
    unsigned m_;
    std::vector<std::uint64_t> dense_;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> sparse_;
    std::vector<std::uint8_t> marks_;
    std::vector<std::uint64_t> rests_;
};

Rational ratio(u128 num, u128 den) { return Rational(big(num), big(den)); }

std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

}  // namespace

bool TamperFn::fixed_point_free() const {
    for (std::uint64_t y = 0; y < table.size(); ++y)
        if (table[y] == y) return false;
    return true;
}

TamperFn make_tamper(unsigned d, std::vector<std::uint64_t> table) {
    if (d > N_MAX) throw DomainCapError("tampering table on more than N_MAX bits");
    if (table.size() != (std::size_t{1} << d)) throw ShapeError("tampering table must have 2^d entries");
    for (std::uint64_t y = 0; y < table.size(); ++y) {
        if (table[y] >> d) throw ParameterError("A(y) in {0,1}^d", "entry " + std::to_string(y) + " is out of range");
        if (table[y] == y) throw ParameterError("A(y)!=y", "table fixes " + std::to_string(y));
    }
    return TamperFn{d, std::move(table)};
}

TamperEnumerator::TamperEnumerator(unsigned d) : d_(d) {
    if (d == 0 || d > 3) throw DomainCapError("full tamper enumeration is limited to 1 <= d <= 3");
    digits_.assign(std::size_t{1} << d, 0);
}

bool TamperEnumerator::next(TamperFn& out) {
    if (done_) return false;
    const std::size_t size = digits_.size();
    out.d = d_;
    out.table.resize(size);
    for (std::uint64_t y = 0; y < size; ++y) out.table[y] = digits_[y] >= y ? digits_[y] + 1 : digits_[y];
    // Advance the mixed-radix counter, last entry fastest.
    const std::uint64_t top = size - 2;
    std::size_t i = size;
    while (i > 0) {
        --i;
        if (digits_[i] < top) {
            ++digits_[i];
            return true;
        }
        digits_[i] = 0;
    }
    done_ = true;
    return true;
}

BigInt tamper_count(unsigned d) {
    BigInt base = (BigInt(1) << d) - 1;
    return boost::multiprecision::pow(base, 1u << d);
}

TamperFn sample_tamper(CounterRng& rng, unsigned d) {
    if (d == 0 || d > N_MAX) throw ParameterError("1<=d<=N_MAX", "tamper width out of range");
    const std::uint64_t size = std::uint64_t{1} << d;
    TamperFn a{d, std::vector<std::uint64_t>(size)};
    for (std::uint64_t y = 0; y < size; ++y) {
        std::uint64_t v = rng.uniform(size - 1);
        a.table[y] = v >= y ? v + 1 : v;
    }
    return a;
}

Rational strong_distance(const ExtFn& f, const Dist& source, unsigned d, unsigned m) {
    cap(d + m, "strong_distance");
    const std::uint64_t outs = std::uint64_t{1} << m;
    std::vector<std::uint64_t> hist(outs);
    u128 acc = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << d); ++s) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::uint64_t x = 0; x < source.counts().size(); ++x)
            if (auto c = source.count(x)) hist[f(x, s)] += c;
        for (auto h : hist) {
            u128 scaled = static_cast<u128>(h) << m;
            acc += scaled > source.den() ? scaled - source.den() : source.den() - scaled;
        }
    }
    return ratio(acc, static_cast<u128>(source.den()) << (d + m + 1));
}

Rational strong_distance(const ExtScheme& s, const Dist& source) {
    if (source.arity() != s.n_in) throw ShapeError("strong_distance: source arity disagrees with the scheme");
    return strong_distance([&s](std::uint64_t x, std::uint64_t y) { return ext_u64(s, x, y); }, source,
                           static_cast<unsigned>(s.d_seed), static_cast<unsigned>(s.m_out));
}

LinearStrongOracle::LinearStrongOracle(const ExtScheme& s) : s_(s) {
    if (s.n_in > 24) throw DomainCapError("linear strong oracle needs n_in <= 24");
    cap(static_cast<unsigned>(s.d_seed + s.m_out), "linear strong oracle");
    const std::uint64_t seeds = std::uint64_t{1} << s.d_seed, outs = std::uint64_t{1} << s.m_out;
    masks_.assign(seeds * (outs - 1), 0);
    std::vector<std::uint64_t> unit(s.n_in);
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        for (std::size_t i = 0; i < s.n_in; ++i) unit[i] = ext_u64(s, std::uint64_t{1} << i, seed);
        for (std::uint64_t v = 1; v < outs; ++v) {
            std::uint32_t mask = 0;
            for (std::size_t i = 0; i < s.n_in; ++i) mask |= static_cast<std::uint32_t>(std::popcount(unit[i] & v) & 1) << i;
            masks_[seed * (outs - 1) + (v - 1)] = mask;
        }
    }
}

Rational LinearStrongOracle::distance(const FlatSource& src) const {
    if (src.arity != s_.n_in) throw ShapeError("linear strong oracle: source arity disagrees with the scheme");
    const std::size_t size = std::size_t{1} << src.arity;
    std::vector<std::int64_t> f(size, 0);
    for (auto x : src.support) f[x] = 1;
    for (std::size_t len = 1; len < size; len <<= 1)
        for (std::size_t i = 0; i < size; i += 2 * len)
            for (std::size_t j = i; j < i + len; ++j) {
                std::int64_t a = f[j], b = f[j + len];
                f[j] = a + b;
                f[j + len] = a - b;
            }
    const std::int64_t T = static_cast<std::int64_t>(src.support.size());
    const std::uint64_t seeds = std::uint64_t{1} << s_.d_seed, outs = std::uint64_t{1} << s_.m_out;
    u128 acc = 0;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        const std::uint32_t* mk = masks_.data() + seed * (outs - 1);
        for (std::uint64_t o = 0; o < outs; ++o) {
            // 2^m * #{x in T : output o} = sum_v (-1)^{v.o} F(mask_v).
            std::int64_t g = T;
            for (std::uint64_t v = 1; v < outs; ++v) g += (std::popcount(v & o) & 1) ? -f[mk[v - 1]] : f[mk[v - 1]];
            acc += static_cast<u128>(g > T ? g - T : T - g);
        }
    }
    return ratio(acc, static_cast<u128>(T) << (s_.d_seed + s_.m_out + 1));
}

Rational tamper_distance(const ExtFn& f, const ExtFn& g, const Dist& x, const Dist& y, const std::vector<TamperFn>& maps,
                         unsigned m) {
    const unsigned t = static_cast<unsigned>(maps.size());
    cap((t + 1) * m + y.arity(), "tamper_distance");
    for (const auto& a : maps)
        if (a.d != y.arity()) throw ShapeError("tamper_distance: map width disagrees with the seed");
    CondUniform acc(m, t * m);
    u128 total = 0;
    for (std::uint64_t yv = 0; yv < y.counts().size(); ++yv) {
        const std::uint64_t wy = y.count(yv);
        if (!wy) continue;
        for (std::uint64_t xv = 0; xv < x.counts().size(); ++xv) {
            const std::uint64_t wx = x.count(xv);
            if (!wx) continue;
            std::uint64_t rest = 0;
            for (const auto& a : maps) rest = (rest << m) | g(xv, a(yv));
            acc.add(rest, f(xv, yv), wx);
        }
        total += acc.drain() * wy;
    }
    return ratio(total, (static_cast<u128>(x.den()) * y.den()) << (m + 1));
}

Rational nm_distance(const ExtFn& f, const Dist& source, unsigned d, unsigned m, const std::vector<TamperFn>& a) {
    for (const auto& t : a)
        if (!t.fixed_point_free()) throw ParameterError("A(y)!=y", "nm_distance needs fixed-point-free tampering");
    return tamper_distance(f, f, source, Dist::uniform(d), a, m);
}

Rational nm_distance(const ExtFn& f, const Dist& source, unsigned d, unsigned m, const TamperFn& a) {
    return nm_distance(f, source, d, m, std::vector<TamperFn>{a});
}

nlohmann::json MergerInstance::describe() const {
    nlohmann::json j{{"L", L},
                     {"m", m},
                     {"t", t},
                     {"d", d},
                     {"h", h},
                     {"mode", mode == SeedMode::tampered ? "tampered" : "shared"},
                     {"x_bits", x_bits},
                     {"outcomes", outcomes()},
                     {"witness_distance", to_string(witness_distance)},
                     {"row_slack", to_string(row_slack)},
                     {"seed_entropy", seed_entropy},
                     {"build_seed", build_seed}};
    auto& tj = j["tampers"] = nlohmann::json::array();
    for (const auto& a : tampers) tj.push_back(a.table);
    return j;
}

namespace {

void record_slacks(MergerInstance& inst) {
    const unsigned m = static_cast<unsigned>(inst.m);
    CondUniform w(m, static_cast<unsigned>(inst.t * inst.m));
    for (std::size_t o = 0; o < inst.outcomes(); ++o) {
        std::uint64_t rest = 0;
        for (std::size_t g = 1; g <= inst.t; ++g) rest = (rest << m) | inst.matrix(o, g)[inst.h];
        w.add(rest, inst.matrix(o, 0)[inst.h], inst.x_weight[o]);
    }
    inst.witness_distance = ratio(w.drain(), static_cast<u128>(inst.x_den) << (m + 1));
    inst.row_slack = 0;
    for (std::size_t i = 0; i < inst.L; ++i) {
        CondUniform r(m, 0);
        for (std::size_t o = 0; o < inst.outcomes(); ++o) r.add(0, inst.matrix(o, 0)[i], inst.x_weight[o]);
        inst.row_slack = std::max(inst.row_slack, ratio(r.drain(), static_cast<u128>(inst.x_den) << (m + 1)));
    }
    inst.seed_entropy = min_entropy(inst.seed);
}

}  // namespace

MergerInstance build_instance(const InstanceSpec& spec) {
    if (spec.L == 0 || spec.h >= spec.L) throw ShapeError("build_instance: witness row outside the matrix");
    if (spec.m == 0 || spec.m > 10) throw ParameterError("1<=m<=10", "instance rows are enumerated exhaustively");
    if (spec.slack >= (std::uint64_t{1} << spec.m)) throw ParameterError("slack<2^m", "witness support would be empty");
    if (spec.mode == SeedMode::shared && spec.t == 0) throw ParameterError("t>=1", "shared-seed instances need a tampered copy");
    cap(static_cast<unsigned>(2 * spec.m + spec.d), "build_instance");
    CounterRng rng(spec.seed, 0x1a57);
    MergerInstance inst;
    inst.L = spec.L;
    inst.m = spec.m;
    inst.t = spec.t;
    inst.d = spec.d;
    inst.h = spec.h;
    inst.mode = spec.mode;
    inst.build_seed = spec.seed;
    inst.x_bits = static_cast<unsigned>(2 * spec.m);
    const std::uint64_t mask = low_mask(spec.m);

    FlatSource wit = sample_flat_support(rng, static_cast<unsigned>(spec.m), (std::uint64_t{1} << spec.m) - spec.slack);
    std::vector<std::uint64_t> c(spec.L), e(spec.t + 1);
    std::vector<std::vector<std::uint64_t>> off(spec.t + 1, std::vector<std::uint64_t>(spec.L, 0));
    for (auto& v : c) v = rng.next() & mask;
    for (auto& v : e) v = rng.next() & mask;
    if (spec.perturb)
        for (auto& row : off)
            for (auto& v : row) v = 1 + rng.uniform(mask);

    const std::size_t zs = std::size_t{1} << spec.m;
    const std::size_t per = (spec.t + 1) * spec.L;
    inst.rows.reserve(wit.support.size() * zs * per);
    for (auto xh : wit.support)
        for (std::uint64_t z = 0; z < zs; ++z) {
            for (std::size_t g = 0; g <= spec.t; ++g)
                for (std::size_t i = 0; i < spec.L; ++i) {
                    std::uint64_t v;
                    if (g == 0) v = i == spec.h ? xh : z ^ c[i];
                    else if (i == spec.h) v = z ^ e[g];
                    else v = (z ^ c[i]) ^ off[g][i];
                    inst.rows.push_back(v);
                }
            inst.x_weight.push_back(1);
        }
    inst.x_den = inst.x_weight.size();

    if (spec.mode == SeedMode::tampered) {
        inst.seed = Dist::uniform(static_cast<unsigned>(spec.d));
        for (std::size_t g = 0; g < spec.t; ++g) inst.tampers.push_back(sample_tamper(rng, static_cast<unsigned>(spec.d)));
    } else {
        inst.seed = spec.seed_k == 0 || spec.seed_k >= spec.d
                        ? Dist::uniform(static_cast<unsigned>(spec.d))
                        : sample_flat_source(rng, static_cast<unsigned>(spec.d), spec.seed_k).dist();
    }
    record_slacks(inst);
    return inst;
}

MergerInstance xor_counterexample(std::size_t m, std::size_t d, std::uint64_t seed) {
    cap(static_cast<unsigned>(2 * m + d), "xor_counterexample");
    CounterRng rng(seed, 0x0c0e);
    const std::uint64_t mask = low_mask(m), k0 = rng.next() & mask, c = rng.next() & mask;
    MergerInstance inst;
    inst.L = 2;
    inst.m = m;
    inst.t = 1;
    inst.d = d;
    inst.h = 0;
    inst.x_bits = static_cast<unsigned>(2 * m);
    inst.build_seed = seed;
    for (std::uint64_t x1 = 0; x1 <= mask; ++x1)
        for (std::uint64_t x2 = 0; x2 <= mask; ++x2) {
            inst.rows.insert(inst.rows.end(), {x1, x2, k0, x1 ^ x2 ^ c});
            inst.x_weight.push_back(1);
        }
    inst.x_den = inst.x_weight.size();
    inst.seed = Dist::uniform(static_cast<unsigned>(d));
    inst.tampers.push_back(sample_tamper(rng, static_cast<unsigned>(d)));
    record_slacks(inst);
    return inst;
}

void check_instance(const MergerInstance& inst) {
    if (inst.rows.size() != inst.outcomes() * (inst.t + 1) * inst.L) throw ShapeError("instance row table has the wrong size");
    u128 s = 0;
    for (auto w : inst.x_weight) s += w;
    if (s != inst.x_den) throw ShapeError("instance weights do not sum to the denominator");
    for (auto v : inst.rows)
        if (v >> inst.m) throw ShapeError("instance row value wider than m");
    if (inst.seed.arity() != inst.d) throw ShapeError("seed law arity disagrees with d");
    if (inst.mode == SeedMode::tampered) {
        if (inst.tampers.size() != inst.t) throw ShapeError("tampered instance needs one map per copy");
        for (const auto& a : inst.tampers)
            if (a.d != inst.d || !a.fixed_point_free()) throw ShapeError("instance tampering map is not fixed-point free");
    }
    MergerInstance copy = inst;
    record_slacks(copy);
    if (copy.witness_distance != inst.witness_distance || copy.row_slack != inst.row_slack)
        throw ShapeError("instance slacks disagree with a recomputation");
}

Rational merger_distance(const MergerFn& merger, std::size_t out_width, const MergerInstance& inst) {
    const unsigned m = static_cast<unsigned>(out_width);
    const unsigned t = static_cast<unsigned>(inst.t);
    cap((t + 1) * m + (inst.mode == SeedMode::tampered ? static_cast<unsigned>(inst.d) : 0u), "merger_distance");
    CondUniform acc(m, t * m);
    u128 total = 0;
    const Dist& y = inst.seed;
    std::vector<std::uint64_t> ys(t + 1);
    for (std::uint64_t yv = 0; yv < y.counts().size(); ++yv) {
        const std::uint64_t wy = y.count(yv);
        if (!wy) continue;
        ys[0] = yv;
        for (std::size_t g = 1; g <= t; ++g) ys[g] = inst.mode == SeedMode::tampered ? inst.tampers[g - 1](yv) : yv;
        for (std::size_t o = 0; o < inst.outcomes(); ++o) {
            std::uint64_t rest = 0;
            for (std::size_t g = 1; g <= t; ++g) rest = (rest << m) | merger(inst.matrix(o, g), inst.L, ys[g]);
            const std::uint64_t w = inst.mode == SeedMode::tampered ? inst.x_weight[o] : inst.x_weight[o] * wy;
            acc.add(rest, merger(inst.matrix(o, 0), inst.L, yv), w);
        }
        if (inst.mode == SeedMode::tampered) total += acc.drain() * wy;
    }
    if (inst.mode == SeedMode::shared) total = acc.drain();
    return ratio(total, (static_cast<u128>(inst.x_den) * y.den()) << (m + 1));
}

double component_error(const ExtScheme& s, double k, CounterRng& rng, std::size_t samples) {
    if (s.n_in > 20) throw DomainCapError("component_error enumerates sources of at most 20 bits");
    unsigned kk = static_cast<unsigned>(std::clamp(std::floor(k), 0.0, static_cast<double>(s.n_in)));
    LinearStrongOracle oracle(s);
    double worst = 0;
    for (std::size_t i = 0; i < samples; ++i)
        worst = std::max(worst, to_double(oracle.distance(sample_flat_source(rng, static_cast<unsigned>(s.n_in), kk))));
    return worst;
}

double look_ahead_error(const LookAheadSchemes& s, CounterRng& rng, std::size_t samples) {
    // Each role is charged one leaked output of its partner: the tampered copy's value.
    auto k = [](const ExtScheme& e, std::size_t leak) { return e.n_in > leak ? double(e.n_in - leak) : 0.0; };
    double e1 = component_error(s.ext1, k(s.ext1, s.ext1.m_out), rng, samples);
    double e2 = component_error(s.ext2, k(s.ext2, s.ext2.m_out), rng, samples);
    double e3 = component_error(s.ext3, k(s.ext3, s.ext1.m_out), rng, samples);
    return std::max({e1, e2, e3});
}

double look_ahead_loss(std::size_t rows, double eps_c) {
    return static_cast<double>(std::max<std::size_t>(1, 2 * rows - 2)) * eps_c;
}

BoundLedger single_merge_bound(std::size_t rows, double eps_c, double witness, double row_slack) {
    BoundLedger b;
    b.component = {eps_c};
    b.eps_stream = {static_cast<double>(rows) * witness + look_ahead_loss(rows, eps_c)};
    b.eps1_stream = {static_cast<double>(rows) * row_slack};
    b.total = b.eps_stream.back() + b.eps1_stream.back();
    return b;
}

BoundLedger nipm_bound(const NipmParams& p, const std::vector<double>& eps_c, double witness, double rows) {
    if (eps_c.size() != p.r) throw ShapeError("nipm_bound needs one component error per level");
    BoundLedger b;
    b.component = eps_c;
    double e = witness, f = rows;
    std::size_t count = p.L;
    for (std::size_t i = 0; i < p.r; ++i) {
        const std::size_t li = std::min(p.ell, count);
        e = static_cast<double>(li) * e + look_ahead_loss(li, eps_c[i]);
        f = static_cast<double>(li) * f;
        b.eps_stream.push_back(e);
        b.eps1_stream.push_back(f);
        count = (count + p.ell - 1) / p.ell;
    }
    b.total = e + f;
    return b;
}

}  // namespace nmlab
