#include "nmlab/msrc.hpp"

#include <algorithm>
#include <cmath>

#include "nmlab/errors.hpp"
#include "nmlab/rng.hpp"

namespace nmlab {

namespace {

void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) throw ParameterError(name, detail);
}

// Mixes every source word under a per-(index, row) key.
std::uint64_t source_hash(const std::vector<BitString>& src, std::size_t count, std::uint64_t key) {
    std::uint64_t h = key;
    for (std::size_t s = 0; s < count; ++s)
        for (auto w : src[s].words()) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h = CounterRng(h, s).next();
        }
    return h;
}

}  // namespace

std::size_t MultiParams::bad_budget() const {
    return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(r), 0.5 - alpha) - 1e-12));
}

void validate(const MultiParams& p) {
    check(p.r % 2 == 1, "r odd", "majority needs an odd number of bits");
    check(p.C >= 1, "C>=1", "generator needs at least one source");
    check(p.alpha > 0 && p.alpha < 0.5, "0<alpha<1/2", "bad-fraction exponent out of range");
    check(p.ipm.L == p.L, "ipm.L=L", "IPM rows disagree with the matrix rows");
    check(p.ipm.n == p.n, "ipm.n=n", "IPM weak seed must be one source");
    validate(p.ipm);
}

double multi_entropy_floor(std::size_t n, double k, std::size_t t, double eps, double c) {
    double a = std::log2(k / eps);
    double b = std::log2(static_cast<double>(n) * std::log2(static_cast<double>(std::max<std::size_t>(t, 2))) / eps);
    return c * std::max(a, b);
}

SyntheticGenerator::SyntheticGenerator(const MultiParams& p, std::size_t bad_count, std::uint64_t seed)
    : C_(p.C), n_(p.n), r_(p.r), L_(p.L), m_(p.ipm.m), key_(seed) {
    check(bad_count <= p.bad_budget(), "|bad|<=ceil(r^(1/2-alpha))",
          std::to_string(bad_count) + " bad indices exceed the budget " + std::to_string(p.bad_budget()));
    check(bad_count <= r_, "|bad|<=r", "more bad indices than outputs");
    CounterRng rng(seed, 0x6e6e);
    std::vector<std::size_t> idx(r_);
    for (std::size_t i = 0; i < r_; ++i) idx[i] = i;
    rng.shuffle(idx);
    bad_.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(bad_count));
    good_.assign(idx.begin() + static_cast<std::ptrdiff_t>(bad_count), idx.end());
    std::sort(bad_.begin(), bad_.end());
    std::sort(good_.begin(), good_.end());
    for (std::size_t i = 0; i < good_.size(); ++i) witness_.push_back(rng.uniform(L_));
    check(good_.size() * m_ <= C_ * n_, "C*n>=|good|*m", "sources too short for disjoint witness rows");
}

MatrixSeq SyntheticGenerator::generate(const std::vector<BitString>& sources) const {
    if (sources.size() < C_) throw ShapeError("generator needs " + std::to_string(C_) + " sources");
    for (std::size_t s = 0; s < C_; ++s)
        if (sources[s].size() != n_) throw ShapeError("source length disagrees with the parameters");
    MatrixSeq out;
    out.matrices.assign(r_, RowMatrix(L_, m_));
    out.good = good_;
    out.witness = witness_;
    for (std::size_t gi = 0; gi < good_.size(); ++gi) {
        std::vector<BitString> rows;
        for (std::size_t i = 0; i < L_; ++i) {
            BitString row(m_);
            if (i == witness_[gi]) {
                std::size_t pos = gi * m_;
                for (std::size_t b = 0; b < m_; ++b, ++pos) row.set(b, sources[pos / n_].get(pos % n_));
            } else {
                CounterRng h(source_hash(sources, C_, key_ ^ (good_[gi] * 0x100000001b3ull) ^ i), i);
                row = h.bits(m_);
            }
            rows.push_back(std::move(row));
        }
        out.matrices[good_[gi]] = RowMatrix(std::move(rows));
    }
    return out;
}

std::vector<std::string> SyntheticGenerator::guarantees() const {
    return {"good witness rows are disjoint copies of source bits, hence jointly uniform for uniform sources",
            "bad indices carry the all-zero matrix", "|bad| <= ceil(r^(1/2-alpha))"};
}

SyntheticGenerator synthetic_generator(const MultiParams& p, std::size_t bad_count, std::uint64_t seed) {
    validate(p);
    return SyntheticGenerator(p, bad_count, seed);
}

BitString reduce(const std::vector<BitString>& sources, const MatrixSeqGenerator& g, const MultiParams& p) {
    if (sources.size() != g.sources() + 1) throw ShapeError("reduce needs the generator's sources plus one weak seed");
    MatrixSeq seq = g.generate(sources);
    if (seq.matrices.size() != p.r) throw ShapeError("generator produced the wrong number of matrices");
    const BitString& y = sources.back();
    BitString z(p.r);
    for (std::size_t i = 0; i < p.r; ++i) z.set(i, ipm_weak(seq.matrices[i], y, p.ipm).get(0));
    return z;
}

bool majority(const BitString& z) {
    if (z.size() % 2 == 0) throw ParameterError("len odd", "majority of an even-length string is undefined");
    return z.popcount() * 2 > z.size();
}

bool multi_ext(const std::vector<BitString>& sources, const MatrixSeqGenerator& g, const MultiParams& p) {
    return majority(reduce(sources, g, p));
}

double majority_bias_bound(double t, double r, double alpha, double gamma, double c) {
    double tail = gamma == 0 ? 0 : gamma * std::pow(r, t);
    return c * (std::log2(t) / t + std::pow(r, -alpha) + tail);
}

Rational majority_one_probability(std::size_t r, std::size_t bad, bool bad_value) {
    if (r % 2 == 0) throw ParameterError("r odd", "majority of an even count is undefined");
    if (bad > r) throw ParameterError("bad<=r", "more constant bits than bits");
    const std::size_t u = r - bad, need = r / 2 + 1;
    const std::size_t have = bad_value ? bad : 0;
    BigInt num = 0, binom = 1;
    for (std::size_t j = 0; j <= u; ++j) {
        if (j + have >= need) num += binom;
        binom = binom * (u - j) / (j + 1);
    }
    return Rational(num, BigInt(1) << u);
}

nlohmann::json MultiReport::to_json() const {
    return {{"trials", trials},  {"ones", ones},           {"bias", bias},   {"ci99", ci99},
            {"exact_one", nmlab::to_string(exact_one)}, {"exact_bias", exact_bias}, {"bound", bound}, {"seed", seed}};
}

MultiReport run_multi(const MultiParams& p, const SyntheticGenerator& g, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw ParameterError("trials>=1", "need at least one trial");
    MultiReport rep;
    rep.trials = trials;
    rep.seed = seed;
    CounterRng rng(seed, 0x3317);
    std::vector<BitString> src(p.C + 1);
    for (std::size_t i = 0; i < trials; ++i) {
        for (auto& s : src) s = rng.bits(p.n);
        rep.ones += multi_ext(src, g, p) ? 1 : 0;
    }
    rep.bias = std::abs(static_cast<double>(rep.ones) / static_cast<double>(trials) - 0.5);
    rep.ci99 = std::sqrt(std::log(2 / 0.01) / (2.0 * static_cast<double>(trials)));
    rep.exact_one = majority_one_probability(p.r, g.bad().size(), false);
    rep.exact_bias = std::abs(to_double(rep.exact_one) - 0.5);
    rep.bound = majority_bias_bound(static_cast<double>(p.t), static_cast<double>(p.r), p.alpha, p.gamma, p.c_bias);
    return rep;
}

void to_json(nlohmann::json& j, const MultiParams& p) {
    j = nlohmann::json{{"C", p.C},         {"n", p.n},         {"k", p.k},         {"t", p.t},
                       {"r", p.r},         {"log2_r_nominal", p.log2_r_nominal}, {"L", p.L}, {"alpha", p.alpha},
                       {"gamma", p.gamma}, {"c_bias", p.c_bias}, {"eps", p.eps},   {"bad_budget", p.bad_budget()},
                       {"ipm", p.ipm}};
}

}  // namespace nmlab
