#include <doctest.h>

#include <cmath>
#include <set>

#include "nmlab/errors.hpp"
#include "nmlab/msrc.hpp"
#include "nmlab/rng.hpp"
#include "nmlab/suite.hpp"

using namespace nmlab;

namespace {

// Pr[majority = 1] by dynamic programming over the count of ones.
Rational majority_dp(std::size_t r, std::size_t bad, bool bad_value) {
    std::vector<Rational> count(r + 1, Rational(0));
    count[bad_value ? bad : 0] = 1;
    for (std::size_t i = 0; i < r - bad; ++i) {
        std::vector<Rational> next(r + 1, Rational(0));
        for (std::size_t c = 0; c < r; ++c) {
            next[c] += count[c] / 2;
            next[c + 1] += count[c] / 2;
        }
        count = next;
    }
    Rational p = 0;
    for (std::size_t c = r / 2 + 1; c <= r; ++c) p += count[c];
    return p;
}

}  // namespace

TEST_CASE("majority probability matches the counting recursion") {
    for (std::size_t r = 1; r <= 25; r += 2)
        for (std::size_t bad = 0; bad <= r; ++bad)
            for (bool v : {false, true}) CHECK(majority_one_probability(r, bad, v) == majority_dp(r, bad, v));
    CHECK(majority_one_probability(101, 0, false) == Rational(1, 2));
    CHECK_THROWS_AS(majority_one_probability(4, 0, false), ParameterError);
    CHECK_THROWS_AS(majority_one_probability(5, 6, false), ParameterError);
}

TEST_CASE("majority is defined on odd lengths only") {
    CHECK(majority(BitString::parse_binary("110")));
    CHECK_FALSE(majority(BitString::parse_binary("10001")));
    CHECK_THROWS_AS(majority(BitString::parse_binary("10")), ParameterError);
}

TEST_CASE("bias bound and entropy floor follow their formulas") {
    CHECK(majority_bias_bound(2, 101, 0.001, 0, 1) == doctest::Approx(0.5 + std::pow(101.0, -0.001)));
    CHECK(majority_bias_bound(4, 9, 0.25, 0.01, 2) == doctest::Approx(2 * (0.5 + std::pow(9.0, -0.25) + 0.01 * 6561)));
    const double f = multi_entropy_floor(192, 100, 4, 0.25, 3);
    CHECK(f == doctest::Approx(3 * std::max(std::log2(400.0), std::log2(192 * 2 / 0.25))));
    CHECK(multi_entropy_floor(8, 1e6, 2, 0.25, 1) == doctest::Approx(std::log2(4e6)));
}

TEST_CASE("synthetic generator honours its guarantees") {
    const MultiSpec spec;
    const MultiParams p = build_multi(spec);
    CHECK(p.bad_budget() == static_cast<std::size_t>(std::ceil(std::pow(double(p.r), 0.5 - p.alpha))));
    const SyntheticGenerator g = synthetic_generator(p, spec.bad, spec.generator_seed);
    CHECK(g.bad().size() == spec.bad);
    CHECK(g.bad().size() + g.good().size() == p.r);
    std::set<std::size_t> all(g.bad().begin(), g.bad().end());
    all.insert(g.good().begin(), g.good().end());
    CHECK(all.size() == p.r);

    CounterRng rng(103);
    std::vector<BitString> src;
    for (std::size_t i = 0; i < p.C; ++i) src.push_back(rng.bits(p.n));
    BitString flat;
    for (const auto& s : src) flat = concat(flat, s);
    const MatrixSeq seq = g.generate(src);
    REQUIRE(seq.matrices.size() == p.r);
    for (std::size_t b : g.bad())
        for (const auto& row : seq.matrices[b].data()) CHECK(row.popcount() == 0);
    const std::size_t m = p.ipm.m;
    for (std::size_t gi = 0; gi < seq.good.size(); ++gi) {
        const BitString& w = seq.matrices[seq.good[gi]].row(seq.witness[gi]);
        CHECK(w == slice(suffix(flat, gi * m), m));
    }
    CHECK_FALSE(g.guarantees().empty());
    CHECK_THROWS_AS(synthetic_generator(p, p.bad_budget() + 1, 1), ParameterError);
    CHECK_THROWS_AS(g.generate({src[0]}), ShapeError);
    CHECK_THROWS_AS(reduce(src, g, p), ShapeError);
}

TEST_CASE("multi-source runs are reproducible") {
    MultiSpec spec;
    spec.r = 11;
    spec.bad = 2;
    spec.alpha = 0.1;
    const MultiParams p = build_multi(spec);
    const SyntheticGenerator g = synthetic_generator(p, spec.bad, 5);
    const MultiReport a = run_multi(p, g, 40, 9), b = run_multi(p, g, 40, 9);
    CHECK(a.ones == b.ones);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.exact_one == majority_one_probability(11, 2, false));
    CHECK(a.ci99 == doctest::Approx(std::sqrt(std::log(200.0) / 80.0)));
    CHECK_THROWS_AS(run_multi(p, g, 0, 9), ParameterError);

    std::vector<BitString> src;
    CounterRng rng(107);
    for (std::size_t i = 0; i <= p.C; ++i) src.push_back(rng.bits(p.n));
    const BitString z = reduce(src, g, p);
    CHECK(z.size() == p.r);
    CHECK(multi_ext(src, g, p) == majority(z));
}

TEST_CASE("odd output count is enforced") {
    MultiSpec spec;
    spec.r = 10;
    CHECK_THROWS_AS(build_multi(spec), ParameterError);
    nlohmann::json j = MultiSpec{};
    j["ipm"]["unknown"] = 1;
    CHECK_THROWS_AS(j.get<MultiSpec>(), ParameterError);
}
