#include <doctest.h>

#include <map>
#include <set>

#include "nmlab/errors.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/verify.hpp"

using namespace nmlab;

namespace {

using Joint = std::map<std::vector<std::uint64_t>, Rational>;

Rational half_l1(const Joint& a, const Joint& b) {
    std::set<std::vector<std::uint64_t>> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    Rational s = 0;
    for (const auto& k : keys) {
        const Rational pa = a.count(k) ? a.at(k) : Rational(0), pb = b.count(k) ? b.at(k) : Rational(0);
        s += pa > pb ? pa - pb : pb - pa;
    }
    return s / 2;
}

// Literal joint-table definition of the tampering distance.
Rational tamper_oracle(const ExtFn& f, const ExtFn& g, const Dist& x, const Dist& y, const std::vector<TamperFn>& maps,
                       unsigned m) {
    Joint real, ideal;
    for (std::uint64_t xv = 0; xv < x.counts().size(); ++xv)
        for (std::uint64_t yv = 0; yv < y.counts().size(); ++yv) {
            const Rational p = x.prob(xv) * y.prob(yv);
            if (p == 0) continue;
            std::vector<std::uint64_t> tail;
            for (const auto& a : maps) tail.push_back(g(xv, a(yv)));
            tail.push_back(yv);
            std::vector<std::uint64_t> key{f(xv, yv)};
            key.insert(key.end(), tail.begin(), tail.end());
            real[key] += p;
            for (std::uint64_t u = 0; u < (std::uint64_t{1} << m); ++u) {
                key[0] = u;
                ideal[key] += p / (std::uint64_t{1} << m);
            }
        }
    return half_l1(real, ideal);
}

Rational strong_oracle(const ExtFn& f, const Dist& x, unsigned d, unsigned m) {
    return tamper_oracle(f, f, x, Dist::uniform(d), {}, m);
}

}  // namespace

TEST_CASE("tamper enumeration counts") {
    for (unsigned d : {1u, 2u}) {
        TamperEnumerator e(d);
        TamperFn f;
        std::set<std::vector<std::uint64_t>> seen;
        while (e.next(f)) {
            CHECK(f.fixed_point_free());
            seen.insert(f.table);
        }
        CHECK(BigInt(seen.size()) == tamper_count(d));
    }
    CHECK(tamper_count(1) == 1);
    CHECK(tamper_count(2) == 81);
    CHECK(tamper_count(3) == BigInt(5764801));  // 7^8
    CHECK_THROWS_AS(TamperEnumerator(4), DomainCapError);
    CHECK_THROWS_AS(make_tamper(1, {0, 0}), ParameterError);
    CHECK_THROWS_AS(make_tamper(1, {1}), ShapeError);
    CHECK_THROWS_AS(make_tamper(1, {2, 0}), ParameterError);
}

TEST_CASE("sampled tampering maps are fixed-point free and cover every other value") {
    CounterRng rng(137);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) {
        const TamperFn a = sample_tamper(rng, 3);
        CHECK(a.fixed_point_free());
        seen.insert(a(5));
    }
    CHECK(seen.size() == 7);
    CHECK(seen.count(5) == 0);
}

TEST_CASE("hand-computed non-malleability distances") {
    const TamperFn flip = make_tamper(1, {1, 0});
    const Dist x = Dist::uniform(1);
    // f = x: the tampered output copies the real one.
    CHECK(nm_distance([](auto xv, auto) { return xv; }, x, 1, 1, flip) == Rational(1, 2));
    // f = y: the output is the revealed seed.
    CHECK(nm_distance([](auto, auto yv) { return yv; }, x, 1, 1, flip) == Rational(1, 2));
    // f = x xor y: the tampered output is the complement.
    CHECK(nm_distance([](auto xv, auto yv) { return xv ^ yv; }, x, 1, 1, flip) == Rational(1, 2));
    // Strong but copied under tampering: x xor y is a perfect strong extractor.
    CHECK(strong_distance([](auto xv, auto yv) { return xv ^ yv; }, x, 1, 1) == 0);
}

TEST_CASE("exact distances agree with the joint-table definition") {
    CounterRng rng(139);
    for (int i = 0; i < 40; ++i) {
        const unsigned n = 3 + static_cast<unsigned>(rng.uniform(3)), d = 2, m = 1 + static_cast<unsigned>(rng.uniform(2));
        const FlatSource src = sample_flat_source(rng, n, 2);
        std::vector<std::uint64_t> table(std::size_t{1} << (n + d));
        for (auto& v : table) v = rng.uniform(std::uint64_t{1} << m);
        const ExtFn f = [table, d](std::uint64_t xv, std::uint64_t yv) { return table[(xv << d) | yv]; };
        const TamperFn a = sample_tamper(rng, d), b = sample_tamper(rng, d);
        CHECK(strong_distance(f, src.dist(), d, m) == strong_oracle(f, src.dist(), d, m));
        CHECK(nm_distance(f, src.dist(), d, m, a) == tamper_oracle(f, f, src.dist(), Dist::uniform(d), {a}, m));
        CHECK(nm_distance(f, src.dist(), d, m, {a, b}) == tamper_oracle(f, f, src.dist(), Dist::uniform(d), {a, b}, m));
    }
    const ExtScheme s = make_scheme(8, 16, 2, 4, 0.25);
    const FlatSource src = sample_flat_source(rng, 8, 4);
    const ExtFn f = [s](std::uint64_t xv, std::uint64_t yv) { return ext_u64(s, xv, yv); };
    CHECK(strong_distance(s, src.dist()) == strong_distance(f, src.dist(), 16, 2));
    CHECK(LinearStrongOracle(s).distance(src) == strong_distance(s, src.dist()));
    CHECK_THROWS_AS(nm_distance(f, src.dist(), 1, 2, TamperFn{1, {0, 0}}), ParameterError);
}

TEST_CASE("merger instances are self-consistent") {
    for (SeedMode mode : {SeedMode::tampered, SeedMode::shared})
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            InstanceSpec spec;
            spec.L = 3;
            spec.m = 3;
            spec.t = 1 + seed % 2;
            spec.d = 3;
            spec.h = seed % 3;
            spec.mode = mode;
            spec.seed_k = mode == SeedMode::shared ? 2 : 0;
            spec.slack = seed % 3 == 0 ? 2 : 0;
            spec.perturb = seed % 2;
            spec.seed = seed;
            const MergerInstance inst = build_instance(spec);
            CHECK_NOTHROW(check_instance(inst));
            CHECK(inst.describe()["L"] == 3);
            if (spec.slack == 0) CHECK(inst.witness_distance == 0);
            MergerInstance broken = inst;
            broken.row_slack += 1;
            CHECK_THROWS_AS(check_instance(broken), ShapeError);
        }
    InstanceSpec bad;
    bad.h = 2;
    CHECK_THROWS_AS(build_instance(bad), ShapeError);
}

TEST_CASE("a merger that outputs the witness row pays exactly the witness slack") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        InstanceSpec spec;
        spec.L = 3;
        spec.m = 3;
        spec.t = 1;
        spec.d = 2;
        spec.h = seed % 3;
        spec.slack = seed % 4;
        spec.seed = seed;
        const MergerInstance inst = build_instance(spec);
        const std::size_t h = spec.h;
        const MergerFn pick = [h](const std::uint64_t* rows, std::size_t, std::uint64_t) { return rows[h]; };
        CHECK(merger_distance(pick, 3, inst) == inst.witness_distance);
    }
}

TEST_CASE("XOR of rows is fully copied by the counterexample") {
    const MergerInstance inst = xor_counterexample(6, 4, 3);
    CHECK_NOTHROW(check_instance(inst));
    CHECK(inst.witness_distance == 0);
    const MergerFn x = [](const std::uint64_t* rows, std::size_t count, std::uint64_t) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < count; ++i) v ^= rows[i];
        return v;
    };
    CHECK(merger_distance(x, 6, inst) == Rational(63, 64));
}

TEST_CASE("bound ledgers follow the level recursion") {
    CHECK(look_ahead_loss(1, 0.1) == doctest::Approx(0.1));
    CHECK(look_ahead_loss(2, 0.1) == doctest::Approx(0.2));
    CHECK(look_ahead_loss(4, 0.1) == doctest::Approx(0.6));
    const NipmParams p = desk_nipm(5, 2, 1, 6, 1, 1, {5, 4, 2});
    const BoundLedger b = nipm_bound(p, {0.01, 0.02, 0.03}, 0.001, 0.002);
    // Rows per level: 5 -> 3 -> 2 -> 1, every block holding two rows.
    double e = 0.001, f = 0.002;
    for (double c : {0.01, 0.02, 0.03}) {
        e = 2 * e + 2 * c;
        f = 2 * f;
    }
    CHECK(b.total == doctest::Approx(e + f));
    CHECK(b.eps_stream.size() == 3);
    CHECK_FALSE(b.vacuous());
    CHECK_THROWS_AS(nipm_bound(p, {0.1}, 0, 0), ShapeError);
    const BoundLedger one = single_merge_bound(3, 0.05, 0.01, 0.02);
    CHECK(one.total == doctest::Approx(3 * 0.01 + 4 * 0.05 + 3 * 0.02));
}

TEST_CASE("component error stays within the hash-lemma bound") {
    CounterRng rng(149);
    const ExtScheme s = make_scheme(10, 16, 2, 6, 0.25);
    const double e = component_error(s, 6, rng, 10);
    CHECK(e >= 0);
    CHECK(e <= s.lhl_bound(6));
    CHECK_THROWS_AS(component_error(make_scheme(21, 16, 2, 6, 0.25), 6, rng, 1), DomainCapError);
}
