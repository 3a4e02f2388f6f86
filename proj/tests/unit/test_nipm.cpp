#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nmlab/errors.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/rng.hpp"

using namespace nmlab;

namespace {

std::size_t depth_oracle(std::size_t L, std::size_t ell) {
    std::size_t r = 0;
    while (std::pow(double(ell), double(r)) < double(L)) ++r;
    return r;
}

NipmParams desk_two_level() { return desk_nipm(4, 2, 1, 6, 2, 2, {4, 2}); }

RowMatrix random_rows(CounterRng& rng, std::size_t rows, std::size_t width) {
    std::vector<BitString> v;
    for (std::size_t i = 0; i < rows; ++i) v.push_back(rng.bits(width));
    return RowMatrix(std::move(v));
}

}  // namespace

TEST_CASE("depth is the least r with ell^r >= L") {
    for (std::size_t L = 1; L <= 300; ++L)
        for (std::size_t ell = 2; ell <= 7; ++ell) CHECK(nipm_depth(L, ell) == depth_oracle(L, ell));
    CHECK_THROWS_AS(nipm_depth(4, 1), ParameterError);
}

TEST_CASE("planned schedules satisfy every invariant") {
    std::size_t feasible = 0, infeasible = 0;
    for (std::size_t L : {2, 3, 5, 9, 16, 33, 100})
        for (std::size_t ell : {2, 3, 4})
            for (std::size_t t : {1, 2, 3})
                for (std::size_t m : {300, 2000, 20000})
                    for (double eps : {0.25, 1e-3}) {
                        NipmRequest q;
                        q.L = L;
                        q.ell = ell;
                        q.t = t;
                        q.m = m;
                        q.eps = eps;
                        NipmParams p;
                        try {
                            p = plan_nipm(q);
                        } catch (const ParameterError& e) {
                            ++infeasible;
                            CHECK(std::string(e.constraint).rfind("m_", 0) == 0);
                            continue;
                        }
                        ++feasible;
                        CHECK(p.r == depth_oracle(L, ell));
                        REQUIRE(p.d_sched.size() == p.r);
                        for (std::size_t i = 1; i < p.r; ++i) CHECK(p.d_sched[i] == (t + 2) * p.d_sched[i - 1]);
                        CHECK(std::accumulate(p.d_sched.begin(), p.d_sched.end(), std::size_t{0}) <= p.d);
                        std::size_t width = m, rows = L;
                        for (std::size_t i = 0; i < p.r; ++i) {
                            CHECK(p.d_sched[i] >= 8);
                            CHECK(p.m_sched[i] >= 8);
                            CHECK(p.m_sched[i] <= width);
                            rows = (rows + ell - 1) / ell;
                            CHECK(p.rows_sched[i] == rows);
                            width = p.m_sched[i];
                        }
                        CHECK(p.rows_sched.back() == 1);
                        CHECK(p.alt_width >= 8);
                        CHECK(p.instantiated() == (p.not_instantiated.empty()));
                    }
    CHECK(feasible > 0);
    CHECK(infeasible > 0);
}

TEST_CASE("infeasible requests name the failing constraint") {
    NipmRequest q;
    q.L = 8;
    q.ell = 2;
    q.m = 40;
    try {
        plan_nipm(q);
        FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
        CHECK(e.constraint == "m_1>=8");
    }
    q.m = 4000;
    q.eps = 1.5;
    CHECK_THROWS_AS(plan_nipm(q), ParameterError);
    q.eps = 0.25;
    q.L = 1;
    CHECK_THROWS_AS(plan_nipm(q), ParameterError);
    CHECK_THROWS_AS(desk_nipm(4, 2, 1, 6, 2, 2, {4}), ParameterError);
    CHECK_THROWS_AS(desk_nipm(4, 2, 1, 6, 3, 2, {4, 2}), ParameterError);  // alt width above d_1
}

TEST_CASE("packed and bit-string recursions agree") {
    CounterRng rng(53);
    const std::vector<NipmParams> ps{desk_two_level(), desk_nipm(9, 3, 2, 7, 2, 2, {5, 3}),
                                     desk_nipm(5, 2, 1, 6, 1, 1, {5, 4, 2})};
    for (const NipmParams& p : ps) {
        for (int i = 0; i < 200; ++i) {
            const std::size_t rows = 1 + rng.uniform(p.L);
            const RowMatrix x = random_rows(rng, rows, p.m);
            std::vector<std::uint64_t> packed;
            for (const auto& r : x.data()) packed.push_back(r.to_uint());
            const BitString y = rng.bits(p.d);
            const BitString out = recursive_nipm(x, y, p);
            CHECK(out.size() == p.out_width());
            CHECK(recursive_nipm_u64(packed.data(), rows, y.to_uint(), p) == out.to_uint());
        }
    }
}

TEST_CASE("composing the one-shot merger reproduces the recursion") {
    CounterRng rng(59);
    const NipmParams p = desk_two_level();
    const Merger composed = compose_merger(lt_level_merger(p), compose_levels(p));
    for (int i = 0; i < 300; ++i) {
        const RowMatrix x = random_rows(rng, 4, p.m);
        const BitString y = rng.bits(p.d);
        CHECK(composed(x, y) == recursive_nipm(x, y, p));
    }
    const Merger narrow = compose_merger(lt_level_merger(p), {{2, 2}});
    CHECK_THROWS_AS(narrow(random_rows(rng, 3, p.m), rng.bits(p.d)), ParameterError);
    CHECK_THROWS_AS(compose_merger(lt_level_merger(p), {}), ParameterError);
}

TEST_CASE("one level of the recursion is a single merge") {
    CounterRng rng(61);
    const NipmParams p = desk_nipm(3, 3, 1, 6, 2, 2, {3});
    for (int i = 0; i < 100; ++i) {
        const RowMatrix x = random_rows(rng, 3, 6);
        const BitString y = rng.bits(p.d);
        CHECK(recursive_nipm(x, y, p) == l_nipm(x, y, p.schemes[0]));
        CHECK(lt_nipm(x, y, 2, p.schemes[0]) == l_nipm(x, y, p.schemes[0]));
    }
    CHECK_THROWS_AS(lt_nipm(random_rows(rng, 2, 6), rng.bits(p.d), 0, p.schemes[0]), ParameterError);
    CHECK_THROWS_AS(recursive_nipm(random_rows(rng, 4, 6), rng.bits(p.d), p), ShapeError);
    CHECK_THROWS_AS(recursive_nipm(random_rows(rng, 3, 6), rng.bits(p.d + 1), p), ShapeError);
}

TEST_CASE("schedules round-trip through JSON and reject edits") {
    const NipmParams p = desk_two_level();
    nlohmann::json j = p;
    const NipmParams back = j.get<NipmParams>();
    CHECK(back.d_sched == p.d_sched);
    CHECK(back.m_sched == p.m_sched);
    CHECK(back.rows_sched == p.rows_sched);
    CHECK(nlohmann::json(back) == j);

    nlohmann::json extra = j;
    extra["mystery"] = 1;
    CHECK_THROWS_AS(extra.get<NipmParams>(), ParameterError);
    nlohmann::json broken = j;
    broken["d_sched"] = {2, 5};
    try {
        broken.get<NipmParams>();
        FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
        CHECK(e.constraint == "d_i=(t+2)d_{i-1}");
    }
    CHECK(schedule_table(p).find("seed length d = 8") != std::string::npos);
}

TEST_CASE("planner widths follow the stated formulas") {
    CHECK(l_nipm_width(1000, 2, 0.25, 4) == doctest::Approx(0.9 * (1000 - 8 * std::log2(4000.0))));
    CHECK(lt_nipm_width(1000, 2, 2, 0.25, 4) == doctest::Approx(0.45 * (1000 - 24 * std::log2(4000.0))));
}
