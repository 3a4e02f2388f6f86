#include "nmlab/suite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "json_keys.hpp"
#include "nmlab/errors.hpp"
#include "nmlab/ipm.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/verify.hpp"

namespace nmlab {

using nlohmann::json;

namespace {

// Tolerance for comparing a double bound with an exact distance.
constexpr double kSlack = 1e-12;

double charged(std::size_t width, std::size_t leak) { return width > leak ? static_cast<double>(width - leak) : 0.0; }

json rational(const Rational& r) { return json{{"exact", to_string(r)}, {"value", to_double(r)}}; }

}  // namespace

// ---------------------------------------------------------------- sext

json sext_suite(const SextSuiteConfig& c) {
    const ExtScheme s = make_scheme(c.n, c.d, c.m, static_cast<double>(c.k), 0.25);
    const double bound = s.lhl_bound(static_cast<double>(c.k));
    LinearStrongOracle oracle(s);
    CounterRng rng(c.seed, 0x5e47);
    Rational worst = 0;
    std::size_t violations = 0;
    json fixture;
    for (std::size_t i = 0; i < c.sources; ++i) {
        FlatSource src = sample_flat_source(rng, static_cast<unsigned>(c.n), static_cast<unsigned>(c.k));
        Rational dist = oracle.distance(src);
        if (dist > worst) worst = dist;
        if (to_double(dist) > bound + kSlack) {
            if (violations++ == 0) fixture = json{{"scheme", s}, {"support", src.support}, {"distance", rational(dist)}};
        }
    }
    json rep{{"module", "sext"},      {"scheme", s},           {"sources", c.sources}, {"seed", c.seed},
             {"lhl_bound", bound},    {"worst", rational(worst)}, {"violations", violations},
             {"pass", violations == 0}};
    if (!fixture.is_null()) rep["fixture"] = fixture;
    return rep;
}

// ---------------------------------------------------------------- mergers

namespace {

struct Family {
    std::string merger;  // l_nipm, lt_nipm, recursive_nipm or ipm_weak
    std::size_t L, ell, t, m, alt, d1_seed, m_out;
    bool shared = false;
};

// Widths keep (t+1) copies of the instance inside the enumeration cap.
std::vector<Family> merger_families(bool tampered, bool shared) {
    std::vector<Family> f;
    if (tampered) {
        f.push_back({"l_nipm", 2, 2, 1, 6, 2, 4, 2});
        f.push_back({"l_nipm", 2, 3, 1, 6, 2, 4, 2});
        f.push_back({"lt_nipm", 2, 2, 2, 6, 2, 4, 2});
        f.push_back({"lt_nipm", 2, 3, 2, 6, 2, 4, 2});
        f.push_back({"recursive_nipm", 4, 2, 1, 6, 2, 2, 2});
        f.push_back({"recursive_nipm", 4, 3, 1, 6, 2, 2, 2});
        f.push_back({"recursive_nipm", 4, 2, 2, 5, 2, 2, 2});
    }
    if (shared) {
        f.push_back({"ipm_weak", 2, 2, 1, 6, 2, 4, 2, true});
        f.push_back({"ipm_weak", 2, 2, 2, 6, 2, 4, 2, true});
    }
    return f;
}

// Built schedule plus measured component errors for one family.
struct FamilyState {
    NipmParams nipm;
    IpmParams ipm;
    std::vector<double> eps_c;
    double ez = 0, e2 = 0;  // IPM only
    json describe;
};

// Weak seed of the IPM family: 8 bits, 6 of min-entropy.
constexpr std::size_t kIpmN = 8, kIpmK = 6;

FamilyState prepare(const Family& f, CounterRng& rng, std::size_t samples) {
    FamilyState st;
    if (!f.shared) {
        const std::size_t r = nipm_depth(f.L, f.ell);
        st.nipm = desk_nipm(f.L, f.ell, f.t, f.m, f.alt, f.d1_seed, std::vector<std::size_t>(r, f.m_out));
        for (const auto& s : st.nipm.schemes) st.eps_c.push_back(look_ahead_error(s, rng, samples));
        st.describe = json{{"nipm", st.nipm}};
    } else {
        const std::size_t d1 = 2, d = 4, d_prime = 2, m_prime = 4;
        NipmParams inner = desk_nipm(f.L, f.ell, f.t, m_prime, f.alt, d, {f.m_out});
        st.ipm = desk_ipm(kIpmN, kIpmK, f.m, d1, d, d_prime, m_prime, inner);
        st.nipm = st.ipm.inner;
        for (const auto& s : st.nipm.schemes) st.eps_c.push_back(look_ahead_error(s, rng, samples));
        // z leaks d bits per tampered copy; a re-extracted row leaks its d1-bit slice.
        st.ez = component_error(st.ipm.ext1, charged(kIpmK, f.t * d), rng, samples);
        st.e2 = component_error(st.ipm.ext2, charged(f.m, d1), rng, samples);
        st.describe = json{{"ipm", st.ipm}};
    }
    return st;
}

MergerFn merger_fn(const Family& f, const FamilyState& st) {
    if (f.shared) {
        const IpmParams* p = &st.ipm;
        return [p](const std::uint64_t* rows, std::size_t count, std::uint64_t y) { return ipm_weak_u64(rows, count, y, *p); };
    }
    const NipmParams* p = &st.nipm;
    if (f.merger == "recursive_nipm")
        return [p](const std::uint64_t* rows, std::size_t count, std::uint64_t y) { return recursive_nipm_u64(rows, count, y, *p); };
    // One look-ahead merge; the seed is exactly the level-1 prefix.
    return [p](const std::uint64_t* rows, std::size_t count, std::uint64_t y) {
        return look_ahead_u64(rows, count, y, p->schemes[0]);
    };
}

}  // namespace

json merger_suite(const MergerSuiteConfig& c) {
    const auto fams = merger_families(c.tampered, c.shared);
    if (fams.empty()) throw ParameterError("family", "merger suite needs at least one family");
    CounterRng rng(c.seed, 0x3e59);
    std::vector<FamilyState> states;
    for (const auto& f : fams) states.push_back(prepare(f, rng, c.samples));

    json rows = json::array(), fixtures = json::array();
    std::size_t violations = 0, vacuous = 0;
    for (std::size_t i = 0; i < c.instances; ++i) {
        const std::size_t fi = i % fams.size(), round = i / fams.size();
        const Family& f = fams[fi];
        const FamilyState& st = states[fi];
        InstanceSpec spec;
        spec.L = f.L;
        spec.m = f.m;
        spec.t = f.t;
        spec.h = (round / 2) % f.L;
        spec.perturb = round % 2 == 1;
        spec.slack = round % 3 == 2 ? 3 : 0;
        spec.seed = c.seed * 1000003 + i;
        if (f.shared) {
            spec.mode = SeedMode::shared;
            spec.d = kIpmN;
            spec.seed_k = kIpmK;
        } else {
            spec.d = st.nipm.d;
        }
        const MergerInstance inst = build_instance(spec);
        const Rational dist = merger_distance(merger_fn(f, st), st.nipm.out_width(), inst);
        const double w = to_double(inst.witness_distance), rs = to_double(inst.row_slack);
        BoundLedger b = f.shared ? nipm_bound(st.nipm, st.eps_c, w + st.e2, rs + st.e2) : nipm_bound(st.nipm, st.eps_c, w, rs);
        if (f.shared) b.total += st.ez;
        const bool ok = to_double(dist) <= b.total + kSlack;
        violations += ok ? 0 : 1;
        vacuous += b.vacuous() ? 1 : 0;
        rows.push_back(json{{"case", i},
                            {"merger", f.merger},
                            {"L", f.L},
                            {"ell", f.ell},
                            {"t", f.t},
                            {"m", f.m},
                            {"d", spec.d},
                            {"h", spec.h},
                            {"perturb", spec.perturb},
                            {"slack", spec.slack},
                            {"distance", to_double(dist)},
                            {"distance_exact", to_string(dist)},
                            {"bound", b.total},
                            {"vacuous", b.vacuous()},
                            {"ok", ok}});
        if (!ok) fixtures.push_back(json{{"instance", inst.describe()}, {"params", st.describe}, {"distance", rational(dist)}});
    }

    // The XOR of rows is copied exactly by the planted tampering.
    const MergerInstance x = xor_counterexample(6, 4, c.seed);
    MergerFn xor_rows = [](const std::uint64_t* rows, std::size_t count, std::uint64_t) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < count; ++i) v ^= rows[i];
        return v;
    };
    const Rational xd = merger_distance(xor_rows, 6, x);
    const bool xor_fails = to_double(xd) >= 0.4;

    json comps = json::array();
    for (std::size_t fi = 0; fi < fams.size(); ++fi)
        comps.push_back(json{{"merger", fams[fi].merger},
                             {"L", fams[fi].L},
                             {"ell", fams[fi].ell},
                             {"t", fams[fi].t},
                             {"eps_c", states[fi].eps_c},
                             {"ext_z", states[fi].ez},
                             {"ext_row", states[fi].e2}});
    return json{{"module", c.shared && !c.tampered ? "ipm" : "nipm"},
                {"seed", c.seed},
                {"instances", c.instances},
                {"components", comps},
                {"rows", rows},
                {"violations", violations},
                {"vacuous", vacuous},
                {"xor_strawman", json{{"distance", rational(xd)}, {"threshold", 0.4}, {"fails_as_expected", xor_fails}}},
                {"fixtures", fixtures},
                {"pass", violations == 0 && xor_fails}};
}

// ---------------------------------------------------------------- cbreak

FlipFlopLedger flip_flop_ledger(const CBreakParams& p, CounterRng& rng, std::size_t samples) {
    const auto& s = p.spec;
    const std::size_t k = static_cast<std::size_t>(s.k > 0 ? s.k : static_cast<double>(s.n));
    FlipFlopLedger l;
    l.ext_x = component_error(p.ext_x, charged(k, s.a), rng, samples);
    l.ext_y = component_error(p.ext_y, charged(s.d_ff, s.a), rng, samples);
    l.ext_ty = component_error(p.ext_ty, static_cast<double>(s.a), rng, samples);
    l.ext_wide = component_error(p.ext_wide, charged(k, s.a), rng, samples);
    return l;
}

double adv_eps_target(const CBreakParams& p, double c_adv) {
    return std::min(1.0, static_cast<double>(p.spec.n) * std::exp2(-static_cast<double>(p.L_adv) / c_adv));
}

CBreakSpec adv_micro_spec() {
    CBreakSpec s;
    s.n = 16;
    s.d = 8;
    s.k = 8;
    s.rs_bits = 4;
    s.a0 = 4;
    s.a0_raw = 4;
    s.positions = 4;
    s.d_ff = 2;
    s.a = 1;
    s.m_ff = 1;
    s.eps = adv_eps_target(make_cbreak(s));
    return s;
}

CBreakSpec ff_micro_spec() {
    CBreakSpec s;
    s.n = 10;
    s.d = 2;
    s.k = 8;
    s.rs_bits = 2;
    s.a0 = 2;
    s.a0_raw = 2;
    s.positions = 3;
    s.d_ff = 2;
    s.a = 1;
    s.m_ff = 1;
    return s;
}

json adv_distinctness(const CBreakSpec& spec, std::size_t sources, std::uint64_t seed) {
    const CBreakParams p = make_cbreak(spec);
    if (spec.d > 12) throw DomainCapError("adv_distinctness enumerates seed pairs only up to d = 12");
    if (spec.n > 32) throw DomainCapError("adv_distinctness samples flat sources of at most 32 bits");
    const std::uint64_t seeds = std::uint64_t{1} << spec.d;
    const double pairs = static_cast<double>(seeds) * static_cast<double>(seeds - 1) / 2;
    const unsigned k = static_cast<unsigned>(spec.k > 0 ? spec.k : static_cast<double>(spec.n));
    std::vector<BitString> ys;
    for (std::uint64_t y = 0; y < seeds; ++y) ys.push_back(BitString::from_uint(y, spec.d));
    CounterRng rng(seed, 0xad6e);
    double total = 0, worst_source = 0;
    std::vector<BitString> adv(seeds);
    for (std::size_t s = 0; s < sources; ++s) {
        const FlatSource src = sample_flat_source(rng, static_cast<unsigned>(spec.n), k);
        double source_rate = 0;
        for (auto xv : src.support) {
            const BitString x = BitString::from_uint(xv, spec.n);
            for (std::uint64_t y = 0; y < seeds; ++y) adv[y] = adv_gen(x, ys[y], p);
            std::vector<BitString> sorted = adv;
            std::sort(sorted.begin(), sorted.end());
            double equal = 0;
            for (std::size_t i = 0, j; i < sorted.size(); i = j) {
                for (j = i; j < sorted.size() && sorted[j] == sorted[i]; ++j) {}
                const double run = static_cast<double>(j - i);
                equal += run * (run - 1) / 2;
            }
            source_rate += equal / pairs;
        }
        source_rate /= static_cast<double>(src.support.size());
        total += source_rate;
        worst_source = std::max(worst_source, source_rate);
    }
    const double rate = total / static_cast<double>(sources);
    return json{{"spec", spec},       {"L_adv", p.L_adv},  {"sources", sources},       {"seed_pairs", pairs},
                {"collision_rate", rate}, {"worst_source", worst_source}, {"target", spec.eps},
                {"pass", rate <= spec.eps}};
}

json flip_flop_contract(const CBreakSpec& spec, std::size_t sources, std::size_t samples, std::uint64_t seed) {
    const CBreakParams p = make_cbreak(spec);
    const unsigned d = static_cast<unsigned>(spec.d_ff), m = static_cast<unsigned>(spec.m_ff);
    if (d > 2) throw DomainCapError("flip_flop_contract enumerates every seed map only for d_ff <= 2");
    const unsigned k = static_cast<unsigned>(spec.k > 0 ? spec.k : static_cast<double>(spec.n));
    CounterRng rng(seed, 0xf1f0);
    const FlipFlopLedger led = flip_flop_ledger(p, rng, samples);
    const double bound = led.total();
    const std::uint64_t points = std::uint64_t{1} << d;
    const std::uint64_t maps = std::uint64_t{1} << (d * points);
    const Dist seed_law = Dist::uniform(d);
    TamperFn id{d, {}};
    for (std::uint64_t y = 0; y < points; ++y) id.table.push_back(y);

    double worst_all = 0, worst_fpf = 0, control = 1;
    std::size_t fpf_tables = 0;
    json fixture;
    for (std::size_t s = 0; s < sources; ++s) {
        const Dist x = sample_flat_source(rng, static_cast<unsigned>(spec.n), k).dist();
        for (int b = 0; b < 2; ++b) {
            ExtFn f = [&p, b](std::uint64_t xv, std::uint64_t yv) { return flip_flop_u64(xv, yv, b, p); };
            ExtFn g = [&p, b](std::uint64_t xv, std::uint64_t yv) { return flip_flop_u64(xv, yv, !b, p); };
            for (std::uint64_t code = 0; code < maps; ++code) {
                TamperFn a{d, {}};
                for (std::uint64_t y = 0; y < points; ++y) a.table.push_back((code >> (y * d)) & (points - 1));
                const double dist = to_double(tamper_distance(f, g, x, seed_law, {a}, m));
                worst_all = std::max(worst_all, dist);
                if (a.fixed_point_free()) {
                    worst_fpf = std::max(worst_fpf, dist);
                    if (s == 0 && b == 0) ++fpf_tables;
                }
                if (dist > bound + kSlack && fixture.is_null())
                    fixture = json{{"spec", spec}, {"b", b}, {"map", a.table}, {"source", x.to_json()}, {"distance", dist}};
            }
            control = std::min(control, to_double(tamper_distance(f, f, x, seed_law, {id}, m)));
        }
    }
    const double target = 0.9 * (1 - std::exp2(-static_cast<double>(m)));
    json rep{{"spec", spec},
             {"sources", sources},
             {"maps", maps},
             {"fpf_tables", fpf_tables},
             {"ledger", json{{"ext_x", led.ext_x}, {"ext_y", led.ext_y}, {"ext_ty", led.ext_ty}, {"ext_wide", led.ext_wide}}},
             {"bound", bound},
             {"vacuous", bound >= 1},
             {"worst_all_maps", worst_all},
             {"worst_fpf", worst_fpf},
             {"control", control},
             {"control_target", target},
             {"pass", worst_all <= bound + kSlack && control >= target}};
    if (!fixture.is_null()) rep["fixture"] = fixture;
    return rep;
}

json cbreak_suite(const CbreakSuiteConfig& c) {
    json adv = adv_distinctness(adv_micro_spec(), c.adv_sources, c.seed);
    json ff = flip_flop_contract(ff_micro_spec(), c.ff_sources, c.samples, c.seed);
    return json{{"module", "cbreak"}, {"seed", c.seed}, {"advice", adv}, {"flip_flop", ff},
                {"pass", adv.at("pass").get<bool>() && ff.at("pass").get<bool>()}};
}

// ---------------------------------------------------------------- nmx

NmDeskSpec nmx_micro_spec() {
    NmDeskSpec s;
    s.cb.n = 16;
    s.cb.d = 8;
    s.cb.k = 12;
    s.cb.rs_bits = 4;
    s.cb.a0 = 4;
    s.cb.a0_raw = 4;
    s.cb.positions = 2;
    s.cb.d_ff = 2;
    s.cb.a = 1;
    s.cb.m_ff = 4;
    s.cb.eps = adv_eps_target(make_cbreak(s.cb));
    s.t = 1;
    s.d2 = 2;
    s.d3 = 2;
    s.d_prime = 4;
    s.m_dprime = 2;
    s.ell = 4;
    s.alt_width = 1;
    s.d1_seed = 1;
    s.m_sched = {1, 1};
    return s;
}

namespace {

struct SeedMap {
    std::string name;
    std::function<std::uint64_t(std::uint64_t)> f;
};

// Fixed-point-free maps on d-bit seeds.
std::vector<SeedMap> seed_battery(unsigned d, CounterRng& rng) {
    const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
    const std::uint64_t offset = 1 + rng.uniform(mask);
    const std::uint64_t c0 = rng.uniform(mask + 1);
    return {
        {"bit_flip_first", [d](std::uint64_t y) { return y ^ (std::uint64_t{1} << (d - 1)); }},
        {"bit_flip_last", [](std::uint64_t y) { return y ^ 1; }},
        {"offset", [offset](std::uint64_t y) { return y ^ offset; }},
        // 5y + 3 has no fixed point mod 2^d: 4y = -3 has no solution.
        {"permutation", [mask](std::uint64_t y) { return (5 * y + 3) & mask; }},
        {"constant_replace", [c0](std::uint64_t y) { return y == c0 ? c0 ^ 1 : c0; }},
    };
}

}  // namespace

json nmx_suite(const NmxSuiteConfig& c) {
    const NmDeskSpec spec = nmx_micro_spec();
    const NmExtParams p = desk_nmext(spec);
    if (p.m != 1) throw ParameterError("m=1", "the advantage battery needs a 1-bit output");
    CounterRng rng(c.seed, 0x6e6d);

    // Budget assembled from measured component errors.
    const FlipFlopLedger ff = flip_flop_ledger(p.cb, rng, c.samples);
    const double e_adv = p.cb.spec.eps;
    const double e_ext1 = component_error(p.ext1, charged(p.d, p.d2), rng, c.samples);
    const double e_ext2 = component_error(p.ext2, charged(p.m_prime, p.d3), rng, c.samples);
    std::vector<double> eps_c;
    for (const auto& s : p.nipm.schemes) eps_c.push_back(look_ahead_error(s, rng, c.samples));
    const BoundLedger merge = nipm_bound(p.nipm, eps_c, 0, 0);
    const double budget = e_adv + ff.total() + e_ext1 + static_cast<double>(p.L) * e_ext2 + merge.total;

    const unsigned k = static_cast<unsigned>(p.k);
    const FlatSource src = sample_flat_source(rng, static_cast<unsigned>(p.n), k);
    const auto battery = seed_battery(static_cast<unsigned>(p.d), rng);
    const std::size_t trials = std::max<std::size_t>(c.trials, 2);
    const std::size_t fit = trials / 2, test = trials - fit;

    std::vector<std::uint64_t> xs(trials), ys(trials);
    std::vector<int> out(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        xs[i] = src.support[rng.uniform(src.support.size())];
        ys[i] = rng.uniform(std::uint64_t{1} << p.d);
        out[i] = nm_ext(BitString::from_uint(xs[i], p.n), BitString::from_uint(ys[i], p.d), p).get(0);
    }

    json rows = json::array();
    bool pass = true;
    const double ci = hoeffding99(test);
    for (const auto& a : battery) {
        // Predictor: majority output per (y, tampered output) cell on the fit half.
        std::vector<int> vote(std::size_t{2} << p.d, 0);
        std::vector<int> tam(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            tam[i] = nm_ext(BitString::from_uint(xs[i], p.n), BitString::from_uint(a.f(ys[i]), p.d), p).get(0);
            if (i < fit) vote[(ys[i] << 1) | tam[i]] += out[i] ? 1 : -1;
        }
        std::size_t hits = 0;
        for (std::size_t i = fit; i < trials; ++i) {
            const int v = vote[(ys[i] << 1) | tam[i]];
            const int guess = v > 0 ? 1 : v < 0 ? 0 : tam[i];
            hits += guess == out[i] ? 1 : 0;
        }
        const double advantage = std::abs(static_cast<double>(hits) / static_cast<double>(test) - 0.5);
        const bool ok = advantage <= budget + ci;
        pass = pass && ok;
        rows.push_back(json{{"adversary", a.name}, {"advantage", advantage}, {"ci99", ci}, {"budget", budget}, {"ok", ok}});
    }
    return json{{"module", "nmx"},
                {"seed", c.seed},
                {"desk", spec},
                {"trials", trials},
                {"components", json{{"advice", e_adv},
                                    {"flip_flop", ff.total()},
                                    {"ext1", e_ext1},
                                    {"ext2", e_ext2},
                                    {"rows", p.L},
                                    {"merger", merge.total}}},
                {"budget", budget},
                {"vacuous", budget >= 0.5},
                {"rows", rows},
                {"pass", pass}};
}

// ---------------------------------------------------------------- msrc

MultiParams build_multi(const MultiSpec& s) {
    NipmParams inner = desk_nipm(s.L, s.ell, 1, s.ipm_m_prime, s.alt_width, s.d1_seed, s.m_sched, s.eps);
    MultiParams p;
    p.C = s.C;
    p.n = s.n;
    p.k = static_cast<double>(s.n);
    p.t = s.t;
    p.r = s.r;
    p.log2_r_nominal = 3 / s.alpha * std::log2(static_cast<double>(s.n));
    p.L = s.L;
    p.alpha = s.alpha;
    p.gamma = s.gamma;
    p.c_bias = s.c_bias;
    p.eps = s.eps;
    p.ipm = desk_ipm(s.n, static_cast<double>(s.n), s.ipm_m, s.ipm_d1, s.ipm_d, s.ipm_d_prime, s.ipm_m_prime, inner, s.eps);
    validate(p);
    return p;
}

void to_json(json& j, const MultiSpec& s) {
    j = json{{"C", s.C},
             {"n", s.n},
             {"r", s.r},
             {"L", s.L},
             {"t", s.t},
             {"bad", s.bad},
             {"alpha", s.alpha},
             {"gamma", s.gamma},
             {"c_bias", s.c_bias},
             {"eps", s.eps},
             {"ipm", json{{"m", s.ipm_m},
                          {"d1", s.ipm_d1},
                          {"d", s.ipm_d},
                          {"d_prime", s.ipm_d_prime},
                          {"m_prime", s.ipm_m_prime},
                          {"ell", s.ell},
                          {"alt_width", s.alt_width},
                          {"d1_seed", s.d1_seed},
                          {"m_sched", s.m_sched}}},
             {"generator_seed", s.generator_seed}};
}

void from_json(const json& j, MultiSpec& s) {
    detail::require_keys(j, {"C", "n", "r", "L", "t", "bad", "alpha", "gamma", "c_bias", "eps", "ipm", "generator_seed"},
                         "multisource params");
    MultiSpec d;
    s.C = j.value("C", d.C);
    s.n = j.value("n", d.n);
    s.r = j.value("r", d.r);
    s.L = j.value("L", d.L);
    s.t = j.value("t", d.t);
    s.bad = j.value("bad", d.bad);
    s.alpha = j.value("alpha", d.alpha);
    s.gamma = j.value("gamma", d.gamma);
    s.c_bias = j.value("c_bias", d.c_bias);
    s.eps = j.value("eps", d.eps);
    s.generator_seed = j.value("generator_seed", d.generator_seed);
    if (j.contains("ipm")) {
        const json& q = j.at("ipm");
        detail::require_keys(q, {"m", "d1", "d", "d_prime", "m_prime", "ell", "alt_width", "d1_seed", "m_sched"}, "ipm params");
        s.ipm_m = q.value("m", d.ipm_m);
        s.ipm_d1 = q.value("d1", d.ipm_d1);
        s.ipm_d = q.value("d", d.ipm_d);
        s.ipm_d_prime = q.value("d_prime", d.ipm_d_prime);
        s.ipm_m_prime = q.value("m_prime", d.ipm_m_prime);
        s.ell = q.value("ell", d.ell);
        s.alt_width = q.value("alt_width", d.alt_width);
        s.d1_seed = q.value("d1_seed", d.d1_seed);
        s.m_sched = q.value("m_sched", d.m_sched);
    }
}

json multi_suite(const MultiSpec& s, std::size_t trials, std::uint64_t seed) {
    const MultiParams p = build_multi(s);
    const SyntheticGenerator g = synthetic_generator(p, s.bad, s.generator_seed);
    const MultiReport rep = run_multi(p, g, trials, seed);
    const bool matches = std::abs(rep.bias - rep.exact_bias) <= rep.ci99;
    const bool bounded = rep.bias <= rep.bound;
    return json{{"module", "multisource"},
                {"params", s},
                {"bad", g.bad()},
                {"bad_budget", p.bad_budget()},
                {"guarantees", g.guarantees()},
                {"report", rep.to_json()},
                {"matches_exact", matches},
                {"within_bound", bounded},
                {"vacuous", rep.bound >= 0.5},
                {"pass", matches && bounded}};
}

// ---------------------------------------------------------------- pamp

PampSpec pamp_default_spec() {
    PampSpec s;
    NmDeskSpec& d = s.nmx;
    d.cb.n = 64;
    d.cb.d = 32;
    d.cb.k = 48;
    d.cb.eps = 1.0 / 256;
    d.cb.rs_bits = 8;
    d.cb.a0 = 8;
    d.cb.a0_raw = 8;
    d.cb.positions = 2;
    d.cb.d_ff = 16;
    d.cb.a = 8;
    d.cb.m_ff = 48;
    d.t = 1;
    d.d2 = 8;
    d.d3 = 8;
    d.d_prime = 32;
    d.m_dprime = 40;
    d.ell = 5;
    d.alt_width = 8;
    d.d1_seed = 8;
    d.m_sched = {36, 32};
    d.eps = 1.0 / 256;
    return s;
}

PampParams build_pamp(const PampSpec& s) { return make_pamp(desk_nmext(s.nmx), s.k, s.s, s.mac_bits, s.c_loss); }

void to_json(json& j, const PampSpec& s) {
    j = json{{"nmx", s.nmx}, {"k", s.k}, {"s", s.s}, {"mac_bits", s.mac_bits}, {"c_loss", s.c_loss}, {"source_seed", s.source_seed}};
}

void from_json(const json& j, PampSpec& s) {
    detail::require_keys(j, {"nmx", "k", "s", "mac_bits", "c_loss", "source_seed"}, "pa params");
    const PampSpec d = pamp_default_spec();
    s.nmx = j.contains("nmx") ? j.at("nmx").get<NmDeskSpec>() : d.nmx;
    s.k = j.value("k", d.k);
    s.s = j.value("s", d.s);
    s.mac_bits = j.value("mac_bits", d.mac_bits);
    s.c_loss = j.value("c_loss", d.c_loss);
    s.source_seed = j.value("source_seed", d.source_seed);
}

json pamp_run(const PampParams& p, const SubcubeSource& src, const Adversary& adv, std::size_t trials, std::uint64_t seed,
              std::vector<Transcript>* keep) {
    const SecurityReport rep = security_experiment(p, adv, trials, src, seed, keep);
    const double n = static_cast<double>(trials);
    const double mac = p.mac_bound();
    json out{{"report", rep.to_json()}};
    if (adv.name == "passive") {
        const std::size_t failures = rep.abort_count + rep.attack_successes;
        out["criterion"] = "zero failures";
        out["failures"] = failures;
        out["pass"] = failures == 0;
    } else if (adv.name == "flip2") {
        const double limit = mac + 3 * std::sqrt(mac * (1 - mac) / n);
        out["criterion"] = "accept rate <= mac bound + 3 sigma";
        out["limit"] = limit;
        out["pass"] = rep.accept_rate <= limit;
    } else {
        const double limit = p.nmx.eps_out + mac + rep.ci99;
        out["criterion"] = "success rate <= eps_out + mac bound + ci99";
        out["limit"] = limit;
        out["pass"] = rep.success_rate <= limit;
    }
    return out;
}

json pamp_battery(const PampSpec& s, std::size_t trials, std::uint64_t seed) {
    const PampParams p = build_pamp(s);
    const SubcubeSource src = make_subcube(p.n, static_cast<std::size_t>(p.k), s.source_seed);
    json rows = json::array();
    bool pass = true;
    std::uint64_t stream = 0;
    for (const char* name : {"passive", "flip2", "flip1", "replace", "random"}) {
        json r = pamp_run(p, src, named_adversary(name), trials, seed * 16 + stream++);
        pass = pass && r.at("pass").get<bool>();
        rows.push_back(r);
    }
    return json{{"module", "pa"}, {"params", s}, {"protocol", p}, {"seed", seed}, {"rows", rows}, {"pass", pass}};
}

// ---------------------------------------------------------------- csv

std::string rows_to_csv(const json& rows) {
    std::set<std::string> keys;
    for (const auto& r : rows)
        for (auto it = r.begin(); it != r.end(); ++it) keys.insert(it.key());
    std::ostringstream os;
    bool first = true;
    for (const auto& k : keys) os << (first ? "" : ",") << k, first = false;
    os << '\n';
    for (const auto& r : rows) {
        first = true;
        for (const auto& k : keys) {
            os << (first ? "" : ",");
            first = false;
            if (!r.contains(k)) continue;
            const json& v = r.at(k);
            if (v.is_string() || v.is_structured()) {
                // Nested values are written as compact JSON text.
                const std::string t = v.is_string() ? v.get<std::string>() : v.dump();
                if (t.find_first_of(",\"\n") == std::string::npos) os << t;
                else {
                    os << '"';
                    for (char ch : t) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                    os << '"';
                }
            } else {
                os << v.dump();
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace nmlab
