#include "nmlab/nmx.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json_keys.hpp"
#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

using detail::require_keys;

void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) throw ParameterError(name, detail);
}

std::size_t up(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

// Merger schedule over L rows of width `width`, seeded by a d_prime-bit string.
void plan_mergers(NmExtParams& p, const NmRequest& q, std::size_t width) {
    NipmRequest nr;
    nr.L = p.L;
    nr.ell = p.ell;
    nr.t = q.t;
    nr.m = width;
    nr.eps = p.eps1;
    nr.c = q.c;
    nr.c_seed = q.c_seed;
    nr.floor = q.floor;
    p.nipm = plan_nipm(nr);
    p.d_basic = static_cast<double>(p.nipm.d);

    p.boot.clear();
    p.boot_levels.clear();
    const std::size_t block = p.ell * p.ell;
    std::size_t rows = p.L, w = width, seed = 0;
    while (true) {
        NipmRequest ir = nr;
        ir.L = block;
        ir.m = w;
        NipmParams inner = plan_nipm(ir);
        seed = std::max(seed, inner.d);
        p.boot_levels.push_back({block, inner.d});
        w = inner.out_width();
        p.boot.push_back(std::move(inner));
        rows = (rows + block - 1) / block;
        if (rows == 1) break;
    }
    p.d_boot = static_cast<double>(seed);
}

std::size_t merger_seed(const NmExtParams& p) {
    return p.mode == MergerMode::basic ? p.nipm.d : static_cast<std::size_t>(p.d_boot);
}

std::size_t merger_width(const NmExtParams& p) {
    if (p.mode == MergerMode::basic) return p.nipm.out_width();
    return p.boot.empty() ? p.m_dprime : p.boot.back().out_width();
}

void instantiate(NmExtParams& p) {
    p.not_instantiated.clear();
    auto fail = [&](const std::string& why) {
        if (p.not_instantiated.empty()) p.not_instantiated = why;
    };
    if (p.m_prime > 64 || p.d_prime > 64 || p.m_dprime > 64)
        fail("flip-flop width " + std::to_string(p.m_prime) + ", merger seed " + std::to_string(p.d_prime) + " or row width " +
             std::to_string(p.m_dprime) + " exceeds the 64-bit field block of the implemented extractor family");
    if (p.mode == MergerMode::basic && !p.nipm.instantiated()) fail(p.nipm.not_instantiated);
    for (const auto& b : p.boot)
        if (p.mode == MergerMode::bootstrapped && !b.instantiated()) fail(b.not_instantiated);
    if (!p.instantiated()) return;
    try {
        p.cb = make_cbreak(p.cb.spec);
        p.ext1 = make_scheme(p.d, p.d2, p.d_prime, p.d / 2.0, std::min(0.5, p.eps1 * 2 + 1e-9));
        p.ext2 = make_scheme(p.m_prime, p.d3, p.m_dprime, p.m_prime / 2.0, std::min(0.5, p.eps1 * 2 + 1e-9));
    } catch (const ParameterError& e) {
        fail(e.what());
    }
}

}  // namespace

std::string to_string(MergerMode m) { return m == MergerMode::basic ? "basic" : "bootstrapped"; }

MergerMode parse_merger_mode(const std::string& s) {
    if (s == "basic") return MergerMode::basic;
    if (s == "bootstrapped") return MergerMode::bootstrapped;
    throw ParameterError("merger_mode", "expected basic or bootstrapped, got '" + s + "'");
}

NmExtParams plan_params(const NmRequest& q) {
    check(q.n >= 2, "n>=2", "source length must be at least 2");
    check(q.k > 0 && q.k <= static_cast<double>(q.n), "0<k<=n", "min-entropy must lie in (0, n]");
    check(q.eps_out > 0 && q.eps_out < 1, "eps in (0,1)", "target error must lie in (0,1)");
    check(q.t >= 1, "t>=1", "adversary count must be positive");
    NmExtParams p;
    p.request = q;
    p.n = q.n;
    p.k = q.k;
    p.t = q.t;
    p.mode = q.mode;
    p.eps_out = q.eps_out;
    p.eps1 = q.eps_out / (2 * q.C * static_cast<double>(q.n));
    const double lgn_real = std::log2(static_cast<double>(q.n) / p.eps1);
    p.eps_prime = q.C * p.eps1 * lgn_real;
    check(p.eps_out >= p.eps_prime, "eps'>=C*eps1*log(n/eps1)", "rescaled error exceeds the target");
    const double lgn = std::ceil(lgn_real - 1e-9);

    p.L = up(q.c_adv * lgn);
    check(p.L >= q.floor, "L>=" + std::to_string(q.floor), "advice length " + std::to_string(p.L) + " is below the floor");
    p.ell = std::size_t{1} << up(std::sqrt(std::log2(static_cast<double>(p.L))));
    p.r = nipm_depth(p.L, p.ell);
    p.d1 = up((q.C_adv + q.C_ff + 1) * lgn);
    p.m_prime = static_cast<std::size_t>(std::floor(q.delta * q.k));
    check(p.m_prime >= q.floor, "m'>=" + std::to_string(q.floor),
          "flip-flop width delta*k = " + std::to_string(p.m_prime) + " is below the floor");
    p.d3 = up(q.c * std::log2(static_cast<double>(p.m_prime) / p.eps1));
    check(p.d3 >= q.floor, "d3>=" + std::to_string(q.floor), "seed slice d3 is below the floor");

    // The seed length feeds d2 = c log(d/eps1) and must cover the merger seed; iterate to a fixed point.
    std::size_t d = p.d1;
    for (int iter = 0;; ++iter) {
        check(iter < 64, "d converges", "seed length did not stabilize");
        p.d2 = up(q.c * std::log2(static_cast<double>(d) / p.eps1));
        check(p.d2 >= q.floor, "d2>=" + std::to_string(q.floor), "seed slice d2 is below the floor");
        check(p.d2 <= p.m_prime, "d2<=m'", "seed slice d2 = " + std::to_string(p.d2) + " exceeds the flip-flop width");
        const double mdp = 0.9 * static_cast<double>(p.m_prime) - 2.0 * static_cast<double>(p.d2);
        check(mdp >= q.floor, "m''>=" + std::to_string(q.floor), "merged row width " + std::to_string(mdp) + " is below the floor");
        p.m_dprime = static_cast<std::size_t>(std::floor(mdp));
        plan_mergers(p, q, p.m_dprime);
        const double need = static_cast<double>(merger_seed(p)) + 2.0 * static_cast<double>(p.d1) + q.C_adv * lgn;
        std::size_t next = std::max(d, up(need / 0.9));
        if (next == d) break;
        d = next;
    }
    p.d = d;
    p.d_prime = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(d) - 2.0 * p.d1 - q.C_adv * lgn));
    check(p.d_prime >= merger_seed(p), "d'>=merger seed", "merger seed does not fit in d'");
    check(p.d3 <= p.d_prime, "d3<=d'", "seed slice d3 exceeds y-bar");
    p.nipm.d = std::max(p.nipm.d, p.d_prime);
    p.m = merger_width(p);
    check(p.m >= 1, "m>=1", "output width is empty");
    const double lgL = std::log2(static_cast<double>(p.L)) / std::log2(static_cast<double>(p.ell));
    p.m_t_nominal = (q.delta * q.k - static_cast<double>(p.ell * q.t * p.r) * std::log2(q.n / q.eps_out)) /
                    std::pow(2.0 * q.t, lgL);

    CBreakSpec cs;
    cs.n = q.n;
    cs.d = p.d;
    cs.eps = p.eps1;
    cs.k = q.k;
    cs.rs_bits = 8;
    cs.positions = std::max<std::size_t>(1, p.L / 16);
    cs.a0_raw = p.L > cs.positions * 8 ? p.L - cs.positions * 8 : 0;
    cs.a0 = std::min<std::size_t>(p.d, std::max<std::size_t>(8, up(q.c_seed * lgn)));
    cs.d_ff = p.d1;
    cs.a = std::min<std::size_t>(p.d1, up(q.c_seed * lgn));
    cs.m_ff = p.m_prime;
    cs.lambda = 0;
    p.cb.spec = cs;
    p.cb.code.b = cs.rs_bits;
    p.cb.code.K = (p.d + 7) / 8;
    p.cb.L_adv = cs.a0_raw + cs.positions * cs.rs_bits;
    if (p.mode == MergerMode::basic) p.nipm.d = p.d_prime;
    instantiate(p);
    return p;
}

NmExtParams desk_nmext(const NmDeskSpec& s) {
    NmExtParams p;
    p.desk = s;
    p.cb = make_cbreak(s.cb);
    p.n = s.cb.n;
    p.d = s.cb.d;
    p.k = s.cb.k > 0 ? s.cb.k : static_cast<double>(s.cb.n);
    p.t = s.t;
    p.eps1 = s.eps;
    p.eps_out = s.eps;
    p.L = p.cb.L_adv;
    p.d1 = s.cb.d_ff;
    p.d2 = s.d2;
    p.d3 = s.d3;
    p.d_prime = s.d_prime;
    p.m_prime = s.cb.m_ff;
    p.m_dprime = s.m_dprime;
    p.ell = s.ell;
    check(p.d2 <= p.m_prime, "d2<=m'", "seed slice d2 exceeds the flip-flop width");
    check(p.d3 <= p.d_prime, "d3<=d'", "seed slice d3 exceeds y-bar");
    p.ext1 = make_scheme(p.d, p.d2, p.d_prime, p.d / 2.0, s.eps);
    p.ext2 = make_scheme(p.m_prime, p.d3, p.m_dprime, p.m_prime / 2.0, s.eps);
    p.nipm = desk_nipm(p.L, s.ell, s.t, p.m_dprime, s.alt_width, s.d1_seed, s.m_sched, s.eps);
    check(p.nipm.d <= p.d_prime, "sum(d_i)<=d'", "merger seed prefixes need " + std::to_string(p.nipm.d) + " bits, y-bar has " +
                                                      std::to_string(p.d_prime));
    p.d_basic = static_cast<double>(p.nipm.d);
    p.nipm.d = p.d_prime;
    validate(p.nipm);
    p.r = p.nipm.r;
    p.m = p.nipm.out_width();
    return p;
}

NmTrace nm_ext_trace(const BitString& x, const BitString& y, const NmExtParams& p) {
    if (!p.instantiated()) throw ParameterError("instantiated", p.not_instantiated);
    if (x.size() != p.n || y.size() != p.d) throw ShapeError("nm_ext: input lengths disagree with the parameters");
    NmTrace tr;
    tr.w = adv_gen(x, y, p.cb);
    tr.y1 = slice(y, p.d1);
    tr.v.reserve(p.L);
    for (std::size_t i = 0; i < p.L; ++i) tr.v.push_back(flip_flop(x, tr.y1, tr.w.get(i), p.cb));
    tr.vbar1 = slice(tr.v[0], p.d2);
    tr.ybar = ext(p.ext1, y, tr.vbar1);
    tr.ybar1 = slice(tr.ybar, p.d3);
    tr.z.reserve(p.L);
    for (const auto& v : tr.v) tr.z.push_back(ext(p.ext2, v, tr.ybar1));
    RowMatrix z(tr.z);
    if (p.mode == MergerMode::basic) {
        tr.out = recursive_nipm(z, tr.ybar, p.nipm);
    } else {
        const auto& boot = p.boot;
        Merger merge = compose_merger(
            [&boot](const RowMatrix& block, const BitString& yb, std::size_t level) {
                return recursive_nipm(block, yb, boot.at(level));
            },
            p.boot_levels);
        tr.out = merge(z, tr.ybar);
    }
    return tr;
}

BitString nm_ext(const BitString& x, const BitString& y, const NmExtParams& p) { return nm_ext_trace(x, y, p).out; }

BitString t_nm_ext(const BitString& x, const BitString& y, const NmExtParams& p) {
    if (p.t == 0) throw ParameterError("t>=1", "adversary count must be positive");
    return nm_ext(x, y, p);
}

void to_json(nlohmann::json& j, const CBreakSpec& s) {
    j = nlohmann::json{{"n", s.n},   {"d", s.d},           {"eps", s.eps},         {"lambda", s.lambda},
                       {"rs_bits", s.rs_bits}, {"a0", s.a0}, {"a0_raw", s.a0_raw}, {"positions", s.positions},
                       {"d_ff", s.d_ff}, {"a", s.a},        {"m_ff", s.m_ff},       {"k", s.k}};
}

void from_json(const nlohmann::json& j, CBreakSpec& s) {
    require_keys(j, {"n", "d", "eps", "lambda", "rs_bits", "a0", "a0_raw", "positions", "d_ff", "a", "m_ff", "k"}, "cbreak spec");
    s.n = j.at("n").get<std::size_t>();
    s.d = j.at("d").get<std::size_t>();
    s.eps = j.value("eps", 0.25);
    s.lambda = j.value("lambda", 0.0);
    s.rs_bits = j.value("rs_bits", 8u);
    s.a0 = j.at("a0").get<std::size_t>();
    s.a0_raw = j.at("a0_raw").get<std::size_t>();
    s.positions = j.at("positions").get<std::size_t>();
    s.d_ff = j.at("d_ff").get<std::size_t>();
    s.a = j.at("a").get<std::size_t>();
    s.m_ff = j.at("m_ff").get<std::size_t>();
    s.k = j.value("k", 0.0);
}

void to_json(nlohmann::json& j, const NmRequest& q) {
    j = nlohmann::json{{"n", q.n},         {"k", q.k},         {"eps_out", q.eps_out}, {"t", q.t},
                       {"merger_mode", to_string(q.mode)}, {"C", q.C}, {"c_adv", q.c_adv}, {"C_adv", q.C_adv},
                       {"C_ff", q.C_ff},   {"delta", q.delta}, {"c", q.c},             {"c_seed", q.c_seed},
                       {"floor", q.floor}};
}

void from_json(const nlohmann::json& j, NmRequest& q) {
    require_keys(j, {"n", "k", "eps_out", "t", "merger_mode", "C", "c_adv", "C_adv", "C_ff", "delta", "c", "c_seed", "floor"},
                 "planner request");
    NmRequest d;
    q.n = j.at("n").get<std::size_t>();
    q.k = j.at("k").get<double>();
    q.eps_out = j.at("eps_out").get<double>();
    q.t = j.value("t", d.t);
    q.mode = parse_merger_mode(j.value("merger_mode", std::string("basic")));
    q.C = j.value("C", d.C);
    q.c_adv = j.value("c_adv", d.c_adv);
    q.C_adv = j.value("C_adv", d.C_adv);
    q.C_ff = j.value("C_ff", d.C_ff);
    q.delta = j.value("delta", d.delta);
    q.c = j.value("c", d.c);
    q.c_seed = j.value("c_seed", d.c_seed);
    q.floor = j.value("floor", d.floor);
}

void to_json(nlohmann::json& j, const NmDeskSpec& s) {
    j = nlohmann::json{{"cbreak", s.cb},       {"t", s.t},           {"d2", s.d2},
                       {"d3", s.d3},           {"d_prime", s.d_prime}, {"m_dprime", s.m_dprime},
                       {"ell", s.ell},         {"alt_width", s.alt_width}, {"d1_seed", s.d1_seed},
                       {"m_sched", s.m_sched}, {"eps", s.eps}};
}

void from_json(const nlohmann::json& j, NmDeskSpec& s) {
    require_keys(j, {"cbreak", "t", "d2", "d3", "d_prime", "m_dprime", "ell", "alt_width", "d1_seed", "m_sched", "eps"},
                 "desk spec");
    s.cb = j.at("cbreak").get<CBreakSpec>();
    s.t = j.value("t", std::size_t{1});
    s.d2 = j.at("d2").get<std::size_t>();
    s.d3 = j.at("d3").get<std::size_t>();
    s.d_prime = j.at("d_prime").get<std::size_t>();
    s.m_dprime = j.at("m_dprime").get<std::size_t>();
    s.ell = j.at("ell").get<std::size_t>();
    s.alt_width = j.at("alt_width").get<std::size_t>();
    s.d1_seed = j.at("d1_seed").get<std::size_t>();
    s.m_sched = j.at("m_sched").get<std::vector<std::size_t>>();
    s.eps = j.value("eps", 0.25);
}

void to_json(nlohmann::json& j, const NmExtParams& p) {
    j = nlohmann::json{{"n", p.n},
                       {"k", p.k},
                       {"d", p.d},
                       {"m", p.m},
                       {"t", p.t},
                       {"eps1", p.eps1},
                       {"eps_out", p.eps_out},
                       {"eps_prime", p.eps_prime},
                       {"L", p.L},
                       {"d1", p.d1},
                       {"d2", p.d2},
                       {"d3", p.d3},
                       {"d_prime", p.d_prime},
                       {"m_prime", p.m_prime},
                       {"m_dprime", p.m_dprime},
                       {"ell", p.ell},
                       {"r", p.r},
                       {"merger_mode", to_string(p.mode)},
                       {"m_t_nominal", p.m_t_nominal},
                       {"merger_seed_basic", p.d_basic},
                       {"merger_seed_bootstrapped", p.d_boot},
                       {"nipm", p.nipm},
                       {"instantiated", p.instantiated()}};
    if (p.request) j["request"] = *p.request;
    if (p.desk) j["desk"] = *p.desk;
    if (!p.boot.empty()) {
        auto& b = j["bootstrap"] = nlohmann::json::array();
        for (std::size_t i = 0; i < p.boot.size(); ++i)
            b.push_back({{"block", p.boot_levels[i].ell}, {"seed_len", p.boot_levels[i].seed_len}, {"inner", p.boot[i]}});
    }
    if (p.instantiated()) {
        j["cbreak"] = p.cb;
        j["ext1"] = p.ext1;
        j["ext2"] = p.ext2;
    } else {
        j["not_instantiated"] = p.not_instantiated;
    }
}

NmExtParams nmext_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParameterError("object", "nmext params must be a JSON object");
    const bool has_req = j.contains("request"), has_desk = j.contains("desk");
    if (has_req == has_desk) throw ParameterError("request|desk", "params must carry exactly one of 'request' or 'desk'");
    NmExtParams p = has_req ? plan_params(j.at("request").get<NmRequest>()) : desk_nmext(j.at("desk").get<NmDeskSpec>());
    // Recorded derived fields must agree with the rebuild.
    for (const char* key : {"n", "d", "m", "L", "d1", "d2", "d3", "d_prime", "ell", "r"}) {
        if (!j.contains(key)) continue;
        nlohmann::json mine;
        to_json(mine, p);
        if (mine.at(key) != j.at(key))
            throw ParameterError(key, "recorded value " + j.at(key).dump() + " disagrees with the rebuilt " + mine.at(key).dump());
    }
    return p;
}

std::string nmext_table(const NmExtParams& p) {
    std::ostringstream os;
    auto row = [&](const std::string& q, const std::string& form, double v) {
        os << std::left << std::setw(10) << q << std::setw(44) << form << std::right << std::setw(14) << v << '\n';
    };
    os << std::left << std::setw(10) << "quantity" << std::setw(44) << "nominal form" << std::right << std::setw(14)
       << "implemented" << '\n';
    row("eps1", "eps/(2Cn)", p.eps1);
    row("eps'", "C eps1 log(n/eps1)", p.eps_prime);
    row("L", "c log(n/eps1)", static_cast<double>(p.L));
    row("ell", "2^ceil(sqrt(log L))", static_cast<double>(p.ell));
    row("r", "ceil(log L / log ell)", static_cast<double>(p.r));
    row("d1", "(C_adv + C_ff + 1) log(n/eps1)", static_cast<double>(p.d1));
    row("d2", "c log(d/eps1)", static_cast<double>(p.d2));
    row("d3", "c log(m'/eps1)", static_cast<double>(p.d3));
    row("d'", "0.9d - 2d1 - C_adv log(n/eps1)", static_cast<double>(p.d_prime));
    row("m'", "delta k", static_cast<double>(p.m_prime));
    row("m''", "0.9m' - 2d2", static_cast<double>(p.m_dprime));
    row("d", "seed length", static_cast<double>(p.d));
    row("m", "output length", static_cast<double>(p.m));
    row("seed_b", "merger seed, basic", p.d_basic);
    row("seed_bs", "merger seed, bootstrapped", p.d_boot);
    if (p.t > 1) row("m_t", "(delta k - ell t r log(n/eps))/(2t)^(..)", p.m_t_nominal);
    if (!p.instantiated()) os << "not instantiated: " << p.not_instantiated << '\n';
    return os.str();
}

}  // namespace nmlab
