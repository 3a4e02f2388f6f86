#include "nmlab/nipm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) throw ParameterError(name, detail);
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Per-level schemes; empty with a reason when a width exceeds the family's 64-bit block.
void instantiate(NipmParams& p) {
    p.schemes.clear();
    p.not_instantiated.clear();
    std::size_t width = p.m;
    for (std::size_t i = 0; i < p.r; ++i) {
        if (p.m_sched[i] > 64 || p.alt_width > 64) {
            p.schemes.clear();
            p.not_instantiated = "level " + std::to_string(i + 1) + " output width " + std::to_string(p.m_sched[i]) +
                                 " exceeds the 64-bit field block of the implemented extractor family";
            return;
        }
        p.schemes.push_back(make_look_ahead(width, p.d_sched[i], p.alt_width, p.m_sched[i], p.eps));
        width = p.m_sched[i];
    }
}

void fill_rows(NipmParams& p) {
    p.rows_sched.clear();
    std::size_t rows = p.L;
    for (std::size_t i = 0; i < p.r; ++i) {
        rows = (rows + p.ell - 1) / p.ell;
        p.rows_sched.push_back(rows);
    }
}

double nominal_width(const NipmParams& p) {
    double lg = std::log2(static_cast<double>(p.m) / p.eps);
    double v = std::pow(0.9 / static_cast<double>(p.t), static_cast<double>(p.r)) *
               (static_cast<double>(p.m) - p.c * p.ell * (p.t + 1.0) * p.r * lg);
    return std::max(v, 0.0);
}

}  // namespace

std::size_t nipm_depth(std::size_t L, std::size_t ell) {
    check(L >= 1, "L>=1", "merger needs at least one row");
    check(ell >= 2, "ell>=2", "merge width must be at least 2");
    std::size_t r = 0;
    for (std::size_t cover = 1; cover < L; cover *= ell) ++r;
    return r;
}

std::size_t ceil_log2_ratio(double num, double den) {
    return static_cast<std::size_t>(std::ceil(std::log2(num / den) - 1e-12));
}

NipmParams plan_nipm(const NipmRequest& q) {
    check(q.eps > 0 && q.eps < 1, "eps in (0,1)", "component error must lie in (0,1)");
    check(q.t >= 1, "t>=1", "adversary count must be positive");
    check(q.m >= 1, "m>=1", "row width must be positive");
    NipmParams p;
    p.L = q.L;
    p.ell = q.ell;
    p.t = q.t;
    p.m = q.m;
    p.eps = q.eps;
    p.d_def = q.d_def;
    p.c = q.c;
    p.c_prime = q.c_prime;
    p.floor = q.floor;
    p.r = nipm_depth(q.L, q.ell);
    check(p.r >= 1, "L>=2", "a single row needs no merging");

    const double lg = static_cast<double>(ceil_log2_ratio(static_cast<double>(q.m), q.eps));
    const double log_inv = static_cast<double>(ceil_log2_ratio(1.0, q.eps));
    const double step = q.c * (q.t + 1.0) * q.ell * lg;  // entropy charged per level
    p.alt_width = static_cast<std::size_t>(std::ceil(q.c_seed * lg));

    std::size_t d1 = q.d_def + static_cast<std::size_t>(log_inv) + static_cast<std::size_t>(std::ceil(step));
    p.d_sched.push_back(d1);
    for (std::size_t i = 1; i < p.r; ++i) p.d_sched.push_back((q.t + 2) * p.d_sched.back());
    for (std::size_t i = 1; i <= p.r; ++i) {
        double mi = std::pow(0.9, static_cast<double>(i)) * (static_cast<double>(q.m) - static_cast<double>(i) * step);
        check(mi >= q.floor, "m_" + std::to_string(i) + ">=" + std::to_string(q.floor),
              "level " + std::to_string(i) + " width " + num(std::floor(mi)) + " is below the floor");
        p.m_sched.push_back(static_cast<std::size_t>(std::floor(mi)));
    }
    double d_thm = (q.c * q.ell * lg + static_cast<double>(q.d_def)) * std::pow(q.t + 2.0, static_cast<double>(p.r + 1));
    p.d = static_cast<std::size_t>(std::ceil(d_thm));
    fill_rows(p);
    p.m_nominal = nominal_width(p);
    validate(p);
    instantiate(p);
    return p;
}

NipmParams desk_nipm(std::size_t L, std::size_t ell, std::size_t t, std::size_t m, std::size_t alt_width,
                     std::size_t d1_seed, const std::vector<std::size_t>& m_sched, double eps) {
    NipmParams p;
    p.L = L;
    p.ell = ell;
    p.t = t;
    p.m = m;
    p.eps = eps;
    p.floor = 1;
    p.r = nipm_depth(L, ell);
    check(p.r >= 1, "L>=2", "a single row needs no merging");
    check(m_sched.size() == p.r, "len(m_sched)=r",
          "desk schedule lists " + std::to_string(m_sched.size()) + " widths for depth " + std::to_string(p.r));
    p.alt_width = alt_width;
    p.m_sched = m_sched;
    p.d_sched.push_back(d1_seed);
    for (std::size_t i = 1; i < p.r; ++i) p.d_sched.push_back((t + 2) * p.d_sched.back());
    p.d = std::accumulate(p.d_sched.begin(), p.d_sched.end(), std::size_t{0});
    fill_rows(p);
    p.m_nominal = nominal_width(p);
    validate(p);
    instantiate(p);
    if (!p.instantiated()) throw ParameterError("block<=64", p.not_instantiated);
    return p;
}

void validate(const NipmParams& p) {
    check(p.t >= 1, "t>=1", "adversary count must be positive");
    check(p.r == nipm_depth(p.L, p.ell), "r=ceil(log L/log ell)",
          "depth " + std::to_string(p.r) + " does not match L=" + std::to_string(p.L) + ", ell=" + std::to_string(p.ell));
    check(p.d_sched.size() == p.r && p.m_sched.size() == p.r, "len(schedule)=r", "schedules must list one entry per level");
    for (std::size_t i = 1; i < p.r; ++i)
        check(p.d_sched[i] == (p.t + 2) * p.d_sched[i - 1], "d_i=(t+2)d_{i-1}",
              "d_" + std::to_string(i + 1) + " = " + std::to_string(p.d_sched[i]) + " breaks the growth law");
    std::size_t sum = std::accumulate(p.d_sched.begin(), p.d_sched.end(), std::size_t{0});
    check(sum <= p.d, "sum(d_i)<=d", "seed prefixes need " + std::to_string(sum) + " bits, seed has " + std::to_string(p.d));
    check(p.alt_width >= p.floor, "alt_width>=" + std::to_string(p.floor),
          "alternation width " + std::to_string(p.alt_width) + " is below the floor");
    std::size_t width = p.m;
    for (std::size_t i = 0; i < p.r; ++i) {
        std::string lvl = std::to_string(i + 1);
        check(p.d_sched[i] >= p.floor, "d_" + lvl + ">=" + std::to_string(p.floor), "seed slice below the floor");
        check(p.m_sched[i] >= p.floor && p.m_sched[i] >= 1, "m_" + lvl + ">=" + std::to_string(p.floor),
              "level width below the floor");
        check(p.m_sched[i] <= width, "m_" + lvl + "<=m_" + std::to_string(i), "level output wider than its input rows");
        check(p.alt_width <= width, "alt_width<=m_" + std::to_string(i),
              "alternation width " + std::to_string(p.alt_width) + " exceeds row width " + std::to_string(width));
        check(p.alt_width <= p.d_sched[i], "alt_width<=d_" + lvl,
              "alternation width " + std::to_string(p.alt_width) + " exceeds seed slice " + std::to_string(p.d_sched[i]));
        width = p.m_sched[i];
    }
}

BitString l_nipm(const RowMatrix& rows, const BitString& y, const LookAheadSchemes& s) {
    if (rows.rows() == 0) throw ShapeError("l_nipm needs at least one row");
    return look_ahead(rows, y, s);
}

BitString lt_nipm(const RowMatrix& x, const BitString& y, std::size_t t, const LookAheadSchemes& s) {
    if (t == 0) throw ParameterError("t>=1", "adversary count must be positive");
    return l_nipm(x, y, s);
}

double l_nipm_width(std::size_t m, std::size_t ell, double eps, double c) {
    return 0.9 * (static_cast<double>(m) - c * static_cast<double>(ell) * std::log2(static_cast<double>(m) / eps));
}

double lt_nipm_width(std::size_t m, std::size_t ell, std::size_t t, double eps, double c) {
    return 0.9 / static_cast<double>(t) *
           (static_cast<double>(m) - c * (t + 1.0) * static_cast<double>(ell) * std::log2(static_cast<double>(m) / eps));
}

// Written out level by level; compose_merger is tested against it.
BitString recursive_nipm(const RowMatrix& x, const BitString& y, const NipmParams& p) {
    if (!p.instantiated()) throw ParameterError("instantiated", p.not_instantiated);
    if (y.size() != p.d) throw ShapeError("recursive_nipm: seed has " + std::to_string(y.size()) + " bits, schedule expects " +
                                          std::to_string(p.d));
    if (x.rows() > p.L || x.width() != p.m) throw ShapeError("recursive_nipm: matrix shape disagrees with the schedule");
    RowMatrix cur = x;
    for (std::size_t i = 0; i < p.r; ++i) {
        BitString yi = slice(y, p.d_sched[i]);
        std::vector<BitString> next;
        for (std::size_t j = 0; j < cur.rows(); j += p.ell) next.push_back(lt_nipm(cur.block(j, p.ell), yi, p.t, p.schemes[i]));
        cur = RowMatrix(std::move(next));
    }
    return cur.row(0);
}

std::uint64_t recursive_nipm_u64(const std::uint64_t* rows, std::size_t count, std::uint64_t y, const NipmParams& p) {
    if (!p.instantiated()) throw ParameterError("instantiated", p.not_instantiated);
    if (p.m > 64 || p.d > 64) throw ShapeError("recursive_nipm_u64 needs rows and seed of at most 64 bits");
    if (count == 0 || count > p.L) throw ShapeError("recursive_nipm_u64: row count disagrees with the schedule");
    std::vector<std::uint64_t> cur(rows, rows + count);
    for (std::size_t i = 0; i < p.r; ++i) {
        std::uint64_t yi = p.d_sched[i] == 0 ? 0 : y >> (p.d - p.d_sched[i]);
        std::size_t out = 0;
        for (std::size_t j = 0; j < cur.size(); j += p.ell)
            cur[out++] = look_ahead_u64(cur.data() + j, std::min(p.ell, cur.size() - j), yi, p.schemes[i]);
        cur.resize(out);
    }
    return cur[0];
}

Merger compose_merger(LevelMerger inner, std::vector<ComposeLevel> levels) {
    if (levels.empty()) throw ParameterError("levels>=1", "composition needs at least one level");
    for (const auto& l : levels)
        if (l.ell == 0) throw ParameterError("ell>=1", "level width must be positive");
    return [inner = std::move(inner), levels = std::move(levels)](const RowMatrix& x, const BitString& y) {
        std::size_t cover = 1;
        for (const auto& l : levels) cover *= l.ell;
        if (cover < x.rows())
            throw ParameterError("prod(ell_i)>=L", "levels cover " + std::to_string(cover) + " rows, matrix has " +
                                                       std::to_string(x.rows()));
        RowMatrix cur = x;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            BitString yi = slice(y, levels[i].seed_len);
            std::vector<BitString> next;
            for (std::size_t j = 0; j < cur.rows(); j += levels[i].ell) next.push_back(inner(cur.block(j, levels[i].ell), yi, i));
            cur = RowMatrix(std::move(next));
        }
        return cur.row(0);
    };
}

LevelMerger lt_level_merger(const NipmParams& p) {
    if (!p.instantiated()) throw ParameterError("instantiated", p.not_instantiated);
    return [schemes = p.schemes, t = p.t](const RowMatrix& block, const BitString& y, std::size_t level) {
        return lt_nipm(block, y, t, schemes.at(level));
    };
}

std::vector<ComposeLevel> compose_levels(const NipmParams& p) {
    std::vector<ComposeLevel> out;
    for (std::size_t i = 0; i < p.r; ++i) out.push_back({p.ell, p.d_sched[i]});
    return out;
}

void to_json(nlohmann::json& j, const NipmParams& p) {
    j = nlohmann::json{{"L", p.L},
                       {"ell", p.ell},
                       {"t", p.t},
                       {"m", p.m},
                       {"d", p.d},
                       {"d_def", p.d_def},
                       {"eps", p.eps},
                       {"c", p.c},
                       {"c_prime", p.c_prime},
                       {"floor", p.floor},
                       {"r", p.r},
                       {"alt_width", p.alt_width},
                       {"d_sched", p.d_sched},
                       {"m_sched", p.m_sched},
                       {"rows_sched", p.rows_sched},
                       {"m_nominal", p.m_nominal},
                       {"instantiated", p.instantiated()}};
    if (p.instantiated()) {
        auto& arr = j["schemes"] = nlohmann::json::array();
        for (const auto& s : p.schemes) arr.push_back({{"ext1", s.ext1}, {"ext2", s.ext2}, {"ext3", s.ext3}, {"d1", s.d1}});
    } else {
        j["not_instantiated"] = p.not_instantiated;
    }
}

void from_json(const nlohmann::json& j, NipmParams& p) {
    static const char* known[] = {"L", "ell", "t", "m", "d", "d_def", "eps", "c", "c_prime", "floor", "r", "alt_width",
                                  "d_sched", "m_sched", "rows_sched", "m_nominal", "instantiated", "schemes", "not_instantiated"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) == std::end(known))
            throw ParameterError("unknown field", "NipmParams has no field '" + it.key() + "'");
    NipmParams q;
    q.L = j.at("L").get<std::size_t>();
    q.ell = j.at("ell").get<std::size_t>();
    q.t = j.value("t", std::size_t{1});
    q.m = j.at("m").get<std::size_t>();
    q.d = j.at("d").get<std::size_t>();
    q.d_def = j.value("d_def", std::size_t{0});
    q.eps = j.value("eps", 0.25);
    q.c = j.value("c", 4.0);
    q.c_prime = j.value("c_prime", 1.0);
    q.floor = j.value("floor", 8u);
    q.r = nipm_depth(q.L, q.ell);
    q.alt_width = j.at("alt_width").get<std::size_t>();
    q.d_sched = j.at("d_sched").get<std::vector<std::size_t>>();
    q.m_sched = j.at("m_sched").get<std::vector<std::size_t>>();
    if (j.contains("r") && j.at("r").get<std::size_t>() != q.r)
        throw ParameterError("r=ceil(log L/log ell)", "stored depth disagrees with L and ell");
    fill_rows(q);
    q.m_nominal = nominal_width(q);
    validate(q);
    instantiate(q);
    p = std::move(q);
}

std::string schedule_table(const NipmParams& p) {
    std::ostringstream os;
    os << "level  rows_in  rows_out  width_in  width_out  seed_slice  alt_width\n";
    std::size_t rows = p.L, width = p.m;
    for (std::size_t i = 0; i < p.r; ++i) {
        os << std::setw(5) << i + 1 << std::setw(9) << rows << std::setw(10) << p.rows_sched[i] << std::setw(10) << width
           << std::setw(11) << p.m_sched[i] << std::setw(12) << p.d_sched[i] << std::setw(11) << p.alt_width << '\n';
        rows = p.rows_sched[i];
        width = p.m_sched[i];
    }
    os << "seed length d = " << p.d << ", output width = " << p.out_width() << " (nominal " << p.m_nominal << ")\n";
    if (!p.instantiated()) os << "not instantiated: " << p.not_instantiated << '\n';
    return os.str();
}

}  // namespace nmlab
