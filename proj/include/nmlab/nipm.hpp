#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/altx.hpp"
#include "nmlab/bits.hpp"

namespace nmlab {

// Schedule of a recursive merger. Level i (1-based) merges blocks of `ell`
// rows of width m_{i-1} into rows of width m_i using the seed prefix of
// length d_i; m_0 = m. Invariants checked by validate():
//   r = ceil(log L / log ell), d_i = (t+2) d_{i-1}, sum d_i <= d,
//   every d_i, m_i and alt_width >= floor.
struct NipmParams {
    std::size_t L = 0;
    std::size_t ell = 0;
    std::size_t t = 1;
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t d_def = 0;
    double eps = 0.25;
    double c = 4;         // entropy-requirement constant
    double c_prime = 1;   // per-merge error multiplier
    unsigned floor = 8;   // minimum width; desk schedules lower it explicitly
    std::size_t r = 0;
    std::size_t alt_width = 0;           // width of every S_i and R_i
    std::vector<std::size_t> d_sched;    // d_1..d_r
    std::vector<std::size_t> m_sched;    // m_1..m_r
    std::vector<std::size_t> rows_sched; // L_1..L_r
    double m_nominal = 0;                // (0.9/t)^r (m - c ell (t+1) r log(m/eps))
    std::vector<LookAheadSchemes> schemes;  // one per level; empty if the family cannot realize the widths
    std::string not_instantiated;           // reason when schemes is empty

    bool instantiated() const { return !schemes.empty(); }
    std::size_t out_width() const { return m_sched.empty() ? m : m_sched.back(); }
};

struct NipmRequest {
    std::size_t L = 0;
    std::size_t ell = 0;
    std::size_t t = 1;
    std::size_t m = 0;
    double eps = 0.25;
    std::size_t d_def = 0;
    double c = 4;
    double c_prime = 1;
    double c_seed = 2;  // alternation width = c_seed * log(m/eps)
    unsigned floor = 8;
};

// Smallest r with ell^r >= L.
std::size_t nipm_depth(std::size_t L, std::size_t ell);
std::size_t ceil_log2_ratio(double num, double den);

// Planner: throws ParameterError naming the first failing constraint.
NipmParams plan_nipm(const NipmRequest& q);

// Hand-sized schedule for exhaustive tests. d_sched follows (t+2)-growth from
// d1_seed; widths only need to be positive.
NipmParams desk_nipm(std::size_t L, std::size_t ell, std::size_t t, std::size_t m, std::size_t alt_width,
                     std::size_t d1_seed, const std::vector<std::size_t>& m_sched, double eps = 0.25);

void validate(const NipmParams& p);

// One look-ahead merge of 1..ell rows.
BitString l_nipm(const RowMatrix& rows, const BitString& y, const LookAheadSchemes& s);
// Identical computation; t only enters the analysis and the width planner.
BitString lt_nipm(const RowMatrix& x, const BitString& y, std::size_t t, const LookAheadSchemes& s);
// Output widths of the one-shot mergers as the planner states them.
double l_nipm_width(std::size_t m, std::size_t ell, double eps, double c);
double lt_nipm_width(std::size_t m, std::size_t ell, std::size_t t, double eps, double c);

// Accepts 1..L rows; a short matrix leaves short blocks at every level.
BitString recursive_nipm(const RowMatrix& x, const BitString& y, const NipmParams& p);
// Same map on rows and seed of at most 64 bits packed as integers.
std::uint64_t recursive_nipm_u64(const std::uint64_t* rows, std::size_t count, std::uint64_t y, const NipmParams& p);

using Merger = std::function<BitString(const RowMatrix&, const BitString&)>;
// Merger for one level: (block of rows, seed prefix, 0-based level) -> row.
using LevelMerger = std::function<BitString(const RowMatrix&, const BitString&, std::size_t)>;

struct ComposeLevel {
    std::size_t ell = 0;
    std::size_t seed_len = 0;
};

// Runs the recursive loop with `inner` merging each block. The product of the
// level widths must cover the row count, else ParameterError.
Merger compose_merger(LevelMerger inner, std::vector<ComposeLevel> levels);

// Level merger backed by lt_nipm with p's per-level schemes.
LevelMerger lt_level_merger(const NipmParams& p);
std::vector<ComposeLevel> compose_levels(const NipmParams& p);

void to_json(nlohmann::json& j, const NipmParams& p);
void from_json(const nlohmann::json& j, NipmParams& p);
std::string schedule_table(const NipmParams& p);

}  // namespace nmlab
