#pragma once

// Experiment suites shared by the command line and the acceptance runner.
// Every suite returns a report whose "pass" field is true iff each asserted
// bound held; "rows" is a flat per-case table suitable for CSV.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/cbreak.hpp"
#include "nmlab/msrc.hpp"
#include "nmlab/nmx.hpp"
#include "nmlab/pamp.hpp"
#include "nmlab/rng.hpp"

namespace nmlab {

struct SextSuiteConfig {
    std::size_t n = 12, k = 6, m = 2, d = 16;
    std::size_t sources = 200;
    std::uint64_t seed = 1;
};
nlohmann::json sext_suite(const SextSuiteConfig& c);

struct MergerSuiteConfig {
    std::size_t instances = 12;
    bool tampered = true;  // l_nipm, lt_nipm, recursive_nipm families
    bool shared = true;    // ipm_weak family
    std::size_t samples = 30;  // flat sources per component-error estimate
    std::uint64_t seed = 1;
};
nlohmann::json merger_suite(const MergerSuiteConfig& c);

// Flip-flop bound: the measured strong errors of every extractor step on the
// b = 0 and b = 1 paths, summed. Roles reading x are charged one leaked a-bit
// intermediate; roles reading the seed are charged the same.
struct FlipFlopLedger {
    double ext_x = 0, ext_y = 0, ext_ty = 0, ext_wide = 0;
    double total() const { return 2 * ext_x + ext_y + ext_ty + 2 * ext_wide; }
};
FlipFlopLedger flip_flop_ledger(const CBreakParams& p, CounterRng& rng, std::size_t samples);

// n 2^(-L_adv / c_adv): the distinctness error at which the advice length
// equals c_adv log(n/eps).
double adv_eps_target(const CBreakParams& p, double c_adv = 2);

// Pr over X of equal advice, averaged over every unordered seed pair and
// over `sources` flat sources drawn at the spec's (n, k).
nlohmann::json adv_distinctness(const CBreakSpec& spec, std::size_t sources, std::uint64_t seed);

// Every map on the d_ff-bit seed with b != b', and separately the
// fixed-point-free ones; the b = b', Y' = Y control must sit near 1 - 2^-m'.
nlohmann::json flip_flop_contract(const CBreakSpec& spec, std::size_t sources, std::size_t samples, std::uint64_t seed);

struct CbreakSuiteConfig {
    std::size_t adv_sources = 20;
    std::size_t ff_sources = 2;
    std::size_t samples = 30;
    std::uint64_t seed = 1;
};
// n = 16, k = 8, d = 8, four RS symbols over GF(16).
CBreakSpec adv_micro_spec();
// n = 10, k = 8, d_ff = 2, 1-bit intermediates and output.
CBreakSpec ff_micro_spec();
nlohmann::json cbreak_suite(const CbreakSuiteConfig& c);

struct NmxSuiteConfig {
    std::size_t trials = 20000;  // per adversary, split evenly into fit and test halves
    std::size_t samples = 30;
    std::uint64_t seed = 1;
};
// 16-bit source, 8-bit seed, 12 advice rows, 1-bit output.
NmDeskSpec nmx_micro_spec();
nlohmann::json nmx_suite(const NmxSuiteConfig& c);

// Serializable inputs of the multi-source experiment.
struct MultiSpec {
    std::size_t C = 4, n = 192, r = 101, L = 4, t = 2, bad = 10;
    double alpha = 0.001, gamma = 0, c_bias = 1, eps = 0.25;
    std::size_t ipm_m = 8, ipm_d1 = 4, ipm_d = 16, ipm_d_prime = 4, ipm_m_prime = 6;
    std::size_t ell = 2, alt_width = 2, d1_seed = 2;
    std::vector<std::size_t> m_sched{4, 2};
    std::uint64_t generator_seed = 7;
};
MultiParams build_multi(const MultiSpec& s);
void to_json(nlohmann::json& j, const MultiSpec& s);
void from_json(const nlohmann::json& j, MultiSpec& s);
nlohmann::json multi_suite(const MultiSpec& s, std::size_t trials, std::uint64_t seed);

// Serializable inputs of the privacy-amplification experiment.
struct PampSpec {
    NmDeskSpec nmx;
    double k = 48;
    std::size_t s = 16;
    unsigned mac_bits = 16;
    double c_loss = 2;
    std::uint64_t source_seed = 11;
};
PampSpec pamp_default_spec();
PampParams build_pamp(const PampSpec& s);
void to_json(nlohmann::json& j, const PampSpec& s);
void from_json(const nlohmann::json& j, PampSpec& s);

// One adversary; the budget depends on its round (see pamp_budget).
nlohmann::json pamp_run(const PampParams& p, const SubcubeSource& src, const Adversary& adv, std::size_t trials,
                        std::uint64_t seed, std::vector<Transcript>* keep = nullptr);
// passive: zero failures; round-2 only: accept rate <= mac bound + 3 sigma;
// round-1 substitution: success <= eps_out + mac bound + CI.
nlohmann::json pamp_battery(const PampSpec& s, std::size_t trials, std::uint64_t seed);

// Flat array of objects -> CSV with the union of keys as header.
std::string rows_to_csv(const nlohmann::json& rows);

}  // namespace nmlab
