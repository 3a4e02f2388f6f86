#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/bits.hpp"
#include "nmlab/cbreak.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/sext.hpp"

namespace nmlab {

enum class MergerMode { basic, bootstrapped };

std::string to_string(MergerMode m);
MergerMode parse_merger_mode(const std::string& s);

// Planner inputs. Constants the construction leaves unnamed are explicit here
// and recorded in every emitted schedule.
struct NmRequest {
    std::size_t n = 0;
    double k = 0;
    double eps_out = 0.01;
    std::size_t t = 1;
    MergerMode mode = MergerMode::basic;
    double C = 2;        // eps' = C eps1 log(n/eps1); eps1 = eps'/(2 C n)
    double c_adv = 2;    // L = c_adv log(n/eps1)
    double C_adv = 2;    // advice seed charge
    double C_ff = 2;     // flip-flop seed charge
    double delta = 0.5;  // flip-flop output m' = delta k
    double c = 4;        // merger entropy constant
    double c_seed = 2;   // alternation width = c_seed log(m/eps)
    unsigned floor = 8;
};

// Hand-sized pipeline for execution and oracles.
struct NmDeskSpec {
    CBreakSpec cb;
    std::size_t t = 1;
    std::size_t d2 = 0, d3 = 0, d_prime = 0, m_dprime = 0;
    std::size_t ell = 2;
    std::size_t alt_width = 0, d1_seed = 0;
    std::vector<std::size_t> m_sched;
    double eps = 0.25;
};

struct NmExtParams {
    std::size_t n = 0, d = 0, m = 0, t = 1;
    double k = 0;
    double eps1 = 0, eps_out = 0, eps_prime = 0;  // eps_prime = C eps1 log(n/eps1)
    std::size_t L = 0;                            // advice length
    std::size_t d1 = 0, d2 = 0, d3 = 0, d_prime = 0;
    std::size_t m_prime = 0, m_dprime = 0;        // flip-flop rows, merged rows
    std::size_t ell = 0, r = 0;
    MergerMode mode = MergerMode::basic;
    double m_t_nominal = 0;                        // (delta k - ell t r log(n/eps))/(2t)^(log L/log ell)
    double d_basic = 0, d_boot = 0;                // merger seed lengths of both modes
    std::optional<NmRequest> request;
    std::optional<NmDeskSpec> desk;

    CBreakParams cb;
    ExtScheme ext1;  // y -> y-bar (d' bits), seed slice(v_1, d2)
    ExtScheme ext2;  // v_i -> z_i (m'' bits), seed slice(y-bar, d3)
    NipmParams nipm;
    std::vector<NipmParams> boot;        // bootstrapped mode: inner merger per outer level
    std::vector<ComposeLevel> boot_levels;
    std::string not_instantiated;

    bool instantiated() const { return not_instantiated.empty(); }
};

// ParameterError names the first failing constraint.
NmExtParams plan_params(const NmRequest& q);
NmExtParams desk_nmext(const NmDeskSpec& s);

struct NmTrace {
    BitString w, y1;
    std::vector<BitString> v;
    BitString vbar1, ybar, ybar1;
    std::vector<BitString> z;
    BitString out;
};

NmTrace nm_ext_trace(const BitString& x, const BitString& y, const NmExtParams& p);
BitString nm_ext(const BitString& x, const BitString& y, const NmExtParams& p);
// The pipeline with the t-adversary merger schedule; identical to nm_ext when p.t = 1.
BitString t_nm_ext(const BitString& x, const BitString& y, const NmExtParams& p);

void to_json(nlohmann::json& j, const NmExtParams& p);
// Rebuilds from the embedded request or desk spec; unknown fields are rejected.
NmExtParams nmext_from_json(const nlohmann::json& j);
// Nominal and implemented widths side by side.
std::string nmext_table(const NmExtParams& p);

void to_json(nlohmann::json& j, const NmRequest& q);
void from_json(const nlohmann::json& j, NmRequest& q);
void to_json(nlohmann::json& j, const NmDeskSpec& s);
void from_json(const nlohmann::json& j, NmDeskSpec& s);
void to_json(nlohmann::json& j, const CBreakSpec& s);
void from_json(const nlohmann::json& j, CBreakSpec& s);

}  // namespace nmlab
