#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "nmlab/bits.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/sext.hpp"

namespace nmlab {

// Merger keyed by a weak (n,k)-source. The seed y is turned into z = ext1(y, w)
// with w = slice(row_1, d1); rows are re-extracted with v = slice(z, d_prime)
// and the recursive merger runs on them with z as its seed.
struct IpmParams {
    std::size_t n = 0;        // weak-seed length
    double k = 0;             // weak-seed min-entropy
    std::size_t L = 0;
    std::size_t m = 0;        // input row width
    std::size_t t = 1;
    double eps = 0.25;
    std::size_t d = 0;        // width of z
    std::size_t d1 = 0;       // slice of row 1 keying ext1
    std::size_t d_prime = 0;  // slice of z keying ext2
    std::size_t m_prime = 0;  // width of the re-extracted rows
    double c = 4;
    double c_prime = 1;
    double k_floor = 0;       // 2 c ell log(m/eps) (t+2)^(r+2)
    double m_nominal = 0;     // (0.9/t)^(r+1)(m - c ell (t+1) r log(m/eps) - c'(t+2) log(n/eps))
    ExtScheme ext1;           // y -> z, seed w
    ExtScheme ext2;           // row -> v-bar row, seed v
    NipmParams inner;         // L rows of width m_prime, seed z
    std::string not_instantiated;

    bool instantiated() const { return not_instantiated.empty() && inner.instantiated(); }
    std::size_t out_width() const { return inner.out_width(); }
};

struct IpmRequest {
    std::size_t n = 0;
    double k = 0;
    std::size_t L = 0;
    std::size_t ell = 0;
    std::size_t t = 1;
    std::size_t m = 0;
    double eps = 0.25;
    double c = 4;
    double c_prime = 1;
    double c_seed = 2;
    unsigned floor = 8;
};

// Nominal planner; d = 0.8k rounded down to a whole byte.
IpmParams plan_ipm(const IpmRequest& q);
// Hand-sized instance; `inner` must read rows of width m_prime and a d-bit seed.
IpmParams desk_ipm(std::size_t n, double k, std::size_t m, std::size_t d1, std::size_t d, std::size_t d_prime,
                   std::size_t m_prime, const NipmParams& inner, double eps = 0.25);
void validate(const IpmParams& p);

BitString ipm_weak(const RowMatrix& x, const BitString& y, const IpmParams& p);
std::uint64_t ipm_weak_u64(const std::uint64_t* rows, std::size_t count, std::uint64_t y, const IpmParams& p);

void to_json(nlohmann::json& j, const IpmParams& p);

}  // namespace nmlab
