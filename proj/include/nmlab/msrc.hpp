#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/bits.hpp"
#include "nmlab/ipm.hpp"
#include "nmlab/prob.hpp"

namespace nmlab {

struct MultiParams {
    std::size_t C = 0;           // sources consumed by the generator
    std::size_t n = 0;           // bits per source
    double k = 0;
    std::size_t t = 2;           // independence order
    std::size_t r = 0;           // output bits, odd
    double log2_r_nominal = 0;   // (3/alpha) log n; the nominal r = n^(3/alpha) is recorded only
    std::size_t L = 0;           // matrix rows
    double alpha = 0.1;
    double gamma = 0;
    double c_bias = 1;           // constant of the majority bias bound
    double eps = 0.25;
    IpmParams ipm;

    // ceil(r^(1/2 - alpha)).
    std::size_t bad_budget() const;
};

void validate(const MultiParams& p);
// max of the two entropy floors c log(k/eps) and c log(n log t / eps).
double multi_entropy_floor(std::size_t n, double k, std::size_t t, double eps, double c);

// r matrices plus the indices whose witness rows are declared uniform.
struct MatrixSeq {
    std::vector<RowMatrix> matrices;
    std::vector<std::size_t> good;     // sorted
    std::vector<std::size_t> witness;  // witness row per good index
};

class MatrixSeqGenerator {
public:
    virtual ~MatrixSeqGenerator() = default;
    virtual std::size_t sources() const = 0;
    virtual MatrixSeq generate(const std::vector<BitString>& sources) const = 0;
    // Which properties the generator guarantees, for reports.
    virtual std::vector<std::string> guarantees() const = 0;
};

// Test double: bad indices get the all-zero matrix; a good index g gets a
// witness row copied from its own disjoint chunk of the concatenated sources
// and other rows from a keyed hash of the sources.
class SyntheticGenerator : public MatrixSeqGenerator {
public:
    SyntheticGenerator(const MultiParams& p, std::size_t bad_count, std::uint64_t seed);

    std::size_t sources() const override { return C_; }
    MatrixSeq generate(const std::vector<BitString>& sources) const override;
    std::vector<std::string> guarantees() const override;

    const std::vector<std::size_t>& bad() const { return bad_; }
    const std::vector<std::size_t>& good() const { return good_; }

private:
    std::size_t C_, n_, r_, L_, m_;
    std::uint64_t key_;
    std::vector<std::size_t> bad_, good_, witness_;
};

SyntheticGenerator synthetic_generator(const MultiParams& p, std::size_t bad_count, std::uint64_t seed);

// Bit i is the first output bit of ipm_weak(matrix_i, sources[C]).
BitString reduce(const std::vector<BitString>& sources, const MatrixSeqGenerator& g, const MultiParams& p);
bool majority(const BitString& z);
bool multi_ext(const std::vector<BitString>& sources, const MatrixSeqGenerator& g, const MultiParams& p);

// c (log t / t + r^-alpha + gamma r^t).
double majority_bias_bound(double t, double r, double alpha, double gamma, double c = 1);
// Pr[majority = 1] when r - bad bits are iid uniform and the bad bits are constant.
Rational majority_one_probability(std::size_t r, std::size_t bad, bool bad_value);

struct MultiReport {
    std::size_t trials = 0;
    std::size_t ones = 0;
    double bias = 0;          // |ones/trials - 1/2|
    double ci99 = 0;          // Hoeffding half-width
    Rational exact_one;       // reference for uniform good bits
    double exact_bias = 0;
    double bound = 0;
    std::uint64_t seed = 0;
    nlohmann::json to_json() const;
};

// Fresh uniform sources per trial from the counter generator under `seed`.
MultiReport run_multi(const MultiParams& p, const SyntheticGenerator& g, std::size_t trials, std::uint64_t seed);

void to_json(nlohmann::json& j, const MultiParams& p);

}  // namespace nmlab
