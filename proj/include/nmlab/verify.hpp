#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "nmlab/altx.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/prob.hpp"
#include "nmlab/rng.hpp"
#include "nmlab/sext.hpp"

namespace nmlab {

// Seed map on {0,1}^d given by its table. A tampering function has no fixed points.
struct TamperFn {
    unsigned d = 0;
    std::vector<std::uint64_t> table;

    std::uint64_t operator()(std::uint64_t y) const { return table[y]; }
    bool fixed_point_free() const;
};

// Throws ParameterError if the table has a fixed point or a value outside {0,1}^d.
TamperFn make_tamper(unsigned d, std::vector<std::uint64_t> table);

// Every fixed-point-free table on d <= 3 bits exactly once, in lexicographic order.
class TamperEnumerator {
public:
    explicit TamperEnumerator(unsigned d);
    bool next(TamperFn& out);

private:
    unsigned d_;
    std::vector<std::uint64_t> digits_;  // digits_[y] in [0, 2^d - 2]; value skips y
    bool done_ = false;
};

// (2^d - 1)^(2^d).
BigInt tamper_count(unsigned d);
// Each entry uniform over the 2^d - 1 values other than its index.
TamperFn sample_tamper(CounterRng& rng, unsigned d);

using ExtFn = std::function<std::uint64_t(std::uint64_t x, std::uint64_t y)>;

// |(f(X,S), S) - (U_m, S)| with S uniform on d bits.
Rational strong_distance(const ExtFn& f, const Dist& source, unsigned d, unsigned m);
Rational strong_distance(const ExtScheme& s, const Dist& source);

// Strong distance of a scheme over flat sources through the Walsh-Hadamard
// transform of the support indicator. Valid because ext is linear in x.
class LinearStrongOracle {
public:
    explicit LinearStrongOracle(const ExtScheme& s);
    Rational distance(const FlatSource& src) const;

private:
    ExtScheme s_;
    std::vector<std::uint32_t> masks_;  // per seed, per nonzero v: parity mask on x
};

// |(f(X,Y), g(X,A_1(Y)), ..., g(X,A_t(Y)), Y) - (U_m, g(...), ..., Y)|.
// Maps need not be fixed-point free; g = f gives the non-malleability distance.
Rational tamper_distance(const ExtFn& f, const ExtFn& g, const Dist& x, const Dist& y,
                         const std::vector<TamperFn>& maps, unsigned m);
// Seed uniform on d bits, every map a tampering function.
Rational nm_distance(const ExtFn& f, const Dist& source, unsigned d, unsigned m, const std::vector<TamperFn>& a);
Rational nm_distance(const ExtFn& f, const Dist& source, unsigned d, unsigned m, const TamperFn& a);

enum class SeedMode { tampered, shared };

// Rows of X and of its t tampered copies as an explicit weighted table over
// the instance randomness, plus the seed law.
struct MergerInstance {
    std::size_t L = 0, m = 0, t = 0, d = 0;
    std::size_t h = 0;  // witness row, 0-based
    SeedMode mode = SeedMode::tampered;
    unsigned x_bits = 0;
    std::vector<std::uint64_t> rows;      // outcome-major: outcome o, copy g, row i at (o*(t+1)+g)*L+i
    std::vector<std::uint64_t> x_weight;  // per outcome
    std::uint64_t x_den = 1;
    Dist seed;                            // law of Y on d bits
    std::vector<TamperFn> tampers;        // tampered mode: Y^g = tampers[g-1](Y)
    Rational witness_distance;            // |(X_h, X_h^1..) - (U_m, X_h^1..)|
    Rational row_slack;                   // max_i |X_i - U_m|
    double seed_entropy = 0;              // H_inf(Y)
    std::uint64_t build_seed = 0;

    std::size_t outcomes() const { return x_weight.size(); }
    const std::uint64_t* matrix(std::size_t o, std::size_t g) const { return rows.data() + (o * (t + 1) + g) * L; }
    nlohmann::json describe() const;
};

struct InstanceSpec {
    std::size_t L = 2, m = 4, t = 1, d = 4;
    std::size_t h = 0;
    SeedMode mode = SeedMode::tampered;
    unsigned seed_k = 0;          // shared mode: Y flat with 2^seed_k support; 0 means uniform
    std::uint64_t slack = 0;      // witness row flat on 2^m - slack values
    bool perturb = false;         // tampered non-witness rows get an independent offset instead of a copy
    std::uint64_t seed = 1;
};

// Witness row X_h and a shared Z are uniform; other rows are Z xor constants.
// Tampered copies read Z only at the witness row and copy (or offset) X elsewhere.
MergerInstance build_instance(const InstanceSpec& spec);
// L = 2, t = 1: X^1_1 constant and X^1_2 = X_1 xor X_2 xor c, so the XOR of rows is copied.
MergerInstance xor_counterexample(std::size_t m, std::size_t d, std::uint64_t seed);
// Recomputes the recorded slacks; throws ShapeError on any disagreement.
void check_instance(const MergerInstance& inst);

using MergerFn = std::function<std::uint64_t(const std::uint64_t* rows, std::size_t count, std::uint64_t y)>;

// Tampered mode: E_y |(M(X,y), M(X^1,A_1 y), ...) - (U, M(X^1,A_1 y), ...)|, i.e. conditioned on all seeds.
// Shared mode: one Y feeds every copy and is not revealed.
Rational merger_distance(const MergerFn& merger, std::size_t out_width, const MergerInstance& inst);

// Max exact strong distance over `samples` flat (n_in, floor(k))-sources.
double component_error(const ExtScheme& s, double k, CounterRng& rng, std::size_t samples);
// Largest of the three look-ahead roles, each at its width minus one leaked output.
double look_ahead_error(const LookAheadSchemes& s, CounterRng& rng, std::size_t samples);

// Error ledger of a merger: eps_stream carries witness slack plus per-merge
// extractor losses, eps1_stream carries row slack; total is their sum.
struct BoundLedger {
    std::vector<double> eps_stream;
    std::vector<double> eps1_stream;
    std::vector<double> component;  // per level
    double total = 0;
    bool vacuous() const { return total >= 1; }
};

// One merge of `rows` rows: max(1, 2 rows - 2) component losses.
double look_ahead_loss(std::size_t rows, double eps_c);
// Level i: e_i = ell_i e_{i-1} + loss_i with e_0 = witness slack; f_i = ell_i f_{i-1} with f_0 = row slack.
BoundLedger nipm_bound(const NipmParams& p, const std::vector<double>& eps_c, double witness, double rows);
BoundLedger single_merge_bound(std::size_t rows, double eps_c, double witness, double row_slack);

}  // namespace nmlab
