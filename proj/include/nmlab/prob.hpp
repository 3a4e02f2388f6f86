#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nmlab/bits.hpp"

namespace nmlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr unsigned N_MAX = 20;

double to_double(const Rational& r);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& s);

// Distribution over {0,1}^n as integer counts over one shared denominator.
// Outcome v is the n-bit string whose integer value (first bit most
// significant) is v.
class Dist {
public:
    Dist() = default;
    Dist(unsigned arity, std::vector<std::uint64_t> counts, std::uint64_t den);

    static Dist uniform(unsigned arity);
    static Dist point(unsigned arity, std::uint64_t v);
    static Dist flat(unsigned arity, const std::vector<std::uint64_t>& support);
    // Arbitrary rational weights; the shared denominator is their lcm.
    static Dist from_weights(unsigned arity, const std::vector<Rational>& w);

    unsigned arity() const { return n_; }
    std::uint64_t den() const { return den_; }
    std::uint64_t count(std::uint64_t v) const { return c_[v]; }
    const std::vector<std::uint64_t>& counts() const { return c_; }
    Rational prob(std::uint64_t v) const;
    std::size_t support_size() const;

    std::string to_csv() const;
    static Dist from_csv(const std::string& text);
    std::string to_json() const;
    static Dist from_json(const std::string& text);

    friend bool operator==(const Dist&, const Dist&);

private:
    unsigned n_ = 0;
    std::uint64_t den_ = 1;
    std::vector<std::uint64_t> c_;
};

// Flat source: uniform over a nonempty support.
struct FlatSource {
    unsigned arity = 0;
    std::vector<std::uint64_t> support;  // sorted, distinct

    Dist dist() const { return Dist::flat(arity, support); }
    double min_entropy() const;
};

// Joint distribution over labelled variables. The outcome index concatenates
// the variables in declaration order, the first one most significant.
class JointDist {
public:
    struct Var {
        std::string name;
        unsigned arity;
    };

    JointDist(std::vector<Var> vars, std::vector<std::uint64_t> counts, std::uint64_t den);

    // Product of independent distributions.
    static JointDist independent(const std::vector<std::pair<std::string, Dist>>& parts);

    const std::vector<Var>& vars() const { return vars_; }
    unsigned total_arity() const { return total_; }
    std::uint64_t den() const { return den_; }
    const std::vector<std::uint64_t>& counts() const { return c_; }

    std::size_t index_of(const std::string& name) const;
    // Value of variable i inside outcome `o`.
    std::uint64_t field(std::uint64_t o, std::size_t i) const;

    JointDist marginal(const std::vector<std::string>& names) const;
    Dist to_dist() const;

private:
    std::vector<Var> vars_;
    std::vector<unsigned> shift_;
    unsigned total_ = 0;
    std::uint64_t den_ = 1;
    std::vector<std::uint64_t> c_;
};

// Exact image of `j` under f; f receives one value per variable.
Dist pushforward(const std::function<std::uint64_t(const std::vector<std::uint64_t>&)>& f,
                 const JointDist& j, unsigned out_arity);
// Same, with bit-string arguments and result.
Dist pushforward_bits(const std::function<BitString(const std::vector<BitString>&)>& f,
                      const JointDist& j, unsigned out_arity);

Rational stat_distance(const Dist& a, const Dist& b);
double min_entropy(const Dist& d);
// -log2 E_w[max_x Pr[X=x | W=w]], exactly Σ_w max_x Pr[X=x, W=w] inside the log.
double avg_cond_min_entropy(const JointDist& j, const std::string& target,
                            const std::vector<std::string>& given);
Rational avg_cond_guess_prob(const JointDist& j, const std::string& target,
                             const std::vector<std::string>& given);
Dist xor_sum(const std::vector<Dist>& dists);
Rational twise_deviation(const Dist& d, unsigned t);

// Distance of a 1-bit distribution from uniform: |Pr[1] - 1/2|.
Rational bit_bias(const Dist& d);

}  // namespace nmlab
