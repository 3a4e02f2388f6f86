#include "nmlab/prob.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

using u128 = unsigned __int128;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw DomainCapError(std::string(what) + ": denominator overflow");
    return r;
}

// Bits of v selected by mask, packed toward the low end in order.
std::uint64_t gather_bits(std::uint64_t v, std::uint64_t mask) {
    std::uint64_t out = 0;
    for (int i = 63; i >= 0; --i)
        if ((mask >> i) & 1) out = (out << 1) | ((v >> i) & 1);
    return out;
}

void check_arity(unsigned n) {
    if (n > N_MAX) throw DomainCapError("arity " + std::to_string(n) + " exceeds N_MAX = " + std::to_string(N_MAX));
}

std::uint64_t to_u64(const BigInt& v, const char* what) {
    if (v < 0 || v > BigInt(std::numeric_limits<std::uint64_t>::max()))
        throw DomainCapError(std::string(what) + ": value does not fit 64 bits");
    return v.convert_to<std::uint64_t>();
}

}  // namespace

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

Dist::Dist(unsigned arity, std::vector<std::uint64_t> counts, std::uint64_t den)
    : n_(arity), den_(den), c_(std::move(counts)) {
    check_arity(arity);
    if (c_.size() != (std::size_t{1} << arity)) throw ShapeError("weight vector size must be 2^arity");
    if (den_ == 0) throw ShapeError("zero denominator");
    u128 s = 0;
    for (auto c : c_) s += c;
    if (s != den_) throw ShapeError("weights do not sum to one");
}

Dist Dist::uniform(unsigned arity) {
    check_arity(arity);
    return Dist(arity, std::vector<std::uint64_t>(std::size_t{1} << arity, 1), std::uint64_t{1} << arity);
}

Dist Dist::point(unsigned arity, std::uint64_t v) {
    check_arity(arity);
    std::vector<std::uint64_t> c(std::size_t{1} << arity, 0);
    c.at(v) = 1;
    return Dist(arity, std::move(c), 1);
}

Dist Dist::flat(unsigned arity, const std::vector<std::uint64_t>& support) {
    check_arity(arity);
    if (support.empty()) throw ShapeError("flat source with empty support");
    std::vector<std::uint64_t> c(std::size_t{1} << arity, 0);
    for (auto v : support) {
        if (c.at(v)) throw ShapeError("flat source support has a repeated point");
        c[v] = 1;
    }
    return Dist(arity, std::move(c), support.size());
}

Dist Dist::from_weights(unsigned arity, const std::vector<Rational>& w) {
    check_arity(arity);
    if (w.size() != (std::size_t{1} << arity)) throw ShapeError("weight vector size must be 2^arity");
    BigInt l = 1;
    for (const auto& r : w) {
        if (r < 0) throw ShapeError("negative weight");
        l = boost::multiprecision::lcm(l, denominator(r));
    }
    std::uint64_t den = to_u64(l, "from_weights");
    std::vector<std::uint64_t> c(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) c[i] = to_u64(numerator(w[i]) * (l / denominator(w[i])), "from_weights");
    return Dist(arity, std::move(c), den);
}

Rational Dist::prob(std::uint64_t v) const { return Rational(BigInt(c_.at(v)), BigInt(den_)); }

std::size_t Dist::support_size() const {
    return static_cast<std::size_t>(std::count_if(c_.begin(), c_.end(), [](auto c) { return c != 0; }));
}

bool operator==(const Dist& a, const Dist& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        if (u128(a.c_[i]) * b.den_ != u128(b.c_[i]) * a.den_) return false;
    return true;
}

std::string Dist::to_csv() const {
    std::ostringstream os;
    os << "value,numerator,denominator\n";
    for (std::size_t v = 0; v < c_.size(); ++v) {
        if (!c_[v]) continue;
        std::uint64_t g = std::gcd(c_[v], den_);
        os << BitString::from_uint(v, n_).to_binary() << ',' << c_[v] / g << ',' << den_ / g << '\n';
    }
    return os.str();
}

Dist Dist::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::pair<std::string, Rational>> rows;
    bool header = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header && line.rfind("value", 0) == 0) {
            header = false;
            continue;
        }
        header = false;
        auto a = line.find(','), b = line.find(',', a + 1);
        if (a == std::string::npos || b == std::string::npos) throw ShapeError("csv row needs value,numerator,denominator: " + line);
        rows.emplace_back(line.substr(0, a), Rational(BigInt(line.substr(a + 1, b - a - 1)), BigInt(line.substr(b + 1))));
    }
    if (rows.empty()) throw ShapeError("csv holds no weights");
    unsigned n = static_cast<unsigned>(rows.front().first.size());
    check_arity(n);
    std::vector<Rational> w(std::size_t{1} << n, Rational(0));
    for (auto& [v, p] : rows) {
        if (v.size() != n) throw ShapeError("csv values differ in length");
        w[BitString::parse_binary(v).to_uint()] += p;
    }
    return from_weights(n, w);
}

std::string Dist::to_json() const {
    nlohmann::ordered_json j;
    j["arity"] = n_;
    j["denominator"] = den_;
    auto& ws = j["weights"] = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < c_.size(); ++v)
        if (c_[v]) ws.push_back({{"value", BitString::from_uint(v, n_).to_binary()}, {"numerator", c_[v]}});
    return j.dump(2);
}

Dist Dist::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    unsigned n = j.at("arity").get<unsigned>();
    check_arity(n);
    std::uint64_t den = j.at("denominator").get<std::uint64_t>();
    std::vector<std::uint64_t> c(std::size_t{1} << n, 0);
    for (const auto& w : j.at("weights")) {
        auto v = BitString::parse_binary(w.at("value").get<std::string>());
        if (v.size() != n) throw ShapeError("json weight value has the wrong length");
        c[v.to_uint()] += w.at("numerator").get<std::uint64_t>();
    }
    return Dist(n, std::move(c), den);
}

double FlatSource::min_entropy() const { return std::log2(static_cast<double>(support.size())); }

JointDist::JointDist(std::vector<Var> vars, std::vector<std::uint64_t> counts, std::uint64_t den)
    : vars_(std::move(vars)), den_(den), c_(std::move(counts)) {
    for (const auto& v : vars_) total_ += v.arity;
    check_arity(total_);
    if (c_.size() != (std::size_t{1} << total_)) throw ShapeError("joint weight vector size must be 2^total_arity");
    u128 s = 0;
    for (auto c : c_) s += c;
    if (den_ == 0 || s != den_) throw ShapeError("joint weights do not sum to one");
    unsigned acc = total_;
    for (const auto& v : vars_) {
        acc -= v.arity;
        shift_.push_back(acc);
    }
}

JointDist JointDist::independent(const std::vector<std::pair<std::string, Dist>>& parts) {
    std::vector<Var> vars;
    unsigned total = 0;
    std::uint64_t den = 1;
    for (const auto& [name, d] : parts) {
        vars.push_back({name, d.arity()});
        total += d.arity();
        den = checked_mul(den, d.den(), "independent joint");
    }
    check_arity(total);
    std::vector<std::uint64_t> c{1};
    for (const auto& [name, d] : parts) {
        std::vector<std::uint64_t> next(c.size() << d.arity(), 0);
        for (std::size_t a = 0; a < c.size(); ++a) {
            if (!c[a]) continue;
            for (std::size_t b = 0; b < d.counts().size(); ++b)
                next[(a << d.arity()) | b] = c[a] * d.counts()[b];
        }
        c = std::move(next);
    }
    return JointDist(std::move(vars), std::move(c), den);
}

std::size_t JointDist::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    throw LookupError("unknown variable '" + name + "'");
}

std::uint64_t JointDist::field(std::uint64_t o, std::size_t i) const {
    return (o >> shift_[i]) & ((std::uint64_t{1} << vars_[i].arity) - 1);
}

JointDist JointDist::marginal(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    std::vector<Var> vars;
    unsigned total = 0;
    for (const auto& n : names) {
        idx.push_back(index_of(n));
        vars.push_back(vars_[idx.back()]);
        total += vars.back().arity;
    }
    std::vector<std::uint64_t> c(std::size_t{1} << total, 0);
    for (std::uint64_t o = 0; o < c_.size(); ++o) {
        if (!c_[o]) continue;
        std::uint64_t key = 0;
        for (auto i : idx) key = (key << vars_[i].arity) | field(o, i);
        c[key] += c_[o];
    }
    return JointDist(std::move(vars), std::move(c), den_);
}

Dist JointDist::to_dist() const { return Dist(total_, c_, den_); }

Dist pushforward(const std::function<std::uint64_t(const std::vector<std::uint64_t>&)>& f,
                 const JointDist& j, unsigned out_arity) {
    check_arity(out_arity);
    std::vector<std::uint64_t> out(std::size_t{1} << out_arity, 0);
    std::vector<std::uint64_t> vals(j.vars().size());
    for (std::uint64_t o = 0; o < j.counts().size(); ++o) {
        if (!j.counts()[o]) continue;
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = j.field(o, i);
        std::uint64_t y = f(vals);
        if (y >= out.size()) throw ShapeError("pushforward map produced a value wider than out_arity");
        out[y] += j.counts()[o];
    }
    return Dist(out_arity, std::move(out), j.den());
}

Dist pushforward_bits(const std::function<BitString(const std::vector<BitString>&)>& f,
                      const JointDist& j, unsigned out_arity) {
    std::vector<BitString> args(j.vars().size());
    return pushforward(
        [&](const std::vector<std::uint64_t>& v) {
            for (std::size_t i = 0; i < v.size(); ++i) args[i] = BitString::from_uint(v[i], j.vars()[i].arity);
            BitString r = f(args);
            if (r.size() != out_arity) throw ShapeError("pushforward map returned the wrong length");
            return r.to_uint();
        },
        j, out_arity);
}

Rational stat_distance(const Dist& a, const Dist& b) {
    if (a.arity() != b.arity()) throw ShapeError("stat_distance of distributions with different arity");
    const auto &ca = a.counts(), &cb = b.counts();
    const std::uint64_t da = a.den(), db = b.den();
    // Terms are below 2^(bits(da)+bits(db)); the sum adds at most arity+1 bits.
    unsigned need = static_cast<unsigned>(std::bit_width(da) + std::bit_width(db)) + a.arity() + 1;
    BigInt total;
    if (need < 127) {
        u128 s = 0;
        for (std::size_t i = 0; i < ca.size(); ++i) {
            u128 x = u128(ca[i]) * db, y = u128(cb[i]) * da;
            s += x > y ? x - y : y - x;
        }
        total = BigInt(static_cast<std::uint64_t>(s >> 64));
        total <<= 64;
        total += BigInt(static_cast<std::uint64_t>(s));
    } else {
        for (std::size_t i = 0; i < ca.size(); ++i) {
            BigInt x = BigInt(ca[i]) * db, y = BigInt(cb[i]) * da;
            total += x > y ? BigInt(x - y) : BigInt(y - x);
        }
    }
    return Rational(total, BigInt(2) * da * db);
}

double min_entropy(const Dist& d) {
    auto mx = *std::max_element(d.counts().begin(), d.counts().end());
    return -std::log2(static_cast<double>(mx) / static_cast<double>(d.den()));
}

Rational avg_cond_guess_prob(const JointDist& j, const std::string& target, const std::vector<std::string>& given) {
    std::vector<std::string> names = given;
    names.push_back(target);
    JointDist m = j.marginal(names);
    unsigned ta = m.vars().back().arity;
    std::size_t groups = std::size_t{1} << (m.total_arity() - ta);
    std::vector<std::uint64_t> best(groups, 0);
    for (std::uint64_t o = 0; o < m.counts().size(); ++o) {
        auto& b = best[o >> ta];
        b = std::max(b, m.counts()[o]);
    }
    BigInt s = 0;
    for (auto b : best) s += b;
    return Rational(s, BigInt(m.den()));
}

double avg_cond_min_entropy(const JointDist& j, const std::string& target, const std::vector<std::string>& given) {
    return -std::log2(to_double(avg_cond_guess_prob(j, target, given)));
}

Dist xor_sum(const std::vector<Dist>& dists) {
    if (dists.empty()) throw ShapeError("xor_sum needs at least one distribution");
    Dist acc = dists.front();
    for (std::size_t k = 1; k < dists.size(); ++k) {
        const Dist& d = dists[k];
        if (d.arity() != acc.arity()) throw ShapeError("xor_sum of distributions with different arity");
        std::uint64_t den = checked_mul(acc.den(), d.den(), "xor_sum");
        std::vector<std::uint64_t> c(acc.counts().size(), 0);
        for (std::size_t a = 0; a < c.size(); ++a) {
            if (!acc.count(a)) continue;
            for (std::size_t b = 0; b < c.size(); ++b)
                if (d.count(b)) c[a ^ b] += acc.count(a) * d.count(b);
        }
        acc = Dist(acc.arity(), std::move(c), den);
    }
    return acc;
}

Rational twise_deviation(const Dist& d, unsigned t) {
    const unsigned r = d.arity();
    if (t > r) throw ParameterError("t<=r", "twise_deviation order exceeds the number of coordinates");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> support;
    for (std::uint64_t v = 0; v < d.counts().size(); ++v)
        if (d.count(v)) support.emplace_back(v, d.count(v));

    Rational worst = 0;
    std::vector<std::uint64_t> cell;
    // Subsets S of the coordinates with 1 <= |S| <= t, as bit masks over the outcome value.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << r); ++mask) {
        unsigned s = static_cast<unsigned>(std::popcount(mask));
        if (s > t) continue;
        cell.assign(std::size_t{1} << s, 0);
        for (auto [v, c] : support) cell[gather_bits(v, mask)] += c;
        // |count/den - 2^-s| = |count*2^s - den| / (den*2^s)
        std::uint64_t num = 0;
        for (auto c : cell) {
            u128 scaled = u128(c) << s;
            u128 diff = scaled > d.den() ? scaled - d.den() : d.den() - scaled;
            num = std::max<std::uint64_t>(num, static_cast<std::uint64_t>(diff));
        }
        Rational dev(BigInt(num), BigInt(d.den()) << s);
        if (dev > worst) worst = dev;
    }
    return worst;
}

Rational bit_bias(const Dist& d) {
    if (d.arity() != 1) throw ShapeError("bit_bias needs a one-bit distribution");
    Rational p = d.prob(1) - Rational(1, 2);
    return p < 0 ? Rational(-p) : p;
}

}  // namespace nmlab
