#include "nmlab/pamp.hpp"

#include <algorithm>
#include <cmath>

#include "nmlab/errors.hpp"
#include "nmlab/gf2.hpp"

namespace nmlab {

namespace {

void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) throw ParameterError(name, detail);
}

BitString flip_last(BitString v) {
    if (!v.empty()) v.set(v.size() - 1, !v.get(v.size() - 1));
    return v;
}

BitString parse_bits(const std::string& s, std::size_t len) {
    BitString b = s.rfind("0b", 0) == 0 ? BitString::parse_binary(s.substr(2)) : BitString::parse_hex(s);
    if (b.size() != len) throw ShapeError("adversary table value has " + std::to_string(b.size()) + " bits, expected " + std::to_string(len));
    return b;
}

}  // namespace

double PampParams::mac_bound() const { return static_cast<double>(mac_blocks()) / std::ldexp(1.0, static_cast<int>(mac_bits)); }

PampParams make_pamp(const NmExtParams& nmx, double k, std::size_t s, unsigned mac_bits, double c_loss) {
    check(nmx.instantiated(), "instantiated", nmx.not_instantiated);
    check(mac_bits >= 1 && mac_bits <= 64, "1<=mac_bits<=64", "MAC field out of range");
    check(nmx.m >= 2 * mac_bits, "m>=2*mac_bits",
          "extractor output " + std::to_string(nmx.m) + " cannot key a MAC over GF(2^" + std::to_string(mac_bits) + ")");
    PampParams p;
    p.n = nmx.n;
    p.k = k;
    p.s = s;
    p.nmx = nmx;
    p.mac_bits = mac_bits;
    const double budget = k - static_cast<double>(s) - std::log2(static_cast<double>(p.n)) - c_loss;
    check(budget >= 1, "k-s-log n-c>=1", "no key length left after the entropy loss");
    const std::size_t key = std::min<std::size_t>({static_cast<std::size_t>(std::floor(budget)), 64, p.n});
    const unsigned block = static_cast<unsigned>(std::max<std::size_t>(key, 8));
    p.final_ext = make_scheme(p.n, 2 * block, key, k, std::min(0.5, std::ldexp(1.0, -static_cast<int>(s))), block);
    p.entropy_loss = k - static_cast<double>(key);
    p.loss_constant = p.entropy_loss - static_cast<double>(s) - std::log2(static_cast<double>(p.n));
    validate(p);
    return p;
}

void validate(const PampParams& p) {
    check(p.nmx.m >= 2 * p.mac_bits, "m>=2*mac_bits", "extractor output too short for the MAC key");
    check(p.final_ext.n_in == p.n, "final_ext.n_in=n", "final extractor reads the shared secret");
    check(static_cast<double>(p.final_ext.m_out) <= p.k - static_cast<double>(p.s), "key<=k-s", "final key longer than k - s");
}

MacKey mac_key(const BitString& z, unsigned bits) {
    if (z.size() < 2 * static_cast<std::size_t>(bits)) throw ParameterError("len(z)>=2*bits", "MAC key needs two field elements");
    return {z.read(0, bits), z.read(bits, bits)};
}

BitString mac_tag(const MacKey& key, unsigned bits, const BitString& msg) {
    const GF2b& f = field(bits);
    const std::size_t blocks = (msg.size() + bits - 1) / bits;
    std::uint64_t acc = 0;
    for (std::size_t i = blocks; i-- > 0;) {
        std::size_t pos = i * bits, n = std::min<std::size_t>(bits, msg.size() - pos);
        acc = f.mul(acc ^ (msg.read(pos, n) << (bits - n)), key.a);
    }
    return BitString::from_uint(acc ^ key.b, bits);
}

nlohmann::json Transcript::to_json() const {
    nlohmann::json j{{"y_sent", y_sent.to_binary()},     {"y_recv", y_recv.to_binary()},
                     {"w_sent", w_sent.to_binary()},     {"w_recv", w_recv.to_binary()},
                     {"tag_sent", tag_sent.to_binary()}, {"tag_recv", tag_recv.to_binary()},
                     {"alice_accept", alice_accept}};
    j["key_a"] = key_a ? nlohmann::json(key_a->to_binary()) : nlohmann::json(nullptr);
    j["key_b"] = key_b ? nlohmann::json(key_b->to_binary()) : nlohmann::json(nullptr);
    return j;
}

Adversary passive_adversary() {
    return {"passive", [](const BitString& y, CounterRng&) { return y; },
            [](const BitString&, const BitString&, const BitString& w, const BitString& t, CounterRng&) {
                return std::make_pair(w, t);
            }};
}

Adversary flip1_adversary() {
    return {"flip1", [](const BitString& y, CounterRng&) { return flip_last(y); },
            [](const BitString&, const BitString&, const BitString& w, const BitString& t, CounterRng&) {
                return std::make_pair(w, t);
            }};
}

Adversary flip2_adversary() {
    return {"flip2", [](const BitString& y, CounterRng&) { return y; },
            [](const BitString&, const BitString&, const BitString& w, const BitString& t, CounterRng&) {
                return std::make_pair(flip_last(w), t);
            }};
}

Adversary replace_adversary() {
    return {"replace",
            [](const BitString& y, CounterRng&) {
                BitString c(y.size());
                return c == y ? flip_last(c) : c;
            },
            [](const BitString&, const BitString&, const BitString& w, const BitString& t, CounterRng&) {
                return std::make_pair(flip_last(w), t);
            }};
}

Adversary random_adversary() {
    return {"random", [](const BitString& y, CounterRng& rng) { return rng.bits(y.size()); },
            [](const BitString&, const BitString&, const BitString& w, const BitString& t, CounterRng& rng) {
                return std::make_pair(rng.bits(w.size()), rng.bits(t.size()));
            }};
}

Adversary table_adversary(const nlohmann::json& spec, const PampParams& p) {
    for (auto it = spec.begin(); it != spec.end(); ++it)
        if (it.key() != "round1" && it.key() != "round2" && it.key() != "name")
            throw ParameterError("unknown field", "adversary table has no field '" + it.key() + "'");
    const std::size_t d = p.nmx.d, wl = p.final_ext.d_seed;
    std::optional<BitString> y_xor, y_set, w_xor, t_xor;
    if (spec.contains("round1")) {
        const auto& r1 = spec.at("round1");
        for (auto it = r1.begin(); it != r1.end(); ++it) {
            if (it.key() == "xor") y_xor = parse_bits(it.value().get<std::string>(), d);
            else if (it.key() == "set") y_set = parse_bits(it.value().get<std::string>(), d);
            else throw ParameterError("unknown field", "round1 has no field '" + it.key() + "'");
        }
    }
    if (spec.contains("round2")) {
        const auto& r2 = spec.at("round2");
        for (auto it = r2.begin(); it != r2.end(); ++it) {
            if (it.key() == "w_xor") w_xor = parse_bits(it.value().get<std::string>(), wl);
            else if (it.key() == "tag_xor") t_xor = parse_bits(it.value().get<std::string>(), p.mac_bits);
            else throw ParameterError("unknown field", "round2 has no field '" + it.key() + "'");
        }
    }
    Adversary a;
    a.name = spec.value("name", std::string("custom"));
    a.round1 = [y_xor, y_set](const BitString& y, CounterRng&) {
        if (y_set) return *y_set;
        return y_xor ? y ^ *y_xor : y;
    };
    a.round2 = [w_xor, t_xor](const BitString&, const BitString&, const BitString& w, const BitString& t, CounterRng&) {
        return std::make_pair(w_xor ? w ^ *w_xor : w, t_xor ? t ^ *t_xor : t);
    };
    return a;
}

Adversary named_adversary(const std::string& name) {
    if (name == "passive") return passive_adversary();
    if (name == "flip1") return flip1_adversary();
    if (name == "flip2") return flip2_adversary();
    if (name == "replace") return replace_adversary();
    if (name == "random") return random_adversary();
    throw ParameterError("adversary", "unknown adversary '" + name + "'");
}

Transcript run_protocol(const BitString& x, const Adversary& adv, const PampParams& p, CounterRng& rng) {
    if (x.size() != p.n) throw ShapeError("run_protocol: secret has " + std::to_string(x.size()) + " bits, expected " + std::to_string(p.n));
    CounterRng alice = rng.fork(1), bob = rng.fork(2), eve = rng.fork(3);
    Transcript tr;
    tr.y_sent = alice.bits(p.nmx.d);
    tr.y_recv = adv.round1(tr.y_sent, eve);
    if (tr.y_recv.size() != p.nmx.d) throw ShapeError("adversary changed the length of y");
    const BitString za = nm_ext(x, tr.y_sent, p.nmx);
    const BitString zb = tr.y_recv == tr.y_sent ? za : nm_ext(x, tr.y_recv, p.nmx);
    tr.w_sent = bob.bits(p.final_ext.d_seed);
    tr.tag_sent = mac_tag(mac_key(zb, p.mac_bits), p.mac_bits, tr.w_sent);
    std::tie(tr.w_recv, tr.tag_recv) = adv.round2(tr.y_sent, tr.y_recv, tr.w_sent, tr.tag_sent, eve);
    if (tr.w_recv.size() != tr.w_sent.size() || tr.tag_recv.size() != tr.tag_sent.size())
        throw ShapeError("adversary changed a message length");
    tr.alice_accept = tr.tag_recv == mac_tag(mac_key(za, p.mac_bits), p.mac_bits, tr.w_recv);
    tr.key_b = ext(p.final_ext, x, tr.w_sent);
    if (tr.alice_accept) tr.key_a = ext(p.final_ext, x, tr.w_recv);
    return tr;
}

nlohmann::json SecurityReport::to_json() const {
    return {{"adversary", adversary},
            {"trials", trials},
            {"attack_successes", attack_successes},
            {"consistent", consistent},
            {"abort_count", abort_count},
            {"accept_rate", accept_rate},
            {"success_rate", success_rate},
            {"key_distance", key_distance},
            {"ci99", ci99},
            {"seed", seed}};
}

BitString SubcubeSource::sample(CounterRng& rng) const {
    BitString x = base;
    for (auto pos : free) x.set(pos, rng.bit());
    return x;
}

SubcubeSource make_subcube(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) throw ParameterError("k<=n", "min-entropy exceeds source length");
    CounterRng rng(seed, 0x5c0b);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng.shuffle(idx);
    SubcubeSource s;
    s.n = n;
    s.free.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.free.begin(), s.free.end());
    s.base = rng.bits(n);
    return s;
}

double hoeffding99(std::size_t trials) { return std::sqrt(std::log(2 / 0.01) / (2.0 * static_cast<double>(trials))); }

SecurityReport security_experiment(const PampParams& p, const Adversary& adv, std::size_t trials, const SubcubeSource& src,
                                   std::uint64_t seed, std::vector<Transcript>* keep) {
    if (trials == 0) throw ParameterError("trials>=1", "need at least one trial");
    SecurityReport rep;
    rep.adversary = adv.name;
    rep.trials = trials;
    rep.seed = seed;
    for (std::size_t i = 0; i < trials; ++i) {
        CounterRng rng(seed, i);
        BitString x = src.sample(rng);
        Transcript tr = run_protocol(x, adv, p, rng);
        if (!tr.alice_accept) ++rep.abort_count;
        else if (*tr.key_a != *tr.key_b) ++rep.attack_successes;
        else ++rep.consistent;
        if (keep) keep->push_back(std::move(tr));
    }
    const double n = static_cast<double>(trials);
    const std::size_t accepted = rep.consistent + rep.attack_successes;
    rep.accept_rate = static_cast<double>(accepted) / n;
    rep.success_rate = static_cast<double>(rep.attack_successes) / n;
    rep.key_distance = accepted ? static_cast<double>(rep.attack_successes) / static_cast<double>(accepted) : 0.0;
    rep.ci99 = hoeffding99(trials);
    return rep;
}

void to_json(nlohmann::json& j, const PampParams& p) {
    j = nlohmann::json{{"n", p.n},
                       {"k", p.k},
                       {"s", p.s},
                       {"mac_bits", p.mac_bits},
                       {"mac_blocks", p.mac_blocks()},
                       {"mac_bound", p.mac_bound()},
                       {"key_bits", p.final_ext.m_out},
                       {"entropy_loss", p.entropy_loss},
                       {"loss_constant", p.loss_constant},
                       {"final_ext", p.final_ext},
                       {"nmx", p.nmx}};
}

}  // namespace nmlab
