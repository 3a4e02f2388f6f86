#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmlab/bits.hpp"
#include "nmlab/nmx.hpp"
#include "nmlab/rng.hpp"
#include "nmlab/sext.hpp"

namespace nmlab {

struct PampParams {
    std::size_t n = 0;
    double k = 0;
    std::size_t s = 0;          // security parameter
    NmExtParams nmx;            // round-1 key derivation
    ExtScheme final_ext;        // round-2 extraction, seed W
    unsigned mac_bits = 16;
    double entropy_loss = 0;    // k - final key length
    double loss_constant = 0;   // (entropy_loss - s - log n), left symbolic in the analysis

    std::size_t mac_blocks() const { return (final_ext.d_seed + mac_bits - 1) / mac_bits; }
    // l / 2^mac_bits for messages of mac_blocks() blocks.
    double mac_bound() const;
};

// Key length = k - s - log n - c_loss, clipped to the field block.
PampParams make_pamp(const NmExtParams& nmx, double k, std::size_t s, unsigned mac_bits, double c_loss);
void validate(const PampParams& p);

struct MacKey {
    std::uint64_t a = 0, b = 0;
};

// First two mac_bits-wide chunks of z.
MacKey mac_key(const BitString& z, unsigned bits);
// b + sum_i m_i a^i over GF(2^bits), message zero-padded to whole blocks.
BitString mac_tag(const MacKey& key, unsigned bits, const BitString& msg);

struct Transcript {
    BitString y_sent, y_recv;
    BitString w_sent, w_recv;
    BitString tag_sent, tag_recv;
    bool alice_accept = false;
    std::optional<BitString> key_a, key_b;
    nlohmann::json to_json() const;
};

// Two total maps with the transcript so far; the adversary never sees x.
struct Adversary {
    std::string name;
    std::function<BitString(const BitString& y, CounterRng& rng)> round1;
    std::function<std::pair<BitString, BitString>(const BitString& y_sent, const BitString& y_recv, const BitString& w,
                                                  const BitString& tag, CounterRng& rng)>
        round2;
};

Adversary passive_adversary();
Adversary flip1_adversary();   // y xor last bit
Adversary flip2_adversary();   // w xor last bit
Adversary replace_adversary(); // fixed y and w xor last bit, tag kept
Adversary random_adversary();  // fresh y, w and tag
// {"round1": {"xor": hex|bin} | {"set": ...}, "round2": {"w_xor": ..., "tag_xor": ...}}; bin strings prefixed "0b".
Adversary table_adversary(const nlohmann::json& spec, const PampParams& p);
Adversary named_adversary(const std::string& name);

Transcript run_protocol(const BitString& x, const Adversary& adv, const PampParams& p, CounterRng& rng);

struct SecurityReport {
    std::string adversary;
    std::size_t trials = 0;
    std::size_t attack_successes = 0;  // both accept and keys differ
    std::size_t consistent = 0;        // accepted with equal keys
    std::size_t abort_count = 0;
    double accept_rate = 0;
    double success_rate = 0;
    double key_distance = 0;           // fraction of accepted runs whose keys differ
    double ci99 = 0;                   // Hoeffding half-width
    std::uint64_t seed = 0;
    nlohmann::json to_json() const;
};

// Flat source: k free coordinates at positions and values fixed from `seed`.
struct SubcubeSource {
    std::size_t n = 0;
    std::vector<std::size_t> free;  // positions of the free bits
    BitString base;
    BitString sample(CounterRng& rng) const;
};
SubcubeSource make_subcube(std::size_t n, std::size_t k, std::uint64_t seed);

SecurityReport security_experiment(const PampParams& p, const Adversary& adv, std::size_t trials, const SubcubeSource& src,
                                   std::uint64_t seed, std::vector<Transcript>* keep = nullptr);

double hoeffding99(std::size_t trials);

void to_json(nlohmann::json& j, const PampParams& p);

}  // namespace nmlab
