#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsmpc/decoy.hpp"
#include "qsmpc/modmath.hpp"
#include "qsmpc/polynomial.hpp"
#include "qsmpc/qotp.hpp"
#include "qsmpc/transcript.hpp"

namespace qsmpc {

// Three-party oblivious linear evaluation. Bob holds f(x) = a*x + b; Alice
// holds alpha and learns f(alpha); a third party TP deals the correlated
// randomness (S, d, g = S(d)). Every value travels as a QOTP-encrypted
// qubit string with interleaved decoy photons.

enum class Edge { TpToBob = 0, TpToAlice = 1, AliceToBob = 2, BobToAlice = 3 };

const char* edge_name(Edge e);

using AdversaryPlacement = std::array<AdversaryModel, 4>;

constexpr AdversaryPlacement honest_edges() {
    return {AdversaryModel::None, AdversaryModel::None, AdversaryModel::None, AdversaryModel::None};
}

struct OleFunction {
    uint64_t a = 0;
    uint64_t b = 0;
};

struct OleTpSecrets {
    uint64_t a1 = 0;  // S(x) = a1*x + b1
    uint64_t b1 = 0;
    uint64_t d = 0;
    uint64_t g = 0;  // S(d), maintained by construction
};

// Pins every random choice of one session; used to replay fixed vectors.
struct DecoyPin {
    std::vector<size_t> positions;  // 0-based into the padded sequence
    std::vector<DecoyState> states;
};

struct OlePinned {
    uint64_t s_a1 = 0;
    uint64_t s_b1 = 0;
    uint64_t d = 0;
    DecoyPin s_msg;
    DecoyPin dg_msg;
    DecoyPin l_msg;
    DecoyPin v_msg;
};

struct OleSessionConfig {
    Modulus modulus;
    size_t delta = 16;
    double threshold = 0.0;
    PauliKey k_a;   // TP <-> Alice, covers 2L qubits (4L bits)
    PauliKey k_b;   // TP <-> Bob, covers 2L qubits
    PauliKey k_ab;  // Alice <-> Bob, covers 2L qubits; |l> uses its L-qubit prefix
    uint64_t seed = 0;
    bool record_states = false;
    std::optional<OlePinned> pinned;

    unsigned width() const { return qubit_width(modulus); }
    void validate() const;  // key sizes vs width
};

// Fresh uniformly random keys derived from the seed (ideal key distribution).
OleSessionConfig make_session_config(const Modulus& p, size_t delta, double threshold, uint64_t seed);

struct SealedMessage {
    QuantumMessage message;
    DecoyRecord record;  // stays with the sender; disclosed for verification
};

struct TpInit {
    SealedMessage to_bob;    // |S''(x)>
    SealedMessage to_alice;  // |d''> || |g''> as one padded block
    OleTpSecrets secrets;
};

struct AliceHeld {
    uint64_t alpha = 0;
    uint64_t d = 0;
    uint64_t g = 0;
    uint64_t l = 0;
};

// Values each simulated party measured; exposed for statistical checks.
struct OleViews {
    uint64_t bob_a1 = 0, bob_b1 = 0, bob_l = 0, bob_v_a = 0, bob_v_b = 0;
    uint64_t alice_d = 0, alice_g = 0, alice_v_a = 0, alice_v_b = 0;
};

// Labeled qubit-string snapshots captured when record_states is set.
struct StateTrace {
    std::vector<std::pair<std::string, std::vector<std::string>>> stages;

    void add(const std::string& name, std::span<const QubitState> qubits);
    const std::vector<std::string>* find(const std::string& name) const;
};

struct OleTranscript {
    std::vector<TranscriptEvent> events;
    CostCounters counters;
    bool aborted = false;
    AbortInfo abort_info;
    std::optional<uint64_t> output;
    StateTrace trace;
    OleViews views;

    bool completed() const { return output.has_value(); }
    std::string to_jsonl() const;
};

TpInit tp_initialize(const OleSessionConfig& cfg, SeededRng& rng, OleTranscript& log);

Outcome<std::pair<SealedMessage, AliceHeld>> alice_phase1(const SealedMessage& dg_msg, uint64_t alpha,
                                                          const OleSessionConfig& cfg, SeededRng& rng,
                                                          OleTranscript& log);

Outcome<SealedMessage> bob_phase(const SealedMessage& s_msg, const SealedMessage& l_msg,
                                 const OleFunction& f, const OleSessionConfig& cfg, SeededRng& rng,
                                 OleTranscript& log);

Outcome<uint64_t> alice_phase2(const SealedMessage& v_msg, const AliceHeld& held,
                               const OleSessionConfig& cfg, SeededRng& rng, OleTranscript& log);

// Full session: TP deal, Alice round, Bob round, Alice output, with the
// given adversary on each channel edge. Message flow and per-edge payload
// widths: TP->Bob 2L, TP->Alice 2L, Alice->Bob L, Bob->Alice 2L (7L total).
OleTranscript run_ole(const OleFunction& f, uint64_t alpha, const OleSessionConfig& cfg,
                      const AdversaryPlacement& adversaries, SeededRng& rng);

}  // namespace qsmpc
