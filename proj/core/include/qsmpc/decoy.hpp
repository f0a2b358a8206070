#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsmpc/qubit.hpp"
#include "qsmpc/rng.hpp"

namespace qsmpc {

// One of the four decoy states: (Computational, 0/1) -> |0>/|1>,
// (Hadamard, 0/1) -> |+>/|->.
struct DecoyState {
    Basis basis;
    int bit;

    friend bool operator==(const DecoyState& a, const DecoyState& b) {
        return a.basis == b.basis && a.bit == b.bit;
    }
};

QubitState to_state(const DecoyState& d);
DecoyState random_decoy(SeededRng& rng);
std::string decoy_name(const DecoyState& d);
std::optional<DecoyState> parse_decoy_name(std::string_view name);

// Sender-private record of where the decoys sit and what they were.
struct DecoyRecord {
    std::vector<size_t> positions;  // strictly increasing, 0-based
    std::vector<DecoyState> states;

    size_t delta() const { return positions.size(); }
};

struct QuantumMessage {
    std::vector<QubitState> qubits;

    size_t size() const { return qubits.size(); }
};

enum class AdversaryModel { None, InterceptResend, EntangleMeasure };

const char* adversary_name(AdversaryModel m);
std::optional<AdversaryModel> parse_adversary_name(std::string_view name);

// Interleaves delta uniformly chosen decoy states into the payload at a
// uniformly chosen position subset.
std::pair<QuantumMessage, DecoyRecord> insert_decoys(std::span<const QubitState> payload,
                                                     size_t delta, SeededRng& rng);
// Deterministic variant for pinned runs; positions are 0-based indices into
// the final sequence and must be strictly increasing.
std::pair<QuantumMessage, DecoyRecord> insert_decoys_at(std::span<const QubitState> payload,
                                                        std::span<const size_t> positions,
                                                        std::span<const DecoyState> states);

// Per-qubit record of what the adversary would report if asked to name the
// transiting state. Computational states pass the entangling probe cleanly
// and are identified exactly; conjugate states yield a coin flip.
struct AdversaryTrace {
    std::vector<std::optional<DecoyState>> guesses;
};

QuantumMessage transmit(const QuantumMessage& msg, AdversaryModel adv, SeededRng& rng);
QuantumMessage transmit_traced(const QuantumMessage& msg, AdversaryModel adv, SeededRng& rng,
                               AdversaryTrace* trace);

struct StripResult {
    bool aborted = false;
    double error_rate = 0.0;
    size_t mismatches = 0;
    std::vector<QubitState> payload;  // empty when aborted
};

// Measures every decoy in its preparation basis, compares with the record,
// and either aborts (error_rate > threshold) or returns the payload with
// decoys removed and order preserved. delta = 0 always passes.
StripResult verify_and_strip(const QuantumMessage& msg, const DecoyRecord& rec, double threshold,
                             SeededRng& rng);

// Classical cost of disclosing the decoy record over the authenticated
// channel: per decoy, ceil(log2 message_length) position bits plus 2 state bits.
uint64_t decoy_disclosure_bits(size_t message_length, size_t delta);

struct EdgeCounters {
    uint64_t qubits_sent = 0;
    uint64_t decoys_sent = 0;
    uint64_t classical_bits_sent = 0;
};

// Monotone per-session cost accounting, mergeable across sessions.
struct CostCounters {
    EdgeCounters total;
    std::map<std::string, EdgeCounters> per_edge;

    void add_quantum(const std::string& edge, uint64_t qubits, uint64_t decoys);
    void add_classical(const std::string& edge, uint64_t bits);
    void merge(const CostCounters& other);

    uint64_t payload_qubits() const { return total.qubits_sent - total.decoys_sent; }
};

}  // namespace qsmpc
