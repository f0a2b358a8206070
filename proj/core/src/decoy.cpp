#include "qsmpc/decoy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qsmpc {

QubitState to_state(const DecoyState& d) {
    if (d.basis == Basis::Computational) return d.bit ? QubitState::ket1() : QubitState::ket0();
    return d.bit ? QubitState::minus() : QubitState::plus();
}

DecoyState random_decoy(SeededRng& rng) {
    const uint64_t r = rng.below(4);
    return {r < 2 ? Basis::Computational : Basis::Hadamard, static_cast<int>(r & 1u)};
}

std::string decoy_name(const DecoyState& d) {
    if (d.basis == Basis::Computational) return d.bit ? "|1>" : "|0>";
    return d.bit ? "|->" : "|+>";
}

std::optional<DecoyState> parse_decoy_name(std::string_view name) {
    if (name == "|0>") return DecoyState{Basis::Computational, 0};
    if (name == "|1>") return DecoyState{Basis::Computational, 1};
    if (name == "|+>") return DecoyState{Basis::Hadamard, 0};
    if (name == "|->") return DecoyState{Basis::Hadamard, 1};
    return std::nullopt;
}

const char* adversary_name(AdversaryModel m) {
    switch (m) {
        case AdversaryModel::None: return "none";
        case AdversaryModel::InterceptResend: return "intercept_resend";
        case AdversaryModel::EntangleMeasure: return "entangle_measure";
    }
    return "none";
}

std::optional<AdversaryModel> parse_adversary_name(std::string_view name) {
    if (name == "none") return AdversaryModel::None;
    if (name == "intercept_resend") return AdversaryModel::InterceptResend;
    if (name == "entangle_measure") return AdversaryModel::EntangleMeasure;
    return std::nullopt;
}

std::pair<QuantumMessage, DecoyRecord> insert_decoys(std::span<const QubitState> payload,
                                                     size_t delta, SeededRng& rng) {
    const size_t total = payload.size() + delta;
    // Floyd's sampling: uniform delta-subset of [0, total) in delta draws.
    std::set<size_t> chosen;
    for (size_t j = total - delta; j < total; ++j) {
        const size_t t = static_cast<size_t>(rng.below(j + 1));
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<size_t> positions(chosen.begin(), chosen.end());
    std::vector<DecoyState> states;
    states.reserve(delta);
    for (size_t i = 0; i < delta; ++i) states.push_back(random_decoy(rng));
    return insert_decoys_at(payload, positions, states);
}

std::pair<QuantumMessage, DecoyRecord> insert_decoys_at(std::span<const QubitState> payload,
                                                        std::span<const size_t> positions,
                                                        std::span<const DecoyState> states) {
    if (positions.size() != states.size()) {
        throw std::invalid_argument("insert_decoys_at: positions/states size mismatch");
    }
    const size_t total = payload.size() + positions.size();
    for (size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] >= total) throw std::invalid_argument("insert_decoys_at: position out of range");
        if (i > 0 && positions[i] <= positions[i - 1]) {
            throw std::invalid_argument("insert_decoys_at: positions must be strictly increasing");
        }
    }
    QuantumMessage msg;
    msg.qubits.resize(total);
    size_t di = 0, pi = 0;
    for (size_t pos = 0; pos < total; ++pos) {
        if (di < positions.size() && positions[di] == pos) {
            msg.qubits[pos] = to_state(states[di]);
            ++di;
        } else {
            msg.qubits[pos] = payload[pi++];
        }
    }
    DecoyRecord rec{std::vector<size_t>(positions.begin(), positions.end()),
                    std::vector<DecoyState>(states.begin(), states.end())};
    return {std::move(msg), std::move(rec)};
}

namespace {

bool is_computational(const QubitState& q) {
    return equal_up_to_phase(q, QubitState::ket0()) || equal_up_to_phase(q, QubitState::ket1());
}

}  // namespace

QuantumMessage transmit_traced(const QuantumMessage& msg, AdversaryModel adv, SeededRng& rng,
                               AdversaryTrace* trace) {
    if (trace) trace->guesses.assign(msg.size(), std::nullopt);
    if (adv == AdversaryModel::None) return msg;

    QuantumMessage out;
    out.qubits.reserve(msg.size());
    for (size_t i = 0; i < msg.size(); ++i) {
        const QubitState& q = msg.qubits[i];
        if (adv == AdversaryModel::InterceptResend) {
            // Measure in a uniformly random basis and forward the eigenstate.
            const Basis b = rng.bit() ? Basis::Hadamard : Basis::Computational;
            const Measurement m = measure(q, b, rng);
            out.qubits.push_back(m.collapsed);
            if (trace) trace->guesses[i] = DecoyState{b, m.bit};
        } else {
            // Entangling probe U_f|x>|y> -> |x>|y xor f(x)>: computational
            // states pass undisturbed and are identified exactly; conjugate
            // states decohere to an even |+>/|-> mixture and any readout of
            // the ancilla is uncorrelated with the transmitted state.
            if (is_computational(q)) {
                out.qubits.push_back(q);
                if (trace) {
                    const int bit = equal_up_to_phase(q, QubitState::ket1()) ? 1 : 0;
                    trace->guesses[i] = DecoyState{Basis::Computational, bit};
                }
            } else {
                const int resent = rng.bit();
                out.qubits.push_back(resent ? QubitState::minus() : QubitState::plus());
                if (trace) trace->guesses[i] = DecoyState{Basis::Hadamard, rng.bit()};
            }
        }
    }
    return out;
}

QuantumMessage transmit(const QuantumMessage& msg, AdversaryModel adv, SeededRng& rng) {
    return transmit_traced(msg, adv, rng, nullptr);
}

StripResult verify_and_strip(const QuantumMessage& msg, const DecoyRecord& rec, double threshold,
                             SeededRng& rng) {
    if (rec.positions.size() != rec.states.size()) {
        throw std::invalid_argument("verify_and_strip: malformed record");
    }
    for (size_t i = 0; i < rec.positions.size(); ++i) {
        if (rec.positions[i] >= msg.size()) {
            throw std::invalid_argument("verify_and_strip: record position out of bounds");
        }
        if (i > 0 && rec.positions[i] <= rec.positions[i - 1]) {
            throw std::invalid_argument("verify_and_strip: record positions not increasing");
        }
    }

    StripResult result;
    const size_t delta = rec.delta();
    for (size_t i = 0; i < delta; ++i) {
        const Measurement m = measure(msg.qubits[rec.positions[i]], rec.states[i].basis, rng);
        if (m.bit != rec.states[i].bit) ++result.mismatches;
    }
    result.error_rate = delta == 0 ? 0.0 : static_cast<double>(result.mismatches) / static_cast<double>(delta);
    if (result.error_rate > threshold) {
        result.aborted = true;
        return result;
    }
    result.payload.reserve(msg.size() - delta);
    size_t di = 0;
    for (size_t pos = 0; pos < msg.size(); ++pos) {
        if (di < delta && rec.positions[di] == pos) {
            ++di;
        } else {
            result.payload.push_back(msg.qubits[pos]);
        }
    }
    return result;
}

uint64_t decoy_disclosure_bits(size_t message_length, size_t delta) {
    if (delta == 0) return 0;
    const uint64_t pos_bits = std::max<uint64_t>(1, std::bit_width(static_cast<uint64_t>(message_length)));
    return static_cast<uint64_t>(delta) * (pos_bits + 2);
}

void CostCounters::add_quantum(const std::string& edge, uint64_t qubits, uint64_t decoys) {
    total.qubits_sent += qubits;
    total.decoys_sent += decoys;
    auto& e = per_edge[edge];
    e.qubits_sent += qubits;
    e.decoys_sent += decoys;
}

void CostCounters::add_classical(const std::string& edge, uint64_t bits) {
    total.classical_bits_sent += bits;
    per_edge[edge].classical_bits_sent += bits;
}

void CostCounters::merge(const CostCounters& other) {
    total.qubits_sent += other.total.qubits_sent;
    total.decoys_sent += other.total.decoys_sent;
    total.classical_bits_sent += other.total.classical_bits_sent;
    for (const auto& [edge, counters] : other.per_edge) {
        auto& e = per_edge[edge];
        e.qubits_sent += counters.qubits_sent;
        e.decoys_sent += counters.decoys_sent;
        e.classical_bits_sent += counters.classical_bits_sent;
    }
}

}  // namespace qsmpc
