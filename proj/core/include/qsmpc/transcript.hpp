#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsmpc/decoy.hpp"

namespace qsmpc {

enum class EventKind { QuantumSend, ClassicalSend, DecoyCheck, SessionResult };

const char* event_kind_name(EventKind k);

// One transcript line. Field use depends on kind:
//   QuantumSend:  edge, label, qubits, decoys
//   ClassicalSend: edge, label, classical_bits
//   DecoyCheck:   edge, label, decoys, mismatches, error_rate, pass
//   SessionResult: result ("output"/"abort"), detail (value or stage)
struct TranscriptEvent {
    EventKind kind = EventKind::SessionResult;
    std::string edge;
    std::string label;
    uint64_t qubits = 0;
    uint64_t decoys = 0;
    uint64_t classical_bits = 0;
    uint64_t mismatches = 0;
    double error_rate = 0.0;
    bool pass = true;
    std::string result;
    std::string detail;
    int session = -1;  // OLE session index inside an MPSI run; -1 standalone
};

// Stable single-line JSON rendering (fixed field order, no whitespace).
std::string to_json_line(const TranscriptEvent& e);
std::string to_jsonl(const std::vector<TranscriptEvent>& events);

// Aborts are protocol outcomes, not errors.
struct AbortInfo {
    std::string stage;
    std::string edge;
    double error_rate = 0.0;
    std::string reason;  // "decoy_error" | "decode_range"
};

template <class T>
class Outcome {
public:
    Outcome(T value) : value_(std::move(value)) {}
    Outcome(AbortInfo abort) : abort_(std::move(abort)) {}

    bool ok() const { return value_.has_value(); }
    const T& value() const { return *value_; }
    T& value() { return *value_; }
    const AbortInfo& abort() const { return abort_; }

private:
    std::optional<T> value_;
    AbortInfo abort_{};
};

}  // namespace qsmpc
