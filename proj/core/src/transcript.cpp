#include "qsmpc/transcript.hpp"

#include <json.hpp>

namespace qsmpc {

using ordered_json = nlohmann::ordered_json;

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::QuantumSend: return "quantum_send";
        case EventKind::ClassicalSend: return "classical_send";
        case EventKind::DecoyCheck: return "decoy_check";
        case EventKind::SessionResult: return "session_result";
    }
    return "session_result";
}

std::string to_json_line(const TranscriptEvent& e) {
    ordered_json j;
    j["type"] = event_kind_name(e.kind);
    if (e.session >= 0) j["session"] = e.session;
    if (!e.edge.empty()) j["edge"] = e.edge;
    if (!e.label.empty()) j["label"] = e.label;
    switch (e.kind) {
        case EventKind::QuantumSend:
            j["qubits"] = e.qubits;
            j["decoys"] = e.decoys;
            break;
        case EventKind::ClassicalSend:
            j["bits"] = e.classical_bits;
            break;
        case EventKind::DecoyCheck:
            j["delta"] = e.decoys;
            j["mismatches"] = e.mismatches;
            j["error_rate"] = e.error_rate;
            j["verdict"] = e.pass ? "pass" : "abort";
            break;
        case EventKind::SessionResult:
            j["result"] = e.result;
            j["detail"] = e.detail;
            break;
    }
    return j.dump();
}

std::string to_jsonl(const std::vector<TranscriptEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += to_json_line(e);
        out += '\n';
    }
    return out;
}

}  // namespace qsmpc
