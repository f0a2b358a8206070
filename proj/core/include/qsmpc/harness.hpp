#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsmpc/mpsi.hpp"
#include "qsmpc/ole.hpp"

namespace qsmpc {

uint64_t fnv1a64(std::string_view data);

// A fully pinned OLE session plus the expected intermediate states, used to
// replay the built-in worked example bit for bit. Serializable as a
// versioned test vector (see docs/formats.md).
struct ToyVector {
    int version = 1;
    uint64_t modulus = 8;
    uint64_t f_a = 0, f_b = 0;  // Bob's f(x) = a x + b
    uint64_t alpha = 0;
    std::string k_a, k_b, k_ab;  // bit strings
    OlePinned pinned;
    // stage name -> expected ket strings, in protocol order
    std::vector<std::pair<std::string, std::vector<std::string>>> expected_states;
    uint64_t expected_l = 0;
    uint64_t expected_v_a = 0, expected_v_b = 0;
    uint64_t expected_output = 0;

    static ToyVector builtin();
    static ToyVector from_json(const std::string& text);  // throws ConfigError
    std::string to_json() const;

    OleSessionConfig session_config() const;
};

struct ReplayStep {
    std::string name;
    bool pass = true;
    std::string expected;
    std::string actual;
};

struct ReplayReport {
    bool pass = false;
    std::string first_divergence;
    std::vector<ReplayStep> steps;
    uint64_t output = 0;
    std::string report_json;
};

ReplayReport replay_toy();
ReplayReport replay_toy(const ToyVector& vec);

// Empirical decoy-detection rate per channel transmission vs the analytic
// law 1 - (3/4)^delta, for both adversary models.
struct AttackCurveReport {
    struct Row {
        size_t delta = 0;
        std::string model;
        size_t trials = 0;
        size_t aborts = 0;
        double empirical = 0.0;
        double analytic = 0.0;
        double lo = 0.0, hi = 1.0;
        bool within = false;
    };
    std::vector<Row> rows;
    bool all_within = false;
    std::string report_json;
};

AttackCurveReport attack_curve(std::span<const size_t> deltas, size_t trials, uint64_t seed);

// Measures per-session payload qubits for OLE across moduli (expected 7L)
// and fits MPSI quantum totals against session count and qubit width.
struct CommAuditReport {
    struct OleRow {
        uint64_t p = 0;
        unsigned width = 0;
        uint64_t payload_qubits = 0;
        uint64_t expected = 0;
        bool ok = false;
    };
    struct MpsiRow {
        uint64_t p = 0;
        size_t m = 0, n = 0;
        size_t sessions = 0;
        unsigned width = 0;
        uint64_t qubits = 0;  // payload + decoys
    };
    std::vector<OleRow> ole_rows;
    std::vector<MpsiRow> mpsi_rows;
    double coeff_per_session_width = 0.0;  // fitted multiplier of sessions * L
    double coeff_per_session = 0.0;        // fitted multiplier of sessions
    double max_residual = 0.0;             // max relative fit error
    bool ok = false;
    std::string report_json;
};

CommAuditReport comm_audit(std::span<const uint64_t> p_list, size_t m, size_t n, uint64_t seed);

// Declarative experiment description; see docs/formats.md for the schema.
struct Scenario {
    int version = 1;
    std::string protocol;  // "ole" | "mpsi"
    uint64_t modulus = 0;
    size_t trials = 1;
    uint64_t seed = 0;
    size_t delta = 16;
    double threshold = 0.0;
    std::map<std::string, std::string> adversaries;  // edge name -> model name
    // ole
    std::optional<uint64_t> f_a, f_b;  // omitted -> random per trial
    std::optional<uint64_t> alpha;
    // mpsi
    size_t m = 0, n = 0;
    std::vector<std::vector<uint64_t>> sets;  // empty -> random per trial
    std::string u_degree = "secure";          // "paper" | "secure"

    std::string canonical_json() const;
    static Scenario from_json(const std::string& text);  // throws ConfigError
    void validate() const;                               // throws ConfigError
    AdversaryPlacement placement() const;
};

// Associatively mergeable per-trial aggregate, so trial results can be
// combined in any grouping order.
struct TrialAggregate {
    size_t trials = 0;
    size_t completed = 0;
    size_t aborted = 0;
    size_t oracle_matches = 0;  // output == direct evaluation / set oracle
    CostCounters counters;

    void merge(const TrialAggregate& other);
};

struct ScenarioReport {
    TrialAggregate totals;
    double abort_rate = 0.0;
    std::string scenario_hash;
    uint64_t seed = 0;
    std::string report_json;
    std::string transcript_jsonl;
};

ScenarioReport run_scenario(const Scenario& sc);

}  // namespace qsmpc
