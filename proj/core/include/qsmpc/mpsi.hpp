#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsmpc/ole.hpp"
#include "qsmpc/polynomial.hpp"

namespace qsmpc {

// m-party private set intersection built from chained OLE sessions over
// masked set polynomials. Party A_j encodes its set as the monic polynomial
// with exactly those roots, masks it with root-free polynomials, and the
// parties accumulate sum_j P_{A_j} r_{A_j} r_{j-1} at 3n+1 evaluation
// points, one OLE session per (point, link). A_2 interpolates the unmasked
// points and announces the roots that lie in its own set.

struct PartyInput {
    size_t id = 0;                   // 1-based party index
    std::vector<uint64_t> elements;  // distinct, < p
};

struct PartyMasks {
    Polynomial set_poly;  // P_{A_j}, roots = own set
    Polynomial r_self;    // multiplies the own set polynomial
    Polynomial r_link;    // slope mask used when handing off to the next party
    Polynomial masked;    // P'_{A_j} = P_{A_j} * r_self
    std::optional<Polynomial> u_initiator;  // only party 1
    std::optional<Polynomial> p_one;        // P_1 = P'_{A_1} + u_{A_1}, only party 1
};

enum class UDegreePolicy {
    Paper,   // masking polynomials of degree n (protocol-literal)
    Secure,  // degree 3n: information-theoretically masks all 3n+1 points
};

struct MpsiParams {
    Modulus modulus;
    size_t party_count = 2;
    size_t set_size = 1;
    std::vector<uint64_t> eval_points;  // empty -> defaults to 1..3n+1
    UDegreePolicy u_policy = UDegreePolicy::Secure;
    size_t delta = 16;
    double threshold = 0.0;
    uint64_t seed = 0;

    size_t point_count() const { return 3 * set_size + 1; }
    size_t expected_sessions() const { return (party_count - 1) * point_count(); }
    size_t u_degree() const { return u_policy == UDegreePolicy::Secure ? 3 * set_size : set_size; }
    std::vector<uint64_t> effective_eval_points() const;
    // Throws ConfigError on violated constraints (prime odd p, m >= 2,
    // n >= 1, distinct in-range points, 3n+1 <= p).
    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MpsiTranscript {
    std::vector<TranscriptEvent> events;
    CostCounters counters;
    size_t ole_sessions = 0;
    bool aborted = false;
    AbortInfo abort_info;

    std::string to_jsonl() const { return qsmpc::to_jsonl(events); }
};

struct MpsiResult {
    std::vector<uint64_t> intersection;             // sorted ascending; empty on abort
    std::optional<Polynomial> intersection_poly;    // absent on abort
    std::vector<uint64_t> pre_unmask;  // values A_2 receives before subtracting u
    MpsiTranscript transcript;         // always populated, including on abort

    bool completed() const { return !transcript.aborted; }
};

// Builds a party's set polynomial and masks. Mask polynomials have no roots
// in Z_p, so masking never adds or removes intersection roots.
PartyMasks prep_party(const PartyInput& input, const MpsiParams& params, SeededRng& rng);

// One link of the chain at one evaluation point: runs a full OLE session
// where the holder contributes f(x) = r * x + P and the evaluator learns
// f(P') = P' * r + P. Transcript events are appended to `log` when given.
Outcome<uint64_t> chain_step(size_t point_idx, size_t party_idx,
                             std::pair<uint64_t, uint64_t> holder_state, uint64_t evaluator_value,
                             const OleSessionConfig& cfg, const AdversaryPlacement& adversaries,
                             SeededRng& rng, MpsiTranscript* log);

// Final unmasking and interpolation: A_m adds u, A_1 strips its own mask,
// A_2 strips u, interpolates P_cap, and announces the roots within its set.
MpsiResult finalize(std::span<const uint64_t> chain_outputs, const Polynomial& u,
                    const Polynomial& u_initiator, std::span<const uint64_t> a2_set,
                    const MpsiParams& params, MpsiTranscript transcript);

// Full protocol run over (m-1)(3n+1) OLE sessions. An OLE abort aborts the
// whole run; the returned transcript carries the annotated stage.
MpsiResult run_mpsi(const std::vector<PartyInput>& inputs, const MpsiParams& params,
                    const AdversaryPlacement& adversaries, SeededRng& rng);

}  // namespace qsmpc
