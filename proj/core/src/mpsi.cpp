#include "qsmpc/mpsi.hpp"

#include <algorithm>
#include <unordered_set>

namespace qsmpc {

std::vector<uint64_t> MpsiParams::effective_eval_points() const {
    if (!eval_points.empty()) return eval_points;
    std::vector<uint64_t> pts(point_count());
    for (size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<uint64_t>(i + 1);
    return pts;
}

void MpsiParams::validate() const {
    if (!modulus.is_prime() || !modulus.is_odd()) {
        throw ConfigError("mpsi: modulus must be an odd prime");
    }
    if (party_count < 2) throw ConfigError("mpsi: need at least two parties");
    if (set_size == 0) throw ConfigError("mpsi: empty sets are not supported");
    if (point_count() >= modulus.value()) {
        throw ConfigError("mpsi: 3n+1 evaluation points do not fit in Z_p");
    }
    const auto pts = effective_eval_points();
    if (pts.size() != point_count()) {
        throw ConfigError("mpsi: expected exactly 3n+1 evaluation points");
    }
    std::unordered_set<uint64_t> seen;
    for (uint64_t x : pts) {
        if (x >= modulus.value()) throw ConfigError("mpsi: evaluation point out of range");
        if (!seen.insert(x).second) throw ConfigError("mpsi: duplicate evaluation point");
    }
    if (threshold < 0.0 || threshold > 1.0) throw ConfigError("mpsi: threshold must lie in [0, 1]");
}

PartyMasks prep_party(const PartyInput& input, const MpsiParams& params, SeededRng& rng) {
    const Modulus& p = params.modulus;
    if (params.set_size == 0) throw ConfigError("prep_party: empty sets are not supported");
    if (input.elements.size() != params.set_size) {
        throw ConfigError("prep_party: set size does not match the agreed n");
    }
    for (uint64_t v : input.elements) {
        if (v >= p.value()) throw ConfigError("prep_party: set element out of range");
    }

    Polynomial set_poly = Polynomial::from_roots(input.elements, p);
    Polynomial r_self = sample_rootfree(params.set_size, p, rng);
    Polynomial r_link = sample_rootfree(params.set_size, p, rng);
    Polynomial masked = set_poly * r_self;

    PartyMasks masks{std::move(set_poly), std::move(r_self), std::move(r_link), std::move(masked),
                     std::nullopt, std::nullopt};
    if (input.id == 1) {
        Polynomial u1 = sample_uniform(params.u_degree(), p, rng);
        masks.p_one = masks.masked + u1;
        masks.u_initiator = std::move(u1);
    }
    return masks;
}

Outcome<uint64_t> chain_step(size_t point_idx, size_t party_idx,
                             std::pair<uint64_t, uint64_t> holder_state, uint64_t evaluator_value,
                             const OleSessionConfig& cfg, const AdversaryPlacement& adversaries,
                             SeededRng& rng, MpsiTranscript* log) {
    const auto [holder_p, holder_r] = holder_state;
    const uint64_t pv = cfg.modulus.value();
    if (holder_p >= pv || holder_r >= pv || evaluator_value >= pv) {
        throw std::invalid_argument("chain_step: values out of range");
    }

    // Holder plays Bob with f(x) = r * x + P; evaluator plays Alice with
    // alpha = P', learning P' * r + P and nothing else.
    OleTranscript ole = run_ole({holder_r, holder_p}, evaluator_value, cfg, adversaries, rng);
    if (log) {
        const int session = static_cast<int>(log->ole_sessions);
        for (TranscriptEvent e : ole.events) {
            e.session = session;
            log->events.push_back(std::move(e));
        }
        log->counters.merge(ole.counters);
        ++log->ole_sessions;
    }
    if (ole.aborted) {
        AbortInfo info = ole.abort_info;
        info.stage = "point " + std::to_string(point_idx) + ", link " + std::to_string(party_idx) +
                     ": " + info.stage;
        return info;
    }
    return *ole.output;
}

namespace {

void log_classical(MpsiTranscript& log, const std::string& edge, const std::string& label,
                   uint64_t bits) {
    log.counters.add_classical(edge, bits);
    log.events.push_back({.kind = EventKind::ClassicalSend,
                          .edge = edge,
                          .label = label,
                          .classical_bits = bits});
}

}  // namespace

MpsiResult finalize(std::span<const uint64_t> chain_outputs, const Polynomial& u,
                    const Polynomial& u_initiator, std::span<const uint64_t> a2_set,
                    const MpsiParams& params, MpsiTranscript transcript) {
    const Modulus& p = params.modulus;
    const auto pts = params.effective_eval_points();
    if (chain_outputs.size() != pts.size()) {
        throw ConfigError("finalize: expected one chain output per evaluation point");
    }
    const unsigned L = qubit_width(p);

    // A_m adds u and batches the 3n+1 values to A_1.
    std::vector<uint64_t> r_values(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        r_values[i] = p.add(chain_outputs[i], u.eval(pts[i]));
    }
    log_classical(transcript, "am->a1", "masked_points", static_cast<uint64_t>(r_values.size()) * L);

    // A_1 strips its own mask and forwards to A_2.
    std::vector<uint64_t> pre_unmask(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        pre_unmask[i] = p.sub(r_values[i], u_initiator.eval(pts[i]));
    }
    log_classical(transcript, "a1->a2", "masked_points", static_cast<uint64_t>(pre_unmask.size()) * L);

    // A_2 strips u and interpolates through the 3n+1 points.
    std::vector<std::pair<uint64_t, uint64_t>> points(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        points[i] = {pts[i], p.sub(pre_unmask[i], u.eval(pts[i]))};
    }
    Polynomial p_cap = interpolate(points, p);

    std::vector<uint64_t> intersection;
    for (uint64_t gamma : a2_set) {
        if (p_cap.eval(gamma) == 0) intersection.push_back(gamma);
    }
    std::sort(intersection.begin(), intersection.end());
    log_classical(transcript, "a2->all", "announce",
                  static_cast<uint64_t>(intersection.size()) * L);
    transcript.events.push_back({.kind = EventKind::SessionResult,
                                 .result = "intersection",
                                 .detail = std::to_string(intersection.size()) + " elements"});

    return {std::move(intersection), std::move(p_cap), std::move(pre_unmask), std::move(transcript)};
}

namespace {

MpsiResult aborted_result(AbortInfo info, MpsiTranscript transcript) {
    transcript.aborted = true;
    transcript.abort_info = info;
    transcript.events.push_back(
        {.kind = EventKind::SessionResult, .result = "abort", .detail = info.stage});
    return {{}, std::nullopt, {}, std::move(transcript)};
}

}  // namespace

MpsiResult run_mpsi(const std::vector<PartyInput>& inputs, const MpsiParams& params,
                    const AdversaryPlacement& adversaries, SeededRng& rng) {
    params.validate();
    if (inputs.size() != params.party_count) {
        throw ConfigError("run_mpsi: wrong number of party inputs");
    }
    for (size_t j = 0; j < inputs.size(); ++j) {
        if (inputs[j].id != j + 1) throw ConfigError("run_mpsi: party ids must be 1..m in order");
    }

    const Modulus& p = params.modulus;
    const size_t m = params.party_count;
    const auto pts = params.effective_eval_points();

    SeededRng root(rng.next_u64());

    std::vector<PartyMasks> masks;
    masks.reserve(m);
    for (size_t j = 0; j < m; ++j) {
        SeededRng party_rng = root.derive(0x100 + j);
        masks.push_back(prep_party(inputs[j], params, party_rng));
    }

    // A_2 samples the common polynomial u and shares it with A_3..A_m over
    // the authenticated classical channel.
    SeededRng u_rng = root.derive(0x200);
    const Polynomial u = sample_uniform(params.u_degree(), p, u_rng);
    MpsiTranscript transcript;
    const unsigned L = qubit_width(p);
    for (size_t j = 3; j <= m; ++j) {
        log_classical(transcript, "a2->a" + std::to_string(j), "u_poly",
                      static_cast<uint64_t>(params.u_degree() + 1) * L);
    }

    // Chain: per point i, fold parties 2..m over fresh OLE sessions. The
    // points are independent; each link within a point is sequential.
    std::vector<uint64_t> chain_outputs(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        uint64_t holder_p = masks[0].p_one->eval(pts[i]);
        uint64_t holder_r = masks[0].r_link.eval(pts[i]);
        for (size_t j = 2; j <= m; ++j) {
            SeededRng link_rng = root.derive((static_cast<uint64_t>(i) << 20) | j);
            OleSessionConfig cfg = make_session_config(p, params.delta, params.threshold,
                                                       link_rng.next_u64());
            const uint64_t evaluator_value = masks[j - 1].masked.eval(pts[i]);
            Outcome<uint64_t> out = chain_step(i, j, {holder_p, holder_r}, evaluator_value, cfg,
                                               adversaries, link_rng, &transcript);
            if (!out.ok()) {
                return aborted_result(out.abort(), std::move(transcript));
            }
            holder_p = out.value();
            holder_r = masks[j - 1].r_link.eval(pts[i]);
        }
        chain_outputs[i] = holder_p;
    }

    return finalize(chain_outputs, u, *masks[0].u_initiator, inputs[1].elements, params,
                    std::move(transcript));
}

}  // namespace qsmpc
