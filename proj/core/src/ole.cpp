#include "qsmpc/ole.hpp"

#include <stdexcept>

namespace qsmpc {

const char* edge_name(Edge e) {
    switch (e) {
        case Edge::TpToBob: return "tp->bob";
        case Edge::TpToAlice: return "tp->alice";
        case Edge::AliceToBob: return "alice->bob";
        case Edge::BobToAlice: return "bob->alice";
    }
    return "?";
}

void OleSessionConfig::validate() const {
    const size_t L = width();
    if (k_a.bit_length() != 4 * L || k_b.bit_length() != 4 * L || k_ab.bit_length() != 4 * L) {
        throw std::invalid_argument("OleSessionConfig: keys must be 4L bits (2L-qubit blocks)");
    }
    if (threshold < 0.0 || threshold > 1.0) {
        throw std::invalid_argument("OleSessionConfig: threshold must lie in [0, 1]");
    }
    if (pinned && pinned->d >= modulus.value()) {
        throw std::invalid_argument("OleSessionConfig: pinned d out of range");
    }
}

OleSessionConfig make_session_config(const Modulus& p, size_t delta, double threshold, uint64_t seed) {
    OleSessionConfig cfg{.modulus = p, .delta = delta, .threshold = threshold, .seed = seed};
    const size_t L = cfg.width();
    SeededRng kg(seed);
    cfg.k_a = keygen(2 * L, kg);
    cfg.k_b = keygen(2 * L, kg);
    cfg.k_ab = keygen(2 * L, kg);
    return cfg;
}

void StateTrace::add(const std::string& name, std::span<const QubitState> qubits) {
    std::vector<std::string> kets;
    kets.reserve(qubits.size());
    for (const auto& q : qubits) kets.push_back(to_ket_string(q));
    stages.emplace_back(name, std::move(kets));
}

const std::vector<std::string>* StateTrace::find(const std::string& name) const {
    for (const auto& [n, v] : stages) {
        if (n == name) return &v;
    }
    return nullptr;
}

std::string OleTranscript::to_jsonl() const { return qsmpc::to_jsonl(events); }

namespace {

std::vector<QubitState> encode_pair(uint64_t hi, uint64_t lo, unsigned width) {
    std::vector<QubitState> qubits = encode_value(hi, width);
    std::vector<QubitState> tail = encode_value(lo, width);
    qubits.insert(qubits.end(), tail.begin(), tail.end());
    return qubits;
}

SealedMessage seal(std::span<const QubitState> payload, const DecoyPin* pin, size_t delta,
                   SeededRng& rng) {
    if (pin) {
        auto [msg, rec] = insert_decoys_at(payload, pin->positions, pin->states);
        return {std::move(msg), std::move(rec)};
    }
    auto [msg, rec] = insert_decoys(payload, delta, rng);
    return {std::move(msg), std::move(rec)};
}

// Receiver-side decoy verification with transcript logging. Returns the
// stripped payload or nothing on abort.
std::optional<std::vector<QubitState>> check_and_strip(const SealedMessage& sealed, Edge edge,
                                                       const std::string& label,
                                                       const OleSessionConfig& cfg, SeededRng& rng,
                                                       OleTranscript& log, const char* stage,
                                                       AbortInfo* abort_out) {
    // Decoy positions/states arrive over the authenticated classical channel.
    const uint64_t bits = decoy_disclosure_bits(sealed.message.size(), sealed.record.delta());
    log.counters.add_classical(edge_name(edge), bits);
    log.events.push_back({.kind = EventKind::ClassicalSend,
                          .edge = edge_name(edge),
                          .label = label + "_decoys",
                          .classical_bits = bits});

    StripResult strip = verify_and_strip(sealed.message, sealed.record, cfg.threshold, rng);
    log.events.push_back({.kind = EventKind::DecoyCheck,
                          .edge = edge_name(edge),
                          .label = label,
                          .decoys = sealed.record.delta(),
                          .mismatches = strip.mismatches,
                          .error_rate = strip.error_rate,
                          .pass = !strip.aborted});
    if (strip.aborted) {
        if (abort_out) {
            *abort_out = {stage, edge_name(edge), strip.error_rate, "decoy_error"};
        }
        return std::nullopt;
    }
    return std::move(strip.payload);
}

// Computational-basis measurement of a decrypted block; decodes big-endian.
uint64_t measure_block(std::span<const QubitState> qubits, SeededRng& rng) {
    std::vector<int> bits;
    bits.reserve(qubits.size());
    for (const auto& q : qubits) bits.push_back(measure(q, Basis::Computational, rng).bit);
    return decode_bits(bits);
}

}  // namespace

TpInit tp_initialize(const OleSessionConfig& cfg, SeededRng& rng, OleTranscript& log) {
    const Modulus& p = cfg.modulus;
    const unsigned L = cfg.width();

    OleTpSecrets secrets;
    if (cfg.pinned) {
        secrets.a1 = p.reduce(cfg.pinned->s_a1);
        secrets.b1 = p.reduce(cfg.pinned->s_b1);
        secrets.d = p.reduce(cfg.pinned->d);
    } else {
        secrets.a1 = rng.below(p.value());
        secrets.b1 = rng.below(p.value());
        secrets.d = rng.below(p.value());
    }
    secrets.g = p.add(p.mul(secrets.a1, secrets.d), secrets.b1);  // g = S(d)

    const std::vector<QubitState> s_plain = encode_pair(secrets.a1, secrets.b1, L);
    const std::vector<QubitState> s_enc = qotp_encrypt(s_plain, cfg.k_b);
    SealedMessage to_bob = seal(s_enc, cfg.pinned ? &cfg.pinned->s_msg : nullptr, cfg.delta, rng);

    const std::vector<QubitState> dg_plain = encode_pair(secrets.d, secrets.g, L);
    const std::vector<QubitState> dg_enc = qotp_encrypt(dg_plain, cfg.k_a);
    SealedMessage to_alice = seal(dg_enc, cfg.pinned ? &cfg.pinned->dg_msg : nullptr, cfg.delta, rng);

    if (cfg.record_states) {
        log.trace.add("s_plain", s_plain);
        log.trace.add("s_enc", s_enc);
        log.trace.add("s_sent", to_bob.message.qubits);
        log.trace.add("dg_plain", dg_plain);
        log.trace.add("dg_enc", dg_enc);
        log.trace.add("dg_sent", to_alice.message.qubits);
    }
    return {std::move(to_bob), std::move(to_alice), secrets};
}

Outcome<std::pair<SealedMessage, AliceHeld>> alice_phase1(const SealedMessage& dg_msg, uint64_t alpha,
                                                          const OleSessionConfig& cfg, SeededRng& rng,
                                                          OleTranscript& log) {
    const Modulus& p = cfg.modulus;
    const unsigned L = cfg.width();
    if (alpha >= p.value()) throw std::invalid_argument("alice_phase1: alpha out of range");

    AbortInfo abort;
    auto payload = check_and_strip(dg_msg, Edge::TpToAlice, "dg", cfg, rng, log, "alice_check_tp", &abort);
    if (!payload) return abort;

    const std::vector<QubitState> dg_plain = qotp_decrypt(*payload, cfg.k_a);
    if (cfg.record_states) log.trace.add("alice_dg_dec", dg_plain);

    const uint64_t d = measure_block(std::span(dg_plain).first(L), rng);
    const uint64_t g = measure_block(std::span(dg_plain).subspan(L), rng);
    if (d >= p.value() || g >= p.value()) {
        return AbortInfo{"alice_decode_dg", edge_name(Edge::TpToAlice), 0.0, "decode_range"};
    }
    log.views.alice_d = d;
    log.views.alice_g = g;

    AliceHeld held{alpha, d, g, p.sub(alpha, d)};

    const std::vector<QubitState> l_plain = encode_value(held.l, L);
    const std::vector<QubitState> l_enc = qotp_encrypt(l_plain, cfg.k_ab.prefix(L));
    SealedMessage l_msg = seal(l_enc, cfg.pinned ? &cfg.pinned->l_msg : nullptr, cfg.delta, rng);

    if (cfg.record_states) {
        log.trace.add("l_plain", l_plain);
        log.trace.add("l_enc", l_enc);
        log.trace.add("l_sent", l_msg.message.qubits);
    }
    return std::make_pair(std::move(l_msg), held);
}

Outcome<SealedMessage> bob_phase(const SealedMessage& s_msg, const SealedMessage& l_msg,
                                 const OleFunction& f, const OleSessionConfig& cfg, SeededRng& rng,
                                 OleTranscript& log) {
    const Modulus& p = cfg.modulus;
    const unsigned L = cfg.width();

    // Checks run in arrival order: the TP block first, then Alice's.
    AbortInfo abort;
    auto s_payload = check_and_strip(s_msg, Edge::TpToBob, "s", cfg, rng, log, "bob_check_tp", &abort);
    if (!s_payload) return abort;
    auto l_payload = check_and_strip(l_msg, Edge::AliceToBob, "l", cfg, rng, log, "bob_check_alice", &abort);
    if (!l_payload) return abort;

    const std::vector<QubitState> s_plain = qotp_decrypt(*s_payload, cfg.k_b);
    const std::vector<QubitState> l_plain = qotp_decrypt(*l_payload, cfg.k_ab.prefix(L));
    if (cfg.record_states) {
        log.trace.add("bob_s_dec", s_plain);
        log.trace.add("bob_l_dec", l_plain);
    }

    const uint64_t a1 = measure_block(std::span(s_plain).first(L), rng);
    const uint64_t b1 = measure_block(std::span(s_plain).subspan(L), rng);
    const uint64_t l = measure_block(l_plain, rng);
    if (a1 >= p.value() || b1 >= p.value()) {
        return AbortInfo{"bob_decode_s", edge_name(Edge::TpToBob), 0.0, "decode_range"};
    }
    if (l >= p.value()) {
        return AbortInfo{"bob_decode_l", edge_name(Edge::AliceToBob), 0.0, "decode_range"};
    }
    log.views.bob_a1 = a1;
    log.views.bob_b1 = b1;
    log.views.bob_l = l;

    // V(x) = f(l + x) + S(x), computed with the polynomial ring.
    const Polynomial v = Polynomial::linear(f.a, f.b, p).shift(l) + Polynomial::linear(a1, b1, p);
    const uint64_t v_a = v.coeff(1);
    const uint64_t v_b = v.coeff(0);
    log.views.bob_v_a = v_a;
    log.views.bob_v_b = v_b;

    const std::vector<QubitState> v_plain = encode_pair(v_a, v_b, L);
    const std::vector<QubitState> v_enc = qotp_encrypt(v_plain, cfg.k_ab);
    SealedMessage v_msg = seal(v_enc, cfg.pinned ? &cfg.pinned->v_msg : nullptr, cfg.delta, rng);

    if (cfg.record_states) {
        log.trace.add("v_plain", v_plain);
        log.trace.add("v_enc", v_enc);
        log.trace.add("v_sent", v_msg.message.qubits);
    }
    return v_msg;
}

Outcome<uint64_t> alice_phase2(const SealedMessage& v_msg, const AliceHeld& held,
                               const OleSessionConfig& cfg, SeededRng& rng, OleTranscript& log) {
    const Modulus& p = cfg.modulus;
    const unsigned L = cfg.width();

    AbortInfo abort;
    auto payload = check_and_strip(v_msg, Edge::BobToAlice, "v", cfg, rng, log, "alice_check_bob", &abort);
    if (!payload) return abort;

    const std::vector<QubitState> v_plain = qotp_decrypt(*payload, cfg.k_ab);
    if (cfg.record_states) log.trace.add("alice_v_dec", v_plain);

    const uint64_t v_a = measure_block(std::span(v_plain).first(L), rng);
    const uint64_t v_b = measure_block(std::span(v_plain).subspan(L), rng);
    if (v_a >= p.value() || v_b >= p.value()) {
        return AbortInfo{"alice_decode_v", edge_name(Edge::BobToAlice), 0.0, "decode_range"};
    }
    log.views.alice_v_a = v_a;
    log.views.alice_v_b = v_b;

    // Output f(alpha) = V(d) - g.
    return p.sub(p.add(p.mul(v_a, held.d), v_b), held.g);
}

namespace {

SealedMessage deliver(const SealedMessage& sealed, Edge edge, const std::string& label,
                      const AdversaryPlacement& adversaries, SeededRng& chan_rng, OleTranscript& log) {
    log.counters.add_quantum(edge_name(edge), sealed.message.size(), sealed.record.delta());
    log.events.push_back({.kind = EventKind::QuantumSend,
                          .edge = edge_name(edge),
                          .label = label,
                          .qubits = sealed.message.size(),
                          .decoys = sealed.record.delta()});
    QuantumMessage received =
        transmit(sealed.message, adversaries[static_cast<size_t>(edge)], chan_rng);
    return {std::move(received), sealed.record};
}

void finish_abort(OleTranscript& log, const AbortInfo& info) {
    log.aborted = true;
    log.abort_info = info;
    log.events.push_back(
        {.kind = EventKind::SessionResult, .result = "abort", .detail = info.stage});
}

}  // namespace

OleTranscript run_ole(const OleFunction& f, uint64_t alpha, const OleSessionConfig& cfg,
                      const AdversaryPlacement& adversaries, SeededRng& rng) {
    cfg.validate();
    if (f.a >= cfg.modulus.value() || f.b >= cfg.modulus.value()) {
        throw std::invalid_argument("run_ole: f coefficients out of range");
    }

    // Session-local streams; consuming one word from the caller keeps
    // back-to-back sessions on one rng independent.
    SeededRng session_root(rng.next_u64());
    SeededRng tp_rng = session_root.derive(1);
    SeededRng alice_rng = session_root.derive(2);
    SeededRng bob_rng = session_root.derive(3);
    SeededRng chan_rng = session_root.derive(4);

    OleTranscript log;

    TpInit init = tp_initialize(cfg, tp_rng, log);
    const SealedMessage s_at_bob = deliver(init.to_bob, Edge::TpToBob, "s", adversaries, chan_rng, log);
    const SealedMessage dg_at_alice =
        deliver(init.to_alice, Edge::TpToAlice, "dg", adversaries, chan_rng, log);

    auto phase1 = alice_phase1(dg_at_alice, alpha, cfg, alice_rng, log);
    if (!phase1.ok()) {
        finish_abort(log, phase1.abort());
        return log;
    }
    const AliceHeld held = phase1.value().second;
    const SealedMessage l_at_bob =
        deliver(phase1.value().first, Edge::AliceToBob, "l", adversaries, chan_rng, log);

    auto bob = bob_phase(s_at_bob, l_at_bob, f, cfg, bob_rng, log);
    if (!bob.ok()) {
        finish_abort(log, bob.abort());
        return log;
    }
    const SealedMessage v_at_alice =
        deliver(bob.value(), Edge::BobToAlice, "v", adversaries, chan_rng, log);

    auto result = alice_phase2(v_at_alice, held, cfg, alice_rng, log);
    if (!result.ok()) {
        finish_abort(log, result.abort());
        return log;
    }
    log.output = result.value();
    log.events.push_back({.kind = EventKind::SessionResult,
                          .result = "output",
                          .detail = std::to_string(result.value())});
    return log;
}

}  // namespace qsmpc
