#include <doctest.h>

#include <cmath>

#include "qsmpc/harness.hpp"
#include "qsmpc/ole.hpp"
#include "qsmpc/stats.hpp"

using namespace qsmpc;

namespace {

OleSessionConfig toy_config() { return ToyVector::builtin().session_config(); }

OleTranscript run_toy() {
    SeededRng rng(0);
    return run_ole({2, 3}, 4, toy_config(), honest_edges(), rng);
}

}  // namespace

TEST_CASE("session config key sizing") {
    const Modulus p(101);
    OleSessionConfig cfg = make_session_config(p, 16, 0.0, 1);
    CHECK(cfg.width() == 7);
    CHECK(cfg.k_a.bit_length() == 28);
    CHECK(cfg.k_b.bit_length() == 28);
    CHECK(cfg.k_ab.bit_length() == 28);
    CHECK_NOTHROW(cfg.validate());

    cfg.k_ab = PauliKey::from_bit_string("10");
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("tp_initialize maintains g = S(d)") {
    SUBCASE("pinned worked-example values") {
        OleSessionConfig cfg = toy_config();
        OleTranscript log;
        SeededRng rng(1);
        const TpInit init = tp_initialize(cfg, rng, log);
        CHECK(init.secrets.a1 == 3);
        CHECK(init.secrets.b1 == 1);
        CHECK(init.secrets.d == 2);
        CHECK(init.secrets.g == 7);
    }
    SUBCASE("zero polynomial gives g = 0") {
        OleSessionConfig cfg = toy_config();
        cfg.pinned->s_a1 = 0;
        cfg.pinned->s_b1 = 0;
        cfg.pinned->d = 5;
        OleTranscript log;
        SeededRng rng(1);
        CHECK(tp_initialize(cfg, rng, log).secrets.g == 0);
    }
    SUBCASE("random draws agree with polynomial evaluation") {
        const Modulus p(65521);
        SeededRng rng(42);
        for (int i = 0; i < 1000; ++i) {
            OleSessionConfig cfg = make_session_config(p, 0, 0.0, rng.next_u64());
            OleTranscript log;
            SeededRng tp_rng(rng.next_u64());
            const TpInit init = tp_initialize(cfg, tp_rng, log);
            const Polynomial s = Polynomial::linear(init.secrets.a1, init.secrets.b1, p);
            CHECK(init.secrets.g == s.eval(init.secrets.d));
        }
    }
}

TEST_CASE("alice_phase1 computes l = alpha - d") {
    SUBCASE("worked example: alpha 4, d 2 gives l 2") {
        OleSessionConfig cfg = toy_config();
        OleTranscript log;
        SeededRng rng(1);
        const TpInit init = tp_initialize(cfg, rng, log);
        auto res = alice_phase1(init.to_alice, 4, cfg, rng, log);
        REQUIRE(res.ok());
        CHECK(res.value().second.d == 2);
        CHECK(res.value().second.g == 7);
        CHECK(res.value().second.l == 2);
    }
    SUBCASE("alpha equal to d gives l = 0") {
        OleSessionConfig cfg = toy_config();
        OleTranscript log;
        SeededRng rng(1);
        const TpInit init = tp_initialize(cfg, rng, log);
        auto res = alice_phase1(init.to_alice, 2, cfg, rng, log);
        REQUIRE(res.ok());
        CHECK(res.value().second.l == 0);
    }
    SUBCASE("random alpha and d over Z_101") {
        const Modulus p(101);
        SeededRng rng(9);
        for (int i = 0; i < 200; ++i) {
            OleSessionConfig cfg = make_session_config(p, 2, 0.0, rng.next_u64());
            OleTranscript log;
            SeededRng party_rng(rng.next_u64());
            const TpInit init = tp_initialize(cfg, party_rng, log);
            const uint64_t alpha = rng.below(101);
            auto res = alice_phase1(init.to_alice, alpha, cfg, party_rng, log);
            REQUIRE(res.ok());
            CHECK(res.value().second.l == p.sub(alpha, init.secrets.d));
        }
        OleSessionConfig cfg = make_session_config(p, 2, 0.0, 5);
        OleTranscript log;
        SeededRng party_rng(5);
        const TpInit init = tp_initialize(cfg, party_rng, log);
        CHECK_THROWS_AS(alice_phase1(init.to_alice, 101, cfg, party_rng, log),
                        std::invalid_argument);
    }
}

TEST_CASE("bob_phase computes V(x) = f(l+x) + S(x)") {
    SUBCASE("worked example gives V = 5x") {
        OleSessionConfig cfg = toy_config();
        OleTranscript log;
        SeededRng rng(1);
        const TpInit init = tp_initialize(cfg, rng, log);
        auto p1 = alice_phase1(init.to_alice, 4, cfg, rng, log);
        REQUIRE(p1.ok());
        auto vb = bob_phase(init.to_bob, p1.value().first, {2, 3}, cfg, rng, log);
        REQUIRE(vb.ok());
        CHECK(log.views.bob_l == 2);
        CHECK(log.views.bob_v_a == 5);
        CHECK(log.views.bob_v_b == 0);
    }
    SUBCASE("zero f and zero S give V = 0") {
        OleSessionConfig cfg = toy_config();
        cfg.pinned->s_a1 = 0;
        cfg.pinned->s_b1 = 0;
        OleTranscript log;
        SeededRng rng(1);
        const TpInit init = tp_initialize(cfg, rng, log);
        auto p1 = alice_phase1(init.to_alice, 4, cfg, rng, log);
        REQUIRE(p1.ok());
        auto vb = bob_phase(init.to_bob, p1.value().first, {0, 0}, cfg, rng, log);
        REQUIRE(vb.ok());
        CHECK(log.views.bob_v_a == 0);
        CHECK(log.views.bob_v_b == 0);
    }
    SUBCASE("random f, S, l over Z_97 match the ring oracle") {
        const Modulus p(97);
        SeededRng rng(31);
        for (int i = 0; i < 200; ++i) {
            OleSessionConfig cfg = make_session_config(p, 2, 0.0, rng.next_u64());
            OleTranscript log;
            SeededRng party_rng(rng.next_u64());
            const TpInit init = tp_initialize(cfg, party_rng, log);
            const uint64_t alpha = rng.below(97);
            auto p1 = alice_phase1(init.to_alice, alpha, cfg, party_rng, log);
            REQUIRE(p1.ok());
            const OleFunction f{rng.below(97), rng.below(97)};
            auto vb = bob_phase(init.to_bob, p1.value().first, f, cfg, party_rng, log);
            REQUIRE(vb.ok());
            const Polynomial expected = Polynomial::linear(f.a, f.b, p).shift(log.views.bob_l) +
                                        Polynomial::linear(init.secrets.a1, init.secrets.b1, p);
            CHECK(log.views.bob_v_a == expected.coeff(1));
            CHECK(log.views.bob_v_b == expected.coeff(0));
        }
    }
}

TEST_CASE("alice_phase2 outputs V(d) - g = f(alpha)") {
    SUBCASE("worked example gives f(4) = 3") {
        OleSessionConfig cfg = toy_config();
        OleTranscript log;
        SeededRng rng(1);
        const TpInit init = tp_initialize(cfg, rng, log);
        auto p1 = alice_phase1(init.to_alice, 4, cfg, rng, log);
        REQUIRE(p1.ok());
        auto vb = bob_phase(init.to_bob, p1.value().first, {2, 3}, cfg, rng, log);
        REQUIRE(vb.ok());
        auto out = alice_phase2(vb.value(), p1.value().second, cfg, rng, log);
        REQUIRE(out.ok());
        CHECK(out.value() == 3);
    }
    SUBCASE("constant f returns b for any alpha") {
        const Modulus p(101);
        SeededRng rng(12);
        for (uint64_t alpha : {0ull, 1ull, 50ull, 100ull}) {
            OleSessionConfig cfg = make_session_config(p, 2, 0.0, rng.next_u64());
            SeededRng session_rng(rng.next_u64());
            OleTranscript t = run_ole({0, 77}, alpha, cfg, honest_edges(), session_rng);
            REQUIRE(t.completed());
            CHECK(*t.output == 77);
        }
    }
}

TEST_CASE("honest end-to-end sessions evaluate f(alpha) exactly") {
    SUBCASE("smallest modulus p = 2") {
        const Modulus p(2);
        OleSessionConfig cfg = make_session_config(p, 4, 0.0, 3);
        SeededRng rng(3);
        OleTranscript t = run_ole({1, 1}, 1, cfg, honest_edges(), rng);
        REQUIRE(t.completed());
        CHECK(*t.output == 0);  // 1*1 + 1 mod 2
    }
    SUBCASE("random sessions across moduli") {
        SeededRng rng(2024);
        for (uint64_t pv : {2ull, 3ull, 8ull, 101ull, 65521ull}) {
            const Modulus p(pv);
            for (int i = 0; i < 200; ++i) {
                OleSessionConfig cfg = make_session_config(p, 4, 0.0, rng.next_u64());
                const OleFunction f{rng.below(pv), rng.below(pv)};
                const uint64_t alpha = rng.below(pv);
                OleTranscript t = run_ole(f, alpha, cfg, honest_edges(), rng);
                REQUIRE(t.completed());
                CHECK(*t.output == p.add(p.mul(f.a, alpha), f.b));
            }
        }
    }
}

TEST_CASE("per-session payload is exactly 7L qubits") {
    SeededRng rng(5);
    for (uint64_t pv : {8ull, 101ull, 257ull, 65537ull}) {
        const Modulus p(pv);
        OleSessionConfig cfg = make_session_config(p, 16, 0.0, rng.next_u64());
        OleTranscript t = run_ole({1 % pv, 0}, 0, cfg, honest_edges(), rng);
        REQUIRE(t.completed());
        const uint64_t L = qubit_width(p);
        CHECK(t.counters.payload_qubits() == 7 * L);
        CHECK(t.counters.total.decoys_sent == 4 * 16);
        CHECK(t.counters.per_edge.at("tp->bob").qubits_sent == 2 * L + 16);
        CHECK(t.counters.per_edge.at("tp->alice").qubits_sent == 2 * L + 16);
        CHECK(t.counters.per_edge.at("alice->bob").qubits_sent == L + 16);
        CHECK(t.counters.per_edge.at("bob->alice").qubits_sent == 2 * L + 16);
    }
}

TEST_CASE("transcript structure and determinism") {
    OleTranscript a = run_toy();
    OleTranscript b = run_toy();
    REQUIRE(a.completed());
    CHECK(a.to_jsonl() == b.to_jsonl());
    CHECK(*a.output == 3);

    // 4 quantum sends + 4 decoy disclosures + 4 checks + 1 result.
    CHECK(a.events.size() == 13);
    size_t lines = 0;
    for (char c : a.to_jsonl()) lines += c == '\n';
    CHECK(lines == 13);

    size_t sends = 0, classical = 0, checks = 0, results = 0;
    for (const auto& e : a.events) {
        switch (e.kind) {
            case EventKind::QuantumSend: ++sends; break;
            case EventKind::ClassicalSend: ++classical; break;
            case EventKind::DecoyCheck: ++checks; break;
            case EventKind::SessionResult: ++results; break;
        }
    }
    CHECK(sends == 4);
    CHECK(classical == 4);
    CHECK(checks == 4);
    CHECK(results == 1);
}

TEST_CASE("completed and aborted are mutually exclusive") {
    OleTranscript honest = run_toy();
    CHECK(honest.completed());
    CHECK_FALSE(honest.aborted);

    const Modulus p(8);
    AdversaryPlacement adv = honest_edges();
    adv[static_cast<size_t>(Edge::TpToAlice)] = AdversaryModel::InterceptResend;
    SeededRng rng(10);
    size_t aborted = 0;
    for (int i = 0; i < 300; ++i) {
        OleSessionConfig cfg = make_session_config(p, 16, 0.0, rng.next_u64());
        OleTranscript t = run_ole({3, 1}, 5, cfg, adv, rng);
        CHECK(t.completed() != t.aborted);
        if (t.aborted) {
            ++aborted;
            CHECK(t.abort_info.stage == "alice_check_tp");
            CHECK(t.abort_info.edge == "tp->alice");
            CHECK(t.abort_info.reason == "decoy_error");
        }
    }
    CHECK(aborted >= 280);  // detection probability about 0.99 per session
}

TEST_CASE("attacks on any single edge abort almost always") {
    const Modulus p(8);
    SeededRng rng(77);
    for (Edge edge : {Edge::TpToBob, Edge::TpToAlice, Edge::AliceToBob, Edge::BobToAlice}) {
        AdversaryPlacement adv = honest_edges();
        adv[static_cast<size_t>(edge)] = AdversaryModel::InterceptResend;
        size_t aborts = 0;
        const size_t trials = 1000;
        for (size_t i = 0; i < trials; ++i) {
            OleSessionConfig cfg = make_session_config(p, 16, 0.0, rng.next_u64());
            OleTranscript t = run_ole({3, 1}, 5, cfg, adv, rng);
            if (t.aborted) ++aborts;
        }
        CHECK(static_cast<double>(aborts) / static_cast<double>(trials) >= 0.98);
    }
}

TEST_CASE("a decoded value at or above p aborts with a range signal") {
    // p = 5 uses 3 qubits, so 7 is representable but out of range.
    const Modulus p(5);
    OleSessionConfig cfg = make_session_config(p, 0, 0.0, 99);
    OleTranscript log;
    SeededRng rng(99);

    auto dg_plain = encode_value(7, 3);
    const auto g_part = encode_value(1, 3);
    dg_plain.insert(dg_plain.end(), g_part.begin(), g_part.end());
    const auto enc = qotp_encrypt(dg_plain, cfg.k_a);
    auto [msg, rec] = insert_decoys_at(enc, {}, {});
    auto res = alice_phase1({msg, rec}, 2, cfg, rng, log);
    REQUIRE_FALSE(res.ok());
    CHECK(res.abort().reason == "decode_range");
    CHECK(res.abort().stage == "alice_decode_dg");
}

TEST_CASE("bob's view of l is uniform when d is uniform") {
    const Modulus p(8);
    SeededRng rng(404);
    const uint64_t alpha = 3;
    std::vector<uint64_t> bins(8, 0);
    const size_t trials = 10000;
    for (size_t i = 0; i < trials; ++i) {
        OleSessionConfig cfg = make_session_config(p, 2, 0.0, rng.next_u64());
        OleTranscript t = run_ole({2, 5}, alpha, cfg, honest_edges(), rng);
        REQUIRE(t.completed());
        ++bins[t.views.bob_l];
    }
    CHECK(chi_square_uniform_ok(bins));
}

TEST_CASE("alice's view of V is uniform over pairs when S is uniform") {
    const Modulus p(8);
    SeededRng rng(505);
    std::vector<uint64_t> bins(64, 0);
    const size_t trials = 10000;
    for (size_t i = 0; i < trials; ++i) {
        OleSessionConfig cfg = make_session_config(p, 2, 0.0, rng.next_u64());
        OleTranscript t = run_ole({5, 1}, 6, cfg, honest_edges(), rng);
        REQUIRE(t.completed());
        ++bins[8 * t.views.alice_v_a + t.views.alice_v_b];
    }
    CHECK(chi_square_uniform_ok(bins));
}

TEST_CASE("out-of-range inputs are rejected") {
    const Modulus p(8);
    OleSessionConfig cfg = make_session_config(p, 2, 0.0, 1);
    SeededRng rng(1);
    CHECK_THROWS_AS(run_ole({9, 0}, 1, cfg, honest_edges(), rng), std::invalid_argument);
    CHECK_THROWS_AS(run_ole({1, 0}, 8, cfg, honest_edges(), rng), std::invalid_argument);
}
