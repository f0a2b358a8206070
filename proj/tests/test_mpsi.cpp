#include <doctest.h>

#include <algorithm>
#include <set>
#include <unordered_set>

#include "qsmpc/mpsi.hpp"
#include "qsmpc/stats.hpp"

using namespace qsmpc;

namespace {

MpsiParams small_params(uint64_t p, size_t m, size_t n, uint64_t seed, size_t delta = 4) {
    return MpsiParams{.modulus = Modulus(p),
                      .party_count = m,
                      .set_size = n,
                      .eval_points = {},
                      .u_policy = UDegreePolicy::Secure,
                      .delta = delta,
                      .threshold = 0.0,
                      .seed = seed};
}

std::vector<PartyInput> make_inputs(const std::vector<std::vector<uint64_t>>& sets) {
    std::vector<PartyInput> inputs;
    for (size_t j = 0; j < sets.size(); ++j) inputs.push_back({j + 1, sets[j]});
    return inputs;
}

// Brute-force oracle: plain sorted set intersection.
std::vector<uint64_t> oracle(const std::vector<std::vector<uint64_t>>& sets) {
    std::set<uint64_t> acc(sets[0].begin(), sets[0].end());
    for (size_t j = 1; j < sets.size(); ++j) {
        const std::set<uint64_t> s(sets[j].begin(), sets[j].end());
        std::set<uint64_t> next;
        for (uint64_t v : acc) {
            if (s.contains(v)) next.insert(v);
        }
        acc = std::move(next);
    }
    return {acc.begin(), acc.end()};
}

std::vector<uint64_t> random_set(size_t n, uint64_t p, SeededRng& rng) {
    std::unordered_set<uint64_t> seen;
    std::vector<uint64_t> out;
    while (out.size() < n) {
        const uint64_t v = rng.below(p);
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(small_params(8, 2, 1, 0).validate(), ConfigError);    // not prime
    CHECK_THROWS_AS(small_params(2, 2, 1, 0).validate(), ConfigError);    // not odd
    CHECK_THROWS_AS(small_params(11, 1, 1, 0).validate(), ConfigError);   // m < 2
    CHECK_THROWS_AS(small_params(11, 2, 0, 0).validate(), ConfigError);   // n = 0
    CHECK_THROWS_AS(small_params(11, 2, 4, 0).validate(), ConfigError);   // 13 points > 11
    CHECK_NOTHROW(small_params(11, 2, 1, 0).validate());

    MpsiParams dup = small_params(101, 2, 1, 0);
    dup.eval_points = {1, 1, 2, 3};
    CHECK_THROWS_AS(dup.validate(), ConfigError);

    MpsiParams out_of_range = small_params(101, 2, 1, 0);
    out_of_range.eval_points = {1, 2, 3, 101};
    CHECK_THROWS_AS(out_of_range.validate(), ConfigError);

    CHECK(small_params(101, 2, 2, 0).u_degree() == 6);
    MpsiParams paper = small_params(101, 2, 2, 0);
    paper.u_policy = UDegreePolicy::Paper;
    CHECK(paper.u_degree() == 2);
}

TEST_CASE("prep_party builds the set polynomial and sound masks") {
    SUBCASE("singleton set over Z_7") {
        const MpsiParams params = small_params(7, 2, 1, 0);
        SeededRng rng(1);
        const PartyMasks masks = prep_party({1, {3}}, params, rng);
        CHECK(masks.set_poly.coefficients() == std::vector<uint64_t>{4, 1});  // x + 4
    }
    SUBCASE("masked polynomial has exactly the set as roots") {
        SeededRng rng(7);
        for (uint64_t pv : {7ull, 101ull}) {
            for (size_t n : {1ull, 2ull, 3ull}) {
                if (3 * n + 1 >= pv) continue;
                const MpsiParams params = small_params(pv, 2, n, 0);
                const auto set = random_set(n, pv, rng);
                const PartyMasks masks = prep_party({2, set}, params, rng);
                const std::unordered_set<uint64_t> roots(set.begin(), set.end());
                for (uint64_t x = 0; x < pv; ++x) {
                    CHECK((masks.masked.eval(x) == 0) == roots.contains(x));
                }
                CHECK(masks.masked.degree() ==
                      masks.set_poly.degree() + masks.r_self.degree());
                CHECK(masks.masked.degree() <= static_cast<int>(2 * n));
            }
        }
    }
    SUBCASE("initiator carries u and P_1") {
        const MpsiParams params = small_params(101, 3, 2, 0);
        SeededRng rng(3);
        const PartyMasks first = prep_party({1, {5, 6}}, params, rng);
        REQUIRE(first.u_initiator.has_value());
        REQUIRE(first.p_one.has_value());
        CHECK(*first.p_one == first.masked + *first.u_initiator);
        const PartyMasks second = prep_party({2, {5, 7}}, params, rng);
        CHECK_FALSE(second.u_initiator.has_value());
    }
    SUBCASE("rejects bad inputs") {
        const MpsiParams params = small_params(11, 2, 2, 0);
        SeededRng rng(1);
        CHECK_THROWS_AS(prep_party({1, {3}}, params, rng), ConfigError);       // size mismatch
        CHECK_THROWS_AS(prep_party({1, {3, 11}}, params, rng), ConfigError);   // out of range
        MpsiParams empty = small_params(11, 2, 1, 0);
        empty.set_size = 0;
        CHECK_THROWS_AS(prep_party({1, {}}, empty, rng), ConfigError);
    }
}

TEST_CASE("chain_step equals the direct modular formula") {
    const Modulus p(101);
    SUBCASE("identity link") {
        OleSessionConfig cfg = make_session_config(p, 2, 0.0, 7);
        SeededRng rng(7);
        auto out = chain_step(0, 2, {5, 1}, 0, cfg, honest_edges(), rng, nullptr);
        REQUIRE(out.ok());
        CHECK(out.value() == 5);
    }
    SUBCASE("random links") {
        SeededRng rng(17);
        for (int i = 0; i < 100; ++i) {
            OleSessionConfig cfg = make_session_config(p, 2, 0.0, rng.next_u64());
            const uint64_t hp = rng.below(101), hr = rng.below(101), ev = rng.below(101);
            auto out = chain_step(0, 2, {hp, hr}, ev, cfg, honest_edges(), rng, nullptr);
            REQUIRE(out.ok());
            CHECK(out.value() == p.add(p.mul(ev, hr), hp));
        }
    }
    SUBCASE("rejects out-of-range values") {
        OleSessionConfig cfg = make_session_config(p, 2, 0.0, 3);
        SeededRng rng(3);
        CHECK_THROWS_AS(chain_step(0, 2, {101, 1}, 0, cfg, honest_edges(), rng, nullptr),
                        std::invalid_argument);
    }
}

TEST_CASE("three-party chain unrolls to the masked sum at one point") {
    const Modulus p(101);
    const MpsiParams params = small_params(101, 3, 1, 0);
    SeededRng rng(23);
    const PartyMasks m1 = prep_party({1, {4}}, params, rng);
    const PartyMasks m2 = prep_party({2, {5}}, params, rng);
    const PartyMasks m3 = prep_party({3, {6}}, params, rng);

    const uint64_t x = 9;
    MpsiTranscript log;
    const uint64_t p1 = m1.p_one->eval(x);
    const uint64_t r1 = m1.r_link.eval(x);
    OleSessionConfig cfg1 = make_session_config(p, 2, 0.0, 101);
    SeededRng rng1(101);
    auto step2 = chain_step(0, 2, {p1, r1}, m2.masked.eval(x), cfg1, honest_edges(), rng1, &log);
    REQUIRE(step2.ok());
    OleSessionConfig cfg2 = make_session_config(p, 2, 0.0, 202);
    SeededRng rng2(202);
    auto step3 = chain_step(0, 3, {step2.value(), m2.r_link.eval(x)}, m3.masked.eval(x), cfg2,
                            honest_edges(), rng2, &log);
    REQUIRE(step3.ok());

    // P^i_3 = P'_{A_3} r_2 + P'_{A_2} r_1 + P_1, all at x.
    uint64_t expected = m1.p_one->eval(x);
    expected = p.add(expected, p.mul(m2.masked.eval(x), r1));
    expected = p.add(expected, p.mul(m3.masked.eval(x), m2.r_link.eval(x)));
    CHECK(step3.value() == expected);
    CHECK(log.ole_sessions == 2);
}

TEST_CASE("finalize interpolates the documented masked sum") {
    // Full manual run with test-held masks, checked against the polynomial
    // identity P_cap = P_3 r_3 r_2 + P_2 r_2' r_1 + P_1 r_1'.
    const uint64_t pv = 101;
    const Modulus p(pv);
    const size_t m = 3, n = 2;
    const MpsiParams params = small_params(pv, m, n, 0);
    SeededRng rng(2718);

    const std::vector<std::vector<uint64_t>> sets{{1, 2}, {2, 3}, {2, 9}};
    std::vector<PartyMasks> masks;
    for (size_t j = 0; j < m; ++j) masks.push_back(prep_party({j + 1, sets[j]}, params, rng));
    const Polynomial u = sample_uniform(params.u_degree(), p, rng);

    const auto pts = params.effective_eval_points();
    std::vector<uint64_t> chain(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        uint64_t hp = masks[0].p_one->eval(pts[i]);
        uint64_t hr = masks[0].r_link.eval(pts[i]);
        for (size_t j = 2; j <= m; ++j) {
            OleSessionConfig cfg = make_session_config(p, 2, 0.0, 1000 + 10 * i + j);
            SeededRng srng(cfg.seed);
            auto out = chain_step(i, j, {hp, hr}, masks[j - 1].masked.eval(pts[i]), cfg,
                                  honest_edges(), srng, nullptr);
            REQUIRE(out.ok());
            hp = out.value();
            hr = masks[j - 1].r_link.eval(pts[i]);
        }
        chain[i] = hp;
    }

    MpsiResult res = finalize(chain, u, *masks[0].u_initiator, sets[1], params, MpsiTranscript{});
    REQUIRE(res.completed());
    REQUIRE(res.intersection_poly.has_value());

    Polynomial expected = masks[0].set_poly * masks[0].r_self;  // P_1 r_{A_1}
    expected = expected + masks[1].set_poly * masks[1].r_self * masks[0].r_link;
    expected = expected + masks[2].set_poly * masks[2].r_self * masks[1].r_link;
    CHECK(*res.intersection_poly == expected);
    CHECK(res.intersection == std::vector<uint64_t>{2});
    CHECK(res.intersection_poly->degree() <= static_cast<int>(3 * n));
}

TEST_CASE("run_mpsi end-to-end") {
    SUBCASE("two parties with identical singleton sets") {
        SeededRng rng(11);
        MpsiResult res =
            run_mpsi(make_inputs({{1}, {1}}), small_params(11, 2, 1, 5), honest_edges(), rng);
        REQUIRE(res.completed());
        CHECK(res.intersection == std::vector<uint64_t>{1});
        CHECK(res.transcript.ole_sessions == 4);  // (2-1)(3*1+1)
    }
    SUBCASE("three parties with a single common element") {
        SeededRng rng(12);
        MpsiResult res = run_mpsi(make_inputs({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}}),
                                  small_params(101, 3, 3, 6), honest_edges(), rng);
        REQUIRE(res.completed());
        CHECK(res.intersection == std::vector<uint64_t>{3});
        CHECK(res.transcript.ole_sessions == 20);  // (3-1)(3*3+1)
    }
    SUBCASE("pairwise disjoint sets intersect empty") {
        SeededRng rng(13);
        MpsiResult res = run_mpsi(make_inputs({{1, 2}, {3, 4}, {5, 6}}),
                                  small_params(101, 3, 2, 7), honest_edges(), rng);
        REQUIRE(res.completed());
        CHECK(res.intersection.empty());
    }
    SUBCASE("identical full sets return everything") {
        SeededRng rng(14);
        MpsiResult res = run_mpsi(make_inputs({{7, 8, 9}, {7, 8, 9}}),
                                  small_params(101, 2, 3, 8), honest_edges(), rng);
        REQUIRE(res.completed());
        CHECK(res.intersection == std::vector<uint64_t>{7, 8, 9});
    }
}

TEST_CASE("random instances agree with the brute-force oracle") {
    SeededRng rng(31337);
    const uint64_t pv = 2147483647ull;  // 2^31 - 1
    for (int round = 0; round < 20; ++round) {
        const size_t m = 2 + rng.below(4);
        const size_t n = 1 + rng.below(8);
        std::vector<std::vector<uint64_t>> sets;
        // Draw from a small pool so intersections are usually nonempty.
        for (size_t j = 0; j < m; ++j) {
            std::vector<uint64_t> s;
            std::unordered_set<uint64_t> seen;
            while (s.size() < n) {
                const uint64_t v = rng.below(3 * n);
                if (seen.insert(v).second) s.push_back(v);
            }
            sets.push_back(std::move(s));
        }
        MpsiResult res = run_mpsi(make_inputs(sets), small_params(pv, m, n, rng.next_u64()),
                                  honest_edges(), rng);
        REQUIRE(res.completed());
        CHECK(res.intersection == oracle(sets));
        CHECK(res.transcript.ole_sessions == (m - 1) * (3 * n + 1));
        // Soundness: common elements are always roots of the recovered polynomial.
        for (uint64_t gamma : oracle(sets)) CHECK(res.intersection_poly->eval(gamma) == 0);
    }
}

TEST_CASE("announced elements always lie in A_2's set and vanish on P_cap") {
    SeededRng rng(606);
    for (int round = 0; round < 10; ++round) {
        const size_t m = 2 + rng.below(3);
        const size_t n = 1 + rng.below(3);
        std::vector<std::vector<uint64_t>> sets;
        for (size_t j = 0; j < m; ++j) sets.push_back(random_set(n, 50, rng));
        MpsiResult res = run_mpsi(make_inputs(sets), small_params(1009, m, n, rng.next_u64()),
                                  honest_edges(), rng);
        REQUIRE(res.completed());
        const std::unordered_set<uint64_t> a2(sets[1].begin(), sets[1].end());
        for (uint64_t v : res.intersection) {
            CHECK(a2.contains(v));
            CHECK(res.intersection_poly->eval(v) == 0);
        }
    }
}

TEST_CASE("paper-literal u degree also completes correctly") {
    SeededRng rng(88);
    MpsiParams params = small_params(101, 3, 2, 9);
    params.u_policy = UDegreePolicy::Paper;
    MpsiResult res =
        run_mpsi(make_inputs({{1, 2}, {2, 3}, {2, 5}}), params, honest_edges(), rng);
    REQUIRE(res.completed());
    CHECK(res.intersection == std::vector<uint64_t>{2});
}

TEST_CASE("an OLE abort aborts the whole run with a stage annotation") {
    SeededRng rng(99);
    AdversaryPlacement adv = honest_edges();
    adv[static_cast<size_t>(Edge::AliceToBob)] = AdversaryModel::InterceptResend;
    MpsiResult res = run_mpsi(make_inputs({{1}, {1}}), small_params(11, 2, 1, 10, 16), adv, rng);
    CHECK_FALSE(res.completed());
    CHECK(res.transcript.aborted);
    CHECK(res.transcript.abort_info.stage.find("point") != std::string::npos);
    CHECK(res.transcript.abort_info.reason == "decoy_error");
    CHECK(res.intersection.empty());
    CHECK_FALSE(res.intersection_poly.has_value());
    // The transcript still carries the events up to the abort.
    CHECK_FALSE(res.transcript.events.empty());
    CHECK(res.transcript.events.back().result == "abort");
}

TEST_CASE("pre-unmask values at A_2 look uniform under the secure u policy") {
    SeededRng rng(1234);
    std::vector<uint64_t> bins(13, 0);
    for (int round = 0; round < 1500; ++round) {
        MpsiResult res = run_mpsi(make_inputs({{3}, {7}}),
                                  small_params(13, 2, 1, rng.next_u64(), 2), honest_edges(), rng);
        REQUIRE(res.completed());
        REQUIRE(res.pre_unmask.size() == 4);  // 3n+1
        for (uint64_t v : res.pre_unmask) ++bins[v];
    }
    CHECK(chi_square_uniform_ok(bins));
}

TEST_CASE("wrong party wiring is rejected") {
    SeededRng rng(5);
    const MpsiParams params = small_params(11, 2, 1, 0);
    std::vector<PartyInput> bad{{2, {1}}, {1, {2}}};
    CHECK_THROWS_AS(run_mpsi(bad, params, honest_edges(), rng), ConfigError);
    std::vector<PartyInput> missing{{1, {1}}};
    CHECK_THROWS_AS(run_mpsi(missing, params, honest_edges(), rng), ConfigError);
}
