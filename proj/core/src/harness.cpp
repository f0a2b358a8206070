#include "qsmpc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "qsmpc/stats.hpp"

namespace qsmpc {

using ordered_json = nlohmann::ordered_json;

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ordered_json counters_json(const CostCounters& c) {
    ordered_json j;
    j["qubits_sent"] = c.total.qubits_sent;
    j["decoys_sent"] = c.total.decoys_sent;
    j["payload_qubits"] = c.payload_qubits();
    j["classical_bits_sent"] = c.total.classical_bits_sent;
    ordered_json edges;
    for (const auto& [edge, e] : c.per_edge) {
        ordered_json je;
        je["qubits_sent"] = e.qubits_sent;
        je["decoys_sent"] = e.decoys_sent;
        je["classical_bits_sent"] = e.classical_bits_sent;
        edges[edge] = je;
    }
    j["per_edge"] = edges;
    return j;
}

DecoyPin pin_from_json(const ordered_json& j) {
    DecoyPin pin;
    for (const auto& p : j.at("positions")) pin.positions.push_back(p.get<size_t>());
    for (const auto& s : j.at("states")) {
        auto d = parse_decoy_name(s.get<std::string>());
        if (!d) throw ConfigError("toy vector: unknown decoy state name");
        pin.states.push_back(*d);
    }
    return pin;
}

ordered_json pin_to_json(const DecoyPin& pin) {
    ordered_json j;
    j["positions"] = pin.positions;
    ordered_json states = ordered_json::array();
    for (const auto& s : pin.states) states.push_back(decoy_name(s));
    j["states"] = states;
    return j;
}

}  // namespace

ToyVector ToyVector::builtin() {
    ToyVector v;
    v.version = 1;
    v.modulus = 8;
    v.f_a = 2;
    v.f_b = 3;
    v.alpha = 4;
    v.k_a = "011101010011";
    v.k_b = "101001110001";
    v.k_ab = "111001000101";
    v.pinned.s_a1 = 3;
    v.pinned.s_b1 = 1;
    v.pinned.d = 2;
    v.pinned.s_msg = {{1, 4, 5, 8},
                      {{Basis::Hadamard, 0}, {Basis::Computational, 0}, {Basis::Hadamard, 1},
                       {Basis::Computational, 0}}};
    v.pinned.dg_msg = {{0, 1, 5, 8},
                       {{Basis::Computational, 1}, {Basis::Computational, 1}, {Basis::Hadamard, 0},
                        {Basis::Hadamard, 0}}};
    v.pinned.l_msg = {{0, 1, 3},
                      {{Basis::Hadamard, 0}, {Basis::Hadamard, 1}, {Basis::Computational, 0}}};
    v.pinned.v_msg = {{2, 3, 4, 7},
                      {{Basis::Computational, 0}, {Basis::Computational, 1},
                       {Basis::Computational, 0}, {Basis::Hadamard, 0}}};
    v.expected_states = {
        {"s_plain", {"|0>", "|1>", "|1>", "|0>", "|0>", "|1>"}},
        {"s_enc", {"|0>", "-|1>", "|0>", "-|1>", "|0>", "|0>"}},
        {"s_sent", {"|0>", "|+>", "-|1>", "|0>", "|0>", "|->", "-|1>", "|0>", "|0>", "|0>"}},
        {"dg_plain", {"|0>", "|1>", "|0>", "|1>", "|1>", "|1>"}},
        {"dg_enc", {"|1>", "|0>", "|1>", "|0>", "|1>", "|0>"}},
        {"dg_sent", {"|1>", "|1>", "|1>", "|0>", "|1>", "|+>", "|0>", "|1>", "|+>", "|0>"}},
        {"alice_dg_dec", {"|0>", "|1>", "|0>", "|1>", "|1>", "|1>"}},
        {"l_plain", {"|0>", "|1>", "|0>"}},
        {"l_enc", {"-|1>", "-|1>", "|1>"}},
        {"l_sent", {"|+>", "|->", "-|1>", "|0>", "-|1>", "|1>"}},
        {"bob_s_dec", {"|0>", "|1>", "|1>", "|0>", "|0>", "|1>"}},
        {"bob_l_dec", {"|0>", "|1>", "|0>"}},
        {"v_plain", {"|1>", "|0>", "|1>", "|0>", "|0>", "|0>"}},
        {"v_enc", {"|0>", "|0>", "|0>", "|0>", "|1>", "|1>"}},
        {"v_sent", {"|0>", "|0>", "|0>", "|1>", "|0>", "|0>", "|0>", "|+>", "|1>", "|1>"}},
        {"alice_v_dec", {"|1>", "|0>", "|1>", "|0>", "|0>", "|0>"}},
    };
    v.expected_l = 2;
    v.expected_v_a = 5;
    v.expected_v_b = 0;
    v.expected_output = 3;
    return v;
}

OleSessionConfig ToyVector::session_config() const {
    return OleSessionConfig{.modulus = Modulus(modulus),
                            .delta = 4,
                            .threshold = 0.0,
                            .k_a = PauliKey::from_bit_string(k_a),
                            .k_b = PauliKey::from_bit_string(k_b),
                            .k_ab = PauliKey::from_bit_string(k_ab),
                            .seed = 0,
                            .record_states = true,
                            .pinned = pinned};
}

ToyVector ToyVector::from_json(const std::string& text) {
    // ordered_json keeps expected_states in document order.
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("toy vector: invalid JSON: ") + e.what());
    }
    try {
        ToyVector v;
        v.version = j.at("version").get<int>();
        if (v.version != 1) throw ConfigError("toy vector: unsupported version");
        v.modulus = j.at("modulus").get<uint64_t>();
        v.f_a = j.at("f").at("a").get<uint64_t>();
        v.f_b = j.at("f").at("b").get<uint64_t>();
        v.alpha = j.at("alpha").get<uint64_t>();
        v.k_a = j.at("keys").at("k_a").get<std::string>();
        v.k_b = j.at("keys").at("k_b").get<std::string>();
        v.k_ab = j.at("keys").at("k_ab").get<std::string>();
        v.pinned.s_a1 = j.at("tp").at("s_a1").get<uint64_t>();
        v.pinned.s_b1 = j.at("tp").at("s_b1").get<uint64_t>();
        v.pinned.d = j.at("tp").at("d").get<uint64_t>();
        v.pinned.s_msg = pin_from_json(j.at("decoys").at("s"));
        v.pinned.dg_msg = pin_from_json(j.at("decoys").at("dg"));
        v.pinned.l_msg = pin_from_json(j.at("decoys").at("l"));
        v.pinned.v_msg = pin_from_json(j.at("decoys").at("v"));
        for (const auto& [name, kets] : j.at("expected_states").items()) {
            v.expected_states.emplace_back(name, kets.get<std::vector<std::string>>());
        }
        v.expected_l = j.at("expected").at("l").get<uint64_t>();
        v.expected_v_a = j.at("expected").at("v_a").get<uint64_t>();
        v.expected_v_b = j.at("expected").at("v_b").get<uint64_t>();
        v.expected_output = j.at("expected").at("output").get<uint64_t>();
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("toy vector: missing or mistyped field: ") + e.what());
    }
}

std::string ToyVector::to_json() const {
    ordered_json j;
    j["version"] = version;
    j["modulus"] = modulus;
    j["f"] = ordered_json{{"a", f_a}, {"b", f_b}};
    j["alpha"] = alpha;
    j["keys"] = ordered_json{{"k_a", k_a}, {"k_b", k_b}, {"k_ab", k_ab}};
    j["tp"] = ordered_json{{"s_a1", pinned.s_a1}, {"s_b1", pinned.s_b1}, {"d", pinned.d}};
    ordered_json decoys;
    decoys["s"] = pin_to_json(pinned.s_msg);
    decoys["dg"] = pin_to_json(pinned.dg_msg);
    decoys["l"] = pin_to_json(pinned.l_msg);
    decoys["v"] = pin_to_json(pinned.v_msg);
    j["decoys"] = decoys;
    ordered_json states;
    for (const auto& [name, kets] : expected_states) states[name] = kets;
    j["expected_states"] = states;
    j["expected"] = ordered_json{
        {"l", expected_l}, {"v_a", expected_v_a}, {"v_b", expected_v_b}, {"output", expected_output}};
    return j.dump(2) + "\n";
}

ReplayReport replay_toy() { return replay_toy(ToyVector::builtin()); }

ReplayReport replay_toy(const ToyVector& vec) {
    ReplayReport report;
    OleSessionConfig cfg = vec.session_config();
    SeededRng rng(vec.modulus);  // every protocol choice is pinned by the vector
    OleTranscript t = run_ole({vec.f_a, vec.f_b}, vec.alpha, cfg, honest_edges(), rng);

    auto add_step = [&](const std::string& name, bool pass, std::string expected, std::string actual) {
        if (!pass && report.first_divergence.empty()) report.first_divergence = name;
        report.steps.push_back({name, pass, std::move(expected), std::move(actual)});
    };

    for (const auto& [name, expected_kets] : vec.expected_states) {
        const auto* actual = t.trace.find(name);
        if (!actual) {
            add_step(name, false, "present", "missing (session aborted earlier?)");
            continue;
        }
        // Amplitude-exact comparison through the canonical ket forms.
        bool ok = actual->size() == expected_kets.size();
        for (size_t i = 0; ok && i < expected_kets.size(); ++i) {
            const auto want = parse_ket_string(expected_kets[i]);
            const auto got = parse_ket_string((*actual)[i]);
            ok = want && got && approx_equal(*want, *got);
        }
        auto join = [](const std::vector<std::string>& kets) {
            std::string s;
            for (const auto& k : kets) s += k;
            return s;
        };
        add_step(name, ok, join(expected_kets), join(*actual));
    }

    add_step("l", t.views.bob_l == vec.expected_l, std::to_string(vec.expected_l),
             std::to_string(t.views.bob_l));
    const std::string v_expected =
        std::to_string(vec.expected_v_a) + "x+" + std::to_string(vec.expected_v_b);
    const std::string v_actual =
        std::to_string(t.views.bob_v_a) + "x+" + std::to_string(t.views.bob_v_b);
    add_step("v_poly", t.views.bob_v_a == vec.expected_v_a && t.views.bob_v_b == vec.expected_v_b,
             v_expected, v_actual);
    const bool out_ok = t.completed() && *t.output == vec.expected_output;
    add_step("output", out_ok, std::to_string(vec.expected_output),
             t.completed() ? std::to_string(*t.output) : "aborted: " + t.abort_info.stage);

    report.pass = std::all_of(report.steps.begin(), report.steps.end(),
                              [](const ReplayStep& s) { return s.pass; });
    if (report.pass) report.output = *t.output;

    ordered_json j;
    j["report"] = "replay_toy";
    j["vector_version"] = vec.version;
    j["scenario_hash"] = hex64(fnv1a64(vec.to_json()));
    j["pass"] = report.pass;
    j["first_divergence"] = report.first_divergence;
    ordered_json steps = ordered_json::array();
    for (const auto& s : report.steps) {
        steps.push_back(ordered_json{
            {"name", s.name}, {"pass", s.pass}, {"expected", s.expected}, {"actual", s.actual}});
    }
    j["steps"] = steps;
    j["counters"] = counters_json(t.counters);
    report.report_json = j.dump(2) + "\n";
    return report;
}

AttackCurveReport attack_curve(std::span<const size_t> deltas, size_t trials, uint64_t seed) {
    AttackCurveReport report;
    report.all_within = true;
    SeededRng root(seed);
    const std::vector<QubitState> payload(8, QubitState::ket0());

    for (AdversaryModel model : {AdversaryModel::InterceptResend, AdversaryModel::EntangleMeasure}) {
        for (size_t delta : deltas) {
            SeededRng rng = root.derive((static_cast<uint64_t>(model) << 32) | delta);
            size_t aborts = 0;
            for (size_t t = 0; t < trials; ++t) {
                auto [msg, rec] = insert_decoys(payload, delta, rng);
                const QuantumMessage tampered = transmit(msg, model, rng);
                if (verify_and_strip(tampered, rec, 0.0, rng).aborted) ++aborts;
            }
            AttackCurveReport::Row row;
            row.delta = delta;
            row.model = adversary_name(model);
            row.trials = trials;
            row.aborts = aborts;
            row.empirical = static_cast<double>(aborts) / static_cast<double>(trials);
            row.analytic = 1.0 - std::pow(0.75, static_cast<double>(delta));
            const BinomialBound bound = binomial_3sigma(row.analytic, trials);
            row.lo = bound.lo;
            row.hi = bound.hi;
            row.within = bound.contains(row.empirical);
            report.all_within = report.all_within && row.within;
            report.rows.push_back(row);
        }
    }

    ordered_json j;
    j["report"] = "attack_curve";
    j["seed"] = seed;
    j["trials"] = trials;
    j["all_within_3sigma"] = report.all_within;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        rows.push_back(ordered_json{{"model", r.model},
                                    {"delta", r.delta},
                                    {"aborts", r.aborts},
                                    {"empirical", r.empirical},
                                    {"analytic", r.analytic},
                                    {"ci_lo", r.lo},
                                    {"ci_hi", r.hi},
                                    {"within", r.within}});
    }
    j["rows"] = rows;
    report.report_json = j.dump(2) + "\n";
    return report;
}

CommAuditReport comm_audit(std::span<const uint64_t> p_list, size_t m, size_t n, uint64_t seed) {
    CommAuditReport report;
    SeededRng root(seed);
    const size_t delta = 16;

    for (uint64_t pv : p_list) {
        const Modulus p(pv);
        SeededRng rng = root.derive(pv);
        OleSessionConfig cfg = make_session_config(p, delta, 0.0, rng.next_u64());
        const OleFunction f{rng.below(pv), rng.below(pv)};
        const uint64_t alpha = rng.below(pv);
        OleTranscript t = run_ole(f, alpha, cfg, honest_edges(), rng);
        CommAuditReport::OleRow row;
        row.p = pv;
        row.width = qubit_width(p);
        row.payload_qubits = t.counters.payload_qubits();
        row.expected = 7ull * row.width;
        row.ok = t.completed() && row.payload_qubits == row.expected;
        report.ole_rows.push_back(row);
    }

    // MPSI totals over a small (p, m, n) grid; fit T = c1 * sessions * L +
    // c2 * sessions and report the worst relative residual.
    std::vector<std::pair<size_t, size_t>> shapes{{m, n}};
    if (m > 2) shapes.push_back({2, n});
    if (n > 1) shapes.push_back({m, 1});
    for (uint64_t pv : p_list) {
        const Modulus p(pv);
        if (!p.is_prime() || !p.is_odd()) continue;
        for (auto [mm, nn] : shapes) {
            SeededRng rng = root.derive(0x5000 + pv + 131 * mm + 17 * nn);
            MpsiParams params{.modulus = p,
                              .party_count = mm,
                              .set_size = nn,
                              .eval_points = {},
                              .u_policy = UDegreePolicy::Secure,
                              .delta = delta,
                              .threshold = 0.0,
                              .seed = rng.next_u64()};
            std::vector<PartyInput> inputs;
            for (size_t j = 1; j <= mm; ++j) {
                std::vector<uint64_t> elems;
                std::unordered_set<uint64_t> seen;
                while (elems.size() < nn) {
                    const uint64_t v = rng.below(pv);
                    if (seen.insert(v).second) elems.push_back(v);
                }
                inputs.push_back({j, std::move(elems)});
            }
            MpsiResult res = run_mpsi(inputs, params, honest_edges(), rng);
            CommAuditReport::MpsiRow row;
            row.p = pv;
            row.m = mm;
            row.n = nn;
            row.sessions = res.transcript.ole_sessions;
            row.width = qubit_width(p);
            row.qubits = res.transcript.counters.total.qubits_sent;
            report.mpsi_rows.push_back(row);
        }
    }

    // Two-parameter least squares without intercept.
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (const auto& r : report.mpsi_rows) {
        const double x1 = static_cast<double>(r.sessions) * r.width;
        const double x2 = static_cast<double>(r.sessions);
        const double y = static_cast<double>(r.qubits);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * y;
        b2 += x2 * y;
    }
    const double det = s11 * s22 - s12 * s12;
    if (det != 0.0 && !report.mpsi_rows.empty()) {
        report.coeff_per_session_width = (b1 * s22 - b2 * s12) / det;
        report.coeff_per_session = (s11 * b2 - s12 * b1) / det;
        for (const auto& r : report.mpsi_rows) {
            const double fit = report.coeff_per_session_width * static_cast<double>(r.sessions) * r.width +
                               report.coeff_per_session * static_cast<double>(r.sessions);
            const double rel =
                std::abs(fit - static_cast<double>(r.qubits)) / static_cast<double>(r.qubits);
            report.max_residual = std::max(report.max_residual, rel);
        }
    }
    report.ok = report.max_residual < 0.01 &&
                std::all_of(report.ole_rows.begin(), report.ole_rows.end(),
                            [](const auto& r) { return r.ok; });

    ordered_json j;
    j["report"] = "comm_audit";
    j["seed"] = seed;
    j["ok"] = report.ok;
    ordered_json ole = ordered_json::array();
    for (const auto& r : report.ole_rows) {
        ole.push_back(ordered_json{{"p", r.p},
                                   {"width", r.width},
                                   {"payload_qubits", r.payload_qubits},
                                   {"expected_7L", r.expected},
                                   {"ok", r.ok}});
    }
    j["ole"] = ole;
    ordered_json mpsi = ordered_json::array();
    for (const auto& r : report.mpsi_rows) {
        mpsi.push_back(ordered_json{{"p", r.p},
                                    {"m", r.m},
                                    {"n", r.n},
                                    {"sessions", r.sessions},
                                    {"width", r.width},
                                    {"qubits", r.qubits}});
    }
    j["mpsi"] = mpsi;
    j["fit"] = ordered_json{{"coeff_per_session_width", report.coeff_per_session_width},
                            {"coeff_per_session", report.coeff_per_session},
                            {"max_residual", report.max_residual}};
    report.report_json = j.dump(2) + "\n";
    return report;
}

std::string Scenario::canonical_json() const {
    // nlohmann::json objects iterate in key order, so this dump is canonical.
    nlohmann::json j;
    j["version"] = version;
    j["protocol"] = protocol;
    j["modulus"] = modulus;
    j["trials"] = trials;
    j["seed"] = seed;
    j["delta"] = delta;
    j["threshold"] = threshold;
    j["adversaries"] = adversaries;
    if (f_a) j["f_a"] = *f_a;
    if (f_b) j["f_b"] = *f_b;
    if (alpha) j["alpha"] = *alpha;
    if (protocol == "mpsi") {
        j["m"] = m;
        j["n"] = n;
        j["sets"] = sets;
        j["u_degree"] = u_degree;
    }
    return j.dump();
}

Scenario Scenario::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    Scenario sc;
    try {
        sc.version = j.value("version", 1);
        sc.protocol = j.at("protocol").get<std::string>();
        sc.modulus = j.at("modulus").get<uint64_t>();
        sc.trials = j.value("trials", size_t{1});
        sc.seed = j.value("seed", uint64_t{0});
        sc.delta = j.value("delta", size_t{16});
        sc.threshold = j.value("threshold", 0.0);
        if (j.contains("adversaries")) {
            for (const auto& [edge, model] : j.at("adversaries").items()) {
                sc.adversaries[edge] = model.get<std::string>();
            }
        }
        if (j.contains("f")) {
            sc.f_a = j.at("f").at("a").get<uint64_t>();
            sc.f_b = j.at("f").at("b").get<uint64_t>();
        }
        if (j.contains("alpha")) sc.alpha = j.at("alpha").get<uint64_t>();
        sc.m = j.value("m", size_t{0});
        sc.n = j.value("n", size_t{0});
        if (j.contains("sets")) sc.sets = j.at("sets").get<std::vector<std::vector<uint64_t>>>();
        sc.u_degree = j.value("u_degree", std::string("secure"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: missing or mistyped field: ") + e.what());
    }
    sc.validate();
    return sc;
}

void Scenario::validate() const {
    if (version != 1) throw ConfigError("scenario: unsupported version");
    if (protocol != "ole" && protocol != "mpsi") {
        throw ConfigError("scenario: protocol must be \"ole\" or \"mpsi\"");
    }
    if (modulus < 2) throw ConfigError("scenario: modulus must be >= 2");
    if (trials == 0) throw ConfigError("scenario: trials must be >= 1");
    if (threshold < 0.0 || threshold > 1.0) throw ConfigError("scenario: threshold must lie in [0, 1]");
    for (const auto& [edge, model] : adversaries) {
        if (edge != "tp->bob" && edge != "tp->alice" && edge != "alice->bob" &&
            edge != "bob->alice") {
            throw ConfigError("scenario: unknown edge \"" + edge + "\"");
        }
        if (!parse_adversary_name(model)) {
            throw ConfigError("scenario: unknown adversary model \"" + model + "\"");
        }
    }
    if (protocol == "ole") {
        if (f_a && *f_a >= modulus) throw ConfigError("scenario: f.a must be < modulus");
        if (f_b && *f_b >= modulus) throw ConfigError("scenario: f.b must be < modulus");
        if (alpha && *alpha >= modulus) throw ConfigError("scenario: alpha must be < modulus");
        if (f_a.has_value() != f_b.has_value()) throw ConfigError("scenario: f requires both a and b");
        return;
    }
    // mpsi
    if (!is_prime_u64(modulus) || modulus == 2) {
        throw ConfigError(
            "scenario: mpsi requires an odd prime modulus (interpolation runs over a field); got " +
            std::to_string(modulus));
    }
    if (m < 2) throw ConfigError("scenario: mpsi needs m >= 2 parties");
    if (n < 1) throw ConfigError("scenario: mpsi needs n >= 1 (empty sets unsupported)");
    if (3 * n + 1 >= modulus) throw ConfigError("scenario: 3n+1 evaluation points must fit below p");
    if (u_degree != "paper" && u_degree != "secure") {
        throw ConfigError("scenario: u_degree must be \"paper\" or \"secure\"");
    }
    if (!sets.empty()) {
        if (sets.size() != m) throw ConfigError("scenario: sets must list one set per party");
        for (const auto& s : sets) {
            if (s.size() != n) throw ConfigError("scenario: every set must have exactly n elements");
            std::unordered_set<uint64_t> seen;
            for (uint64_t v : s) {
                if (v >= modulus) throw ConfigError("scenario: set element out of range");
                if (!seen.insert(v).second) throw ConfigError("scenario: duplicate set element");
            }
        }
    }
}

AdversaryPlacement Scenario::placement() const {
    AdversaryPlacement p = honest_edges();
    for (const auto& [edge, model] : adversaries) {
        const AdversaryModel am = *parse_adversary_name(model);
        if (edge == "tp->bob") p[static_cast<size_t>(Edge::TpToBob)] = am;
        if (edge == "tp->alice") p[static_cast<size_t>(Edge::TpToAlice)] = am;
        if (edge == "alice->bob") p[static_cast<size_t>(Edge::AliceToBob)] = am;
        if (edge == "bob->alice") p[static_cast<size_t>(Edge::BobToAlice)] = am;
    }
    return p;
}

void TrialAggregate::merge(const TrialAggregate& other) {
    trials += other.trials;
    completed += other.completed;
    aborted += other.aborted;
    oracle_matches += other.oracle_matches;
    counters.merge(other.counters);
}

namespace {

std::vector<uint64_t> random_distinct(size_t n, uint64_t p, SeededRng& rng) {
    std::vector<uint64_t> out;
    std::unordered_set<uint64_t> seen;
    while (out.size() < n) {
        const uint64_t v = rng.below(p);
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

std::vector<uint64_t> oracle_intersection(const std::vector<std::vector<uint64_t>>& sets) {
    std::vector<uint64_t> inter = sets.front();
    std::sort(inter.begin(), inter.end());
    for (size_t j = 1; j < sets.size(); ++j) {
        std::vector<uint64_t> s = sets[j];
        std::sort(s.begin(), s.end());
        std::vector<uint64_t> next;
        std::set_intersection(inter.begin(), inter.end(), s.begin(), s.end(),
                              std::back_inserter(next));
        inter = std::move(next);
    }
    return inter;
}

}  // namespace

ScenarioReport run_scenario(const Scenario& sc) {
    sc.validate();
    ScenarioReport report;
    report.seed = sc.seed;
    report.scenario_hash = hex64(fnv1a64(sc.canonical_json()));

    const Modulus p(sc.modulus);
    const AdversaryPlacement placement = sc.placement();
    SeededRng root(sc.seed);
    std::vector<TranscriptEvent> events;
    std::vector<ordered_json> trial_rows;

    for (size_t t = 0; t < sc.trials; ++t) {
        SeededRng trial_rng = root.derive(t);
        TrialAggregate agg;
        agg.trials = 1;
        ordered_json row;
        row["trial"] = t;

        if (sc.protocol == "ole") {
            const OleFunction f{sc.f_a ? *sc.f_a : trial_rng.below(p.value()),
                                sc.f_b ? *sc.f_b : trial_rng.below(p.value())};
            const uint64_t alpha = sc.alpha ? *sc.alpha : trial_rng.below(p.value());
            OleSessionConfig cfg = make_session_config(p, sc.delta, sc.threshold, trial_rng.next_u64());
            OleTranscript tr = run_ole(f, alpha, cfg, placement, trial_rng);
            agg.counters.merge(tr.counters);
            if (tr.completed()) {
                agg.completed = 1;
                const uint64_t direct = p.add(p.mul(f.a, alpha), f.b);
                if (*tr.output == direct) agg.oracle_matches = 1;
                row["status"] = "ok";
                row["output"] = *tr.output;
            } else {
                agg.aborted = 1;
                row["status"] = "abort";
                row["stage"] = tr.abort_info.stage;
            }
            for (TranscriptEvent e : tr.events) {
                e.session = static_cast<int>(t);
                events.push_back(std::move(e));
            }
        } else {
            std::vector<std::vector<uint64_t>> sets = sc.sets;
            if (sets.empty()) {
                sets.resize(sc.m);
                for (auto& s : sets) s = random_distinct(sc.n, p.value(), trial_rng);
            }
            std::vector<PartyInput> inputs;
            for (size_t j = 0; j < sc.m; ++j) inputs.push_back({j + 1, sets[j]});
            MpsiParams params{.modulus = p,
                              .party_count = sc.m,
                              .set_size = sc.n,
                              .eval_points = {},
                              .u_policy = sc.u_degree == "paper" ? UDegreePolicy::Paper
                                                                 : UDegreePolicy::Secure,
                              .delta = sc.delta,
                              .threshold = sc.threshold,
                              .seed = trial_rng.next_u64()};
            MpsiResult res = run_mpsi(inputs, params, placement, trial_rng);
            agg.counters.merge(res.transcript.counters);
            if (res.completed()) {
                agg.completed = 1;
                if (res.intersection == oracle_intersection(sets)) agg.oracle_matches = 1;
                row["status"] = "ok";
                row["intersection"] = res.intersection;
                row["sessions"] = res.transcript.ole_sessions;
            } else {
                agg.aborted = 1;
                row["status"] = "abort";
                row["stage"] = res.transcript.abort_info.stage;
            }
            for (TranscriptEvent e : res.transcript.events) {
                e.session = static_cast<int>(t);
                events.push_back(std::move(e));
            }
        }
        trial_rows.push_back(std::move(row));
        report.totals.merge(agg);
    }

    report.abort_rate =
        static_cast<double>(report.totals.aborted) / static_cast<double>(report.totals.trials);
    report.transcript_jsonl = to_jsonl(events);

    const BinomialBound ci = binomial_3sigma(report.abort_rate, report.totals.trials);
    ordered_json j;
    j["report"] = "scenario";
    j["version"] = sc.version;
    j["protocol"] = sc.protocol;
    j["scenario_hash"] = report.scenario_hash;
    j["seed"] = sc.seed;
    j["trials"] = report.totals.trials;
    j["completed"] = report.totals.completed;
    j["aborted"] = report.totals.aborted;
    j["abort_rate"] = report.abort_rate;
    j["abort_rate_ci3sigma"] = ordered_json::array({ci.lo, ci.hi});
    j["oracle_matches"] = report.totals.oracle_matches;
    j["counters"] = counters_json(report.totals.counters);
    j["trials_detail"] = trial_rows;
    report.report_json = j.dump(2) + "\n";
    return report;
}

}  // namespace qsmpc
