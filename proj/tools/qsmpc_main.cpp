// qsmpc: command line front end for the quantum-secure MPC simulator.
//
// Subcommands: replay-toy, ole-run, mpsi-run, attack-curve, comm-audit.
// Exit codes: 0 success, 1 assertion/fixture failure, 2 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsmpc/harness.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qsmpc::ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Output directory resolution: --out flag, then QSMPC_OUT_DIR, then cwd.
fs::path out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("QSMPC_OUT_DIR")) return env;
    return ".";
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qsmpc::ConfigError("cannot write file: " + path.string());
    out << content;
    std::cerr << "wrote " << path.string() << "\n";
}

struct CommonFlags {
    std::string scenario_path;
    std::string out_path;
    std::optional<uint64_t> seed;
    std::optional<size_t> trials;
    std::optional<size_t> delta;
    std::optional<double> threshold;
    std::string u_degree;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_scenario = true, bool with_delta = true) {
    if (with_scenario) cmd->add_option("--scenario", flags.scenario_path, "Scenario JSON file");
    cmd->add_option("--seed", flags.seed, "Root seed (overrides scenario)");
    cmd->add_option("--trials", flags.trials, "Trial count (overrides scenario)");
    if (with_delta) cmd->add_option("--delta", flags.delta, "Decoys per message (overrides scenario)");
    cmd->add_option("--threshold", flags.threshold, "Decoy error-rate abort threshold");
    cmd->add_option("--u-degree", flags.u_degree, "Mask degree policy: paper|secure")
        ->check(CLI::IsMember({"paper", "secure"}));
    cmd->add_option("--out", flags.out_path, "Output directory (default: $QSMPC_OUT_DIR or .)");
}

qsmpc::Scenario scenario_for(const std::string& protocol, const CommonFlags& flags) {
    qsmpc::Scenario sc;
    if (!flags.scenario_path.empty()) {
        sc = qsmpc::Scenario::from_json(read_file(flags.scenario_path));
        if (sc.protocol != protocol) {
            throw qsmpc::ConfigError("scenario protocol \"" + sc.protocol + "\" does not match the " +
                                     protocol + " subcommand");
        }
    } else if (protocol == "ole") {
        sc.protocol = "ole";
        sc.modulus = 101;
        sc.trials = 1000;
    } else {
        sc.protocol = "mpsi";
        sc.modulus = 10007;
        sc.m = 3;
        sc.n = 3;
        sc.trials = 20;
    }
    if (flags.seed) sc.seed = *flags.seed;
    if (flags.trials) sc.trials = *flags.trials;
    if (flags.delta) sc.delta = *flags.delta;
    if (flags.threshold) sc.threshold = *flags.threshold;
    if (!flags.u_degree.empty()) sc.u_degree = flags.u_degree;
    sc.validate();
    return sc;
}

int do_replay(const CommonFlags& flags) {
    qsmpc::ToyVector vec = flags.scenario_path.empty()
                               ? qsmpc::ToyVector::builtin()
                               : qsmpc::ToyVector::from_json(read_file(flags.scenario_path));
    const qsmpc::ReplayReport report = qsmpc::replay_toy(vec);
    std::cout << report.report_json;
    write_file(out_dir(flags.out_path), "replay_report.json", report.report_json);
    if (!report.pass) {
        std::cerr << "replay diverged at step: " << report.first_divergence << "\n";
        return 1;
    }
    return 0;
}

int do_scenario(const std::string& protocol, const CommonFlags& flags) {
    const qsmpc::Scenario sc = scenario_for(protocol, flags);
    const qsmpc::ScenarioReport report = qsmpc::run_scenario(sc);
    std::cout << report.report_json;
    const fs::path dir = out_dir(flags.out_path);
    write_file(dir, protocol + "_report.json", report.report_json);
    write_file(dir, protocol + "_transcript.jsonl", report.transcript_jsonl);
    // Honest runs must match direct evaluation in every completed trial.
    if (report.totals.oracle_matches != report.totals.completed) {
        std::cerr << "completed trials disagree with direct evaluation\n";
        return 1;
    }
    return 0;
}

int do_attack_curve(const CommonFlags& flags, std::vector<size_t>& deltas) {
    if (deltas.empty()) deltas = {1, 2, 4, 8, 16};
    const size_t trials = flags.trials.value_or(10000);
    const uint64_t seed = flags.seed.value_or(1);
    const qsmpc::AttackCurveReport report = qsmpc::attack_curve(deltas, trials, seed);
    std::cout << report.report_json;
    write_file(out_dir(flags.out_path), "attack_curve_report.json", report.report_json);
    return report.all_within ? 0 : 1;
}

int do_comm_audit(const CommonFlags& flags, std::vector<uint64_t>& moduli, size_t m, size_t n) {
    if (moduli.empty()) moduli = {257, 65537};
    const uint64_t seed = flags.seed.value_or(1);
    const qsmpc::CommAuditReport report = qsmpc::comm_audit(moduli, m, n, seed);
    std::cout << report.report_json;
    write_file(out_dir(flags.out_path), "comm_audit_report.json", report.report_json);
    return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for quantum-secure oblivious linear evaluation and multiparty "
                 "private set intersection"};
    app.require_subcommand(1);

    CommonFlags replay_flags, ole_flags, mpsi_flags, curve_flags, audit_flags;
    std::vector<size_t> curve_deltas;
    std::vector<uint64_t> audit_moduli;
    size_t audit_m = 3, audit_n = 2;

    CLI::App* replay = app.add_subcommand("replay-toy", "Replay the built-in worked example and "
                                                        "check every intermediate state");
    add_common(replay, replay_flags);

    CLI::App* ole = app.add_subcommand("ole-run", "Run OLE sessions from a scenario");
    add_common(ole, ole_flags);

    CLI::App* mpsi = app.add_subcommand("mpsi-run", "Run MPSI instances from a scenario");
    add_common(mpsi, mpsi_flags);

    CLI::App* curve = app.add_subcommand("attack-curve", "Empirical decoy detection rate vs the "
                                                         "1-(3/4)^delta law");
    add_common(curve, curve_flags, false, false);
    curve->add_option("--delta", curve_deltas, "Decoy counts to sweep (repeatable)")
        ->take_all();

    CLI::App* audit = app.add_subcommand("comm-audit", "Measure per-session qubit costs and "
                                                       "scaling");
    add_common(audit, audit_flags, false);
    audit->add_option("--modulus", audit_moduli, "Moduli to audit (repeatable)")->take_all();
    audit->add_option("--parties", audit_m, "MPSI party count for the scaling fit");
    audit->add_option("--set-size", audit_n, "MPSI set size for the scaling fit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (replay->parsed()) return do_replay(replay_flags);
        if (ole->parsed()) return do_scenario("ole", ole_flags);
        if (mpsi->parsed()) return do_scenario("mpsi", mpsi_flags);
        if (curve->parsed()) return do_attack_curve(curve_flags, curve_deltas);
        if (audit->parsed()) return do_comm_audit(audit_flags, audit_moduli, audit_m, audit_n);
    } catch (const qsmpc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
