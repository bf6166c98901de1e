#include "kerrpur/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerrpur/branch_checks.hpp"
#include "kerrpur/protocol.hpp"
#include "kerrpur/qnd.hpp"
#include "kerrpur/report.hpp"
#include "kerrpur/sampler.hpp"

namespace kerrpur {

namespace {

using nlohmann::json;

struct RunOptions {
    std::string mode = "exact";
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    bool serial = false;
    std::string out = "-";
    std::string config;
};

struct PhaseOptions {
    std::string theta = "pi/4";
    std::string theta_prime = "3pi/4";
};

void add_run_options(CLI::App& sub, RunOptions& o) {
    sub.add_option("--mode", o.mode, "exact or mc")->capture_default_str();
    sub.add_option("--trials", o.trials, "Monte Carlo trials")->capture_default_str();
    sub.add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
    sub.add_flag("--serial", o.serial, "use the single-threaded sampler");
    sub.add_option("--out", o.out, "JSON output file ('-' for stdout)")->capture_default_str();
}

void add_phase_options(CLI::App& sub, PhaseOptions& o) {
    sub.add_option("--theta", o.theta, "Kerr phase θ, e.g. pi/4")->capture_default_str();
    sub.add_option("--theta-prime", o.theta_prime, "Kerr phase θ′, e.g. 3pi/4")->capture_default_str();
}

void add_config_option(CLI::App& sub, std::string& path) {
    sub.add_option("--config", path, "flat key=value file; command-line flags take precedence");
}

/// Fill options not given on the command line from a key=value file.
void apply_config_file(CLI::App& sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    const auto items = CLI::ConfigINI().from_config(in);
    for (const auto& item : items) {
        if (!item.parents.empty() && item.parents != std::vector<std::string>{sub.get_name()}) continue;
        if (item.name == "config") continue;
        std::string key = item.name;
        std::replace(key.begin(), key.end(), '_', '-');
        auto* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr) throw ConfigError("unknown key '" + item.name + "' in config file '" + path + "'");
        if (opt->count() > 0) continue;
        opt->add_result(item.inputs);
        opt->run_callback();
    }
}

RunMode resolve_mode(const RunOptions& o) {
    const auto ex = o.serial ? Execution::Serial : Execution::Parallel;
    if (o.mode == "exact") return RunMode::exact();
    if (o.mode == "mc") {
        if (o.trials == 0) throw ConfigError("--trials must be at least 1");
        return RunMode::monte_carlo(o.trials, o.seed, ex);
    }
    throw ConfigError("--mode must be 'exact' or 'mc', got '" + o.mode + "'");
}

json run_config_json(const RunOptions& o) {
    return {{"mode", o.mode}, {"trials", o.trials}, {"seed", o.seed}, {"execution", o.serial ? "serial" : "parallel"}};
}

/// JSON to the file named by --out; with '-', JSON goes to `out` and the summary to `err`.
void emit(const json& doc, const std::string& summary, const RunOptions& o, std::ostream& out, std::ostream& err) {
    const std::string text = doc.dump(2) + "\n";
    if (o.out == "-") {
        out << text;
        err << summary;
        return;
    }
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
    f << text;
    out << summary;
}

std::string fixed(double v, int digits = 12) {
    if (std::isnan(v)) return "n/a";
    std::ostringstream s;
    s << std::setprecision(digits) << std::fixed << v;
    return s.str();
}

// --------------------------------------------------------------------------- verify-branches

struct VerifyOptions {
    PhaseOptions phases;
    std::vector<std::string> only;
    std::string out;
    std::string config;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
    const auto results =
        run_branch_checks(PhaseTag::parse(o.phases.theta), PhaseTag::parse(o.phases.theta_prime), o.only);
    bool all = true;
    json doc = {{"command", "verify-branches"},
                {"config", {{"theta", o.phases.theta}, {"theta_prime", o.phases.theta_prime}, {"only", o.only}}},
                {"checks", json::array()}};
    for (const auto& r : results) {
        out << std::left << std::setw(24) << r.id << (r.passed ? "pass  " : "FAIL  ") << r.description << '\n';
        if (!r.passed) out << "    first differing term: " << r.first_difference << '\n';
        all = all && r.passed;
        doc["checks"].push_back({{"id", r.id},
                                 {"passed", r.passed},
                                 {"terms", r.expected_terms},
                                 {"first_difference", r.first_difference}});
    }
    out << results.size() << " checks, " << (all ? "all passed" : "mismatch found") << '\n';
    doc["passed"] = all;
    if (!o.out.empty()) {
        std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
        f << doc.dump(2) << '\n';
    }
    return all ? kExitOk : kExitVerificationFailed;
}

// --------------------------------------------------------------------------- stage1

struct Stage1Options {
    double p1 = 0.1;
    double p2 = 0.01;
    double f0 = 0.8;
    std::string variant = "qnd1";
    PhaseOptions phases;
    RunOptions run;
    std::string csv;
};

QndConfig stage1_qnd(const std::string& variant, const PhaseOptions& phases) {
    const auto v = parse_variant(variant);
    QndConfig cfg{v, PhaseTag::parse(phases.theta), PhaseTag::parse(phases.theta_prime)};
    if (v != QndVariant::Qnd1 && v != QndVariant::Qnd3) throw ConfigError("--variant must be qnd1 or qnd3");
    cfg.validate();
    return cfg;
}

const std::vector<std::string> kStage1CsvHeader{
    "p1",       "p2",       "f0",          "variant",     "mode",         "trials",         "seed",
    "fidelity", "closed_form_fidelity",    "yield",       "fidelity_se",  "yield_se",       "kept_correct",
    "kept_erroneous", "discarded", "same_mode_double"};

std::vector<std::string> stage1_csv_row(double p1, double p2, double f0, const std::string& variant,
                                        const RunOptions& o, const RunReport& r) {
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    const auto& t = r.tally;
    return {format_number(p1),          format_number(p2),
            format_number(f0),          variant,
            o.mode,                     std::to_string(o.trials),
            std::to_string(o.seed),     format_number(r.fidelity),
            format_number(stage1_fidelity_closed_form(p1, p2, f0)),
            format_number(r.yield),     opt(r.fidelity_se),
            opt(r.yield_se),            format_number(t.kept_correct),
            format_number(t.kept_erroneous), format_number(t.discarded),
            format_number(t.same_mode_double)};
}

int cmd_stage1(const Stage1Options& o, std::ostream& out, std::ostream& err) {
    const PdcSourceParams source{o.p1, o.p2};
    const NoiseParams noise{o.f0};
    source.validate();
    noise.validate();
    const auto qnd = stage1_qnd(o.variant, o.phases);
    const auto mode = resolve_mode(o.run);
    const auto report = stage1_run(source, noise, qnd, mode);
    const double closed = stage1_fidelity_closed_form(o.p1, o.p2, o.f0);

    json params = {{"p1", o.p1},
                   {"p2", o.p2},
                   {"f0", o.f0},
                   {"variant", o.variant},
                   {"theta", o.phases.theta},
                   {"theta_prime", o.phases.theta_prime}};
    json config = params;
    config.update(run_config_json(o.run));
    json doc = {{"command", "stage1"},
                {"config", config},
                {"params", params},
                {"mode", mode_name(mode)},
                {"seed", o.run.seed},
                {"trials", mode.is_exact() ? json(nullptr) : json(o.run.trials)},
                {"closed_form_fidelity", closed},
                {"closed_form_yield", stage1_yield_closed_form(o.p1, o.p2, o.f0)}};
    doc.update(report_json(report));

    std::ostringstream summary;
    summary << "stage 1 (" << o.variant << ", " << mode_name(mode) << ")  p1=" << o.p1 << " p2=" << o.p2
            << " f0=" << o.f0 << '\n'
            << "  fidelity     " << fixed(report.fidelity);
    if (report.fidelity_se) summary << " ± " << fixed(*report.fidelity_se, 6);
    summary << "\n  closed form  " << fixed(closed) << "\n  yield        " << fixed(report.yield) << '\n';
    emit(doc, summary.str(), o.run, out, err);

    if (!o.csv.empty()) append_csv(o.csv, kStage1CsvHeader, stage1_csv_row(o.p1, o.p2, o.f0, o.variant, o.run, report));
    return kExitOk;
}

// --------------------------------------------------------------------------- stage2

struct Stage2Options {
    double fidelity = 0.8;
    int rounds = 1;
    bool baseline = false;
    RunOptions run;
    std::string csv;
};

int cmd_stage2(const Stage2Options& o, std::ostream& out, std::ostream& err) {
    require_purifiable(o.fidelity);
    if (o.rounds < 1) throw ConfigError("--rounds must be at least 1");
    const auto mode = resolve_mode(o.run);
    // Inputs for every round come from the exact map so Monte Carlo rounds stay independent.
    const auto exact_rows = stage2_iterate(o.fidelity, o.rounds);

    json params = {{"F", o.fidelity}, {"rounds", o.rounds}, {"baseline", o.baseline}};
    json config = params;
    config.update(run_config_json(o.run));
    json doc = {{"command", "stage2"},
                {"config", config},
                {"params", params},
                {"mode", mode_name(mode)},
                {"seed", o.run.seed},
                {"trials", mode.is_exact() ? json(nullptr) : json(o.run.trials)},
                {"rounds", json::array()}};
    if (o.baseline) doc["baseline"] = json::array();

    std::ostringstream summary;
    summary << "stage 2 (" << mode_name(mode) << ")  F=" << o.fidelity << '\n'
            << "  round  fidelity        yield           cumulative_yield\n";
    double cumulative = 1.0;
    RunReport last;
    std::vector<std::vector<std::string>> csv_rows;
    for (const auto& row : exact_rows) {
        const auto r = stage2_run(row.input_fidelity, mode);
        cumulative *= 0.5 * r.yield;
        last = r;
        json entry = report_json(r);
        entry["round"] = row.round;
        entry["input_fidelity"] = row.input_fidelity;
        entry["closed_form_fidelity"] = stage2_fidelity_closed_form(row.input_fidelity);
        entry["closed_form_yield"] = stage2_yield_closed_form(row.input_fidelity);
        entry["cumulative_yield"] = cumulative;
        doc["rounds"].push_back(entry);
        summary << "  " << std::setw(5) << row.round << "  " << fixed(r.fidelity) << "  " << fixed(r.yield) << "  "
                << fixed(cumulative) << '\n';

        std::vector<std::string> csv{std::to_string(row.round), format_number(row.input_fidelity),
                                     format_number(r.fidelity), format_number(r.yield), format_number(cumulative)};
        if (o.baseline) {
            const auto b = pbs_baseline(row.input_fidelity, mode);
            const double ratio = r.yield / b.yield;
            json be = report_json(b);
            be["round"] = row.round;
            be["input_fidelity"] = row.input_fidelity;
            be["yield_ratio"] = std::isfinite(ratio) ? json(ratio) : json(nullptr);
            doc["baseline"].push_back(be);
            summary << "         baseline " << fixed(b.fidelity) << "  " << fixed(b.yield) << "  ratio "
                    << fixed(ratio, 6) << '\n';
            csv.insert(csv.end(), {format_number(b.fidelity), format_number(b.yield), format_number(ratio)});
        }
        csv_rows.push_back(std::move(csv));
    }
    doc["fidelity"] = last.fidelity;
    doc["yield"] = last.yield;
    doc["cumulative_yield"] = cumulative;
    emit(doc, summary.str(), o.run, out, err);

    if (!o.csv.empty()) {
        std::vector<std::string> header{"round", "input_fidelity", "fidelity", "yield", "cumulative_yield"};
        if (o.baseline) header.insert(header.end(), {"baseline_fidelity", "baseline_yield", "yield_ratio"});
        for (const auto& row : csv_rows) append_csv(o.csv, header, row);
    }
    return kExitOk;
}

// --------------------------------------------------------------------------- sweep

struct SweepOptions {
    std::string kind = "stage1";
    std::vector<double> p1{0.1};
    std::vector<double> p2{0.01};
    std::vector<double> p2_scale;
    std::vector<double> f0{0.8};
    std::vector<double> fidelity{0.8};
    std::string variant = "qnd1";
    PhaseOptions phases;
    RunOptions run;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
    const auto mode = resolve_mode(o.run);
    std::ofstream file;
    std::ostream* sink = &out;
    if (o.run.out != "-") {
        file.open(o.run.out, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write '" + o.run.out + "'");
        sink = &file;
    }
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };

    if (o.kind == "stage1") {
        const auto qnd = stage1_qnd(o.variant, o.phases);
        *sink << csv_line(kStage1CsvHeader) << '\n';
        for (double p1 : o.p1) {
            std::vector<double> p2s = o.p2;
            if (!o.p2_scale.empty()) {
                p2s.clear();
                for (double s : o.p2_scale) p2s.push_back(s * p1 * p1);
            }
            for (double p2 : p2s) {
                for (double f0 : o.f0) {
                    const auto r = stage1_run({p1, p2}, {f0}, qnd, mode);
                    *sink << csv_line(stage1_csv_row(p1, p2, f0, o.variant, o.run, r)) << '\n';
                }
            }
        }
    } else if (o.kind == "stage2" || o.kind == "pbs") {
        *sink << "kind,F,mode,trials,seed,fidelity,closed_form_fidelity,yield,closed_form_yield,fidelity_se,yield_se\n";
        for (double f : o.fidelity) {
            const auto r = o.kind == "stage2" ? stage2_run(f, mode) : pbs_baseline(f, mode);
            const double cf_yield = stage2_yield_closed_form(f) * (o.kind == "pbs" ? 0.5 : 1.0);
            *sink << csv_line({o.kind, format_number(f), o.run.mode, std::to_string(o.run.trials),
                               std::to_string(o.run.seed), format_number(r.fidelity),
                               format_number(stage2_fidelity_closed_form(f)), format_number(r.yield),
                               format_number(cf_yield), opt(r.fidelity_se), opt(r.yield_se)})
                  << '\n';
        }
    } else {
        throw ConfigError("--kind must be stage1, stage2 or pbs, got '" + o.kind + "'");
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kerr-QND entanglement purification simulator", "kerrpur"};
    app.require_subcommand(1);

    VerifyOptions verify;
    auto* v = app.add_subcommand("verify-branches", "compare detector outputs with the expected branch states");
    add_phase_options(*v, verify.phases);
    v->add_option("--only", verify.only, "run only these check ids (comma separated)")->delimiter(',');
    v->add_option("--out", verify.out, "also write results as JSON");
    add_config_option(*v, verify.config);

    Stage1Options s1;
    auto* st1 = app.add_subcommand("stage1", "PDC sources with QND1/QND3 purification");
    st1->add_option("--p1", s1.p1, "one-pair emission probability")->capture_default_str();
    st1->add_option("--p2", s1.p2, "two-pair emission probability")->capture_default_str();
    st1->add_option("--f0", s1.f0, "probability that a pair is not bit-flipped")->capture_default_str();
    st1->add_option("--variant", s1.variant, "qnd1 or qnd3")->capture_default_str();
    add_phase_options(*st1, s1.phases);
    add_run_options(*st1, s1.run);
    st1->add_option("--csv", s1.csv, "append a CSV row to this file");
    add_config_option(*st1, s1.run.config);

    Stage2Options s2;
    auto* st2 = app.add_subcommand("stage2", "ideal mixed pairs with QND2 purification");
    st2->add_option("--F", s2.fidelity, "input fidelity, 1/2 < F <= 1")->capture_default_str();
    st2->add_option("--rounds", s2.rounds, "purification rounds")->capture_default_str();
    st2->add_flag("--baseline", s2.baseline, "also run the linear-optics PBS protocol");
    add_run_options(*st2, s2.run);
    st2->add_option("--csv", s2.csv, "append per-round CSV rows to this file");
    add_config_option(*st2, s2.run.config);

    SweepOptions sw;
    auto* swp = app.add_subcommand("sweep", "cartesian parameter grid, one CSV row per point");
    swp->add_option("--kind", sw.kind, "stage1, stage2 or pbs")->capture_default_str();
    swp->add_option("--p1", sw.p1, "p1 grid")->delimiter(',');
    swp->add_option("--p2", sw.p2, "p2 grid")->delimiter(',');
    swp->add_option("--p2-scale", sw.p2_scale, "p2 grid as multiples of p1^2 (overrides --p2)")->delimiter(',');
    swp->add_option("--f0", sw.f0, "f0 grid")->delimiter(',');
    swp->add_option("--F", sw.fidelity, "F grid for stage2/pbs")->delimiter(',');
    swp->add_option("--variant", sw.variant, "qnd1 or qnd3")->capture_default_str();
    add_phase_options(*swp, sw.phases);
    add_run_options(*swp, sw.run);
    swp->get_option("--out")->description("CSV output file ('-' for stdout)");
    add_config_option(*swp, sw.run.config);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (v->parsed()) {
            apply_config_file(*v, verify.config);
            return cmd_verify(verify, out);
        }
        if (st1->parsed()) {
            apply_config_file(*st1, s1.run.config);
            return cmd_stage1(s1, out, err);
        }
        if (st2->parsed()) {
            apply_config_file(*st2, s2.run.config);
            return cmd_stage2(s2, out, err);
        }
        apply_config_file(*swp, sw.run.config);
        return cmd_sweep(sw, out);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitVerificationFailed;
    }
}

}  // namespace kerrpur
