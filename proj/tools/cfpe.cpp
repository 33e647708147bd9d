// cfpe: command-line front end for the counterfactual photoemission simulator.
//
//   cfpe weakvals --preset arm-weakvals
//   cfpe zeno --preset zeno-recycling --seed 7 --out results --format csv
//   cfpe sweep --config configs/convention_sweep.json --out results

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cfpe/cli/commands.hpp"

namespace {

using cfpe::cli::json;

struct Options {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "json";
    unsigned threads = 0;
    bool timestamp = false;
    std::vector<std::string> sets;

    std::optional<std::string> convention;
    std::optional<std::string> ordering;
    std::optional<std::string> op;
    std::optional<std::string> model;
    std::optional<std::uint64_t> cycles;
    std::optional<std::uint64_t> runs;
    std::optional<double> dt;
    std::vector<double> g_values;
    std::vector<double> dt_values;
};

json parse_set_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json assemble_config(const std::string& command, const Options& o) {
    json cfg = json::object();
    if (!o.preset.empty()) {
        const auto& table = cfpe::cli::presets();
        const auto it = table.find(o.preset);
        if (it == table.end()) throw cfpe::cli::ConfigError("unknown preset '" + o.preset + "'");
        if (it->second.command != command) {
            throw cfpe::cli::ConfigError("preset '" + o.preset + "' belongs to '" + it->second.command + "'");
        }
        cfg = it->second.config;
    }
    if (!o.config_path.empty()) {
        json file = cfpe::cli::load_config_file(o.config_path);
        // A previous result record is also accepted; its resolved config is reused.
        if (file.is_object() && file.contains("experiment_id") && file.contains("config")) {
            if (file.value("command", "") != command) {
                throw cfpe::cli::ConfigError("record in '" + o.config_path + "' was produced by '" +
                                             file.value("command", "") + "'");
            }
            file = file["config"];
        }
        if (!file.is_object()) throw cfpe::cli::ConfigError("config file must hold a JSON object");
        for (const auto& [k, v] : file.items()) cfg[k] = v;
    }
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw cfpe::cli::ConfigError("--set expects key=value, got '" + s + "'");
        cfpe::cli::set_path(cfg, s.substr(0, eq), parse_set_value(s.substr(eq + 1)));
    }
    if (o.convention) cfg["convention"] = *o.convention;
    if (o.ordering) cfg["ordering"] = *o.ordering;
    if (o.op) cfg["operator"] = *o.op;
    if (o.model) cfg["model"] = *o.model;
    if (o.cycles) cfg["cycles"] = *o.cycles;
    if (o.runs) cfg["runs"] = *o.runs;
    if (o.dt) cfg["interaction_dt"] = *o.dt;
    if (!o.g_values.empty()) cfg["g_values"] = o.g_values;
    if (!o.dt_values.empty()) cfg["dt_values"] = o.dt_values;
    if (o.seed && (command == "zeno" || command == "sweep")) cfg["seed"] = *o.seed;
    return cfg;
}

int run(const std::string& command, const Options& o) {
    const json cfg = assemble_config(command, o);
    const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    const cfpe::cli::ResultRecord record = cfpe::cli::run_single(command, cfg, threads);
    const std::optional<std::string> stamp = o.timestamp ? std::optional<std::string>(utc_now()) : std::nullopt;
    for (const auto& w : record.warnings) std::cerr << "warning: " << w << "\n";
    if (o.out_dir.empty()) {
        std::cout << cfpe::cli::record_to_json(record, stamp).dump(2) << "\n";
    } else {
        const auto format = o.format == "csv" ? cfpe::cli::OutputFormat::Csv : cfpe::cli::OutputFormat::Json;
        for (const auto& p : cfpe::cli::write_record(record, o.out_dir, format, stamp)) {
            std::cout << p.string() << "\n";
        }
    }
    return record.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact state-vector simulator for a counterfactual photoemission protocol"};
    app.require_subcommand(0, 1);
    Options o;

    bool list_presets = false;
    app.add_flag("--list-presets", list_presets, "List named presets and exit");

    // Global flags: accepted before or after the subcommand name.
    auto add_global = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config file, or a previous result record");
        sub->add_option("--preset", o.preset, "Named preset (see --list-presets)");
        sub->add_option("--out", o.out_dir, "Write results into this directory instead of stdout");
        sub->add_option("--format", o.format, "Output format for --out")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--set", o.sets, "Override a config key, e.g. --set cavity.length=2")->allow_extra_args(false);
        sub->add_flag("--timestamp", o.timestamp, "Record the wall-clock time in the output");
        sub->add_option("--seed", o.seed, "RNG seed; required by zeno, ignored by deterministic commands");
        sub->add_option("--threads", o.threads, "Worker threads (never changes results)");
    };
    add_global(&app);
    auto add_common = [](CLI::App* sub) { sub->fallthrough(); };

    auto* weakvals = app.add_subcommand("weakvals", "Weak values of the arm observables");
    add_common(weakvals);
    weakvals->add_option("--convention", o.convention, "literal | claim-consistent");
    weakvals->add_option("--ordering", o.ordering, "post-a-pre | pre-a-post");
    weakvals->add_option("--operator", o.op, "all, pi-I, pi-II, h-I, h-II, identity, field, pi-II-pi-0, ...");

    auto* pointer = app.add_subcommand("pointer", "Weak measurement with an explicit Gaussian pointer");
    add_common(pointer);
    pointer->add_option("--operator", o.op, "Observable coupled to the pointer");
    pointer->add_option("--convention", o.convention, "literal | claim-consistent");
    pointer->add_option("--ordering", o.ordering, "post-a-pre | pre-a-post");
    pointer->add_option("--g", o.g_values, "Coupling strengths");

    auto* zeno = app.add_subcommand("zeno", "Repeated-cycle Monte Carlo");
    add_common(zeno);
    zeno->add_option("--model", o.model, "interrogation | protocol-faithful");
    zeno->add_option("--cycles", o.cycles, "Cycles per run");
    zeno->add_option("--runs", o.runs, "Independent runs");
    zeno->add_option("--dt", o.dt, "Interaction time per cycle (protocol-faithful)");
    zeno->add_option("--convention", o.convention, "literal | claim-consistent");

    auto* cavity = app.add_subcommand("cavity", "Photon and electron cavity coupling");
    add_common(cavity);
    cavity->add_option("--dt", o.dt_values, "Interaction times for the emission table");

    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep over another command");
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cfpe::cli::kExitConfig;
    }

    if (list_presets) {
        for (const auto& [name, p] : cfpe::cli::presets()) std::cout << name << "\t" << p.command << "\n";
        return 0;
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
        std::cerr << app.help();
        return cfpe::cli::kExitConfig;
    }

    try {
        return run(subs.front()->get_name(), o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cfpe::cli::exit_code_for(e);
    }
}
