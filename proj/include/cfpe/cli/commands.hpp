#pragma once

// Experiment commands behind the `cfpe` tool. Each takes a user config (JSON),
// resolves it against the command's defaults, validates every parameter, runs,
// and returns a self-contained ResultRecord.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfpe/cavity.hpp"
#include "cfpe/cli/config.hpp"
#include "cfpe/cli/record.hpp"
#include "cfpe/pointer.hpp"
#include "cfpe/protocol.hpp"
#include "cfpe/weakvalues.hpp"
#include "cfpe/zeno.hpp"

namespace cfpe::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitOrthogonal = 3,
    kExitNumericQuality = 4,
    kExitSweepFailure = 5,
};

// ---------------------------------------------------------------------------
// Defaults

inline json cavity_defaults() {
    return json{{"length", 1.0},
                {"omega", 1.0},
                {"photon_momentum", {1.0, 0.0, 0.0}},
                {"polarization", {1.0, 0.0, 0.0}},
                {"electron_momentum", {1.0, 0.0, 0.0}},
                {"electron_polarization", {1.0, 0.0, 0.0}},
                {"eval_position", {0.0, 0.0, 0.0}}};
}

inline json weakvals_defaults() {
    return json{{"convention", "claim-consistent"}, {"ordering", "post-a-pre"}, {"fock_dim", 2}, {"operator", "all"}};
}

inline json pointer_defaults() {
    return json{{"operator", "pi-II"},
                {"convention", "claim-consistent"},
                {"ordering", "post-a-pre"},
                {"fock_dim", 2},
                {"g_values", {0.1, 0.05, 0.025}},
                {"sigma", 1.0},
                {"samples", 256},
                {"grid_min", -8.0},
                {"grid_max", 8.0}};
}

inline json zeno_defaults() {
    return json{{"model", "interrogation"},
                {"cycles", 100},
                {"runs", 100000},
                {"convention", "claim-consistent"},
                {"interaction_dt", 0.0},
                {"fock_dim", 2},
                {"curve_cycles", json::array()},
                {"seed", nullptr},
                {"cavity", cavity_defaults()}};
}

inline json cavity_command_defaults() {
    json d = cavity_defaults();
    d["fock_dim"] = 2;
    // Up to the first Rabi peak of the default geometry (kappa_eff dt = pi/2).
    d["dt_values"] = {0.0, 0.0001, 0.001, 0.01, 0.05, 0.125, 0.25};
    return d;
}

inline json sweep_defaults() {
    return json{{"command", "weakvals"}, {"base", json::object()}, {"grid", json::object()}, {"seed", nullptr}};
}

inline json defaults_for(const std::string& command) {
    if (command == "weakvals") return weakvals_defaults();
    if (command == "pointer") return pointer_defaults();
    if (command == "zeno") return zeno_defaults();
    if (command == "cavity") return cavity_command_defaults();
    if (command == "sweep") return sweep_defaults();
    throw ConfigError("unknown command '" + command + "'");
}

struct Preset {
    std::string command;
    json config;
};

inline const std::map<std::string, Preset>& presets() {
    static const std::map<std::string, Preset> table = {
        {"arm-weakvals", {"weakvals", {{"convention", "claim-consistent"}, {"operator", "all"}}}},
        {"arm-weakvals-literal", {"weakvals", {{"convention", "literal"}, {"operator", "all"}}}},
        {"pointer-law", {"pointer", {{"operator", "h-II"}, {"g_values", {0.1, 0.05, 0.025}}}}},
        {"zeno-recycling",
         {"zeno", {{"model", "interrogation"}, {"cycles", 100}, {"runs", 100000}, {"curve_cycles", {2, 10, 100, 1000}}}}},
        {"zeno-protocol",
         {"zeno", {{"model", "protocol-faithful"}, {"cycles", 1}, {"runs", 1000000}, {"interaction_dt", 0.0}}}},
        {"cavity-transition", {"cavity", json::object()}},
        {"convention-sweep",
         {"sweep", {{"command", "weakvals"}, {"grid", {{"convention", {"literal", "claim-consistent"}}}}}}},
    };
    return table;
}

// ---------------------------------------------------------------------------
// Shared parsing

inline Vec3 get_vec3(const json& cfg, const char* key) {
    const json& v = cfg.at(key);
    if (!v.is_array() || v.size() != 3) throw ConfigError("config key '" + std::string(key) + "' must be a 3-vector");
    Vec3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw ConfigError("config key '" + std::string(key) + "' must hold numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

inline CavityConfig parse_cavity(const json& cfg) {
    CavityConfig c;
    c.length = get_number(cfg, "length");
    c.omega = get_number(cfg, "omega");
    c.photon_momentum = get_vec3(cfg, "photon_momentum");
    c.polarization = get_vec3(cfg, "polarization");
    c.electron_momentum = get_vec3(cfg, "electron_momentum");
    c.electron_polarization = get_vec3(cfg, "electron_polarization");
    c.eval_position = get_vec3(cfg, "eval_position");
    c.validate();
    return c;
}

// Named observables on the protocol basis.
inline Operator protocol_operator(const std::string& name, const BasisSpec& basis) {
    const auto pi_i = [&] { return arm_projector(Arm::I, basis); };
    const auto pi_ii = [&] { return arm_projector(Arm::II, basis); };
    if (name == "pi-I") return pi_i();
    if (name == "pi-II") return pi_ii();
    if (name == "h-I") return arm_hamiltonian(Arm::I, basis);
    if (name == "h-II") return arm_hamiltonian(Arm::II, basis);
    if (name == "identity") return Operator::identity(basis);
    if (name == "field") return field_hamiltonian(basis);
    if (name == "pi-I-pi-0") return pi_i() * number_projector(0, basis);
    if (name == "pi-I-pi-1") return pi_i() * number_projector(1, basis);
    if (name == "pi-II-pi-0") return pi_ii() * number_projector(0, basis);
    if (name == "pi-II-pi-1") return pi_ii() * number_projector(1, basis);
    throw ConfigError("unknown operator '" + name + "'");
}

inline ResultRecord start_record(const std::string& command, json resolved) {
    ResultRecord r;
    r.command = command;
    r.experiment_id = experiment_id(command, resolved);
    r.config = std::move(resolved);
    return r;
}

// ---------------------------------------------------------------------------
// weakvals

inline ResultRecord cmd_weakvals(const json& user) {
    const json cfg = resolve(weakvals_defaults(), user);
    const PostSelection conv = parse_post_selection(get_string(cfg, "convention"));
    const WeakValueOrdering ordering = parse_ordering(get_string(cfg, "ordering"));
    const std::size_t fock_dim = get_count(cfg, "fock_dim");
    const std::string op = get_string(cfg, "operator");
    require_fock_dim(fock_dim);
    const BasisSpec basis = protocol_basis(fock_dim);
    if (op != "all") protocol_operator(op, basis);

    const PrePostEnsemble e = protocol_ensemble(conv, fock_dim);
    ResultRecord r = start_record("weakvals", cfg);
    r.outputs["convention"] = std::string(to_string(conv));
    r.outputs["ordering"] = std::string(to_string(ordering));
    r.outputs["overlap_re"] = e.overlap().real();
    r.outputs["overlap_im"] = e.overlap().imag();
    r.outputs["postselection_probability"] = e.postselection_probability();

    Table t{"weak_values", {"operator", "re", "im", "claimed", "matches_claim"}, {}};
    auto add = [&](const std::string& name, std::optional<double> claimed) {
        const WeakValueResult w = weak_value(protocol_operator(name, basis), e, ordering);
        const json claim = claimed ? json(*claimed) : json(nullptr);
        const json match = claimed ? json(std::abs(w.value - Complex(*claimed)) <= 1e-12) : json(nullptr);
        t.add_row({name, w.value.real(), w.value.imag(), claim, match});
        return w;
    };

    if (op != "all") {
        const auto w = add(op, std::nullopt);
        r.outputs["weak_value_re"] = w.value.real();
        r.outputs["weak_value_im"] = w.value.imag();
    } else {
        const auto pi_i = add("pi-I", 1.0);
        const auto h_i = add("h-I", 0.5);
        const auto pi_ii = add("pi-II", 0.0);
        const auto h_ii = add("h-II", 1.0);
        const auto pair0 = add("pi-II-pi-0", std::nullopt);
        const auto pair1 = add("pi-II-pi-1", std::nullopt);
        r.outputs["pi_I"] = pi_i.value.real();
        r.outputs["h_I"] = h_i.value.real();
        r.outputs["pi_II"] = pi_ii.value.real();
        r.outputs["h_II"] = h_ii.value.real();
        r.outputs["pair_pi_II_pi_0"] = pair0.value.real();
        r.outputs["pair_pi_II_pi_1"] = pair1.value.real();
        r.outputs["pair_sum"] = (pair0.value + pair1.value).real();
        bool all_match = true;
        for (const auto& row : t.rows) {
            if (row[4].is_boolean() && !row[4].get<bool>()) all_match = false;
        }
        r.outputs["quadruple_matches_claim"] = all_match;
        if (!all_match) {
            std::string note = "weak values differ from the claimed (Pi_I, H_I, Pi_II, H_II) = (1, 0.5, 0, 1):";
            for (const auto& row : t.rows) {
                if (row[4].is_boolean() && !row[4].get<bool>()) {
                    note += " " + row[0].get<std::string>() + " = " + format_number(row[1].get<double>()) +
                            " (claimed " + format_number(row[3].get<double>()) + ")";
                }
            }
            r.outputs["discrepancy"] = note;
            r.warnings.push_back(note);
        } else {
            r.outputs["discrepancy"] = nullptr;
        }
    }
    r.tables.push_back(std::move(t));
    return r;
}

// ---------------------------------------------------------------------------
// pointer

inline ResultRecord cmd_pointer(const json& user) {
    const json cfg = resolve(pointer_defaults(), user);
    const PostSelection conv = parse_post_selection(get_string(cfg, "convention"));
    const WeakValueOrdering ordering = parse_ordering(get_string(cfg, "ordering"));
    const std::size_t fock_dim = get_count(cfg, "fock_dim");
    require_fock_dim(fock_dim);
    const std::string op_name = get_string(cfg, "operator");
    const auto g_values = get_numbers(cfg, "g_values");
    if (g_values.empty()) throw ConfigError("g_values must not be empty");
    PointerConfig base;
    base.sigma = get_number(cfg, "sigma");
    base.samples = get_count(cfg, "samples");
    base.grid_min = get_number(cfg, "grid_min");
    base.grid_max = get_number(cfg, "grid_max");
    for (double g : g_values) {
        base.coupling_g = g;
        base.validate();
    }

    const PrePostEnsemble e = protocol_ensemble(conv, fock_dim);
    const Operator a = protocol_operator(op_name, e.basis());
    const WeakValueResult w = weak_value(a, e, ordering);

    ResultRecord r = start_record("pointer", cfg);
    r.outputs["operator"] = op_name;
    r.outputs["weak_value_re"] = w.value.real();
    r.outputs["weak_value_im"] = w.value.imag();

    Table t{"pointer",
            {"g", "mean", "variance", "postselection_probability", "predicted_mean", "deviation", "analytic_mean"},
            {}};
    std::vector<double> deviations;
    double max_dev = 0.0;
    for (double g : g_values) {
        PointerConfig p = base;
        p.coupling_g = g;
        const JointState joint = von_neumann_couple(e.pre(), a, p);
        const PointerReadout ro = pointer_readout(joint, e.post());
        const PointerReadout an = analytic_pointer_readout(e.pre(), a, e.post(), p.sigma, g);
        const double predicted = g * w.value.real();
        const double dev = ro.mean - predicted;
        deviations.push_back(dev);
        max_dev = std::max(max_dev, std::abs(dev));
        t.add_row({g, ro.mean, ro.variance, ro.postselection_probability, predicted, dev, an.mean});
    }
    json ratios = json::array();
    for (std::size_t i = 0; i + 1 < deviations.size(); ++i) {
        ratios.push_back(deviations[i + 1] != 0.0 ? json(deviations[i] / deviations[i + 1]) : json(nullptr));
    }
    r.outputs["max_abs_deviation"] = max_dev;
    r.outputs["deviation_ratios"] = ratios;
    r.tables.push_back(std::move(t));
    return r;
}

// ---------------------------------------------------------------------------
// zeno

inline ZenoConfig parse_zeno(const json& cfg) {
    ZenoConfig z;
    z.model = parse_zeno_model(get_string(cfg, "model"));
    z.cycles = get_count(cfg, "cycles");
    z.runs = get_count(cfg, "runs");
    z.convention = parse_post_selection(get_string(cfg, "convention"));
    z.interaction_dt = get_number(cfg, "interaction_dt");
    z.fock_dim = get_count(cfg, "fock_dim");
    if (cfg.at("seed").is_null()) throw ConfigError("zeno requires a seed (--seed <u64>)");
    z.seed = cfg.at("seed").get<std::uint64_t>();
    z.cavity = parse_cavity(cfg.at("cavity"));
    z.validate();
    return z;
}

// `threads` affects only wall time, so it is not part of the recorded config.
inline ResultRecord cmd_zeno(const json& user, unsigned threads = 1) {
    const json cfg = resolve(zeno_defaults(), user);
    ZenoConfig z = parse_zeno(cfg);
    z.threads = threads;
    std::vector<std::uint64_t> curve_n = get_counts(cfg, "curve_cycles");
    if (curve_n.empty()) curve_n.push_back(z.cycles);
    for (auto n : curve_n) {
        if (n < 1) throw ConfigError("curve_cycles entries must be at least 1");
    }

    const ZenoProtocol protocol(z);
    const MonteCarloSummary mc = monte_carlo(z);
    const auto curve = survival_curve(z, curve_n);

    ResultRecord r = start_record("zeno", cfg);
    r.outputs["model"] = std::string(to_string(z.model));
    r.outputs["cycles"] = z.cycles;
    r.outputs["runs"] = z.runs;
    r.outputs["per_cycle_probability"] = protocol.cycle_probabilities().success;
    r.outputs["emission_given_success"] = protocol.cycle_probabilities().emission_given_success;
    r.outputs["postselected_emission"] = protocol.cycle_probabilities().postselected_emission;
    r.outputs["analytic_survival"] = z.model == ZenoModel::Interrogation ? interrogation_survival(z.cycles)
                                                                        : protocol.survival_probability();
    r.outputs["survival_frequency"] = mc.survival_frequency;
    r.outputs["survival_stderr"] = mc.survival_stderr;
    r.outputs["survival_ci_low"] = mc.survival_ci_low;
    r.outputs["survival_ci_high"] = mc.survival_ci_high;
    r.outputs["mean_electrons"] = mc.mean_electrons;
    r.outputs["electron_variance"] = mc.electron_variance;
    r.outputs["mean_completed_cycles"] = mc.mean_completed_cycles;
    r.outputs["cycle_attempts"] = mc.cycle_attempts;
    r.outputs["cycle_successes"] = mc.cycle_successes;
    r.outputs["per_cycle_success_frequency"] = mc.per_cycle_success_frequency;
    r.outputs["per_cycle_success_stderr"] = mc.per_cycle_success_stderr;

    Table survival{"survival", {"cycles", "survival", "standard_error", "analytic"}, {}};
    for (const auto& p : curve) survival.add_row({p.cycles, p.survival, p.standard_error, p.analytic});
    Table hist{"electron_histogram", {"electrons", "runs"}, {}};
    for (std::size_t k = 0; k < mc.electron_histogram.size(); ++k) {
        if (mc.electron_histogram[k] != 0) hist.add_row({k, mc.electron_histogram[k]});
    }
    r.tables.push_back(std::move(survival));
    r.tables.push_back(std::move(hist));
    return r;
}

// ---------------------------------------------------------------------------
// cavity

inline ResultRecord cmd_cavity(const json& user) {
    const json cfg = resolve(cavity_command_defaults(), user);
    json cavity_part = json::object();
    const json geometry = cavity_defaults();
    for (const auto& [k, v] : geometry.items()) cavity_part[k] = cfg.at(k);
    const CavityConfig c = parse_cavity(cavity_part);
    const std::size_t fock_dim = get_count(cfg, "fock_dim");
    const auto dts = get_numbers(cfg, "dt_values");
    if (dts.empty()) throw ConfigError("dt_values must not be empty");
    for (double dt : dts) {
        if (!(dt >= 0.0) || !std::isfinite(dt)) throw ConfigError("dt_values must be non-negative");
    }
    const BasisSpec basis = cavity_basis(fock_dim);

    ResultRecord r = start_record("cavity", cfg);
    r.outputs["kappa"] = c.kappa();
    r.outputs["kappa_electron"] = c.kappa_electron();
    r.outputs["kappa_eff"] = c.kappa_eff();
    r.outputs["degenerate_coupling"] = coupling_is_degenerate(c);

    const CavityState left = build_left_state(c, basis);
    if (coupling_is_degenerate(c)) {
        r.warnings.push_back("eps . p = 0: the photon coupling vanishes and the literal map has no right state");
        r.outputs["literal_amplitude_re"] = nullptr;
        r.outputs["literal_amplitude_im"] = nullptr;
        r.outputs["literal_amplitude_abs"] = nullptr;
        r.outputs["literal_photon_occupation"] = nullptr;
    } else {
        const InteractionResult lit = apply_interaction(left, c, InteractionMode::Literal);
        const Operator n_photon = embed(fock::number(fock_dim), kPhotonFactor, basis);
        r.outputs["literal_amplitude_re"] = lit.amplitude.real();
        r.outputs["literal_amplitude_im"] = lit.amplitude.imag();
        r.outputs["literal_amplitude_abs"] = std::abs(lit.amplitude);
        r.outputs["literal_photon_occupation"] =
            matrix_element(lit.evolved.occupation, n_photon, lit.evolved.occupation).real();
    }

    Table t{"emission", {"dt", "emission_probability", "first_order_probability", "relative_deviation", "norm"}, {}};
    for (double dt : dts) {
        const double exact = emission_probability(c, dt, fock_dim);
        const InteractionResult first = apply_interaction(left, c, InteractionMode::FirstOrderUnitary, dt);
        const InteractionResult full = apply_interaction(left, c, InteractionMode::Exact, dt);
        const double approx = first.transition_probability;
        const json rel = exact > 1e-12 ? json((approx - exact) / exact) : json(nullptr);
        t.add_row({dt, exact, approx, rel, full.evolved.occupation.norm()});
    }
    r.tables.push_back(std::move(t));
    return r;
}

// ---------------------------------------------------------------------------
// sweep

inline ResultRecord run_single(const std::string& command, const json& config, unsigned threads);

inline std::string sweep_cell_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

inline ResultRecord cmd_sweep(const json& user, unsigned threads = 1) {
    json cfg = sweep_defaults();
    if (!user.is_null()) {
        if (!user.is_object()) throw ConfigError("sweep config must be an object");
        for (const auto& [k, v] : user.items()) {
            if (!cfg.contains(k)) throw ConfigError("unknown config key '" + k + "'");
            cfg[k] = v;
        }
    }
    if (!cfg["command"].is_string()) throw ConfigError("sweep 'command' must be a string");
    const std::string command = cfg["command"].get<std::string>();
    if (command == "sweep") throw ConfigError("sweep cannot nest another sweep");
    defaults_for(command);
    if (!cfg["base"].is_object()) throw ConfigError("sweep 'base' must be an object");
    if (!cfg["grid"].is_object() || cfg["grid"].empty()) {
        throw ConfigError("sweep 'grid' must be a non-empty object of value lists");
    }
    if (!cfg["seed"].is_null() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<std::int64_t>() >= 0)) {
        throw ConfigError("sweep 'seed' must be a non-negative integer");
    }

    std::vector<std::string> keys;
    std::vector<std::vector<json>> values;
    for (const auto& [k, v] : cfg["grid"].items()) {
        if (!v.is_array() || v.empty()) throw ConfigError("grid entry '" + k + "' must be a non-empty list");
        keys.push_back(k);
        values.emplace_back(v.begin(), v.end());
    }

    // Check every grid point resolves before running any of them.
    std::vector<json> points;
    std::vector<std::vector<json>> point_values;
    std::vector<std::size_t> idx(keys.size(), 0);
    while (true) {
        json point = cfg["base"];
        std::vector<json> chosen;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            set_path(point, keys[i], values[i][idx[i]]);
            chosen.push_back(values[i][idx[i]]);
        }
        if (command == "zeno" && !cfg["seed"].is_null() && !point.contains("seed")) point["seed"] = cfg["seed"];
        resolve(defaults_for(command), point);
        points.push_back(std::move(point));
        point_values.push_back(std::move(chosen));
        std::size_t d = keys.size();
        while (d > 0) {
            --d;
            if (++idx[d] < values[d].size()) break;
            idx[d] = 0;
            if (d == 0) {
                d = keys.size() + 1;
                break;
            }
        }
        if (d == keys.size() + 1) break;
    }

    ResultRecord r = start_record("sweep", cfg);
    std::vector<std::string> output_keys;
    std::vector<json> row_outputs;
    std::vector<std::string> row_errors;
    bool any_failure = false;
    for (const auto& point : points) {
        try {
            const ResultRecord sub = run_single(command, point, threads);
            for (const auto& [k, v] : sub.outputs.items()) {
                if (std::find(output_keys.begin(), output_keys.end(), k) == output_keys.end()) output_keys.push_back(k);
            }
            row_outputs.push_back(sub.outputs);
            row_errors.emplace_back();
        } catch (const Error& e) {
            any_failure = true;
            row_outputs.push_back(json::object());
            row_errors.emplace_back(e.what());
        }
    }

    Table t{"sweep", {}, {}};
    t.columns = keys;
    t.columns.push_back("status");
    t.columns.push_back("error");
    for (const auto& k : output_keys) t.columns.push_back(k);
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<json> row = point_values[p];
        for (auto& v : row) {
            if (!v.is_primitive()) v = v.dump();
        }
        row.push_back(row_errors[p].empty() ? "ok" : "error");
        row.push_back(row_errors[p].empty() ? json(nullptr) : json(row_errors[p]));
        for (const auto& k : output_keys) {
            const json& o = row_outputs[p];
            if (!o.contains(k)) {
                row.push_back(nullptr);
            } else if (o[k].is_primitive()) {
                row.push_back(o[k]);
            } else {
                row.push_back(o[k].dump());
            }
        }
        t.add_row(std::move(row));
    }
    r.outputs["command"] = command;
    r.outputs["points"] = points.size();
    r.outputs["failed_points"] = std::count(row_errors.begin(), row_errors.end(), std::string()) == 0
                                     ? points.size()
                                     : points.size() - static_cast<std::size_t>(std::count(
                                                           row_errors.begin(), row_errors.end(), std::string()));
    r.tables.push_back(std::move(t));
    if (any_failure) r.exit_code = kExitSweepFailure;
    return r;
}

inline ResultRecord run_single(const std::string& command, const json& config, unsigned threads) {
    if (command == "weakvals") return cmd_weakvals(config);
    if (command == "pointer") return cmd_pointer(config);
    if (command == "zeno") return cmd_zeno(config, threads);
    if (command == "cavity") return cmd_cavity(config);
    if (command == "sweep") return cmd_sweep(config, threads);
    throw ConfigError("unknown command '" + command + "'");
}

// Maps library errors onto the documented exit codes.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const OrthogonalEnsembleError*>(&e)) return kExitOrthogonal;
    if (dynamic_cast<const NumericQualityError*>(&e)) return kExitNumericQuality;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
        dynamic_cast<const StructuralError*>(&e) || dynamic_cast<const DegenerateInputError*>(&e)) {
        return kExitConfig;
    }
    return kExitInternal;
}

}  // namespace cfpe::cli
