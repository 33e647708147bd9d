// Acceptance gate. Prints one line per criterion:
//   [PASS] C<n> <title>: <measured values>
// Usage: acceptance [--criterion N]   (default: all seven)

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "cfpe/cli/commands.hpp"
#include "support.hpp"

namespace {

using namespace cfpe;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failed;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed.push_back(what);
        }
    }

    std::string line() const {
        std::string out = detail.str();
        while (!out.empty() && (out.back() == ' ' || out.back() == ';')) out.pop_back();
        if (!failed.empty()) {
            out += " | failed:";
            for (const auto& f : failed) out += " [" + f + "]";
        }
        return out;
    }
};

std::string num(double v) { return cli::format_number(v); }

Verdict criterion_1() {
    Verdict v;
    const ArmWeakValues w = arm_weak_values(protocol_ensemble(PostSelection::ClaimConsistent));
    const double dev = std::max({std::abs(w.projector_i - 1.0), std::abs(w.energy_i - 0.5),
                                 std::abs(w.projector_ii), std::abs(w.energy_ii - 1.0)});
    v.check(dev <= 1e-12, "claim-consistent quadruple");
    const ArmWeakValues lit = arm_weak_values(protocol_ensemble(PostSelection::Literal));
    v.check(std::abs(lit.energy_ii + 1.0) <= 1e-12, "literal H_II = -1");
    const cli::ResultRecord rec = cli::cmd_weakvals(cli::json{{"convention", "literal"}});
    const bool documented = rec.outputs.at("quadruple_matches_claim") == false &&
                            rec.outputs.at("discrepancy").is_string() && !rec.warnings.empty();
    v.check(documented, "literal discrepancy reported in output");
    v.detail << "max deviation " << num(dev) << "; literal H_II = " << num(lit.energy_ii.real())
             << (documented ? " (reported as discrepancy)" : "");
    return v;
}

Verdict criterion_2() {
    Verdict v;
    for (auto conv : {PostSelection::Literal, PostSelection::ClaimConsistent}) {
        const auto e = protocol_ensemble(conv);
        const auto [w0, w1] = self_canceling_pair(e);
        const Complex pi_ii = weak_value(arm_projector(Arm::II, e.basis()), e).value;
        const double err = std::max(std::abs(w0.value + w1.value), std::abs(w0.value + w1.value - pi_ii));
        v.check(err <= 1e-12, std::string(to_string(conv)));
        v.detail << to_string(conv) << ": " << num(w0.value.real()) << " + " << num(w1.value.real())
                 << " (|sum| " << num(std::abs(w0.value + w1.value)) << ") ";
    }
    return v;
}

Verdict criterion_3() {
    Verdict v;
    const auto e = protocol_ensemble(PostSelection::ClaimConsistent);
    const BasisSpec& b = e.basis();
    const std::vector<std::pair<std::string, Operator>> ops = {{"pi-I", arm_projector(Arm::I, b)},
                                                              {"pi-II", arm_projector(Arm::II, b)},
                                                              {"h-I", arm_hamiltonian(Arm::I, b)},
                                                              {"h-II", arm_hamiltonian(Arm::II, b)}};
    const double gs[] = {0.1, 0.05, 0.025};
    for (const auto& [name, a] : ops) {
        const double aw = weak_value(a, e).value.real();
        double err[3];
        for (int i = 0; i < 3; ++i) {
            PointerConfig p;
            p.samples = 256;
            p.coupling_g = gs[i];
            err[i] = std::abs(pointer_readout(von_neumann_couple(e.pre(), a, p), e.post()).mean - gs[i] * aw);
        }
        const double r1 = err[0] / err[1];
        const double r2 = err[1] / err[2];
        const bool ok = r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5;
        v.check(ok, name + " ratio");
        v.detail << name << " err " << num(err[0]) << "/" << num(err[1]) << "/" << num(err[2]) << " ratios "
                 << num(r1) << "," << num(r2) << "; ";
    }
    return v;
}

Verdict criterion_4() {
    Verdict v;
    CavityConfig tilted;
    tilted.length = 2.0;
    tilted.omega = 0.5;
    tilted.photon_momentum = {1.0, 2.0, -0.5};
    tilted.polarization = {0.0, 0.8, 0.6};
    double worst_amp = 0.0;
    for (const CavityConfig& c : {CavityConfig{}, tilted}) {
        const double hand = std::sqrt(2.0 * std::numbers::pi / (c.length * c.length * c.length * c.omega)) *
                            (c.polarization[0] * c.photon_momentum[0] + c.polarization[1] * c.photon_momentum[1] +
                             c.polarization[2] * c.photon_momentum[2]);
        const BasisSpec b = cavity_basis(2);
        const InteractionResult r = apply_interaction(build_left_state(c, b), c, InteractionMode::Literal);
        const bool raised = std::norm(r.evolved.occupation.amplitude({1, 0})) > 1.0 - 1e-12;
        v.check(raised, "photon 0 -> 1");
        worst_amp = std::max(worst_amp, std::abs(std::abs(r.amplitude) - std::abs(hand)));
    }
    v.check(worst_amp <= 1e-12, "literal amplitude");

    const CavityConfig c;
    const BasisSpec b = cavity_basis(2);
    const CMatrix h = build_emission_coupling(c, b).matrix();
    double worst_rel = 0.0;
    for (double x : {1e-4, 1e-3, 3e-3, 1e-2}) {
        const double dt = x / c.kappa_eff();
        const double first = apply_interaction(build_left_state(c, b), c, InteractionMode::FirstOrderUnitary, dt)
                                 .transition_probability;
        const CMatrix u = (Complex(0.0, -dt) * h).exp();
        const double exact = std::norm(u(static_cast<Eigen::Index>(b.index({1, 1})), 0));
        const double target = c.kappa_eff() * c.kappa_eff() * dt * dt;
        worst_rel = std::max({worst_rel, std::abs(first - exact) / exact, std::abs(target - exact) / exact});
    }
    v.check(worst_rel <= 0.01, "first-order vs exponential");
    v.detail << "amplitude |err| " << num(worst_amp) << "; first-order rel. deviation " << num(worst_rel);
    return v;
}

Verdict criterion_5() {
    Verdict v;
    double last = 0.0;
    for (std::uint64_t n : {2u, 10u, 100u, 1000u}) {
        ZenoConfig cfg;
        cfg.model = ZenoModel::Interrogation;
        cfg.cycles = n;
        cfg.seed = 1;
        cfg.runs = 100000;
        cfg.threads = 0;
        const double c = std::cos(std::numbers::pi / (2.0 * static_cast<double>(n)));
        const double closed = std::pow(c * c, static_cast<double>(n));
        const double model = ZenoProtocol(cfg).survival_probability();
        v.check(std::abs(model - closed) <= 1e-12, "closed form N=" + std::to_string(n));
        v.check(model > last, "monotone at N=" + std::to_string(n));
        last = model;
        if (n <= 100) {
            const MonteCarloSummary mc = monte_carlo(cfg);
            const double z = std::abs(mc.survival_frequency - closed) / mc.survival_stderr;
            v.check(z <= 3.0, "MC N=" + std::to_string(n));
            v.detail << "N=" << n << " exact " << num(closed) << " MC " << num(mc.survival_frequency) << " ("
                     << num(z) << " se); ";
        }
    }
    ZenoConfig pf;
    pf.model = ZenoModel::ProtocolFaithful;
    pf.cycles = 1;
    pf.runs = 1000000;
    pf.interaction_dt = 0.0;
    pf.seed = 1;
    pf.threads = 0;
    const MonteCarloSummary mc = monte_carlo(pf);
    const double z = std::abs(mc.per_cycle_success_frequency - 1.0 / 9.0) / mc.per_cycle_success_stderr;
    v.check(z <= 3.0, "protocol-faithful 1/9");
    v.detail << "protocol-faithful freq " << num(mc.per_cycle_success_frequency) << " (" << num(z) << " se)";
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict criterion_6() {
    Verdict v;
    const auto root = std::filesystem::temp_directory_path() / ("cfpe_acceptance_" + std::to_string(::getpid()));
    const std::vector<cli::json> configs = {
        {{"model", "interrogation"}, {"cycles", 20}, {"runs", 50000}, {"curve_cycles", {2, 10, 20}}, {"seed", 77}},
        {{"model", "protocol-faithful"}, {"cycles", 3}, {"runs", 20000}, {"interaction_dt", 0.2},
         {"curve_cycles", {1, 2, 3}}, {"seed", 77}}};
    std::size_t compared = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        for (auto format : {cli::OutputFormat::Csv, cli::OutputFormat::Json}) {
            std::vector<std::vector<std::filesystem::path>> outputs;
            int run = 0;
            for (unsigned threads : {1u, 1u, 4u, 7u}) {
                const auto dir = root / ("c" + std::to_string(i)) / std::to_string(run++);
                outputs.push_back(cli::write_record(cli::cmd_zeno(configs[i], threads), dir, format));
            }
            for (std::size_t r = 1; r < outputs.size(); ++r) {
                v.check(outputs[r].size() == outputs[0].size(), "file set");
                for (std::size_t f = 0; f < outputs[0].size() && f < outputs[r].size(); ++f) {
                    v.check(slurp(outputs[0][f]) == slurp(outputs[r][f]), outputs[r][f].filename().string());
                    ++compared;
                }
            }
            std::filesystem::remove_all(root);
        }
    }
    v.detail << compared << " file pairs compared across reruns with 1, 1, 4, 7 threads";
    return v;
}

Verdict criterion_7() {
    Verdict v;
    std::size_t projectors = 0;
    for (std::size_t d = 2; d <= 5; ++d) {
        const BasisSpec b = protocol_basis(d);
        std::vector<Operator> ps = {arm_projector(Arm::I, b), arm_projector(Arm::II, b)};
        for (std::size_t n = 0; n < d; ++n) ps.push_back(number_projector(n, b));
        for (std::size_t n = 0; n < d; ++n) ps.push_back(arm_projector(Arm::II, b) * number_projector(n, b));
        for (const auto& p : ps) {
            v.check((p * p).matrix() == p.matrix(), "idempotent");
            v.check(adjoint(p).matrix() == p.matrix(), "hermitian");
            ++projectors;
        }
    }

    std::uniform_real_distribution<double> angle(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    auto& rng = testing::rng();
    double worst_unitary = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const BasisSpec b = protocol_basis(2 + static_cast<std::size_t>(i % 3));
        for (const Operator& u : {beam_splitter(angle(rng), angle(rng), b), phase_shifter(angle(rng), b)}) {
            const CMatrix m = u.matrix();
            const auto n = m.rows();
            worst_unitary = std::max(worst_unitary, (m.adjoint() * m - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
        }
    }
    v.check(worst_unitary <= 1e-12, "optical unitarity");

    double worst_norm = 0.0;
    double worst_lin = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const BasisSpec b = testing::random_basis();
        const StateVector pre = testing::random_state(b), post = testing::random_state(b);
        const Operator a = testing::random_operator(b), c = testing::random_operator(b);
        const Complex alpha = testing::random_scalar(), beta = testing::random_scalar();
        const Complex w = weak_value(a, pre, post).value;
        const Complex scaled =
            weak_value(a, pre * testing::random_scalar(), post * testing::random_scalar()).value;
        worst_norm = std::max(worst_norm, std::abs(w - scaled) / (1.0 + std::abs(w)));
        const Complex rhs = alpha * w + beta * weak_value(c, pre, post).value;
        const Complex lhs = weak_value(alpha * a + beta * c, pre, post).value;
        worst_lin = std::max(worst_lin, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    v.check(worst_norm <= 1e-9, "normalization invariance");
    v.check(worst_lin <= 1e-9, "linearity");
    v.detail << projectors << " projectors exact; unitarity err " << num(worst_unitary)
             << "; weak-value invariance " << num(worst_norm) << ", linearity " << num(worst_lin)
             << " over 1000 ensembles";
    return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria() {
    static const std::vector<std::pair<std::string, std::function<Verdict()>>> list = {
        {"weak-value quadruple", criterion_1},   {"self-canceling pair", criterion_2},
        {"pointer O(g^2) ratio law", criterion_3}, {"cavity transition", criterion_4},
        {"Zeno limit", criterion_5},             {"determinism", criterion_6},
        {"structural properties", criterion_7}};
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria().size())) {
        std::cerr << "criterion must be 1.." << criteria().size() << "\n";
        return 2;
    }
    bool all_pass = true;
    for (std::size_t i = 0; i < criteria().size(); ++i) {
        if (only != 0 && static_cast<int>(i + 1) != only) continue;
        const auto& [title, run] = criteria()[i];
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "exception: " << e.what();
        }
        std::cout << (v.pass ? "[PASS] C" : "[FAIL] C") << (i + 1) << " " << title << ": " << v.line() << std::endl;
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : 1;
}
