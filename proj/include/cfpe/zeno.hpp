#pragma once

// Photon recycling over N cycles.
//
// ProtocolFaithful: each cycle prepares the pre-selected state (with an empty
// electron mode), lets the arm-II component interact with the cavity for
// interaction_dt, and post-selects on the chosen post state. A successful cycle
// feeds the photon back, so cycles are independent given survival. The
// electron occupation left behind by a successful cycle is then sampled.
//
// Interrogation: a survival qubit is rotated by pi/(2N) and measured each
// cycle; every surviving cycle counts one emitted electron.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cfpe/cavity.hpp"
#include "cfpe/hilbert.hpp"
#include "cfpe/protocol.hpp"
#include "cfpe/rng.hpp"

namespace cfpe {

enum class ZenoModel { ProtocolFaithful, Interrogation };

inline std::string_view to_string(ZenoModel m) {
    return m == ZenoModel::ProtocolFaithful ? "protocol-faithful" : "interrogation";
}

inline ZenoModel parse_zeno_model(std::string_view s) {
    if (s == "protocol-faithful") return ZenoModel::ProtocolFaithful;
    if (s == "interrogation") return ZenoModel::Interrogation;
    throw ParameterError("unknown zeno model '" + std::string(s) + "'");
}

struct ZenoConfig {
    std::uint64_t cycles = 1;
    ZenoModel model = ZenoModel::Interrogation;
    PostSelection convention = PostSelection::ClaimConsistent;
    double interaction_dt = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t runs = 1;
    CavityConfig cavity;
    std::size_t fock_dim = 2;
    // 0 means one worker per hardware thread. Results do not depend on it.
    unsigned threads = 1;

    void validate() const {
        if (cycles < 1) throw ParameterError("zeno cycles must be at least 1");
        if (runs < 1) throw ParameterError("zeno runs must be at least 1");
        if (!(interaction_dt >= 0.0) || !std::isfinite(interaction_dt)) {
            throw ParameterError("interaction_dt must be non-negative");
        }
        require_fock_dim(fock_dim);
        cavity.validate();
    }
};

struct CycleRecord {
    std::uint64_t cycle_index = 0;
    bool postselected = false;
    bool electron_emitted = false;
};

struct RunSummary {
    std::uint64_t completed_cycles = 0;
    std::uint64_t electrons_emitted = 0;
    bool survived_all = false;
    double per_cycle_success_estimate = 0.0;
    std::vector<CycleRecord> records;
};

struct CycleOutcome {
    CycleRecord record;
    // State fed into the next cycle; empty when the photon was lost.
    std::optional<StateVector> next;
};

struct CycleProbabilities {
    double success = 0.0;
    // Probability sampled for an electron once a cycle post-selects: the
    // cavity's exact transition probability at interaction_dt (1 for the
    // interrogation model).
    double emission_given_success = 0.0;
    // Electron occupation >= 1 in the post-selected electron state itself.
    // The arm-II photon branches interfere here; reported, not sampled.
    double postselected_emission = 0.0;
};

inline constexpr std::string_view kSurvivalFactor = "survival";

// Precomputed per-cycle machinery for one configuration.
class ZenoProtocol {
public:
    explicit ZenoProtocol(ZenoConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        if (cfg_.model == ZenoModel::Interrogation) {
            basis_ = BasisSpec{{std::string(kSurvivalFactor), 2}};
            const double theta = std::numbers::pi / (2.0 * static_cast<double>(cfg_.cycles));
            CMatrix r(2, 2);
            r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
            step_ = Operator(basis_, std::move(r));
        } else {
            basis_ = protocol_basis(cfg_.fock_dim).concat(
                BasisSpec{{std::string(kElectronFactor), cfg_.fock_dim}});
            const Operator coupling =
                arm_projector(Arm::II, basis_) * build_emission_coupling(cfg_.cavity, basis_);
            step_ = evolve(coupling, cfg_.interaction_dt);
            post_ = build_post(cfg_.convention, cfg_.fock_dim).state;
            emission_ = emission_probability(cfg_.cavity, cfg_.interaction_dt, cfg_.fock_dim);
        }
        canonical_ = probabilities(initial_state());
    }

    const ZenoConfig& config() const { return cfg_; }
    const BasisSpec& basis() const { return basis_; }

    StateVector initial_state() const {
        if (cfg_.model == ZenoModel::Interrogation) return StateVector::basis_state(basis_, {0});
        const StateVector electron =
            StateVector::basis_state(BasisSpec{{std::string(kElectronFactor), cfg_.fock_dim}}, {0});
        return tensor(build_pre(cfg_.fock_dim).state, electron);
    }

    CycleProbabilities probabilities(const StateVector& state) const {
        if (std::abs(state.squared_norm() - 1.0) > kDefaultTolerance) {
            throw ParameterError("cycle input state must be normalized");
        }
        const StateVector evolved = apply(step_, state);
        if (cfg_.model == ZenoModel::Interrogation) {
            return {std::norm(evolved[0]), 1.0, 1.0};
        }
        const StateVector electron = project_onto(evolved, post_);
        const double success = electron.squared_norm();
        if (success == 0.0) return {0.0, emission_, 0.0};
        double emitted = 0.0;
        for (std::size_t n = 1; n < electron.dimension(); ++n) emitted += std::norm(electron[n]);
        return {success, emission_, emitted / success};
    }

    // Per-cycle probabilities for the state every cycle starts from.
    const CycleProbabilities& cycle_probabilities() const { return canonical_; }

    // Probability that all N cycles succeed.
    double survival_probability() const {
        return std::pow(canonical_.success, static_cast<double>(cfg_.cycles));
    }

    CycleOutcome run_cycle(const StateVector& state, std::uint64_t index, RandomStream& rng) const {
        CycleOutcome out{sample(probabilities(state), index, rng), std::nullopt};
        if (out.record.postselected) out.next = initial_state();
        return out;
    }

    // One full run; `keep_records` off skips the per-cycle list.
    RunSummary run(RandomStream& rng, bool keep_records = true) const {
        RunSummary summary;
        std::uint64_t attempts = 0;
        for (std::uint64_t k = 0; k < cfg_.cycles; ++k) {
            const CycleRecord record = sample(canonical_, k, rng);
            ++attempts;
            if (keep_records) summary.records.push_back(record);
            if (!record.postselected) break;
            ++summary.completed_cycles;
            if (record.electron_emitted) ++summary.electrons_emitted;
        }
        summary.survived_all = summary.completed_cycles == cfg_.cycles;
        summary.per_cycle_success_estimate =
            static_cast<double>(summary.completed_cycles) / static_cast<double>(attempts);
        return summary;
    }

private:
    static CycleRecord sample(const CycleProbabilities& p, std::uint64_t index, RandomStream& rng) {
        CycleRecord record;
        record.cycle_index = index;
        record.postselected = rng.uniform() < p.success;
        if (record.postselected) record.electron_emitted = rng.uniform() < p.emission_given_success;
        return record;
    }

    ZenoConfig cfg_;
    BasisSpec basis_;
    Operator step_;
    StateVector post_;
    double emission_ = 0.0;
    CycleProbabilities canonical_;
};

inline CycleOutcome run_cycle(const StateVector& state, const ZenoConfig& cfg, RandomStream& rng,
                              std::uint64_t index = 0) {
    return ZenoProtocol(cfg).run_cycle(state, index, rng);
}

// A single run on stream 0 of the configured seed.
inline RunSummary run_zeno(const ZenoConfig& cfg) {
    const ZenoProtocol protocol(cfg);
    RandomStream rng(cfg.seed, 0);
    return protocol.run(rng);
}

struct MonteCarloSummary {
    std::uint64_t runs = 0;
    std::uint64_t cycles = 0;
    double mean_electrons = 0.0;
    double electron_variance = 0.0;
    double survival_frequency = 0.0;
    double survival_stderr = 0.0;
    double survival_ci_low = 0.0;  // 95% normal-approximation interval
    double survival_ci_high = 0.0;
    double mean_completed_cycles = 0.0;
    std::uint64_t cycle_attempts = 0;
    std::uint64_t cycle_successes = 0;
    double per_cycle_success_frequency = 0.0;
    double per_cycle_success_stderr = 0.0;
    // Index k counts runs that emitted exactly k electrons.
    std::vector<std::uint64_t> electron_histogram;
};

namespace detail {

// Integer tallies merge exactly, so the aggregate is independent of how runs
// are split across workers.
struct RunTally {
    std::uint64_t electrons = 0;
    std::uint64_t electrons_sq = 0;
    std::uint64_t completed = 0;
    std::uint64_t attempts = 0;
    std::uint64_t survived = 0;
    std::vector<std::uint64_t> histogram;

    void add(const RunSummary& s) {
        electrons += s.electrons_emitted;
        electrons_sq += s.electrons_emitted * s.electrons_emitted;
        completed += s.completed_cycles;
        attempts += s.survived_all ? s.completed_cycles : s.completed_cycles + 1;
        survived += s.survived_all ? 1 : 0;
        ++histogram[s.electrons_emitted];
    }

    void merge(const RunTally& o) {
        electrons += o.electrons;
        electrons_sq += o.electrons_sq;
        completed += o.completed;
        attempts += o.attempts;
        survived += o.survived;
        for (std::size_t k = 0; k < histogram.size(); ++k) histogram[k] += o.histogram[k];
    }
};

}  // namespace detail

inline MonteCarloSummary monte_carlo(const ZenoConfig& cfg) {
    const ZenoProtocol protocol(cfg);
    const std::uint64_t runs = cfg.runs;
    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, runs));

    std::vector<detail::RunTally> tallies(workers);
    for (auto& t : tallies) t.histogram.assign(cfg.cycles + 1, 0);

    auto work = [&](unsigned w) {
        const std::uint64_t begin = runs * w / workers;
        const std::uint64_t end = runs * (w + 1) / workers;
        for (std::uint64_t r = begin; r < end; ++r) {
            RandomStream rng(cfg.seed, r);
            tallies[w].add(protocol.run(rng, false));
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    detail::RunTally total;
    total.histogram.assign(cfg.cycles + 1, 0);
    for (const auto& t : tallies) total.merge(t);

    MonteCarloSummary s;
    const auto n = static_cast<double>(runs);
    s.runs = runs;
    s.cycles = cfg.cycles;
    s.mean_electrons = static_cast<double>(total.electrons) / n;
    if (runs > 1) {
        const double e = static_cast<double>(total.electrons);
        s.electron_variance = (static_cast<double>(total.electrons_sq) - e * e / n) / (n - 1.0);
    }
    s.survival_frequency = static_cast<double>(total.survived) / n;
    s.survival_stderr = std::sqrt(s.survival_frequency * (1.0 - s.survival_frequency) / n);
    s.survival_ci_low = std::max(0.0, s.survival_frequency - 1.96 * s.survival_stderr);
    s.survival_ci_high = std::min(1.0, s.survival_frequency + 1.96 * s.survival_stderr);
    s.mean_completed_cycles = static_cast<double>(total.completed) / n;
    s.cycle_attempts = total.attempts;
    s.cycle_successes = total.completed;
    const auto attempts = static_cast<double>(total.attempts);
    s.per_cycle_success_frequency = static_cast<double>(total.completed) / attempts;
    s.per_cycle_success_stderr =
        std::sqrt(s.per_cycle_success_frequency * (1.0 - s.per_cycle_success_frequency) / attempts);
    s.electron_histogram = std::move(total.histogram);
    return s;
}

// (cos^2(pi / 2N))^N
inline double interrogation_survival(std::uint64_t cycles) {
    const double c = std::cos(std::numbers::pi / (2.0 * static_cast<double>(cycles)));
    return std::pow(c * c, static_cast<double>(cycles));
}

struct SurvivalPoint {
    std::uint64_t cycles = 0;
    double survival = 0.0;
    double standard_error = 0.0;
    double analytic = 0.0;
};

// Interrogation points are exact; ProtocolFaithful points are Monte Carlo
// estimates over cfg.runs runs, with the exact value alongside.
inline std::vector<SurvivalPoint> survival_curve(const ZenoConfig& cfg, const std::vector<std::uint64_t>& n_values) {
    if (n_values.empty()) throw ParameterError("survival curve needs at least one N");
    std::vector<SurvivalPoint> curve;
    curve.reserve(n_values.size());
    for (std::uint64_t n : n_values) {
        ZenoConfig point = cfg;
        point.cycles = n;
        point.validate();
        if (cfg.model == ZenoModel::Interrogation) {
            const double p = interrogation_survival(n);
            curve.push_back({n, p, 0.0, p});
        } else {
            const auto mc = monte_carlo(point);
            curve.push_back({n, mc.survival_frequency, mc.survival_stderr,
                             ZenoProtocol(point).survival_probability()});
        }
    }
    return curve;
}

}  // namespace cfpe
