#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qwell/action.hpp"
#include "qwell/observables.hpp"
#include "qwell/version.hpp"

namespace qwell {

/// splitmix64: 64-bit splittable generator (Steele, Lea, Flood 2014 finalizer).
/// Small state, passes BigCrush, and any seed (including 0) is valid.
struct SplitMix64 {
    std::uint64_t state = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        return mix(state);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double uniform_pm() { return 2.0 * uniform01() - 1.0; }
};

/// Deterministic per-row seed for parameter sweeps.
inline std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t row_index) {
    return SplitMix64::mix(master_seed + (row_index + 1) * 0x9E3779B97F4A7C15ull);
}

struct SamplerConfig {
    long thermalization_sweeps = 200000;
    long measurement_sweeps = 100000;
    int measure_every = 10;
    double proposal_width = 0.1;     // level-0 half-width of the uniform shift
    int n_levels = 3;                // level l moves rigid blocks of 2^l slices
    double level_width_factor = 0.5; // proposal width multiplier per level
    std::uint64_t rng_seed = 0;
};

/// Desk-scale defaults: minutes per network on one core.
inline SamplerConfig desk_preset() { return SamplerConfig{}; }

/// Full-fidelity parameters (thermalization 2e6, measurement 1e6).
inline SamplerConfig paper_preset() {
    SamplerConfig c;
    c.thermalization_sweeps = 2000000;
    c.measurement_sweeps = 1000000;
    return c;
}

inline void validate_sampler(const SamplerConfig& cfg, const LatticeSpec& lattice) {
    if (cfg.thermalization_sweeps < 0)
        throw ValidationError("sampler: thermalization_sweeps must be non-negative");
    if (cfg.measurement_sweeps < 1)
        throw ValidationError("sampler: measurement_sweeps must be at least 1");
    if (cfg.measure_every < 1) throw ValidationError("sampler: measure_every must be at least 1");
    if (!(cfg.proposal_width > 0.0)) throw ValidationError("sampler: proposal_width must be positive");
    if (cfg.n_levels < 1) throw ValidationError("sampler: n_levels must be at least 1");
    if ((1 << (cfg.n_levels - 1)) > lattice.n_slices / 4)
        throw ValidationError("sampler: block size 2^(n_levels-1) must not exceed n_slices/4");
    if (cfg.level_width_factor <= 0.0)
        throw ValidationError("sampler: level_width_factor must be positive");
}

struct SamplerState {
    NetworkConfiguration configuration;
    SplitMix64 rng;
    std::vector<long> accepted;   // per level
    std::vector<long> proposed;   // per level
    long sweep_index = 0;
    std::vector<std::string> init_warnings;

    double acceptance_rate(int level) const {
        return proposed[static_cast<std::size_t>(level)] == 0
                   ? 0.0
                   : static_cast<double>(accepted[static_cast<std::size_t>(level)]) /
                         static_cast<double>(proposed[static_cast<std::size_t>(level)]);
    }
};

enum class Start { Cold, Hot };

namespace detail {

inline SamplerState init_common(const CompiledNetwork& net, const SamplerConfig& cfg) {
    validate_sampler(cfg, net.lattice);
    SamplerState st;
    st.configuration.lattice = net.lattice;
    st.configuration.paths.resize(net.neurons.size());
    st.configuration.frozen.resize(net.neurons.size());
    st.rng.state = cfg.rng_seed;
    st.accepted.assign(static_cast<std::size_t>(cfg.n_levels), 0);
    st.proposed.assign(static_cast<std::size_t>(cfg.n_levels), 0);
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        const auto& n = net.neurons[i];
        st.configuration.frozen[i] = n.frozen ? 1 : 0;
        if (n.frozen) {
            auto train = build_kink_train(net.lattice, n.train);
            st.configuration.paths[i] = std::move(train.path);
            for (auto& w : train.warnings)
                st.init_warnings.push_back("input '" + n.id + "': " + w);
        }
    }
    return st;
}

}  // namespace detail

/// Cold start: every simulated path at the +1 vacuum. Hot start: uniform
/// values in [-1.5, 1.5]. Frozen inputs are always built from their trains.
inline SamplerState init_state(const CompiledNetwork& net, const SamplerConfig& cfg,
                               Start start = Start::Cold) {
    SamplerState st = detail::init_common(net, cfg);
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        if (net.neurons[i].frozen) continue;
        auto& p = st.configuration.paths[i];
        p.values.assign(static_cast<std::size_t>(net.lattice.n_slices), 1.0);
        if (start == Start::Hot)
            for (auto& v : p.values) v = 1.5 * st.rng.uniform_pm();
    }
    return st;
}

/// Explicit start: one path per simulated neuron, in network order.
inline SamplerState init_state(const CompiledNetwork& net, const SamplerConfig& cfg,
                               const std::vector<EuclideanPath>& simulated_paths) {
    SamplerState st = detail::init_common(net, cfg);
    std::size_t next = 0;
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        if (net.neurons[i].frozen) continue;
        if (next >= simulated_paths.size())
            throw ValidationError("init_state: expected one explicit path per simulated neuron");
        if (simulated_paths[next].size() != net.lattice.n_slices)
            throw ValidationError("init_state: explicit path length does not match lattice");
        for (double v : simulated_paths[next].values)
            if (!std::isfinite(v))
                throw ValidationError("init_state: explicit path holds a non-finite value");
        st.configuration.paths[i] = simulated_paths[next++];
    }
    if (next != simulated_paths.size())
        throw ValidationError("init_state: too many explicit paths");
    return st;
}

namespace detail {

/// Per-run sweep engine. Interaction coefficients from frozen neighbours are
/// precomputed once (frozen paths never move); coefficients from simulated
/// neighbours are refreshed at the start of each neuron's pass, which is
/// exact because a pass only mutates that neuron's own path.
class Sweeper {
  public:
    Sweeper(const CompiledNetwork& net, const NetworkConfiguration& cfg) : net_(&net) {
        const int n = net.lattice.n_slices;
        caches_.resize(net.neurons.size());
        for (std::size_t i = 0; i < net.neurons.size(); ++i) {
            if (net.neurons[i].frozen) continue;
            auto& cache = caches_[i];
            cache.a0.assign(static_cast<std::size_t>(n), 0.0);
            cache.b0.assign(static_cast<std::size_t>(n), 0.25 * net.neurons[i].lambda);
            cache.c0.assign(static_cast<std::size_t>(n), 0.0);
            for (const auto& term : net.neurons[i].terms) {
                if (!net.neurons[static_cast<std::size_t>(term.other)].frozen) {
                    cache.dynamic_terms.push_back(term);
                    continue;
                }
                const auto& other = cfg.paths[static_cast<std::size_t>(term.other)];
                for (int t = 0; t < n; ++t)
                    accumulate_term(term, other[t], cache.a0[static_cast<std::size_t>(t)],
                                    cache.b0[static_cast<std::size_t>(t)],
                                    cache.c0[static_cast<std::size_t>(t)]);
            }
        }
        a_.resize(static_cast<std::size_t>(n));
        b_.resize(static_cast<std::size_t>(n));
        c_.resize(static_cast<std::size_t>(n));
    }

    void sweep(SamplerState& st, const SamplerConfig& cfg) {
        const int n = net_->lattice.n_slices;
        const double dt = net_->lattice.step();
        for (std::size_t i = 0; i < net_->neurons.size(); ++i) {
            if (net_->neurons[i].frozen) continue;
            load_coeffs(i, st.configuration);
            double* p = st.configuration.paths[i].values.data();
            for (int level = 0; level < cfg.n_levels; ++level) {
                const double width =
                    cfg.proposal_width * std::pow(cfg.level_width_factor, level);
                if (level == 0)
                    site_pass(p, n, dt, width, st, 0);
                else
                    block_pass(p, n, dt, width, 1 << level, st, level);
            }
        }
        ++st.sweep_index;
    }

  private:
    struct NeuronCache {
        std::vector<double> a0, b0, c0;
        std::vector<CompiledNetwork::Term> dynamic_terms;
    };

    static void accumulate_term(const CompiledNetwork::Term& term, double o, double& a, double& b,
                                double& c) {
        const double ow = o * o - 1.0;
        switch (term.role) {
            case CompiledNetwork::Term::ExcIn: a += term.eps * ow * ow; break;
            case CompiledNetwork::Term::ExcOut: b += term.eps * o * o; break;
            case CompiledNetwork::Term::Inh: {
                const double ow2 = ow * ow;
                c += term.eps * ow2 * ow2;
                break;
            }
        }
    }

    void load_coeffs(std::size_t neuron, const NetworkConfiguration& cfg) {
        const auto& cache = caches_[neuron];
        a_ = cache.a0;
        b_ = cache.b0;
        c_ = cache.c0;
        const int n = net_->lattice.n_slices;
        for (const auto& term : cache.dynamic_terms) {
            const double* other = cfg.paths[static_cast<std::size_t>(term.other)].values.data();
            for (int t = 0; t < n; ++t)
                accumulate_term(term, other[t], a_[static_cast<std::size_t>(t)],
                                b_[static_cast<std::size_t>(t)], c_[static_cast<std::size_t>(t)]);
        }
    }

    double site_energy(int t, double x) const {
        const double x2 = x * x;
        const double w = x2 - 1.0;
        const double w2 = w * w;
        return a_[static_cast<std::size_t>(t)] * x2 + b_[static_cast<std::size_t>(t)] * w2 +
               c_[static_cast<std::size_t>(t)] * w2 * w2;
    }

    bool metropolis_accept(double delta_s, SplitMix64& rng) const {
        if (delta_s <= 0.0) return true;
        if (delta_s > 40.0) return false;  // below double resolution of the uniform draw
        return rng.uniform01() < std::exp(-delta_s);
    }

    void site_pass(double* p, int n, double dt, double width, SamplerState& st, int level) {
        const double inv_2dt = 1.0 / (2.0 * dt);
        for (int t = 0; t < n; ++t) {
            const int prev = (t == 0) ? n - 1 : t - 1;
            const int next = (t + 1 == n) ? 0 : t + 1;
            const double old_value = p[t];
            const double x = old_value + width * st.rng.uniform_pm();
            const double dn_new = p[next] - x, dp_new = x - p[prev];
            const double dn_old = p[next] - old_value, dp_old = old_value - p[prev];
            const double delta_s =
                (dn_new * dn_new + dp_new * dp_new - dn_old * dn_old - dp_old * dp_old) * inv_2dt +
                dt * (site_energy(t, x) - site_energy(t, old_value));
            ++st.proposed[static_cast<std::size_t>(level)];
            if (metropolis_accept(delta_s, st.rng)) {
                p[t] = x;
                ++st.accepted[static_cast<std::size_t>(level)];
            }
        }
    }

    /// Rigid shift of a block: interior links are unchanged, only the two
    /// boundary links and the per-slice potentials contribute.
    void block_pass(double* p, int n, double dt, double width, int block, SamplerState& st,
                    int level) {
        const double inv_2dt = 1.0 / (2.0 * dt);
        const int n_blocks = n / block;
        for (int b = 0; b < n_blocks; ++b) {
            const int s = b * block;
            const int e = s + block;  // one past the end
            const int prev = (s == 0) ? n - 1 : s - 1;
            const int next = (e == n) ? 0 : e;
            const double shift = width * st.rng.uniform_pm();
            const double lo_new = p[s] + shift - p[prev], lo_old = p[s] - p[prev];
            const double hi_new = p[next] - (p[e - 1] + shift), hi_old = p[next] - p[e - 1];
            double delta_s =
                (lo_new * lo_new + hi_new * hi_new - lo_old * lo_old - hi_old * hi_old) * inv_2dt;
            double dv = 0.0;
            for (int t = s; t < e; ++t) dv += site_energy(t, p[t] + shift) - site_energy(t, p[t]);
            delta_s += dt * dv;
            ++st.proposed[static_cast<std::size_t>(level)];
            if (metropolis_accept(delta_s, st.rng)) {
                for (int t = s; t < e; ++t) p[t] += shift;
                ++st.accepted[static_cast<std::size_t>(level)];
            }
        }
    }

    const CompiledNetwork* net_;
    std::vector<NeuronCache> caches_;
    std::vector<double> a_, b_, c_;
};

}  // namespace detail

/// One sweep: every simulated neuron, every level, every site/block in
/// sequential order, uniform-shift proposals accepted with min(1, exp(-dS)).
inline void metropolis_sweep(SamplerState& state, const CompiledNetwork& net,
                             const SamplerConfig& cfg) {
    detail::Sweeper sweeper(net, state.configuration);
    sweeper.sweep(state, cfg);
}

/// Thermalize, then measure every measure_every sweeps: per-neuron activity
/// with binned errors, kink counts, mean potential-energy traces, per-level
/// acceptance. Deterministic for a fixed seed.
inline MeasurementReport run_simulation(const CompiledNetwork& net, const SamplerConfig& cfg,
                                        Start start = Start::Cold) {
    validate_sampler(cfg, net.lattice);
    if (net.simulated_count < 1)
        throw ValidationError("run_simulation: network has no simulated neuron");

    SamplerState st = init_state(net, cfg, start);
    detail::Sweeper sweeper(net, st.configuration);

    for (long s = 0; s < cfg.thermalization_sweeps; ++s) sweeper.sweep(st, cfg);

    const int n_slices = net.lattice.n_slices;
    const std::size_t n_neurons = net.neurons.size();
    std::vector<std::vector<double>> activity_samples(n_neurons);
    std::vector<double> kink_sums(n_neurons, 0.0);
    std::vector<std::vector<double>> trace_sums(n_neurons,
                                                std::vector<double>(static_cast<std::size_t>(n_slices), 0.0));
    long n_measurements = 0;

    for (long s = 1; s <= cfg.measurement_sweeps; ++s) {
        sweeper.sweep(st, cfg);
        if (s % cfg.measure_every != 0) continue;
        ++n_measurements;
        for (std::size_t i = 0; i < n_neurons; ++i) {
            if (net.neurons[i].frozen) continue;
            const auto& p = st.configuration.paths[i];
            const double lambda = net.neurons[i].lambda;
            double pot = 0.0;
            for (int t = 0; t < n_slices; ++t) {
                const double v = self_potential(p[t], lambda);
                trace_sums[i][static_cast<std::size_t>(t)] += v;
                pot += v;
            }
            activity_samples[i].push_back(net.lattice.step() * pot / net.reference_integral);
            kink_sums[i] += count_kinks(p);
        }
    }

    MeasurementReport report;
    for (std::size_t i = 0; i < n_neurons; ++i) {
        const auto& n = net.neurons[i];
        NeuronReport nr;
        nr.id = n.id;
        nr.frozen = n.frozen;
        if (n.frozen) {
            // an input replicates itself by definition
            nr.activity_mean = nr.activity_raw_mean = 1.0;
            nr.kink_count_mean = count_kinks(st.configuration.paths[i]);
            nr.energy_trace = potential_trace(st.configuration.paths[i], n.lambda);
        } else {
            const auto& samples = activity_samples[i];
            double mean = 0.0;
            for (double v : samples) mean += v;
            mean /= static_cast<double>(samples.size());
            nr.activity_raw_mean = mean;
            nr.activity_baseline =
                vacuum_potential_integral(net.lattice, n.lambda) / net.reference_integral;
            nr.activity_mean = std::max(0.0, mean - nr.activity_baseline);
            const int n_bins = std::min<int>(32, static_cast<int>(samples.size()) / 2);
            nr.activity_err = n_bins >= 2 ? binned_error(samples, n_bins) : 0.0;
            nr.kink_count_mean = kink_sums[i] / static_cast<double>(n_measurements);
            nr.energy_trace = trace_sums[i];
            for (auto& v : nr.energy_trace) v /= static_cast<double>(n_measurements);
        }
        report.per_neuron.push_back(std::move(nr));
    }

    report.acceptance.resize(st.accepted.size());
    for (std::size_t l = 0; l < st.accepted.size(); ++l)
        report.acceptance[l] = st.acceptance_rate(static_cast<int>(l));
    report.warnings = st.init_warnings;
    if (!report.acceptance.empty() &&
        (report.acceptance[0] < 0.2 || report.acceptance[0] > 0.8)) {
        report.warnings.push_back(
            "level-0 acceptance " + std::to_string(report.acceptance[0]) +
            " outside [0.2, 0.8]; consider tuning proposal_width");
    }

    report.metadata = {
        {"code_version", kVersion},
        {"rng", {{"name", kRngName}, {"version", kRngVersion}}},
        {"seed", cfg.rng_seed},
        {"start", start == Start::Cold ? "cold" : "hot"},
        {"lattice", {{"T", net.lattice.extent_T}, {"Nt", net.lattice.n_slices}}},
        {"sampler",
         {{"thermalization_sweeps", cfg.thermalization_sweeps},
          {"measurement_sweeps", cfg.measurement_sweeps},
          {"measure_every", cfg.measure_every},
          {"proposal_width", cfg.proposal_width},
          {"n_levels", cfg.n_levels},
          {"level_width_factor", cfg.level_width_factor}}},
        {"n_measurements", n_measurements},
    };
    return report;
}

inline MeasurementReport run_simulation(const NetworkSpec& net, const SamplerConfig& cfg,
                                        Start start = Start::Cold) {
    return run_simulation(compile(net), cfg, start);
}

}  // namespace qwell
