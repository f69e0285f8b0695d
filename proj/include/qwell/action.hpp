#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qwell/lattice.hpp"
#include "qwell/network.hpp"

namespace qwell {

/// Double-well self potential (lambda/4)*(phi^2-1)^2.
inline double self_potential(double phi, double lambda) {
    const double w = phi * phi - 1.0;
    return 0.25 * lambda * w * w;
}

/// Directed coupling eps*(phi_src^2-1)^2*phi_dst^2. A source at one of its
/// vacua exerts no force; while the source crosses the barrier the term
/// penalizes the target for sitting at a vacuum, which is what propagates
/// spikes forward without a matching backward drive.
inline double excitatory_potential(double phi_src, double phi_dst, double eps) {
    const double w = phi_src * phi_src - 1.0;
    return eps * w * w * phi_dst * phi_dst;
}

/// Symmetric coupling eps*(phi_a^2-1)^4*(phi_b^2-1)^4; costs action only when
/// both neurons are off their vacua at the same time.
inline double inhibitory_potential(double phi_a, double phi_b, double eps) {
    const double wa = phi_a * phi_a - 1.0;
    const double wb = phi_b * phi_b - 1.0;
    const double wa2 = wa * wa, wb2 = wb * wb;
    return eps * ((wa2 * wa2) * (wb2 * wb2));  // grouped so the swap is bit-exact
}

/// Paths of every non-passive neuron plus the frozen mask. Frozen paths are
/// never touched by sampling.
struct NetworkConfiguration {
    LatticeSpec lattice{};
    std::vector<EuclideanPath> paths;
    std::vector<std::uint8_t> frozen;
};

/// Runtime form of a NetworkSpec: passive inputs dropped, ids resolved to
/// dense indices, per-neuron interaction term lists for O(1) local updates.
struct CompiledNetwork {
    struct Term {
        enum Role : std::uint8_t {
            ExcIn,   // this neuron is the target; other is the source
            ExcOut,  // this neuron is the source; other is the target
            Inh,
        };
        int other;
        double eps;
        Role role;
    };

    struct Neuron {
        std::string id;
        double lambda = 5000.0;
        bool frozen = false;
        KinkTrainSpec train{};       // meaningful only when frozen
        std::vector<Term> terms;
    };

    struct Connection {
        CouplingKind kind;
        int a, b;                    // excitatory: a=source, b=target
        double eps;
    };

    LatticeSpec lattice{};
    std::vector<Neuron> neurons;
    std::vector<Connection> connections;
    int simulated_count = 0;
    double reference_integral = 0.0;  // integral potential of the canonical input train

    int index_of(const std::string& id) const {
        for (std::size_t i = 0; i < neurons.size(); ++i)
            if (neurons[i].id == id) return static_cast<int>(i);
        return -1;
    }
};

/// Integral potential energy step*sum_t V0(path_t) of a path.
inline double integral_potential_of(const EuclideanPath& path, const LatticeSpec& lattice,
                                    double lambda) {
    double sum = 0.0;
    for (int t = 0; t < path.size(); ++t) sum += self_potential(path[t], lambda);
    return lattice.step() * sum;
}

/// Drops passive inputs, resolves connection endpoints, computes the activity
/// reference (first active input's train, or the default train at the first
/// simulated neuron's lambda when the network has no inputs).
inline CompiledNetwork compile(const NetworkSpec& net) {
    require_valid(net);

    CompiledNetwork out;
    out.lattice = net.lattice;

    std::map<std::string, int> index;
    for (const auto& n : net.neurons) {
        if (n.kind == NeuronKind::InputPassive) continue;
        CompiledNetwork::Neuron cn;
        cn.id = n.id;
        cn.lambda = n.lambda;
        cn.frozen = n.kind == NeuronKind::InputActive;
        if (cn.frozen) {
            cn.train = n.kink_train;
            cn.train.lambda = n.lambda;
        }
        index[n.id] = static_cast<int>(out.neurons.size());
        out.neurons.push_back(std::move(cn));
        if (!out.neurons.back().frozen) ++out.simulated_count;
    }

    for (const auto& c : net.connections) {
        const auto si = index.find(c.source);
        const auto ti = index.find(c.target);
        if (si == index.end() || ti == index.end()) continue;  // touched a dropped passive input
        const int a = si->second, b = ti->second;
        out.connections.push_back({c.kind, a, b, c.strength});
        if (c.kind == CouplingKind::Excitatory) {
            out.neurons[static_cast<std::size_t>(a)].terms.push_back(
                {b, c.strength, CompiledNetwork::Term::ExcOut});
            out.neurons[static_cast<std::size_t>(b)].terms.push_back(
                {a, c.strength, CompiledNetwork::Term::ExcIn});
        } else {
            out.neurons[static_cast<std::size_t>(a)].terms.push_back(
                {b, c.strength, CompiledNetwork::Term::Inh});
            out.neurons[static_cast<std::size_t>(b)].terms.push_back(
                {a, c.strength, CompiledNetwork::Term::Inh});
        }
    }

    const NeuronSpec* first_input = nullptr;
    const NeuronSpec* first_simulated = nullptr;
    for (const auto& n : net.neurons) {
        if (!first_input && n.kind == NeuronKind::InputActive) first_input = &n;
        if (!first_simulated && n.kind == NeuronKind::Simulated) first_simulated = &n;
    }
    KinkTrainSpec reference_train;
    if (first_input) {
        reference_train = first_input->kink_train;
        reference_train.lambda = first_input->lambda;
    } else {
        reference_train.lambda = first_simulated ? first_simulated->lambda : 5000.0;
    }
    out.reference_integral =
        integral_potential_of(build_kink_train(net.lattice, reference_train).path, net.lattice,
                              reference_train.lambda);
    return out;
}

namespace detail {

inline void check_shapes(const CompiledNetwork& net, const NetworkConfiguration& cfg) {
    if (cfg.lattice != net.lattice)
        throw ValidationError("configuration lattice does not match network lattice");
    if (cfg.paths.size() != net.neurons.size() || cfg.frozen.size() != net.neurons.size())
        throw ValidationError("configuration holds " + std::to_string(cfg.paths.size()) +
                              " paths for " + std::to_string(net.neurons.size()) + " neurons");
    for (const auto& p : cfg.paths)
        if (p.size() != net.lattice.n_slices)
            throw ValidationError("path length " + std::to_string(p.size()) +
                                  " does not match lattice n_slices");
}

inline double connection_energy(const CompiledNetwork::Connection& c, double phi_a, double phi_b) {
    return c.kind == CouplingKind::Excitatory ? excitatory_potential(phi_a, phi_b, c.eps)
                                              : inhibitory_potential(phi_a, phi_b, c.eps);
}

/// Potential-energy coefficients of one neuron's field x at a fixed slice,
/// everything else held fixed: E(x) = a*x^2 + b*(x^2-1)^2 + c*(x^2-1)^4.
struct SiteCoeffs {
    double a = 0.0, b = 0.0, c = 0.0;
    double eval(double x) const {
        const double x2 = x * x;
        const double w = x2 - 1.0;
        const double w2 = w * w;
        return a * x2 + b * w2 + c * w2 * w2;
    }
};

inline SiteCoeffs site_coeffs(const CompiledNetwork& net, const NetworkConfiguration& cfg,
                              int neuron, int slice) {
    SiteCoeffs co;
    const auto& n = net.neurons[static_cast<std::size_t>(neuron)];
    co.b = 0.25 * n.lambda;
    for (const auto& term : n.terms) {
        const double o = cfg.paths[static_cast<std::size_t>(term.other)][slice];
        const double ow = o * o - 1.0;
        switch (term.role) {
            case CompiledNetwork::Term::ExcIn: co.a += term.eps * ow * ow; break;
            case CompiledNetwork::Term::ExcOut: co.b += term.eps * o * o; break;
            case CompiledNetwork::Term::Inh: {
                const double ow2 = ow * ow;
                co.c += term.eps * ow2 * ow2;
                break;
            }
        }
    }
    return co;
}

}  // namespace detail

/// Discrete Euclidean action: sum over slices of the forward-difference
/// kinetic term (periodic wrap) plus step-weighted self and interaction
/// potentials, all evaluated at equal time slices.
inline double total_action(const CompiledNetwork& net, const NetworkConfiguration& cfg) {
    detail::check_shapes(net, cfg);
    const int n_slices = net.lattice.n_slices;
    const double dt = net.lattice.step();
    const double inv_2dt = 1.0 / (2.0 * dt);

    double action = 0.0;
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        const auto& p = cfg.paths[i];
        const double lambda = net.neurons[i].lambda;
        double kinetic = 0.0, potential = 0.0;
        for (int t = 0; t < n_slices; ++t) {
            const int next = (t + 1 == n_slices) ? 0 : t + 1;
            const double d = p[next] - p[t];
            kinetic += d * d;
            potential += self_potential(p[t], lambda);
        }
        action += kinetic * inv_2dt + potential * dt;
    }
    for (const auto& c : net.connections) {
        const auto& pa = cfg.paths[static_cast<std::size_t>(c.a)];
        const auto& pb = cfg.paths[static_cast<std::size_t>(c.b)];
        double e = 0.0;
        for (int t = 0; t < n_slices; ++t) e += detail::connection_energy(c, pa[t], pb[t]);
        action += e * dt;
    }
    return action;
}

inline double total_action(const NetworkSpec& net, const NetworkConfiguration& cfg) {
    return total_action(compile(net), cfg);
}

/// Action change from setting one slice of one free neuron to new_value:
/// the two touching kinetic links, the slice's self potential, and every
/// connection term at that slice.
inline double local_action_delta(const CompiledNetwork& net, const NetworkConfiguration& cfg,
                                 int neuron, int slice, double new_value) {
    detail::check_shapes(net, cfg);
    if (neuron < 0 || neuron >= static_cast<int>(net.neurons.size()))
        throw ValidationError("local_action_delta: neuron index out of range");
    if (slice < 0 || slice >= net.lattice.n_slices)
        throw ValidationError("local_action_delta: slice index out of range");
    if (cfg.frozen[static_cast<std::size_t>(neuron)])
        throw ValidationError("local_action_delta: neuron '" +
                              net.neurons[static_cast<std::size_t>(neuron)].id + "' is frozen");

    const int n_slices = net.lattice.n_slices;
    const double dt = net.lattice.step();
    const auto& p = cfg.paths[static_cast<std::size_t>(neuron)];
    const int prev = (slice == 0) ? n_slices - 1 : slice - 1;
    const int next = (slice + 1 == n_slices) ? 0 : slice + 1;

    const double old_value = p[slice];
    const double dn_new = p[next] - new_value, dp_new = new_value - p[prev];
    const double dn_old = p[next] - old_value, dp_old = old_value - p[prev];
    const double kinetic =
        (dn_new * dn_new + dp_new * dp_new - dn_old * dn_old - dp_old * dp_old) / (2.0 * dt);

    const auto co = detail::site_coeffs(net, cfg, neuron, slice);
    return kinetic + dt * (co.eval(new_value) - co.eval(old_value));
}

inline double local_action_delta(const NetworkSpec& net, const NetworkConfiguration& cfg,
                                 int neuron, int slice, double new_value) {
    return local_action_delta(compile(net), cfg, neuron, slice, new_value);
}

}  // namespace qwell
