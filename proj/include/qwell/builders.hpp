#pragma once

#include <array>
#include <string>

#include "qwell/network.hpp"

namespace qwell {

enum class GateInput { On, Off };

/// 4x4 binary input picture for the convolutional line detector.
struct BinaryImage {
    std::array<std::array<int, 4>, 4> px{};

    int at(int row, int col) const { return px[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]; }

    /// Four lines of four '0'/'1' characters.
    static BinaryImage from_text(const std::string& text) {
        BinaryImage img;
        int row = 0, col = 0;
        for (char ch : text) {
            if (ch == '\n') {
                if (col != 0 && col != 4)
                    throw ValidationError("image: each row needs exactly 4 pixels");
                if (col == 4) ++row;
                col = 0;
                continue;
            }
            if (ch == ' ' || ch == '\r' || ch == '\t') continue;
            if (ch != '0' && ch != '1')
                throw ValidationError(std::string("image: invalid character '") + ch + "'");
            if (row >= 4 || col >= 4) throw ValidationError("image: more than 4x4 pixels");
            img.px[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = ch - '0';
            ++col;
        }
        if (col == 4) ++row;
        else if (col != 0) throw ValidationError("image: each row needs exactly 4 pixels");
        if (row != 4) throw ValidationError("image: expected 4 rows, got " + std::to_string(row));
        return img;
    }
};

namespace detail {

inline NeuronSpec simulated_neuron(std::string id, double lambda = 5000.0) {
    NeuronSpec n;
    n.id = std::move(id);
    n.kind = NeuronKind::Simulated;
    n.lambda = lambda;
    n.kink_train.lambda = lambda;
    return n;
}

/// Every active input in a built network carries the same canonical train, so
/// multi-input summation sees synchronized source spikes.
inline NeuronSpec input_neuron(std::string id, bool active, double lambda = 5000.0) {
    NeuronSpec n;
    n.id = std::move(id);
    n.kind = active ? NeuronKind::InputActive : NeuronKind::InputPassive;
    n.lambda = lambda;
    n.kink_train = KinkTrainSpec{6, lambda, +1, {}};
    return n;
}

}  // namespace detail

/// One active input driving one simulated neuron.
inline NetworkSpec build_pair(double eps) {
    if (!(eps >= 0.0)) throw ValidationError("build_pair: eps must be non-negative");
    NetworkSpec net;
    net.neurons = {detail::input_neuron("in", true), detail::simulated_neuron("n1")};
    net.connections = {make_excitatory("in", "n1", eps)};
    return net;
}

/// Input feeding a row of three simulated neurons with decreasing base
/// strengths (15000, 10000, 5000), all subject to the k-modulation.
inline NetworkSpec build_chain3() {
    NetworkSpec net;
    net.neurons = {detail::input_neuron("in", true), detail::simulated_neuron("n1"),
                   detail::simulated_neuron("n2"), detail::simulated_neuron("n3")};
    net.connections = {make_excitatory("in", "n1", 15000.0), make_excitatory("n1", "n2", 10000.0),
                       make_excitatory("n2", "n3", 5000.0)};
    return net;
}

// Intermediate->output strength for AND. A single thermal source must stay
// below the output's firing threshold while the two branches together clear
// it; 2400 measures ~0.25 output activity for one branch, ~1.05 for both.
inline constexpr double kAndIntermediateEps = 2400.0;

// Intermediate->output strength for OR. One thermal branch alone must drive
// the output past the firing threshold, yet the back-stiffening the output
// exerts on that branch must not silence it; 6000 measures ~0.7 output
// activity from a single branch with the branch still active.
inline constexpr double kOrIntermediateEps = 6000.0;

inline constexpr double kGateInputEps = 8000.0;
inline constexpr double kNotWeakerEps = 6000.0;
inline constexpr double kInhibitoryEps = 50000.0;

/// AND: two driven branches converge on the output with strengths that only
/// sum past the firing threshold when both branches spike.
inline NetworkSpec build_and(GateInput a, GateInput b) {
    NetworkSpec net;
    net.neurons = {detail::input_neuron("in_a", a == GateInput::On),
                   detail::input_neuron("in_b", b == GateInput::On),
                   detail::simulated_neuron("n1"), detail::simulated_neuron("n2"),
                   detail::simulated_neuron("n3")};
    net.connections = {make_excitatory("in_a", "n1", kGateInputEps, false),
                       make_excitatory("in_b", "n2", kGateInputEps, true),
                       make_excitatory("n1", "n3", kAndIntermediateEps, false),
                       make_excitatory("n2", "n3", kAndIntermediateEps, false)};
    return net;
}

/// NOT: the stronger-driven neuron inhibits the weaker one as the inhibitory
/// strength (base 50000, k-modulated) grows.
inline NetworkSpec build_not() {
    NetworkSpec net;
    net.neurons = {detail::input_neuron("in", true), detail::simulated_neuron("n1"),
                   detail::simulated_neuron("n2")};
    net.connections = {make_excitatory("in", "n1", kGateInputEps, false),
                       make_excitatory("in", "n2", kNotWeakerEps, false),
                       make_inhibitory("n1", "n2", kInhibitoryEps, true)};
    return net;
}

/// OR: mutually inhibiting intermediates guarantee at most one branch feeds
/// the output at a time, so the output is driven but never overwhelmed.
inline NetworkSpec build_or(GateInput a, GateInput b) {
    NetworkSpec net;
    net.neurons = {detail::input_neuron("in_a", a == GateInput::On),
                   detail::input_neuron("in_b", b == GateInput::On),
                   detail::simulated_neuron("n1"), detail::simulated_neuron("n2"),
                   detail::simulated_neuron("n3")};
    net.connections = {make_excitatory("in_a", "n1", kGateInputEps, false),
                       make_excitatory("in_b", "n2", kGateInputEps, true),
                       make_inhibitory("n1", "n2", kInhibitoryEps, false),
                       make_excitatory("n1", "n3", kOrIntermediateEps, false),
                       make_excitatory("n2", "n3", kOrIntermediateEps, false)};
    return net;
}

inline constexpr double kConvExcEps = 2000.0;
inline constexpr double kConvInhEps = 15000.0;
inline constexpr double kConvOutputEps = 4000.0;

/// 4x4 pixels -> 2x2 hidden layer (3x3 kernel, every valid position) -> one
/// output. The kernel excites through its centre column and inhibits through
/// the side columns, so only a vertical bar lights a hidden neuron.
inline NetworkSpec build_conv(const BinaryImage& image) {
    // kernel cell categories: column 1 excitatory, columns 0 and 2 inhibitory
    NetworkSpec net;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            net.neurons.push_back(detail::input_neuron(
                "px" + std::to_string(r) + std::to_string(c), image.at(r, c) == 1));
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            net.neurons.push_back(
                detail::simulated_neuron("h" + std::to_string(r) + std::to_string(c)));
    net.neurons.push_back(detail::simulated_neuron("out"));

    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const std::string hid = "h" + std::to_string(r) + std::to_string(c);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    if (image.at(r + i, c + j) != 1) continue;  // passive pixels carry no wire
                    const std::string pid =
                        "px" + std::to_string(r + i) + std::to_string(c + j);
                    if (j == 1)
                        net.connections.push_back(make_excitatory(pid, hid, kConvExcEps));
                    else
                        net.connections.push_back(make_inhibitory(pid, hid, kConvInhEps));
                }
            }
        }
    }
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            net.connections.push_back(make_excitatory(
                "h" + std::to_string(r) + std::to_string(c), "out", kConvOutputEps));
    return net;
}

}  // namespace qwell
