#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qwell/lattice.hpp"
#include "qwell/version.hpp"

namespace qwell {

enum class CouplingKind { Excitatory, Inhibitory };

enum class NeuronKind { Simulated, InputActive, InputPassive };

struct NeuronSpec {
    std::string id;
    NeuronKind kind = NeuronKind::Simulated;
    double lambda = 5000.0;         // self-coupling; for inputs it sets the kink width
    KinkTrainSpec kink_train{};     // used only by InputActive neurons

    bool operator==(const NeuronSpec&) const = default;
};

/// Excitatory connections are directed source->target; inhibitory ones are an
/// unordered pair kept in lexicographic (source < target) order.
struct ConnectionSpec {
    CouplingKind kind = CouplingKind::Excitatory;
    std::string source;
    std::string target;
    double strength = 0.0;
    bool modulated = true;          // participates in the global k-scaling

    bool operator==(const ConnectionSpec&) const = default;
};

inline ConnectionSpec make_excitatory(std::string source, std::string target, double strength,
                                      bool modulated = true) {
    return ConnectionSpec{CouplingKind::Excitatory, std::move(source), std::move(target), strength, modulated};
}

inline ConnectionSpec make_inhibitory(std::string a, std::string b, double strength,
                                      bool modulated = true) {
    if (b < a) std::swap(a, b);
    return ConnectionSpec{CouplingKind::Inhibitory, std::move(a), std::move(b), strength, modulated};
}

struct NetworkSpec {
    LatticeSpec lattice{};
    std::vector<NeuronSpec> neurons;
    std::vector<ConnectionSpec> connections;

    bool operator==(const NetworkSpec&) const = default;

    const NeuronSpec* find(const std::string& id) const {
        for (const auto& n : neurons)
            if (n.id == id) return &n;
        return nullptr;
    }
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity;
    std::string path;     // json-ish locator, e.g. "connections[3].target"
    std::string message;
};

/// Structural checks. Errors: duplicate/dangling ids, self-loops, unnormalized
/// or duplicate inhibitory pairs, no simulated neuron, bad kink trains.
/// Warnings: excitatory strength outside the working range, overlapping kinks.
inline std::vector<Diagnostic> validate(const NetworkSpec& net) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string path, std::string msg) {
        out.push_back({Diagnostic::Severity::Error, std::move(path), std::move(msg)});
    };
    auto warning = [&](std::string path, std::string msg) {
        out.push_back({Diagnostic::Severity::Warning, std::move(path), std::move(msg)});
    };

    std::set<std::string> ids;
    int simulated = 0;
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        const auto& n = net.neurons[i];
        const std::string where = "neurons[" + std::to_string(i) + "]";
        if (n.id.empty()) error(where + ".id", "neuron id must be non-empty");
        if (!ids.insert(n.id).second) error(where + ".id", "duplicate neuron id '" + n.id + "'");
        if (n.kind == NeuronKind::Simulated) ++simulated;
        if (!(n.lambda > 0.0)) error(where + ".lambda", "lambda must be positive");
        if (n.kind == NeuronKind::InputActive) {
            try {
                KinkTrainSpec train = n.kink_train;
                train.lambda = n.lambda;
                const auto built = build_kink_train(net.lattice, train);
                for (const auto& w : built.warnings) warning(where + ".kink_train", w);
            } catch (const ValidationError& e) {
                error(where + ".kink_train", e.what());
            }
        }
    }
    if (simulated == 0)
        error("neurons", "network has no simulated neuron (frozen-only networks cannot be sampled)");

    std::set<std::pair<std::string, std::string>> inhibitory_pairs;
    for (std::size_t i = 0; i < net.connections.size(); ++i) {
        const auto& c = net.connections[i];
        const std::string where = "connections[" + std::to_string(i) + "]";
        if (!ids.count(c.source)) error(where + ".source", "unknown neuron id '" + c.source + "'");
        if (!ids.count(c.target)) error(where + ".target", "unknown neuron id '" + c.target + "'");
        if (c.source == c.target) error(where, "self-loop on '" + c.source + "'");
        if (!(c.strength >= 0.0)) error(where + ".strength", "strength must be non-negative");
        if (c.kind == CouplingKind::Inhibitory) {
            if (c.target < c.source)
                error(where, "inhibitory pair not stored in lexicographic order");
            if (!inhibitory_pairs.insert({std::min(c.source, c.target), std::max(c.source, c.target)}).second)
                error(where, "duplicate inhibitory pair {" + c.source + ", " + c.target + "}");
        } else if (c.strength > 0.0 && (c.strength < 3000.0 || c.strength > 8000.0)) {
            warning(where + ".strength",
                    "excitatory strength " + std::to_string(c.strength) +
                        " outside the recommended range [3000, 8000]");
        }
    }
    return out;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::Error;
    });
}

/// Throws ValidationError listing every error diagnostic.
inline void require_valid(const NetworkSpec& net) {
    const auto diags = validate(net);
    std::string msg;
    for (const auto& d : diags)
        if (d.severity == Diagnostic::Severity::Error)
            msg += (msg.empty() ? "" : "; ") + d.path + ": " + d.message;
    if (!msg.empty()) throw ValidationError("invalid network: " + msg);
}

/// Scale every modulated connection strength by k; everything else untouched.
inline NetworkSpec modulate(const NetworkSpec& net, double k) {
    if (!(k >= 0.0)) throw ValidationError("modulate: k must be non-negative");
    NetworkSpec out = net;
    for (auto& c : out.connections)
        if (c.modulated) c.strength *= k;
    return out;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization. Strict: unknown keys are rejected with a path.

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw ValidationError(where + ": missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key + ": wrong type");
    }
}

template <typename T>
T get_field_or(const json& obj, const char* key, const std::string& where, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key + ": wrong type");
    }
}

}  // namespace detail

inline NetworkSpec parse_network(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') { ++line; column = 1; }
            else ++column;
        }
        throw ValidationError("network json: syntax error at line " + std::to_string(line) +
                              ", column " + std::to_string(column) + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("network json: top level must be an object");
    detail::reject_unknown_keys(doc, {"schema_version", "lattice", "neurons", "connections"}, "$");

    const int schema = detail::get_field_or<int>(doc, "schema_version", "$", kSchemaVersion);
    if (schema != kSchemaVersion)
        throw ValidationError("$.schema_version: unsupported version " + std::to_string(schema));

    NetworkSpec net;
    if (doc.contains("lattice")) {
        const auto& lat = doc.at("lattice");
        detail::reject_unknown_keys(lat, {"T", "Nt"}, "$.lattice");
        net.lattice = build_lattice(detail::get_field<double>(lat, "T", "$.lattice"),
                                    detail::get_field<int>(lat, "Nt", "$.lattice"));
    }

    if (!doc.contains("neurons") || !doc.at("neurons").is_array())
        throw ValidationError("$.neurons: required array");
    for (std::size_t i = 0; i < doc.at("neurons").size(); ++i) {
        const auto& jn = doc.at("neurons").at(i);
        const std::string where = "$.neurons[" + std::to_string(i) + "]";
        detail::reject_unknown_keys(jn, {"id", "kind", "lambda", "kink_train"}, where);
        NeuronSpec n;
        n.id = detail::get_field<std::string>(jn, "id", where);
        const auto kind = detail::get_field<std::string>(jn, "kind", where);
        if (kind == "simulated") n.kind = NeuronKind::Simulated;
        else if (kind == "input_active") n.kind = NeuronKind::InputActive;
        else if (kind == "input_passive") n.kind = NeuronKind::InputPassive;
        else throw ValidationError(where + ".kind: unknown value '" + kind + "'");
        n.lambda = detail::get_field_or<double>(jn, "lambda", where, 5000.0);
        n.kink_train.lambda = n.lambda;
        if (jn.contains("kink_train")) {
            if (n.kind != NeuronKind::InputActive)
                throw ValidationError(where + ".kink_train: only input_active neurons carry a kink train");
            const auto& jt = jn.at("kink_train");
            detail::reject_unknown_keys(jt, {"n_kinks", "start_vacuum", "centers"}, where + ".kink_train");
            n.kink_train.n_kinks = detail::get_field<int>(jt, "n_kinks", where + ".kink_train");
            n.kink_train.start_vacuum =
                detail::get_field<int>(jt, "start_vacuum", where + ".kink_train");
            n.kink_train.centers = detail::get_field_or<std::vector<double>>(
                jt, "centers", where + ".kink_train", {});
        }
        net.neurons.push_back(std::move(n));
    }

    if (doc.contains("connections")) {
        if (!doc.at("connections").is_array())
            throw ValidationError("$.connections: must be an array");
        for (std::size_t i = 0; i < doc.at("connections").size(); ++i) {
            const auto& jc = doc.at("connections").at(i);
            const std::string where = "$.connections[" + std::to_string(i) + "]";
            detail::reject_unknown_keys(jc, {"kind", "source", "target", "strength", "modulated"}, where);
            ConnectionSpec c;
            const auto kind = detail::get_field<std::string>(jc, "kind", where);
            if (kind == "excitatory") c.kind = CouplingKind::Excitatory;
            else if (kind == "inhibitory") c.kind = CouplingKind::Inhibitory;
            else throw ValidationError(where + ".kind: unknown value '" + kind + "'");
            c.source = detail::get_field<std::string>(jc, "source", where);
            c.target = detail::get_field<std::string>(jc, "target", where);
            c.strength = detail::get_field<double>(jc, "strength", where);
            c.modulated = detail::get_field_or<bool>(jc, "modulated", where, true);
            if (c.kind == CouplingKind::Inhibitory && c.target < c.source)
                std::swap(c.source, c.target);  // normalize the unordered pair
            net.connections.push_back(std::move(c));
        }
    }

    require_valid(net);
    return net;
}

inline std::string serialize_network(const NetworkSpec& net) {
    using detail::json;
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["lattice"] = {{"T", net.lattice.extent_T}, {"Nt", net.lattice.n_slices}};
    doc["neurons"] = json::array();
    for (const auto& n : net.neurons) {
        json jn;
        jn["id"] = n.id;
        jn["kind"] = n.kind == NeuronKind::Simulated     ? "simulated"
                     : n.kind == NeuronKind::InputActive ? "input_active"
                                                         : "input_passive";
        jn["lambda"] = n.lambda;
        if (n.kind == NeuronKind::InputActive) {
            json jt;
            jt["n_kinks"] = n.kink_train.n_kinks;
            jt["start_vacuum"] = n.kink_train.start_vacuum;
            if (!n.kink_train.centers.empty()) jt["centers"] = n.kink_train.centers;
            jn["kink_train"] = jt;
        }
        doc["neurons"].push_back(jn);
    }
    doc["connections"] = json::array();
    for (const auto& c : net.connections) {
        json jc;
        jc["kind"] = c.kind == CouplingKind::Excitatory ? "excitatory" : "inhibitory";
        jc["source"] = c.source;
        jc["target"] = c.target;
        jc["strength"] = c.strength;
        jc["modulated"] = c.modulated;
        doc["connections"].push_back(jc);
    }
    return doc.dump(2) + "\n";
}

}  // namespace qwell
