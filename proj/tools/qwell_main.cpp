// qwell command line front end: run single simulations, parameter sweeps,
// and the built-in gate / line-detector experiments.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwell/builders.hpp"
#include "qwell/network.hpp"
#include "qwell/sampler.hpp"

namespace fs = std::filesystem;
using namespace qwell;

namespace {

struct CommonOptions {
    std::string preset = "desk";
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    long therm = -1;            // -1: keep preset value
    long sweeps = -1;
    int measure_every = -1;
    double width = -1.0;
    int nt = -1;                // lattice overrides, -1/-1.0: keep network value
    double extent_T = -1.0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--preset", opt.preset, "sampler preset: desk (default) or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", opt.seed, "RNG seed (any 64-bit value, default 0)");
    cmd->add_option("--out-dir", opt.out_dir, "directory for report/trace/sweep files");
    cmd->add_option("--therm", opt.therm, "override thermalization sweep count");
    cmd->add_option("--sweeps", opt.sweeps, "override measurement sweep count");
    cmd->add_option("--measure-every", opt.measure_every, "sweeps between measurements");
    cmd->add_option("--width", opt.width, "level-0 proposal half-width");
    cmd->add_option("--nt", opt.nt, "override lattice slice count");
    cmd->add_option("--T", opt.extent_T, "override lattice extent");
}

SamplerConfig sampler_from(const CommonOptions& opt) {
    SamplerConfig cfg = opt.preset == "paper" ? paper_preset() : desk_preset();
    if (opt.therm >= 0) cfg.thermalization_sweeps = opt.therm;
    if (opt.sweeps >= 0) cfg.measurement_sweeps = opt.sweeps;
    if (opt.measure_every > 0) cfg.measure_every = opt.measure_every;
    if (opt.width > 0.0) cfg.proposal_width = opt.width;
    cfg.rng_seed = opt.seed;
    return cfg;
}

void apply_lattice_overrides(NetworkSpec& net, const CommonOptions& opt) {
    if (opt.nt > 0 || opt.extent_T > 0.0) {
        net.lattice = build_lattice(opt.extent_T > 0.0 ? opt.extent_T : net.lattice.extent_T,
                                    opt.nt > 0 ? opt.nt : net.lattice.n_slices);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path.string() + "'");
    out << content;
}

std::string metadata_comment(const CommonOptions& opt) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "# schema_version=%d code_version=%s preset=%s seed=%llu\n",
                  kSchemaVersion, kVersion, opt.preset.c_str(),
                  static_cast<unsigned long long>(opt.seed));
    return buf;
}

void write_report_files(const MeasurementReport& report, const CommonOptions& opt,
                        bool traces = true) {
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    if (!traces) return;
    for (const auto& n : report.per_neuron) {
        std::string csv = metadata_comment(opt) + "slice,mean_V0\n";
        char line[64];
        for (std::size_t t = 0; t < n.energy_trace.size(); ++t) {
            std::snprintf(line, sizeof(line), "%zu,%.10g\n", t, n.energy_trace[t]);
            csv += line;
        }
        write_file(dir / ("trace_" + n.id + ".csv"), csv);
    }
}

void print_warnings(const MeasurementReport& report) {
    for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

MeasurementReport run_with_metadata(const NetworkSpec& net, const CommonOptions& opt) {
    auto report = run_simulation(net, sampler_from(opt));
    report.metadata["preset"] = opt.preset;
    return report;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& network_file, const CommonOptions& opt) {
    NetworkSpec net = parse_network(read_file(network_file));
    apply_lattice_overrides(net, opt);
    const auto diags = validate(net);
    for (const auto& d : diags)
        if (d.severity == Diagnostic::Severity::Warning)
            std::fprintf(stderr, "warning: %s: %s\n", d.path.c_str(), d.message.c_str());
    auto report = run_with_metadata(net, opt);
    write_report_files(report, opt);
    print_warnings(report);
    for (const auto& n : report.per_neuron)
        std::printf("%s%s activity %.4f +- %.4f (kinks %.2f)\n", n.id.c_str(),
                    n.frozen ? " [input]" : "", n.activity_mean, n.activity_err,
                    n.kink_count_mean);
    return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepOptions {
    std::string parameter = "k";
    std::vector<double> values;
    double from = 0.0, to = 0.0;
    int steps = 0;
    std::string network_file;
    std::string builtin;
    std::string target;
};

NetworkSpec builtin_network(const std::string& name) {
    if (name == "pair") return build_pair(6000.0);
    if (name == "chain3") return build_chain3();
    if (name == "and") return build_and(GateInput::On, GateInput::On);
    if (name == "or") return build_or(GateInput::On, GateInput::On);
    if (name == "not") return build_not();
    throw ValidationError("unknown builtin network '" + name + "'");
}

NetworkSpec with_lambda(const NetworkSpec& base, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    NetworkSpec out = base;
    for (auto& n : out.neurons) {
        n.lambda = lambda;
        n.kink_train.lambda = lambda;  // input kinks are classical solutions of the same model
    }
    return out;
}

NetworkSpec with_inhibitory_scale(const NetworkSpec& base, double factor) {
    if (!(factor >= 0.0)) throw ValidationError("eps_inh_k must be non-negative");
    NetworkSpec out = base;
    for (auto& c : out.connections)
        if (c.kind == CouplingKind::Inhibitory) c.strength *= factor;
    return out;
}

int cmd_sweep(const SweepOptions& plan, const CommonOptions& opt) {
    std::vector<double> values = plan.values;
    if (values.empty()) {
        if (plan.steps < 1) throw ValidationError("sweep: need --values or --from/--to/--steps");
        for (int i = 0; i < plan.steps; ++i)
            values.push_back(plan.steps == 1
                                 ? plan.from
                                 : plan.from + (plan.to - plan.from) * i / (plan.steps - 1));
    }
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("sweep: values must be finite");

    NetworkSpec base = plan.network_file.empty() ? builtin_network(plan.builtin)
                                                 : parse_network(read_file(plan.network_file));
    apply_lattice_overrides(base, opt);
    require_valid(base);
    if (!base.find(plan.target))
        throw ValidationError("sweep: target neuron '" + plan.target + "' not in network");

    std::string csv = metadata_comment(opt) +
                      "parameter_value,activity_mean,activity_err,kink_count_mean,acceptance_l0\n";
    for (std::size_t row = 0; row < values.size(); ++row) {
        NetworkSpec net;
        if (plan.parameter == "k") net = modulate(base, values[row]);
        else if (plan.parameter == "lambda") net = with_lambda(base, values[row]);
        else if (plan.parameter == "eps_inh_k") net = with_inhibitory_scale(base, values[row]);
        else throw ValidationError("sweep: unknown parameter '" + plan.parameter + "'");

        CommonOptions row_opt = opt;
        row_opt.seed = child_seed(opt.seed, row);
        auto report = run_with_metadata(net, row_opt);
        const auto* nr = report.find(plan.target);
        char line[192];
        std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%.10g\n", values[row],
                      nr->activity_mean, nr->activity_err, nr->kink_count_mean,
                      report.acceptance.empty() ? 0.0 : report.acceptance[0]);
        csv += line;
        std::printf("%s=%g -> %s activity %.4f +- %.4f\n", plan.parameter.c_str(), values[row],
                    plan.target.c_str(), nr->activity_mean, nr->activity_err);
        std::fflush(stdout);
    }
    write_file(fs::path(opt.out_dir) / "sweep.csv", csv);
    return 0;
}

// --- gate -------------------------------------------------------------------

GateInput parse_gate_input(const std::string& s) {
    if (s == "on") return GateInput::On;
    if (s == "off") return GateInput::Off;
    throw ValidationError("gate input must be 'on' or 'off', got '" + s + "'");
}

int cmd_gate(const std::string& gate, const std::string& inputs_csv, double k,
             const CommonOptions& opt) {
    std::vector<GateInput> inputs;
    if (!inputs_csv.empty()) {
        std::stringstream ss(inputs_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) inputs.push_back(parse_gate_input(tok));
    }

    NetworkSpec net;
    std::vector<std::string> outputs;
    if (gate == "and" || gate == "or") {
        if (inputs.size() != 2)
            throw ValidationError("gate " + gate + ": expected --inputs with 2 entries");
        net = gate == "and" ? build_and(inputs[0], inputs[1]) : build_or(inputs[0], inputs[1]);
        outputs = {"n3"};
    } else if (gate == "not") {
        if (!inputs.empty()) throw ValidationError("gate not: takes no --inputs");
        net = build_not();
        outputs = {"n1", "n2"};
    } else {
        throw ValidationError("unknown gate '" + gate + "'");
    }
    net = modulate(net, k);
    apply_lattice_overrides(net, opt);

    auto report = run_with_metadata(net, opt);
    report.metadata["gate"] = gate;
    report.metadata["k"] = k;
    write_report_files(report, opt, false);
    print_warnings(report);

    std::printf("gate %s  inputs [%s]  k=%g\n", gate.c_str(), inputs_csv.c_str(), k);
    for (const auto& id : outputs) {
        const auto* n = report.find(id);
        const char* verdict = n->activity_mean > 0.6   ? "On"
                              : n->activity_mean < 0.3 ? "Off"
                                                       : "Undecided";
        std::printf("%s activity %.4f +- %.4f -> %s\n", id.c_str(), n->activity_mean,
                    n->activity_err, verdict);
    }
    return 0;
}

// --- export -----------------------------------------------------------------

int cmd_export(const std::string& builtin, const std::string& inputs_csv, double eps,
               const std::string& image_file, const std::string& out_path) {
    NetworkSpec net;
    if (builtin == "pair") {
        net = build_pair(eps);
    } else if (builtin == "chain3") {
        net = build_chain3();
    } else if (builtin == "not") {
        net = build_not();
    } else if (builtin == "and" || builtin == "or") {
        std::vector<GateInput> inputs;
        std::stringstream ss(inputs_csv.empty() ? std::string("on,on") : inputs_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) inputs.push_back(parse_gate_input(tok));
        if (inputs.size() != 2) throw ValidationError("export: expected 2 gate inputs");
        net = builtin == "and" ? build_and(inputs[0], inputs[1]) : build_or(inputs[0], inputs[1]);
    } else if (builtin == "conv") {
        if (image_file.empty()) throw ValidationError("export conv: needs --image");
        net = build_conv(BinaryImage::from_text(read_file(image_file)));
    } else {
        throw ValidationError("unknown builtin network '" + builtin + "'");
    }
    const std::string text = serialize_network(net);
    if (out_path.empty() || out_path == "-") std::fputs(text.c_str(), stdout);
    else write_file(out_path, text);
    return 0;
}

// --- conv -------------------------------------------------------------------

int cmd_conv(const std::string& image_file, double threshold, const CommonOptions& opt) {
    const BinaryImage image = BinaryImage::from_text(read_file(image_file));
    NetworkSpec net = build_conv(image);
    apply_lattice_overrides(net, opt);
    auto report = run_with_metadata(net, opt);
    report.metadata["image"] = fs::path(image_file).filename().string();
    write_report_files(report, opt, false);
    print_warnings(report);
    const auto* out = report.find("out");
    std::printf("output activity %.4f +- %.4f -> %s\n", out->activity_mean, out->activity_err,
                out->activity_mean > threshold ? "line" : "no-line");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-integral Monte Carlo simulator for double-well spiking networks"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* simulate = app.add_subcommand("simulate", "run a network file and write report/traces");
    std::string network_file;
    simulate->add_option("network", network_file, "network JSON file")->required();
    add_common(simulate, opt);

    auto* sweep = app.add_subcommand("sweep", "scan a parameter and write sweep.csv");
    SweepOptions plan;
    sweep->add_option("--param", plan.parameter, "k | lambda | eps_inh_k")
        ->check(CLI::IsMember({"k", "lambda", "eps_inh_k"}));
    sweep->add_option("--values", plan.values, "explicit parameter values")->delimiter(',');
    sweep->add_option("--from", plan.from, "grid start");
    sweep->add_option("--to", plan.to, "grid end");
    sweep->add_option("--steps", plan.steps, "grid point count");
    sweep->add_option("--network", plan.network_file, "network JSON file");
    sweep->add_option("--builtin", plan.builtin, "pair | chain3 | and | or | not");
    sweep->add_option("--target", plan.target, "neuron id to report")->required();
    add_common(sweep, opt);

    auto* gate = app.add_subcommand("gate", "run a built-in logic gate");
    std::string gate_name, inputs_csv;
    double gate_k = 1.0;
    gate->add_option("gate", gate_name, "and | or | not")->required();
    gate->add_option("--inputs", inputs_csv, "comma separated on/off per input");
    gate->add_option("--k", gate_k, "modulation factor for the gate's swept connections");
    add_common(gate, opt);

    auto* conv = app.add_subcommand("conv", "run the 4x4 vertical line detector");
    std::string image_file;
    double threshold = 0.5;
    conv->add_option("image", image_file, "text file: 4 lines of 4 chars from {0,1}")->required();
    conv->add_option("--threshold", threshold, "line / no-line activity threshold");
    add_common(conv, opt);

    auto* exp = app.add_subcommand("export", "write a built-in network as JSON");
    std::string exp_builtin, exp_inputs, exp_image, exp_out;
    double exp_eps = 6000.0;
    exp->add_option("--builtin", exp_builtin, "pair | chain3 | and | or | not | conv")->required();
    exp->add_option("--inputs", exp_inputs, "gate inputs, e.g. on,off");
    exp->add_option("--eps", exp_eps, "pair connection strength");
    exp->add_option("--image", exp_image, "conv input image file");
    exp->add_option("-o,--out", exp_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(network_file, opt);
        if (sweep->parsed()) return cmd_sweep(plan, opt);
        if (gate->parsed()) return cmd_gate(gate_name, inputs_csv, gate_k, opt);
        if (conv->parsed()) return cmd_conv(image_file, threshold, opt);
        if (exp->parsed()) return cmd_export(exp_builtin, exp_inputs, exp_eps, exp_image, exp_out);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
    return 0;
}
