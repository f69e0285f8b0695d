// Acceptance suite: one pass/fail line per criterion. Statistical criteria
// run at the desk preset (T=0.7, Nt=512, thermalization 2e5, measurement 1e5
// sweeps) with fixed seeds. Exit code is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "qwell/builders.hpp"
#include "qwell/network.hpp"
#include "qwell/sampler.hpp"

namespace fs = std::filesystem;
using namespace qwell;

namespace {

int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const char* label, bool pass, const std::string& detail, double seconds) {
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %2d: %-24s %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, label,
                detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

SamplerConfig desk_with_seed(std::uint64_t seed) {
    SamplerConfig cfg = desk_preset();
    cfg.rng_seed = seed;
    return cfg;
}

const NeuronReport& neuron(const MeasurementReport& rep, const std::string& id) {
    const auto* n = rep.find(id);
    if (!n) throw std::runtime_error("missing neuron " + id + " in report");
    return *n;
}

// ---------------------------------------------------------------------------

void criterion_1_kink_action() {
    Timer timer;
    const auto lat = build_lattice(0.7, 512);
    const double s_cl = classical_kink_action(5000.0);

    NetworkSpec spec;
    NeuronSpec n;
    n.id = "n";
    spec.neurons = {n};
    spec.lattice = lat;

    // a lone kink is not a periodic configuration: evaluate its discrete
    // action with the artificial seam link identified and removed
    NetworkConfiguration cfg;
    cfg.lattice = lat;
    EuclideanPath kink;
    kink.values.resize(512);
    for (int t = 0; t < 512; ++t) kink[t] = kink_profile(lat.time_at(t), 0.35, 5000.0, +1);
    cfg.paths = {kink};
    cfg.frozen = {0};
    const double seam_d = kink[0] - kink[511];
    const double s_kink = total_action(spec, cfg) - seam_d * seam_d / (2.0 * lat.step());

    // the periodic kink-antikink train needs no such correction
    const auto train = build_kink_train(lat, KinkTrainSpec{2, 5000.0, +1, {}});
    cfg.paths = {train.path};
    const double s_pair = total_action(spec, cfg);

    const bool pass = std::abs(s_kink - s_cl) <= 0.01 * s_cl &&
                      std::abs(s_pair - 2.0 * s_cl) <= 0.01 * 2.0 * s_cl;
    report(1, "kink action oracle", pass,
           fmt("single kink %.4f vs %.4f, periodic pair %.4f vs %.4f, tol 1%%", s_kink, s_cl,
               s_pair, 2.0 * s_cl),
           timer.seconds());
}

void criterion_2_sampler_oracle() {
    Timer timer;
    const double extent_T = 0.4, lambda = 50.0;
    const int n_slices = 4;

    // direct quadrature of the 4-site path integral on a 200-point grid,
    // cross-checked against the literal nested-loop sum on a coarse grid
    const auto quad = oracle::quadrature_single_neuron(extent_T, n_slices, lambda, -2.0, 2.0, 200);
    const auto coarse_tm = oracle::quadrature_single_neuron(extent_T, n_slices, lambda, -2.0, 2.0, 60);
    const auto coarse_nest = oracle::quadrature_nested_4(extent_T, lambda, -2.0, 2.0, 60);
    const bool consistent = std::abs(coarse_tm.mean_phi2 - coarse_nest.mean_phi2) < 1e-9 &&
                            std::abs(coarse_tm.mean_v0 - coarse_nest.mean_v0) < 1e-9;

    NetworkSpec spec;
    NeuronSpec n;
    n.id = "n";
    n.lambda = lambda;
    n.kink_train.lambda = lambda;
    spec.neurons = {n};
    spec.lattice = LatticeSpec{extent_T, n_slices};  // below build_lattice's floor by design
    const auto net = compile(spec);

    SamplerConfig cfg;
    cfg.n_levels = 1;
    cfg.proposal_width = 0.5;
    cfg.rng_seed = 17;
    auto st = init_state(net, cfg, Start::Hot);
    detail::Sweeper sweeper(net, st.configuration);
    for (int s = 0; s < 20000; ++s) sweeper.sweep(st, cfg);
    std::vector<double> phi2, v0;
    const long sweeps = 1000000;
    for (long s = 1; s <= sweeps; ++s) {
        sweeper.sweep(st, cfg);
        if (s % 10 != 0) continue;
        const double p = st.configuration.paths[0][0];
        phi2.push_back(p * p);
        v0.push_back(self_potential(p, lambda));
    }
    double m_phi2 = 0.0, m_v0 = 0.0;
    for (std::size_t i = 0; i < phi2.size(); ++i) { m_phi2 += phi2[i]; m_v0 += v0[i]; }
    m_phi2 /= static_cast<double>(phi2.size());
    m_v0 /= static_cast<double>(v0.size());
    const double e_phi2 = binned_error(phi2, 50);
    const double e_v0 = binned_error(v0, 50);

    const bool pass = consistent && std::abs(m_phi2 - quad.mean_phi2) <= 3.0 * e_phi2 &&
                      std::abs(m_v0 - quad.mean_v0) <= 3.0 * e_v0;
    report(2, "brute-force sampler oracle", pass,
           fmt("<phi^2> %.5f vs %.5f (3se %.5f), <V0> %.4f vs %.4f (3se %.4f)", m_phi2,
               quad.mean_phi2, 3.0 * e_phi2, m_v0, quad.mean_v0, 3.0 * e_v0),
           timer.seconds());
}

void criterion_3_local_global() {
    Timer timer;
    auto spec = build_chain3();
    spec.lattice = build_lattice(0.7, 128);
    const auto net = compile(spec);
    SamplerConfig cfg;
    cfg.rng_seed = 4242;
    auto st = init_state(net, cfg, Start::Hot);
    SplitMix64 rng{4243};
    int checked = 0, ok = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        int nr = static_cast<int>(rng.next() % net.neurons.size());
        if (net.neurons[static_cast<std::size_t>(nr)].frozen) nr = 1 + static_cast<int>(rng.next() % 3);
        const int slice = static_cast<int>(rng.next() % 128);
        const double x =
            st.configuration.paths[static_cast<std::size_t>(nr)][slice] + rng.uniform_pm();
        const double local = local_action_delta(net, st.configuration, nr, slice, x);
        auto after = st.configuration;
        after.paths[static_cast<std::size_t>(nr)][slice] = x;
        const double brute = static_cast<double>(oracle::total_action_ld(net, after) -
                                                 oracle::total_action_ld(net, st.configuration));
        const double tol = std::max(1e-9 * std::abs(brute), 1e-12);
        const double err = std::abs(local - brute);
        worst = std::max(worst, err / tol);
        ++checked;
        if (err <= tol) ++ok;
        st.configuration = after;
    }
    report(3, "local/global consistency", ok == checked,
           fmt("%d/%d within 1e-9 rel (worst err/tol %.3g)", ok, checked, worst), timer.seconds());
}

void criterion_4_sleeping_state() {
    Timer timer;
    NetworkSpec spec;
    NeuronSpec n;
    n.id = "n1";
    spec.neurons = {n};
    const auto rep = run_simulation(spec, desk_with_seed(101));
    const auto& nr = neuron(rep, "n1");
    const bool pass = nr.activity_mean < 0.05 && nr.kink_count_mean < 0.1;
    report(4, "free neuron sleeps", pass,
           fmt("activity %.4f (< 0.05), kinks %.3f (< 0.1)", nr.activity_mean, nr.kink_count_mean),
           timer.seconds());
}

void criterion_5_pair_transmission() {
    // Known to miss the 0.92 window at equilibrium: a driven neuron dwells
    // near phi=0 inside each pulse (its firing threshold ~0.625*Lambda lies
    // above the barrier-flattening point Lambda/2), which lifts the measured
    // ratio to ~1.17 at eps=6000. The target stays as stated and the measured
    // value prints either way; see README for the dwell mechanics.
    Timer timer;
    const auto rep = run_simulation(build_pair(6000.0), desk_with_seed(102));
    const auto& nr = neuron(rep, "n1");
    const bool pass = nr.activity_mean >= 0.92 - 0.15 && nr.activity_mean <= 0.92 + 0.15;
    report(5, "pair transmission", pass,
           fmt("activity %.4f +- %.4f vs 0.92 +- 0.15", nr.activity_mean, nr.activity_err),
           timer.seconds());
}

struct SweepPoint {
    double k, mean, err;
};

std::vector<SweepPoint> chain_sweep(double lambda, std::uint64_t seed) {
    const std::vector<double> ks{0.2, 0.5, 0.8, 1.0, 1.2, 1.4};
    NetworkSpec base = build_chain3();
    if (lambda > 0.0) {
        for (auto& n : base.neurons) {
            n.lambda = lambda;
            n.kink_train.lambda = lambda;
        }
    }
    std::vector<SweepPoint> out;
    for (std::size_t row = 0; row < ks.size(); ++row) {
        const auto rep =
            run_simulation(modulate(base, ks[row]), desk_with_seed(child_seed(seed, row)));
        const auto& nr = neuron(rep, "n3");
        out.push_back({ks[row], nr.activity_mean, nr.activity_err});
    }
    return out;
}

void criterion_6_chain_threshold() {
    Timer timer;
    const auto pts = chain_sweep(-1.0, 300);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double sigma = std::hypot(pts[i].err, pts[i + 1].err);
        if (pts[i + 1].mean < pts[i].mean - 2.0 * sigma) monotone = false;
    }
    const bool pass = pts.front().mean < 0.2 && pts.back().mean > 0.7 && monotone;
    std::string detail = "activity(k):";
    for (const auto& p : pts) detail += fmt(" %.3f", p.mean);
    detail += monotone ? " | monotone within 2 sigma" : " | NOT monotone";
    report(6, "chain threshold", pass, detail, timer.seconds());
}

void criterion_7_lambda_dependence() {
    Timer timer;
    const auto lo = chain_sweep(2500.0, 301);
    const auto hi = chain_sweep(7500.0, 302);
    auto first_k = [](const std::vector<SweepPoint>& pts) {
        for (const auto& p : pts)
            if (p.mean >= 0.5) return p.k;
        return 1e9;  // never transparent on this grid
    };
    const double k_lo = first_k(lo), k_hi = first_k(hi);
    const bool pass = k_lo < 1e9 && k_hi > k_lo;
    report(7, "critical k grows with Lambda", pass,
           fmt("first k with activity >= 0.5: %.2f (L=2500) vs %s (L=7500)", k_lo,
               k_hi < 1e9 ? fmt("%.2f", k_hi).c_str() : "none <= 1.4"),
           timer.seconds());
}

void criterion_8_gate_truth_tables() {
    Timer timer;
    const double and_on_on =
        neuron(run_simulation(build_and(GateInput::On, GateInput::On), desk_with_seed(401)), "n3")
            .activity_mean;
    const double and_on_off =
        neuron(run_simulation(build_and(GateInput::On, GateInput::Off), desk_with_seed(402)), "n3")
            .activity_mean;
    const double and_off_off =
        neuron(run_simulation(build_and(GateInput::Off, GateInput::Off), desk_with_seed(403)), "n3")
            .activity_mean;
    const double or_on_off =
        neuron(run_simulation(build_or(GateInput::On, GateInput::Off), desk_with_seed(404)), "n3")
            .activity_mean;
    const double or_on_on =
        neuron(run_simulation(build_or(GateInput::On, GateInput::On), desk_with_seed(405)), "n3")
            .activity_mean;
    const double not_free =
        neuron(run_simulation(modulate(build_not(), 0.0), desk_with_seed(406)), "n2").activity_mean;
    const double not_tied =
        neuron(run_simulation(build_not(), desk_with_seed(407)), "n2").activity_mean;

    const bool pass = and_on_on > 0.6 && and_on_off < 0.3 && and_off_off < 0.05 &&
                      or_on_off > 0.5 && or_on_on > 0.5 && not_tied < 0.5 * not_free;
    report(8, "gate truth tables", pass,
           fmt("AND %.3f/%.3f/%.4f, OR %.3f/%.3f, NOT %.3f -> %.3f", and_on_on, and_on_off,
               and_off_off, or_on_off, or_on_on, not_free, not_tied),
           timer.seconds());
}

void criterion_9_conv_detector() {
    Timer timer;
    auto out_activity = [](const char* rows, std::uint64_t seed) {
        const auto rep = run_simulation(build_conv(BinaryImage::from_text(rows)), desk_with_seed(seed));
        return neuron(rep, "out").activity_mean;
    };
    // shared seed across images so the comparisons see the same chain noise
    const double v1 = out_activity("0100\n0100\n0100\n0100\n", 501);
    const double v2 = out_activity("0010\n0010\n0010\n0010\n", 501);
    const double zeros = out_activity("0000\n0000\n0000\n0000\n", 501);
    const double horiz = out_activity("0000\n1111\n0000\n0000\n", 501);
    const double diag = out_activity("1000\n0100\n0010\n0001\n", 501);

    const double v_min = std::min(v1, v2);
    const double d_max = std::max(zeros, std::max(horiz, diag));
    const bool pass = v1 > 0.5 && v2 > 0.5 && d_max < 0.5 * v_min;
    report(9, "vertical line detector", pass,
           fmt("columns %.3f/%.3f; zeros %.4f, horizontal %.4f, diagonal %.4f (< %.3f)", v1, v2,
               zeros, horiz, diag, 0.5 * v_min),
           timer.seconds());
}

// --- criterion 10: CLI determinism -------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QWELL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

bool identical_trees(const fs::path& a, const fs::path& b) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) return false;
    for (const auto& name : names)
        if (!fs::exists(b / name) || slurp(a / name) != slurp(b / name)) return false;
    return true;
}

void criterion_10_determinism() {
    Timer timer;
    const fs::path scratch = fs::temp_directory_path() / "qwell_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const std::string net_file = std::string(QWELL_DATA_DIR) + "/networks/two_neurons.json";
    const std::string image = std::string(QWELL_DATA_DIR) + "/images/vertical_line.txt";
    const std::string small = "--therm 2000 --sweeps 2000 --seed 7";

    std::string failures;
    auto stage = [&](const char* name, bool ok) {
        if (!ok) failures += std::string(failures.empty() ? "" : ", ") + name;
    };

    auto rerun_match = [&](const char* name, const std::string& args) {
        bool ok = true;
        for (int i = 0; i < 2; ++i)
            ok = run_cli(fmt("%s --out-dir %s/%s%d", args.c_str(), scratch.c_str(), name, i)) == 0 && ok;
        stage(name, ok && identical_trees(scratch / fmt("%s0", name), scratch / fmt("%s1", name)));
    };

    rerun_match("sim", fmt("simulate %s %s", net_file.c_str(), small.c_str()));
    rerun_match("sweep", fmt("sweep --builtin chain3 --param k --values 0.5,1.0 --target n3 %s",
                             small.c_str()));
    rerun_match("gate", fmt("gate and --inputs on,off %s", small.c_str()));
    rerun_match("conv", fmt("conv %s %s", image.c_str(), small.c_str()));

    // a different seed must change the simulate output
    bool seed_ok =
        run_cli(fmt("simulate %s --therm 2000 --sweeps 2000 --seed 8 --out-dir %s/sim2",
                    net_file.c_str(), scratch.c_str())) == 0;
    stage("seed-sensitivity", seed_ok && !identical_trees(scratch / "sim0", scratch / "sim2"));

    // exit codes: malformed input 1, missing file 1
    const fs::path bad = scratch / "bad.json";
    std::ofstream(bad) << "{ not json";
    const int bad_rc = run_cli(fmt("simulate %s --out-dir %s", bad.string().c_str(), scratch.c_str()));
    const int missing_rc = run_cli(fmt("simulate %s/no_such_file.json", scratch.c_str()));
    stage("exit-codes", WEXITSTATUS(bad_rc) == 1 && WEXITSTATUS(missing_rc) == 1);

    report(10, "byte-identical reruns", failures.empty(),
           failures.empty()
               ? "simulate/sweep/gate/conv reproduce byte-for-byte; exit codes 1 on bad input"
               : "failed stages: " + failures,
           timer.seconds());
}

}  // namespace

int main() {
    std::printf("qwell acceptance suite (desk preset: therm 2e5, meas 1e5, Nt=512, T=0.7)\n");
    Timer total;
    criterion_1_kink_action();
    criterion_2_sampler_oracle();
    criterion_3_local_global();
    criterion_4_sleeping_state();
    criterion_5_pair_transmission();
    criterion_6_chain_threshold();
    criterion_7_lambda_dependence();
    criterion_8_gate_truth_tables();
    criterion_9_conv_detector();
    criterion_10_determinism();
    std::printf("%d/10 criteria passed (total %.0f s)\n", 10 - g_failures, total.seconds());
    return g_failures;
}
