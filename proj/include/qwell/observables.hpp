#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwell/action.hpp"
#include "qwell/lattice.hpp"

namespace qwell {

/// Element-wise V0 along a path; peaks sit at the barrier crossings.
inline std::vector<double> potential_trace(const EuclideanPath& path, double lambda) {
    if (lambda < 0.0) throw ValidationError("potential_trace: lambda must be non-negative");
    std::vector<double> out(static_cast<std::size_t>(path.size()));
    for (int t = 0; t < path.size(); ++t)
        out[static_cast<std::size_t>(t)] = self_potential(path[t], lambda);
    return out;
}

inline double integral_potential(const EuclideanPath& path, const LatticeSpec& lattice,
                                 double lambda) {
    if (lambda < 0.0) throw ValidationError("integral_potential: lambda must be non-negative");
    if (path.size() != lattice.n_slices)
        throw ValidationError("integral_potential: path length does not match lattice");
    return integral_potential_of(path, lattice, lambda);
}

/// Ratio of a path's integral potential energy to the canonical input train's.
/// 0 for a path pinned at the vacua, 1 for an input replica.
inline double activity(const EuclideanPath& path, const LatticeSpec& lattice, double lambda,
                       double reference_integral) {
    if (!(reference_integral > 0.0))
        throw ValidationError("activity: reference integral must be positive");
    return integral_potential(path, lattice, lambda) / reference_integral;
}

/// Two-state detector with symmetric hysteresis band (-h, +h), scanned
/// cyclically; returns the number of switches, which is even by periodicity.
inline int count_kinks(const EuclideanPath& path, double hysteresis = 0.5) {
    if (!(hysteresis > 0.0 && hysteresis < 1.0))
        throw ValidationError("count_kinks: hysteresis must lie in (0,1)");
    const int n = path.size();
    int start = -1;
    for (int t = 0; t < n; ++t)
        if (std::abs(path[t]) > hysteresis) { start = t; break; }
    if (start < 0) return 0;  // never leaves the band: no spikes

    int state = path[start] > 0.0 ? 1 : -1;
    int switches = 0;
    for (int k = 1; k <= n; ++k) {
        const double v = path[(start + k) % n];
        if (state > 0 && v < -hysteresis) { state = -1; ++switches; }
        else if (state < 0 && v > hysteresis) { state = 1; ++switches; }
    }
    return switches;
}

/// Standard error of bin means; honest under autocorrelation once bins are
/// longer than the correlation time.
inline double binned_error(const std::vector<double>& samples, int n_bins) {
    if (n_bins < 2) throw ValidationError("binned_error: need at least 2 bins");
    const int n = static_cast<int>(samples.size());
    if (n < 2 * n_bins)
        throw ValidationError("binned_error: need at least 2 samples per bin, got " +
                              std::to_string(n) + " samples for " + std::to_string(n_bins) +
                              " bins");
    const int bin_size = n / n_bins;  // trailing remainder samples are dropped
    std::vector<double> bin_means(static_cast<std::size_t>(n_bins), 0.0);
    for (int b = 0; b < n_bins; ++b) {
        double s = 0.0;
        for (int k = 0; k < bin_size; ++k) s += samples[static_cast<std::size_t>(b * bin_size + k)];
        bin_means[static_cast<std::size_t>(b)] = s / bin_size;
    }
    double mean = 0.0;
    for (double m : bin_means) mean += m;
    mean /= n_bins;
    double var = 0.0;
    for (double m : bin_means) var += (m - mean) * (m - mean);
    var /= (n_bins - 1);
    return std::sqrt(var / n_bins);
}

/// Gaussian-order integral potential energy of a free neuron fluctuating
/// around a vacuum, from the exact lattice mode sum of the quadratic
/// expansion V0(1+d) ~ lambda*d^2 (+ the quartic Gaussian term). Used as the
/// activity baseline so a neuron that never spikes reports activity ~ 0.
inline double vacuum_potential_integral(const LatticeSpec& lattice, double lambda) {
    if (lambda < 0.0) throw ValidationError("vacuum baseline: lambda must be non-negative");
    if (lambda == 0.0) return 0.0;
    const int n = lattice.n_slices;
    const double dt = lattice.step();
    double sigma2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n;
        sigma2 += 1.0 / ((2.0 / dt) * (1.0 - std::cos(theta)) + 2.0 * lambda * dt);
    }
    sigma2 /= n;
    const double v_density = lambda * sigma2 + 0.75 * lambda * sigma2 * sigma2;
    return lattice.extent_T * v_density;
}

struct NeuronReport {
    std::string id;
    bool frozen = false;
    double activity_mean = 0.0;      // baseline-subtracted, floored at 0
    double activity_raw_mean = 0.0;  // bare integral ratio
    double activity_err = 0.0;
    double activity_baseline = 0.0;  // subtracted amount, in activity units
    double kink_count_mean = 0.0;
    std::vector<double> energy_trace;  // per-slice mean V0, length n_slices
};

struct MeasurementReport {
    std::vector<NeuronReport> per_neuron;
    std::vector<double> acceptance;  // per level
    std::vector<std::string> warnings;
    nlohmann::json metadata;         // config echo, seed, rng, code version

    const NeuronReport* find(const std::string& id) const {
        for (const auto& n : per_neuron)
            if (n.id == id) return &n;
        return nullptr;
    }
};

inline nlohmann::json report_to_json(const MeasurementReport& report) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["metadata"] = report.metadata;
    doc["acceptance"] = report.acceptance;
    doc["warnings"] = report.warnings;
    doc["neurons"] = nlohmann::json::array();
    for (const auto& n : report.per_neuron) {
        nlohmann::json jn;
        jn["id"] = n.id;
        jn["frozen"] = n.frozen;
        jn["activity_mean"] = n.activity_mean;
        jn["activity_raw_mean"] = n.activity_raw_mean;
        jn["activity_err"] = n.activity_err;
        jn["activity_baseline"] = n.activity_baseline;
        jn["kink_count_mean"] = n.kink_count_mean;
        jn["energy_trace"] = n.energy_trace;
        doc["neurons"].push_back(jn);
    }
    return doc;
}

/// One CSV row per neuron: id, activity and error, kink count.
inline std::string report_to_csv(const MeasurementReport& report) {
    std::string out = "id,frozen,activity_mean,activity_err,kink_count_mean\n";
    char line[256];
    for (const auto& n : report.per_neuron) {
        std::snprintf(line, sizeof(line), "%s,%d,%.10g,%.10g,%.10g\n", n.id.c_str(),
                      n.frozen ? 1 : 0, n.activity_mean, n.activity_err, n.kink_count_mean);
        out += line;
    }
    return out;
}

}  // namespace qwell
