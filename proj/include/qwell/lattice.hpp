#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwell {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Periodic Euclidean time lattice. n_slices points cover [0, extent_T);
/// the neighbour of slice n_slices-1 is slice 0, no endpoint is duplicated.
struct LatticeSpec {
    double extent_T = 0.7;
    int n_slices = 512;

    double step() const { return extent_T / n_slices; }
    double time_at(int t) const { return t * step(); }

    bool operator==(const LatticeSpec&) const = default;
};

inline LatticeSpec build_lattice(double extent_T, int n_slices) {
    if (!(extent_T > 0.0))
        throw ValidationError("lattice: extent_T must be positive, got " + std::to_string(extent_T));
    if (n_slices < 8)
        throw ValidationError("lattice: too few slices (need >= 8), got " + std::to_string(n_slices));
    return LatticeSpec{extent_T, n_slices};
}

/// Field values of one neuron over the lattice, indexed modulo n_slices.
struct EuclideanPath {
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int t) { return values[static_cast<std::size_t>(t)]; }
    double operator[](int t) const { return values[static_cast<std::size_t>(t)]; }

    bool operator==(const EuclideanPath&) const = default;
};

/// Action of the classical kink solution, 2*sqrt(2*lambda)/3.
inline double classical_kink_action(double lambda) {
    if (lambda < 0.0)
        throw ValidationError("classical_kink_action: lambda must be non-negative");
    return 2.0 * std::sqrt(2.0 * lambda) / 3.0;
}

/// Width scale 1/sqrt(lambda/2) of the kink profile.
inline double kink_width(double lambda) { return 1.0 / std::sqrt(lambda / 2.0); }

/// Classical kink profile sign*tanh(sqrt(lambda/2)*(t-t0)).
inline double kink_profile(double t, double t0, double lambda, int sign) {
    if (!(lambda > 0.0))
        throw ValidationError("kink_profile: lambda must be positive");
    return sign * std::tanh(std::sqrt(lambda / 2.0) * (t - t0));
}

/// Recipe for a fixed input path made of alternating kink/antikink profiles.
struct KinkTrainSpec {
    int n_kinks = 6;                // must be even so the path closes periodically
    double lambda = 5000.0;
    int start_vacuum = +1;          // vacuum the path occupies before the first kink
    std::vector<double> centers;    // empty: equally spaced at (j+0.5)*T/n_kinks

    bool operator==(const KinkTrainSpec&) const = default;
};

struct KinkTrain {
    EuclideanPath path;
    std::vector<double> centers;
    std::vector<std::string> warnings;
};

namespace detail {

/// Signed displacement t-c wrapped into [-T/2, T/2).
inline double cyclic_displacement(double t, double c, double extent_T) {
    double d = std::fmod(t - c, extent_T);
    if (d < -0.5 * extent_T) d += extent_T;
    if (d >= 0.5 * extent_T) d -= extent_T;
    return d;
}

}  // namespace detail

/// Glue analytic kink profiles at the midpoints between adjacent centers
/// (equivalently: each slice uses the cyclically nearest center). At the
/// default Lambda the tanh saturates far below machine epsilon at the glue
/// points, so the path is smooth to double precision.
inline KinkTrain build_kink_train(const LatticeSpec& lattice, const KinkTrainSpec& spec) {
    if (spec.n_kinks < 0 || spec.n_kinks % 2 != 0)
        throw ValidationError("kink train: n_kinks must be even and non-negative, got " +
                              std::to_string(spec.n_kinks));
    if (!(spec.lambda > 0.0))
        throw ValidationError("kink train: lambda must be positive");
    if (spec.start_vacuum != 1 && spec.start_vacuum != -1)
        throw ValidationError("kink train: start_vacuum must be +1 or -1");

    const int n = lattice.n_slices;
    const double T = lattice.extent_T;

    KinkTrain out;
    out.path.values.assign(static_cast<std::size_t>(n), static_cast<double>(spec.start_vacuum));
    if (spec.n_kinks == 0) return out;

    std::vector<double> centers = spec.centers;
    if (centers.empty()) {
        centers.resize(static_cast<std::size_t>(spec.n_kinks));
        for (int j = 0; j < spec.n_kinks; ++j)
            centers[static_cast<std::size_t>(j)] = (j + 0.5) * T / spec.n_kinks;
    } else {
        if (static_cast<int>(centers.size()) != spec.n_kinks)
            throw ValidationError("kink train: centers list length must equal n_kinks");
        for (std::size_t j = 0; j < centers.size(); ++j) {
            if (!(centers[j] >= 0.0 && centers[j] < T))
                throw ValidationError("kink train: center out of [0, T)");
            if (j > 0 && !(centers[j] > centers[j - 1]))
                throw ValidationError("kink train: centers must be strictly increasing");
        }
    }
    out.centers = centers;

    const double width = kink_width(spec.lambda);
    double min_spacing = T;  // cyclic spacing, including last->first wrap
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double next = (j + 1 < centers.size()) ? centers[j + 1] : centers[0] + T;
        min_spacing = std::min(min_spacing, next - centers[j]);
    }
    if (min_spacing < 4.0 * width)
        out.warnings.push_back("kink spacing " + std::to_string(min_spacing) +
                               " below 4x kink width " + std::to_string(width) +
                               "; adjacent kinks overlap");

    const double omega = std::sqrt(spec.lambda / 2.0);
    for (int t = 0; t < n; ++t) {
        const double tau = lattice.time_at(t);
        int best = 0;
        double best_abs = std::abs(detail::cyclic_displacement(tau, centers[0], T));
        for (int j = 1; j < spec.n_kinks; ++j) {
            const double a = std::abs(detail::cyclic_displacement(tau, centers[static_cast<std::size_t>(j)], T));
            if (a < best_abs) { best_abs = a; best = j; }
        }
        const double d = detail::cyclic_displacement(tau, centers[static_cast<std::size_t>(best)], T);
        // entering vacuum before kink j is start*(-1)^j, so the profile sign is the negative of it
        const double s = (best % 2 == 0) ? -spec.start_vacuum : spec.start_vacuum;
        out.path[t] = s * std::tanh(omega * d);
    }
    return out;
}

}  // namespace qwell
