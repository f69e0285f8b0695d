#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qwell/observables.hpp"
#include "qwell/sampler.hpp"

using namespace qwell;

namespace {

EuclideanPath constant_path(int n, double v) {
    EuclideanPath p;
    p.values.assign(static_cast<std::size_t>(n), v);
    return p;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("potential trace") {
    const auto lat = build_lattice(0.7, 512);
    const auto vac = potential_trace(constant_path(512, 1.0), 5000.0);
    for (double v : vac) CHECK(v == 0.0);

    const auto zeros = potential_trace(constant_path(512, 0.0), 4.0);
    for (double v : zeros) CHECK(v == 1.0);

    // single kink: the trace peaks at the slice nearest the centre, value ~ Lambda/4
    EuclideanPath kink;
    kink.values.resize(512);
    for (int t = 0; t < 512; ++t) kink[t] = kink_profile(lat.time_at(t), 0.35, 5000.0, +1);
    const auto tr = potential_trace(kink, 5000.0);
    const auto peak = std::max_element(tr.begin(), tr.end());
    const int peak_slice = static_cast<int>(peak - tr.begin());
    CHECK(std::abs(lat.time_at(peak_slice) - 0.35) <= lat.step());
    CHECK(*peak == doctest::Approx(1250.0).epsilon(0.01));
}

TEST_CASE("integral potential of the canonical train is three kink actions") {
    const auto lat = build_lattice(0.7, 512);
    const auto train = build_kink_train(lat, KinkTrainSpec{6, 5000.0, +1, {}});
    const double s_cl = classical_kink_action(5000.0);
    CHECK(integral_potential(train.path, lat, 5000.0) == doctest::Approx(3.0 * s_cl).epsilon(0.01));
    CHECK(integral_potential(constant_path(512, 1.0), lat, 5000.0) == 0.0);
    CHECK(integral_potential(constant_path(512, 0.0), lat, 4.0) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("activity: vacuum 0, replica 1, three kinks about one half") {
    const auto lat = build_lattice(0.7, 512);
    const auto train = build_kink_train(lat, KinkTrainSpec{6, 5000.0, +1, {}});
    const double ref = integral_potential(train.path, lat, 5000.0);

    CHECK(activity(constant_path(512, 1.0), lat, 5000.0, ref) == 0.0);
    CHECK(activity(train.path, lat, 5000.0, ref) == 1.0);

    // 3 glued kink profiles via explicit centres; parity ignored so the path
    // is built by hand rather than through build_kink_train
    EuclideanPath three;
    three.values.resize(512);
    const double centers[3] = {0.7 * 0.5 / 3, 0.7 * 1.5 / 3, 0.7 * 2.5 / 3};
    for (int t = 0; t < 512; ++t) {
        const double tau = lat.time_at(t);
        int j = 0;
        double best = 1e9;
        for (int k = 0; k < 3; ++k) {
            const double d = std::abs(tau - centers[k]);
            if (d < best) { best = d; j = k; }
        }
        const int sign = j % 2 == 0 ? -1 : +1;
        three[t] = kink_profile(tau, centers[j], 5000.0, sign);
    }
    CHECK(activity(three, lat, 5000.0, ref) == doctest::Approx(0.5).epsilon(0.02));

    CHECK_THROWS_AS(activity(train.path, lat, 5000.0, 0.0), ValidationError);
    CHECK_THROWS_AS(activity(train.path, lat, 5000.0, -2.0), ValidationError);
}

TEST_CASE("count_kinks") {
    const auto lat = build_lattice(0.7, 512);
    CHECK(count_kinks(constant_path(512, 1.0)) == 0);
    CHECK(count_kinks(constant_path(512, -1.0)) == 0);

    const auto train = build_kink_train(lat, KinkTrainSpec{6, 5000.0, +1, {}});
    CHECK(count_kinks(train.path, 0.5) == 6);

    // sub-threshold chatter is ignored
    EuclideanPath noisy = constant_path(512, 1.0);
    SplitMix64 rng{3};
    for (auto& v : noisy.values) v = 1.0 - 0.4 * rng.uniform01();
    CHECK(count_kinks(noisy, 0.5) == 0);

    CHECK_THROWS_AS(count_kinks(train.path, 0.0), ValidationError);
    CHECK_THROWS_AS(count_kinks(train.path, 1.0), ValidationError);
}

TEST_CASE("count_kinks is even and rotation invariant") {
    SplitMix64 rng{11};
    for (int trial = 0; trial < 20; ++trial) {
        EuclideanPath p;
        p.values.resize(256);
        for (auto& v : p.values) v = 1.4 * rng.uniform_pm();
        const int k = count_kinks(p, 0.5);
        CHECK(k % 2 == 0);
        EuclideanPath r;
        r.values.resize(256);
        const int shift = static_cast<int>(rng.next() % 256);
        for (int t = 0; t < 256; ++t) r[t] = p[(t + shift) % 256];
        CHECK(count_kinks(r, 0.5) == k);
    }
}

TEST_CASE("binned_error: constants, white noise, and strong autocorrelation") {
    CHECK(binned_error(std::vector<double>(100, 3.14), 10) == 0.0);

    // i.i.d. uniform with unit variance: error ~ 1/sqrt(N) = 0.01
    SplitMix64 rng{21};
    std::vector<double> iid(10000);
    const double width = std::sqrt(3.0);
    for (auto& v : iid) v = width * rng.uniform_pm();
    const double err = binned_error(iid, 100);
    CHECK(err == doctest::Approx(0.01).epsilon(0.20));

    // AR(1) with rho=0.99: naive error is badly optimistic
    std::vector<double> ar(10000);
    const double rho = 0.99, noise = std::sqrt(1.0 - rho * rho);
    double x = 0.0;
    for (auto& v : ar) {
        x = rho * x + noise * width * rng.uniform_pm();
        v = x;
    }
    double mean = 0.0;
    for (double v : ar) mean += v;
    mean /= static_cast<double>(ar.size());
    double var = 0.0;
    for (double v : ar) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ar.size() - 1);
    const double naive = std::sqrt(var / static_cast<double>(ar.size()));
    CHECK(binned_error(ar, 20) > 3.0 * naive);

    CHECK_THROWS_AS(binned_error(std::vector<double>(3, 1.0), 2), ValidationError);
    CHECK_THROWS_AS(binned_error(iid, 1), ValidationError);
}

TEST_CASE("vacuum baseline tracks the lattice mode sum") {
    const auto lat = build_lattice(0.7, 512);
    // continuum value coth(T*Omega/2)/(2*Omega) with Omega = sqrt(2*Lambda);
    // the lattice sum sits a few percent above it from the UV modes
    const double omega = std::sqrt(2.0 * 5000.0);
    const double continuum = 0.7 * 5000.0 / (2.0 * omega) / std::tanh(0.35 * omega);
    const double baseline = vacuum_potential_integral(lat, 5000.0);
    CHECK(baseline > continuum);
    CHECK(baseline < 1.15 * continuum);
    CHECK(vacuum_potential_integral(lat, 0.0) == 0.0);
}

TEST_CASE("report serialization") {
    MeasurementReport rep;
    NeuronReport n;
    n.id = "n1";
    n.activity_mean = 0.5;
    n.activity_err = 0.01;
    n.kink_count_mean = 4.0;
    n.energy_trace = {0.0, 1.0};
    rep.per_neuron.push_back(n);
    rep.acceptance = {0.4};
    rep.metadata = {{"seed", 7}};
    const auto doc = report_to_json(rep);
    CHECK(doc["neurons"][0]["id"] == "n1");
    CHECK(doc["neurons"][0]["activity_mean"] == 0.5);
    CHECK(doc["metadata"]["seed"] == 7);
    const auto csv = report_to_csv(rep);
    CHECK(csv.find("id,frozen,activity_mean") == 0);
    CHECK(csv.find("n1,0,0.5,0.01,4") != std::string::npos);
}

}  // TEST_SUITE
