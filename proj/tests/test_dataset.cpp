#include "effham/dataset.hpp"
#include "effham/io.hpp"
#include "effham/physics.hpp"
#include "effham/reduction.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace effham;

namespace {

const QubitConstants kQ;
const FrameConfig kFrame = FrameConfig::standard();

Dataset small_dataset(int workers = 1) {
    EnsembleSpec box;
    box.seed = 3;
    GenerateOptions o;
    o.spec = box;
    o.workers = workers;
    Dataset d = generate_dataset(kQ, sample_ensemble(box, 4), 6, kFrame, o);
    d.config_hash = "0123456789abcdef";
    return d;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("ensemble draws stay in the box and average to the midpoint") {
    const EnsembleSpec box;
    const std::size_t n = 10000;
    const auto devices = sample_ensemble(box, n, 1);
    const auto pulses = sample_pulses(box, n, 1);
    std::array<double, 5> mean_eta{};
    std::array<double, 3> mean_phi{};
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(box.contains(devices[i]));
        CHECK(box.contains(pulses[i]));
        const auto a = devices[i].to_array();
        const auto p = pulses[i].to_array();
        for (std::size_t k = 0; k < 5; ++k) mean_eta[k] += a[k] / n;
        for (std::size_t k = 0; k < 3; ++k) mean_phi[k] += p[k] / n;
    }
    for (std::size_t k = 0; k < 5; ++k) {
        const double se = box.eta[k].width() / std::sqrt(12.0 * n);
        CHECK(std::abs(mean_eta[k] - box.eta[k].mid()) < 3 * se);
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const double se = box.flux[k].width() / std::sqrt(12.0 * n);
        CHECK(std::abs(mean_phi[k] - box.flux[k].mid()) < 3 * se);
    }
    std::size_t upper_tail = 0;
    for (const auto& p : sample_pulses(box, 1000, 2)) upper_tail += p.phi_c1 > 1.2;
    CHECK(upper_tail > 0);
}

TEST_CASE("sampling is deterministic and stream separated") {
    EnsembleSpec box;
    box.seed = 99;
    CHECK(sample_ensemble(box, 20, 3) == sample_ensemble(box, 20, 3));
    CHECK(sample_pulses(box, 20, 3) == sample_pulses(box, 20, 3));
    CHECK(sample_pulses(box, 20, 3) != sample_pulses(box, 20, 4));
    EnsembleSpec other = box;
    other.seed = 100;
    CHECK(sample_ensemble(box, 20) != sample_ensemble(other, 20));
}

TEST_CASE("degenerate and invalid boxes") {
    EnsembleSpec box;
    box.eta[0] = {25.0, 25.0};
    box.flux[2] = {0.7, 0.7};
    for (const auto& d : sample_ensemble(box, 50)) CHECK(d.ej0_c1 == 25.0);
    for (const auto& p : sample_pulses(box, 50)) CHECK(p.phi_c1 == 0.7);
    box.eta[1] = {0.4, 0.3};
    CHECK_THROWS(box.validate());
    box.eta[1] = {0.3, std::nan("")};
    CHECK_THROWS(box.validate());
}

TEST_CASE("decoupled record") {
    const DatasetRecord r = make_record(kQ, {25.0, 0.3, 0.0, 0.0, 0.0}, {0.2, 0.4, 0.9}, kFrame, 1.0);
    CHECK(!r.excluded());
    CHECK(r.fidelity_true == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.c_true[Term::XX]) < 1e-8);
    CHECK(std::abs(r.c_true[Term::ZZ]) < 1e-8);
    CHECK(r.min_weight == doctest::Approx(1.0));
}

TEST_CASE("records carry consistent targets") {
    const Dataset d = small_dataset();
    CHECK(d.records.size() == 24);
    for (const auto& r : d.records) {
        REQUIRE(!r.excluded());
        CHECK(r.fidelity_true >= r.fidelity_dress - 1e-12);
        CHECK(r.c_true.is_finite());
        // Replay: the stored fidelity is reproduced from the stored coefficients.
        const Mat4 u = projected_subunitary(build_full_hamiltonian(kQ, r.eta, r.phi, kFrame), d.t);
        CHECK(process_fidelity(r.c_true, u, d.t) == doctest::Approx(r.fidelity_true).epsilon(1e-10));
        CHECK(process_fidelity(r.c_dress, u, d.t) == doctest::Approx(r.fidelity_dress).epsilon(1e-10));
    }
    // Device-major order.
    CHECK(d.records[7].device == 1);
    CHECK(d.records[7].pulse == 1);
    CHECK(d.records[7].phi == sample_pulses(d.spec, 6, 2)[1]);
}

TEST_CASE("serialization round trip and regeneration") {
    const Dataset d = small_dataset();
    const std::string text = dataset_to_string(d);
    CHECK(dataset_from_string(text) == d);
    CHECK(dataset_to_string(small_dataset(3)) == text);

    const auto dir = std::filesystem::temp_directory_path() / "effham_test_dataset";
    std::filesystem::create_directories(dir);
    persist_dataset(d, dir / "dataset.jsonl");
    CHECK(load_dataset(dir / "dataset.jsonl") == d);
    std::filesystem::remove_all(dir);
}

TEST_CASE("damaged files are rejected") {
    const std::string text = dataset_to_string(small_dataset());
    CHECK_THROWS_AS(dataset_from_string(""), SchemaError);
    // Drop the last record.
    const std::string truncated = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    CHECK_THROWS_AS(dataset_from_string(truncated), SchemaError);
    std::string bumped = text;
    const auto pos = bumped.find("\"schema_version\":1");
    REQUIRE(pos != std::string::npos);
    bumped.replace(pos, 18, "\"schema_version\":2");
    CHECK_THROWS_AS(dataset_from_string(bumped), SchemaError);
    std::string garbled = text;
    garbled.insert(garbled.find('\n') + 1, "{not json\n");
    CHECK_THROWS_AS(dataset_from_string(garbled), SchemaError);
}

}  // TEST_SUITE
