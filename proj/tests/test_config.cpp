#include "effham/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace effham;
using nlohmann::json;

TEST_SUITE("config") {

TEST_CASE("shipped YAML matches the built-in defaults") {
    const RunConfig file = load_run_config(std::filesystem::path(EFFHAM_SOURCE_DIR) / "configs" / "default.yaml");
    const RunConfig builtin;
    CHECK(to_json(file) == to_json(builtin));
    CHECK(config_hash(file) == config_hash(builtin));
    CHECK(file.frame == FrameConfig::standard());
    CHECK(file.adapt.bounds == file.ensemble.eta);
}

TEST_CASE("unknown keys and bad values are configuration errors") {
    CHECK_THROWS_AS(run_config_from_json(json{{"trian", json::object()}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"train", {{"max_epoch", 3}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"data", {{"devices", "many"}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"ensemble", {{"eta", {{"ec_c1", {0.4, 0.3}}}}}}}), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/effham.yaml"), ConfigError);
}

TEST_CASE("overrides") {
    json doc = json::object();
    apply_override(doc, "train.max_epochs=5");
    apply_override(doc, "ensemble.eta.ec_c1=[0.29, 0.31]");
    apply_override(doc, "paths.results_dir=out dir");
    const RunConfig c = run_config_from_json(doc);
    CHECK(c.train.train.max_epochs == 5);
    CHECK(c.ensemble.eta[1] == Interval{0.29, 0.31});
    CHECK(c.paths.results_dir == "out dir");
    // Adaptation bounds follow the ensemble box unless set.
    CHECK(c.adapt.bounds[1] == Interval{0.29, 0.31});
    CHECK(c.resolve("dataset.jsonl") == std::filesystem::path("out dir") / "dataset.jsonl");
    CHECK(c.resolve("/abs/x.json") == std::filesystem::path("/abs/x.json"));
    CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("hash tracks every setting") {
    const RunConfig a;
    RunConfig b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.design.seed = 3;
    CHECK(config_hash(a) != config_hash(b));
    RunConfig c;
    c.frame.omega0 += 1e-9;
    CHECK(config_hash(a) != config_hash(c));
    RunConfig w;
    w.data.workers = 4;
    w.adapt.workers = 3;
    w.paths.results_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(w));
}

TEST_CASE("YAML scalars") {
    CHECK(yaml_scalar_to_json("3") == json(3));
    CHECK(yaml_scalar_to_json("2.5") == json(2.5));
    CHECK(yaml_scalar_to_json("true") == json(true));
    CHECK(yaml_scalar_to_json("abc") == json("abc"));
    CHECK(yaml_scalar_to_json("[1, 2]") == json::array({1, 2}));
}

}  // TEST_SUITE
