#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "orv/config.hpp"

namespace fs = std::filesystem;
using orv::cfg::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "orv-config-test";
    fs::create_directories(dir);
    const fs::path file = dir / name;
    std::ofstream out(file, std::ios::binary);
    out << text;
    out.close();
    return file.string();
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const orv::config_error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config files load and syntax errors carry the line number", "[config]") {
    const auto good = write_temp("good.json", "{\n  \"a\": 1\n}\n");
    const json doc = orv::cfg::load_json_file(good);
    CHECK(doc.at("a") == 1);

    const auto broken = write_temp("broken.json", "{\n  \"a\": 1,\n  \"b\": oops\n}\n");
    const std::string msg = message_of([&] { orv::cfg::load_json_file(broken); });
    CHECK(msg.find("line 3") != std::string::npos);

    CHECK_THROWS_AS(orv::cfg::load_json_file("/nonexistent/nowhere.json"),
                    orv::config_error);
}

TEST_CASE("field accessors name the exact field they trip on", "[config]") {
    const json obj = json::parse(R"({"beta": 3, "label": "x", "n": 7, "bad": "q"})");

    CHECK(orv::cfg::number_at(obj, "root", "beta") == 3.0);
    CHECK(orv::cfg::number_or(obj, "root", "missing", 1.5) == 1.5);
    CHECK(orv::cfg::string_at(obj, "root", "label") == "x");
    CHECK(orv::cfg::count_at(obj, "root", "n") == 7);
    CHECK(orv::cfg::count_or(obj, "root", "absent", 9) == 9);

    std::string msg = message_of([&] { orv::cfg::number_at(obj, "root", "gone"); });
    CHECK(msg.find("root") != std::string::npos);
    CHECK(msg.find("'gone'") != std::string::npos);

    msg = message_of([&] { orv::cfg::number_at(obj, "root", "bad"); });
    CHECK(msg.find("root.bad") != std::string::npos);
    CHECK(msg.find("number") != std::string::npos);

    msg = message_of([&] { orv::cfg::count_at(obj, "root", "bad"); });
    CHECK_FALSE(msg.empty());
}

TEST_CASE("grids parse from numbers, arrays, and range objects", "[config]") {
    CHECK(orv::cfg::parse_grid(json(50.0), "g") == std::vector<double>{50.0});
    CHECK(orv::cfg::parse_grid(json::parse("[1, 10, 100]"), "g") ==
          std::vector<double>{1.0, 10.0, 100.0});

    const auto logs = orv::cfg::parse_grid(
        json::parse(R"({"from": 1, "to": 100, "points": 3, "spacing": "log"})"), "g");
    REQUIRE(logs.size() == 3);
    CHECK(logs[0] == Catch::Approx(1.0));
    CHECK(logs[1] == Catch::Approx(10.0));
    CHECK(logs[2] == Catch::Approx(100.0));

    const auto lin = orv::cfg::parse_grid(
        json::parse(R"({"from": 0, "to": 4, "points": 5, "spacing": "linear"})"), "g");
    REQUIRE(lin.size() == 5);
    CHECK(lin[1] == Catch::Approx(1.0));

    CHECK_THROWS_AS(orv::cfg::parse_grid(
                        json::parse(R"({"from": 1, "to": 100, "points": 1})"), "g"),
                    orv::config_error);
    CHECK_THROWS_AS(orv::cfg::parse_grid(
                        json::parse(R"({"from": 5, "to": 2, "points": 3})"), "g"),
                    orv::config_error);
    CHECK_THROWS_AS(
        orv::cfg::parse_grid(
            json::parse(R"({"from": 0, "to": 2, "points": 3, "spacing": "log"})"), "g"),
        orv::config_error);
    CHECK_THROWS_AS(
        orv::cfg::parse_grid(
            json::parse(R"({"from": 1, "to": 2, "points": 3, "spacing": "odd"})"), "g"),
        orv::config_error);
    CHECK_THROWS_AS(orv::cfg::parse_grid(json("text"), "g"), orv::config_error);
}

TEST_CASE("driving functions parse for every family", "[config]") {
    const auto inv = orv::cfg::parse_driving(
        json::parse(R"({"family": "inverted-dirichlet", "beta": 3})"), "d");
    CHECK(orv::eval_driving(inv, 1.0) == Catch::Approx(0.125));

    const auto pl = orv::cfg::parse_driving(
        json::parse(R"({"family": "pareto-log", "beta": 3, "delta": 1})"), "d");
    CHECK(orv::eval_driving(pl, 0.0) == Catch::Approx(1.0));

    const auto ex = orv::cfg::parse_driving(
        json::parse(R"({"family": "exponential", "rate": 2})"), "d");
    CHECK(orv::eval_driving(ex, 1.0) == Catch::Approx(std::exp(-2.0)));

    const auto tab = orv::cfg::parse_driving(
        json::parse(R"({"family": "tabulated", "points": [[0, 1], [1, 0.5], [10, 0.01]]})"),
        "d");
    CHECK(orv::eval_driving(tab, 1.0) == Catch::Approx(0.5));

    const auto shifted = orv::cfg::parse_driving(
        json::parse(R"({"family": "inverted-dirichlet", "beta": 3, "shift": 1, "scale": 4})"),
        "d");
    CHECK(orv::eval_driving(shifted, 0.0) == Catch::Approx(0.5));

    std::string msg = message_of([&] {
        orv::cfg::parse_driving(json::parse(R"({"family": "mystery"})"), "d");
    });
    CHECK(msg.find("mystery") != std::string::npos);

    msg = message_of([&] {
        orv::cfg::parse_driving(
            json::parse(R"({"family": "inverted-dirichlet", "beta": -1})"), "spot");
    });
    CHECK(msg.find("spot") != std::string::npos);
}

TEST_CASE("models, scalings, boxes, and matrices parse with validation", "[config]") {
    const json mj = json::parse(
        R"({"shapes": [1, 1], "driving": {"family": "inverted-dirichlet", "beta": 3}})");
    const auto m = orv::cfg::parse_model(mj, "model");
    CHECK(m.normalizer == Catch::Approx(2.0).epsilon(1e-10));

    // a power tail at the integrability boundary is rejected, with the path
    const json badm = json::parse(
        R"({"shapes": [1, 1], "driving": {"family": "inverted-dirichlet", "beta": 2}})");
    const std::string msg =
        message_of([&] { orv::cfg::parse_model(badm, "scenarios[4].model"); });
    CHECK(msg.find("scenarios[4].model") != std::string::npos);

    const json sj = json::parse(R"({"exponents": [1, 2]})");
    const auto spec = orv::cfg::spec_at(sj, "s", "exponents");
    CHECK(spec.alpha_max == 2.0);

    const auto box = orv::cfg::parse_box(
        json::parse(R"({"lower": [1, 1], "upper": [2, "inf"]})"), "b");
    CHECK(std::isinf(box.upper[1]));
    CHECK_THROWS_AS(orv::cfg::parse_box(
                        json::parse(R"({"lower": [1], "upper": ["huge"]})"), "b"),
                    orv::config_error);
    CHECK_THROWS_AS(orv::cfg::parse_box(
                        json::parse(R"({"lower": [0], "upper": [1]})"), "b"),
                    orv::config_error);

    const auto mat =
        orv::cfg::parse_matrix(json::parse("[[0, 1], [1, 0]]"), "r");
    CHECK(mat(0, 1) == 1.0);
    CHECK_THROWS_AS(orv::cfg::parse_matrix(json::parse("[[1, 2], [3]]"), "r"),
                    orv::config_error);
}

TEST_CASE("scenario suites validate names, operations, and expectations", "[config]") {
    const json good = json::parse(R"({
      "scenarios": [
        {"name": "one", "operation": "density"},
        {"name": "two", "operation": "estimate-index", "expect": "fail"}
      ]})");
    const auto suite = orv::cfg::parse_suite(good);
    REQUIRE(suite.scenarios.size() == 2);
    CHECK(suite.scenarios[0].name == "one");
    CHECK_FALSE(suite.scenarios[0].expect_fail);
    CHECK(suite.scenarios[1].expect_fail);

    std::string msg = message_of([&] {
        orv::cfg::parse_suite(json::parse(
            R"({"scenarios": [{"operation": "density"}]})"));
    });
    CHECK(msg.find("scenarios[0]") != std::string::npos);
    CHECK(msg.find("'name'") != std::string::npos);

    msg = message_of([&] {
        orv::cfg::parse_suite(json::parse(
            R"({"scenarios": [{"name": "x", "operation": "teleport"}]})"));
    });
    CHECK(msg.find("teleport") != std::string::npos);
    CHECK(msg.find("sample") != std::string::npos);  // lists the known operations

    CHECK_THROWS_AS(orv::cfg::parse_suite(json::parse(R"({"scenarios": []})")),
                    orv::config_error);
    CHECK_THROWS_AS(orv::cfg::parse_suite(json::parse(R"({
        "scenarios": [{"name": "dup", "operation": "density"},
                      {"name": "dup", "operation": "density"}]})")),
                    orv::config_error);
    // distinct names that collapse to the same output file are rejected too
    CHECK_THROWS_AS(orv::cfg::parse_suite(json::parse(R"({
        "scenarios": [{"name": "a b", "operation": "density"},
                      {"name": "a.b", "operation": "density"}]})")),
                    orv::config_error);
    msg = message_of([&] {
        orv::cfg::parse_suite(json::parse(
            R"({"scenarios": [{"name": "x", "operation": "density", "expect": "maybe"}]})"));
    });
    CHECK(msg.find("expect") != std::string::npos);
}

TEST_CASE("overrides rewrite the document before parsing", "[config]") {
    json doc = json::parse(R"({
      "scenarios": [
        {"name": "a", "operation": "sample", "n": 100, "seed": 1,
         "model": {"shapes": [1, 2]}},
        {"name": "b", "operation": "density", "seed": 4}
      ]})");

    orv::cfg::apply_override(doc, "scenarios[0].n=5000");
    CHECK(doc["scenarios"][0]["n"] == 5000);

    orv::cfg::apply_override(doc, "scenarios[0].model.shapes[1]=3.5");
    CHECK(doc["scenarios"][0]["model"]["shapes"][1] == 3.5);

    // unparseable values stay strings; new leaf fields may be created
    orv::cfg::apply_override(doc, "scenarios[1].note=hello world");
    CHECK(doc["scenarios"][1]["note"] == "hello world");

    CHECK_THROWS_AS(orv::cfg::apply_override(doc, "no-equals"), orv::config_error);
    CHECK_THROWS_AS(orv::cfg::apply_override(doc, "=5"), orv::config_error);
    CHECK_THROWS_AS(orv::cfg::apply_override(doc, "scenarios[7].n=1"), orv::config_error);
    CHECK_THROWS_AS(orv::cfg::apply_override(doc, "missing.field.q=1"), orv::config_error);
    CHECK_THROWS_AS(orv::cfg::apply_override(doc, "scenarios[0]..n=1"), orv::config_error);

    orv::cfg::apply_seed(doc, 777);
    CHECK(doc["scenarios"][0]["seed"] == 777);
    CHECK(doc["scenarios"][1]["seed"] == 777);
}

TEST_CASE("scenario names map to stable output file names", "[config]") {
    CHECK(orv::cfg::output_slug("Tail Mass (moderate)") == "tail-mass-moderate");
    CHECK(orv::cfg::output_slug("density ratio along the diagonal") ==
          "density-ratio-along-the-diagonal");
    CHECK(orv::cfg::output_slug("___") == "scenario");
}
