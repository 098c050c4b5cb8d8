#include <catch2/catch_amalgamated.hpp>

#include <ergo/runspec.hpp>

using namespace ergo;
using nlohmann::json;

namespace {

const char* kBernoulliSpec = R"(
# comment
[system]
alphabet = ["0", "1"]
transition = "full"
sidedness = "two-sided"

[measures.mu]
kind = "bernoulli"
weights = ["1/2", "1/2"]   # exact fractions

[partitions.xi]
[partitions.xi.elements]
C0 = ["0"]
C1 = ["1"]

[[tasks]]
type = "entropy"
measure = "mu"
partition = "xi"
depth = 4
)";

RunSpec load(const std::string& text, ScalarMode mode = ScalarMode::Rational, int max_depth = 16) {
    return RunSpec::parse(toml::parse(text), mode, RunLimits{max_depth});
}

} // namespace

TEST_CASE("toml subset parser") {
    json doc = toml::parse(R"(
title = "demo"
count = 42
ratio = 1.5
flag = true
list = [1, 2, 3]
nested = [[1, 0], [0, 1]]
multiline = [
  "a",   # with a comment
  "b",
]

[table.sub]
key = "value"

[[rows]]
x = 1
[[rows]]
x = 2
)");
    CHECK(doc["title"] == "demo");
    CHECK(doc["count"] == 42);
    CHECK(doc["ratio"] == 1.5);
    CHECK(doc["flag"] == true);
    CHECK(doc["list"] == json({1, 2, 3}));
    CHECK(doc["nested"][1][1] == 1);
    CHECK(doc["multiline"] == json({"a", "b"}));
    CHECK(doc["table"]["sub"]["key"] == "value");
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][1]["x"] == 2);
}

TEST_CASE("toml parse errors carry positions") {
    auto get_error = [](const char* text) {
        try {
            toml::parse(text);
        } catch (const toml::parse_error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(get_error("key = ") != "no error");
    CHECK(get_error("key") != "no error");
    CHECK(get_error("a = [1, 2").find("unterminated array") != std::string::npos);
    CHECK(get_error("a = \"oops").find("unterminated string") != std::string::npos);
    CHECK(get_error("a = {b = 1}").find("inline tables") != std::string::npos);
    CHECK(get_error("a = 1\na = 2").find("duplicate key 'a'") != std::string::npos);
    CHECK(get_error("a = 1 trailing").find("trailing") != std::string::npos);
    // the position is the second line
    CHECK(get_error("good = 1\nbad = @").find("toml:2:") != std::string::npos);
}

TEST_CASE("run spec parses and executes tasks") {
    RunSpec spec = load(kBernoulliSpec);
    REQUIRE(spec.tasks().size() == 1);
    auto outputs = spec.run_all(false);
    REQUIRE(outputs.size() == 1);
    CHECK(outputs[0].name == "entropy");
    // the rate column is log 2 every row
    CHECK(outputs[0].csv.find("0.69314718056") != std::string::npos);
    CHECK(outputs[0].summary["rate"].get<double>() == Catch::Approx(std::log(2.0)));
    CHECK(outputs[0].summary["stabilized"] == true);

    // bits flag rescales
    auto bits = spec.run_all(true);
    CHECK(bits[0].summary["rate"].get<double>() == Catch::Approx(1.0));
    CHECK(bits[0].summary["unit"] == "bits");
}

TEST_CASE("semantic errors name the offending key") {
    CHECK_THROWS_MATCHES(load("[system]\ntransition = \"full\""), spec_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("missing key 'alphabet'")));
    CHECK_THROWS_MATCHES(load("[unknown]\nx = 1"), spec_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("unknown section")));

    std::string bad_measure = R"(
[system]
alphabet = ["0", "1"]
transition = "full"
[measures.mu]
kind = "bernoulli"
weights = ["1/2", "1/3"]
)";
    CHECK_THROWS_AS(load(bad_measure), error);

    std::string bad_ref = kBernoulliSpec;
    bad_ref.replace(bad_ref.find("measure = \"mu\""), 14, "measure = \"nu\"");
    CHECK_THROWS_MATCHES(load(bad_ref).run_all(false), spec_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("unknown measure 'nu'")));

    // floats must be quoted in rational mode
    std::string bare_float = R"(
[system]
alphabet = ["0", "1"]
transition = "full"
[measures.mu]
kind = "bernoulli"
weights = [0.5, 0.5]
)";
    CHECK_THROWS_AS(load(bare_float), spec_error);
    CHECK_NOTHROW(load(bare_float, ScalarMode::Floating));
}

TEST_CASE("depth limits") {
    std::string deep = kBernoulliSpec;
    deep.replace(deep.find("depth = 4"), 9, "depth = 20");
    CHECK_THROWS_AS(load(deep).run_all(false), depth_error);

    std::string mid = kBernoulliSpec;
    mid.replace(mid.find("depth = 4"), 9, "depth = 9");
    CHECK_THROWS_AS(load(mid, ScalarMode::Rational, 8).run_all(false), depth_error);
    CHECK_NOTHROW(load(mid, ScalarMode::Rational, 9).run_all(false));
}

TEST_CASE("normalized spec round-trips") {
    RunSpec spec = load(kBernoulliSpec);
    json normalized = spec.normalized();
    RunSpec reparsed = RunSpec::parse(normalized, ScalarMode::Rational, RunLimits{});
    CHECK(reparsed.normalized() == normalized);

    // identical outputs, byte for byte
    auto a = spec.run_all(false);
    auto b = reparsed.run_all(false);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].csv == b[i].csv);
        CHECK(a[i].summary.dump() == b[i].summary.dump());
    }
}

TEST_CASE("task outputs are deterministic") {
    for (int rep = 0; rep < 2; ++rep) {
        RunSpec s1 = load(kBernoulliSpec);
        RunSpec s2 = load(kBernoulliSpec);
        auto a = s1.run_all(false);
        auto b = s2.run_all(false);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].csv == b[i].csv);
            CHECK(a[i].summary.dump() == b[i].summary.dump());
        }
    }
}

TEST_CASE("table measures parse from cell maps") {
    RunSpec spec = load(R"(
[system]
alphabet = ["0", "1"]
transition = "full"

[measures.t]
kind = "table"
start = 0
[measures.t.cells]
00 = "1/2"
10 = "1/4"
11 = "1/4"

[partitions.xi]
[partitions.xi.elements]
C0 = ["0"]
C1 = ["1"]

[[tasks]]
type = "conditional"
measure = "t"
partition = "xi"
depth = 2
)");
    auto out = spec.run_all(false);
    REQUIRE(out.size() == 1);
    CHECK(out[0].summary["residual"] == "0");
    CHECK(out[0].summary["factor"]["C0"] == "1/2");
    CHECK(out[0].summary["factor"]["C1"] == "1/2");
}

TEST_CASE("pesin task needs no system block") {
    RunSpec spec = load(R"(
[[tasks]]
type = "pesin"
matrix = [[2, 1], [1, 1]]
)");
    auto out = spec.run_all(false);
    REQUIRE(out.size() == 1);
    CHECK(out[0].summary["equal"] == true);
    CHECK(out[0].summary["h_haar"].get<double>() == Catch::Approx(0.9624236501192069));
}
