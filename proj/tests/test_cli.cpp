#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcircle/verify.hpp"

// Exercises the installed binary end to end: exit codes, stable CSV headers,
// JSON shape against the shipped schemas, config-file handling, determinism.

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_path = "/tmp/pcircle_test_out_" + std::to_string(counter++) + ".txt";
    std::string cmd = std::string(PCIRCLE_CLI_BIN) + " " + args + " > " + out_path + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_path);
    std::remove(out_path.c_str());
    return res;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

// Minimal structural validation against the shipped draft-07 schemas:
// required keys exist and primitive types match.
bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    return true;
}

void check_against_schema(const json& value, const json& schema) {
    if (schema.contains("type")) {
        INFO("schema type " << schema["type"].get<std::string>() << " vs " << value.dump());
        REQUIRE(type_matches(value, schema["type"].get<std::string>()));
    }
    if (schema.contains("required"))
        for (const auto& key : schema["required"]) {
            INFO("required key " << key.get<std::string>());
            REQUIRE(value.contains(key.get<std::string>()));
        }
    if (schema.contains("properties") && value.is_object()) {
        for (auto& [key, sub] : schema["properties"].items())
            if (value.contains(key)) check_against_schema(value.at(key), sub);
        if (schema.value("additionalProperties", json(true)) == json(false))
            for (auto& [key, sub] : value.items()) {
                INFO("unexpected key " << key);
                REQUIRE(schema["properties"].contains(key));
            }
    }
    if (schema.contains("items") && value.is_array())
        for (const auto& item : value) check_against_schema(item, schema["items"]);
}

void validate_schema_file(const json& value, const std::string& name) {
    json schema = json::parse(slurp(std::string(PCIRCLE_SCHEMA_DIR) + "/" + name));
    check_against_schema(value, schema);
}

} // namespace

TEST_CASE("cli count matches the direct oracle") {
    auto res = run_cli("count --q 1 --r 1.5");
    REQUIRE(res.exit_code == 0);
    auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "q,r,count,area,error_term,boundary_flag,boundary_gap");
    auto cols = split(rows[1], ',');
    REQUIRE(cols.size() == 7);
    CHECK(cols[2] == "9");
    CHECK(std::stod(cols[4]) == Catch::Approx(9.0 - 2.25 * 3.14159265358979324).epsilon(1e-12));

    auto res2 = run_cli("count --q 2 --r 0.5");
    CHECK(split(lines_of(res2.out)[1], ',')[2] == "1");

    // q = 3 against brute force
    auto res3 = run_cli("count --q 3 --r 2.0");
    auto count3 = std::stoll(split(lines_of(res3.out)[1], ',')[2]);
    CHECK(count3 == pcircle::verify::count_brute_force(pcircle::PExponent{3}, 2.0));
}

TEST_CASE("cli count json validates against the shipped schema") {
    auto res = run_cli("count --q 3 --r 4.25 --format json");
    REQUIRE(res.exit_code == 0);
    auto j = json::parse(res.out);
    validate_schema_file(j, "count.schema.json");
    CHECK(j["count"].get<long long>() ==
          pcircle::verify::count_brute_force(pcircle::PExponent{3}, 4.25));
}

TEST_CASE("cli bessel examples and schema") {
    auto res = run_cli("bessel --q 1 --omega 0 --x 5 0 --format json");
    REQUIRE(res.exit_code == 0);
    auto j = json::parse(res.out);
    validate_schema_file(j, "bessel.schema.json");
    CHECK(j["value"].get<double>() ==
          Catch::Approx(pcircle::classical_bessel_j(0.0, 5.0)).margin(1e-11));
    CHECK(j["path"] == "series");

    auto res2 = run_cli("bessel --q 2 --omega 0 --x 0 0 --format json");
    CHECK(json::parse(res2.out)["value"].get<double>() == Catch::Approx(4.0).epsilon(1e-13));

    auto res3 = run_cli("bessel --q 2 --omega 1 --x 0 0 --format json");
    CHECK(json::parse(res3.out)["value"].get<double>() == 0.0);

    // integral path carries quadrature diagnostics
    auto res4 = run_cli("bessel --q 1 --omega 0 --x 25 7 --format json");
    auto j4 = json::parse(res4.out);
    validate_schema_file(j4, "bessel.schema.json");
    CHECK(j4["path"] == "integral");
    CHECK(j4.contains("nodes"));

    // forced series on an out-of-range argument refuses: exit 3
    auto res5 = run_cli("bessel --q 1 --omega 0 --x 30 30 --path series");
    CHECK(res5.exit_code == 3);
}

TEST_CASE("cli shells output") {
    auto res = run_cli("shells --q 1 --s-max 3.5");
    REQUIRE(res.exit_code == 0);
    auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "s,multiplicity,bound,angles");
    CHECK(split(rows[1], ',')[1] == "4");
    CHECK(split(rows[2], ',')[1] == "4");

    auto res2 = run_cli("shells --q 2 --s-max 2 --format json");
    auto j = json::parse(res2.out);
    validate_schema_file(j, "shells.schema.json");
    REQUIRE(j["shells"].size() == 2);
    CHECK(j["shells"][1]["multiplicity"] == 8);
    CHECK(j["shells"][1]["bound"] == 8);
    for (const auto& sh : j["shells"])
        CHECK(sh["multiplicity"].get<long long>() <= sh["bound"].get<long long>());
}

TEST_CASE("cli hardy trace") {
    auto res = run_cli("hardy --q 1 --r 1.5 --s-max 0");
    REQUIRE(res.exit_code == 0);
    auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 2);
    auto cols = split(rows[1], ',');
    CHECK(std::stod(cols[1]) == 0.0);
    CHECK(std::stod(cols[3]) ==
          Catch::Approx(-(9.0 - 2.25 * 3.14159265358979324)).epsilon(1e-12));

    auto res2 = run_cli("hardy --q 2 --r 0.75 --schedule 10,20,30,40 --window 2 --format json");
    REQUIRE(res2.exit_code == 0);
    auto j = json::parse(res2.out);
    validate_schema_file(j, "hardy.schema.json");
    REQUIRE(j["checkpoints"].size() == 4);
    double last_two = 0.5 * (j["checkpoints"][2]["partial_sum"].get<double>() +
                             j["checkpoints"][3]["partial_sum"].get<double>());
    CHECK(j["tail_average"].get<double>() == Catch::Approx(last_two).epsilon(1e-14));
}

TEST_CASE("cli decay report") {
    auto res = run_cli("decay --q 1 --phi 0.7853981633974483 --r-min 40 --r-max 90 --points 400 "
                       "--format json");
    REQUIRE(res.exit_code == 0);
    auto j = json::parse(res.out);
    validate_schema_file(j, "decay.schema.json");
    CHECK(j["slope"].get<double>() == Catch::Approx(-0.5).margin(0.05));
    // too narrow a window for any maxima: exit 3
    auto res2 = run_cli("decay --q 1 --r-min 50 --r-max 50.5 --points 16");
    CHECK(res2.exit_code == 3);
}

TEST_CASE("cli usage errors exit with code 2") {
    CHECK(run_cli("count --r 1.5").exit_code == 2);
    CHECK(run_cli("count --q 0 --r 1.5").exit_code == 2);
    CHECK(run_cli("count --q 1 --r -3").exit_code == 2);
    CHECK(run_cli("bessel --q 1 --omega 0 --x 1").exit_code == 2);
    CHECK(run_cli("nonsense").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("cli outputs are byte-identical across runs and thread counts") {
    const std::string cmds[] = {
        "count --q 3 --r 7.5",
        "shells --q 2 --s-max 12 --format json",
        "hardy --q 2 --r 0.75 --schedule 5,10,15 --window 2",
        "bessel --q 3 --omega 1 --x 2.5 1.5 --format json",
    };
    for (const auto& c : cmds) {
        auto a = run_cli(c + " --threads 1");
        auto b = run_cli(c + " --threads 1");
        auto d = run_cli(c + " --threads 2");
        INFO(c);
        REQUIRE(a.exit_code == 0);
        REQUIRE(a.out == b.out);
        REQUIRE(a.out == d.out);
    }
}

TEST_CASE("cli reads config files with flag precedence") {
    std::string cfg_path = "/tmp/pcircle_test_cfg.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[count]\n";
        cfg << "q=1\n";
        cfg << "r=1.5\n";
    }
    auto from_cfg = run_cli("count --config " + cfg_path);
    auto from_flags = run_cli("count --q 1 --r 1.5");
    REQUIRE(from_cfg.exit_code == 0);
    CHECK(from_cfg.out == from_flags.out);
    // command line overrides the file
    auto overridden = run_cli("count --config " + cfg_path + " --r 2.5");
    auto direct = run_cli("count --q 1 --r 2.5");
    CHECK(overridden.out == direct.out);
    std::remove(cfg_path.c_str());
}

TEST_CASE("cli writes to --out and verify emits a stable table") {
    std::string out_path = "/tmp/pcircle_test_verify.txt";
    auto res = run_cli("verify --filter numkernel --fast --out " + out_path);
    CHECK(res.exit_code == 0);
    CHECK(res.out.empty());
    std::string table = slurp(out_path);
    CHECK(table.find("[PASS] numkernel/beta_symmetry") != std::string::npos);
    CHECK(table.find("failed: 0") != std::string::npos);
    std::remove(out_path.c_str());

    auto bad = run_cli("verify --filter nosuchmodule --fast");
    CHECK(bad.exit_code == 2);

    auto js = run_cli("verify --filter numkernel --fast --format json");
    auto j = json::parse(js.out);
    validate_schema_file(j, "verify.schema.json");
    CHECK(j["failed"] == 0);
}
