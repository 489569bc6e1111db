#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "optiq/cli.h"
#include "optiq/io.h"

using namespace optiq;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("optiq_io_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string &name, const std::string &text) const {
        const fs::path p = path / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

std::string slurp(const std::string &path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

int count_lines(const std::string &s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_SUITE("cli-io") {
    TEST_CASE("parse a full config") {
        auto c = parse_config_text(R"({
            "schema_version": 1, "device": "parity", "policy": "feedforward",
            "inputs": {"q1": {"amplitudes": [0.94, 0.34]}, "q2": {"angle_deg": 45}},
            "visibility": {"overlap": 0.9}, "extinction": {"leak": 0.01},
            "reflection_phase_deg": 90, "pair_rate_per_minute": 1200, "format": "json",
            "scan": {"start_deg": 0, "stop_deg": 90, "step_deg": 10},
            "sweep": {"visibilities": [0.5, 1]}, "grid": {"random_pairs": 7, "seed": 3}})");
        CHECK(c.device == DeviceKind::parity);
        CHECK(c.policy == HeraldPolicy::feedforward);
        const double n = std::hypot(0.94, 0.34);
        CHECK(std::abs(c.inputs.target.alpha() - 0.94 / n) < 1e-15);
        CHECK(std::abs(c.inputs.control.beta() - 1.0 / std::sqrt(2.0)) < 1e-15);
        CHECK(c.visibility.overlap() == 0.9);
        CHECK(c.extinction.leak == 0.01);
        CHECK(c.optics().reflection_phase == doctest::Approx(std::acos(-1.0) / 2));
        CHECK(c.pair_rate_per_minute == 1200);
        CHECK(c.format == OutputFormat::json);
        CHECK(c.scan.angles().size() == 10);
        CHECK(c.sweep_visibilities == std::vector<double>{0.5, 1.0});
        CHECK(c.grid.random_pairs == 7);
        CHECK(c.grid.seed == 3);
    }

    TEST_CASE("qubit forms") {
        auto c = parse_config_text(R"({"schema_version": 1, "device": "dcnot",
            "inputs": {"control": {"bit": 1}, "target": {"amplitudes": [[0, 1], [1, 0]]}}})");
        CHECK(std::abs(c.inputs.control.beta() - 1.0) < 1e-15);
        CHECK(std::abs(c.inputs.target.alpha() - cplx(0, 1) / std::sqrt(2.0)) < 1e-15);
        auto d = parse_config_text(R"({"schema_version": 1, "device": "dcnot",
            "visibility": {"delay_um": 0}})");
        CHECK(d.visibility.overlap() == 1.0);
    }

    TEST_CASE("config errors") {
        const char *bad[] = {
            "{",
            "[]",
            R"({"device": "dcnot"})",
            R"({"schema_version": 2, "device": "dcnot"})",
            R"({"schema_version": 1})",
            R"({"schema_version": 1, "device": "toffoli"})",
            R"({"schema_version": 1, "device": "dcnot", "colour": "blue"})",
            R"({"schema_version": 1, "device": "dcnot", "policy": "sometimes"})",
            R"({"schema_version": 1, "device": "dcnot", "inputs": {"q1": {"bit": 0}}})",
            R"({"schema_version": 1, "device": "dcnot", "inputs": {"control": {"bit": 2}}})",
            R"({"schema_version": 1, "device": "dcnot", "inputs": {"control": {"bit": 0, "angle_deg": 3}}})",
            R"({"schema_version": 1, "device": "dcnot", "inputs": {"control": {"amplitudes": [0, 0]}}})",
            R"({"schema_version": 1, "device": "dcnot", "visibility": {"overlap": 1.2}})",
            R"({"schema_version": 1, "device": "dcnot", "extinction": {"leak": 1}})",
            R"({"schema_version": 1, "device": "dcnot", "format": "xml"})",
            R"({"schema_version": 1, "device": "dcnot", "scan": {"step_deg": 0}})",
            R"({"schema_version": 1, "device": "dcnot", "sweep": {"visibilities": [2]}})",
            R"({"schema_version": 1, "device": "dcnot", "grid": {"random_pairs": -1}})",
            R"({"schema_version": 1, "device": "dcnot", "pair_rate_per_minute": -5})",
        };
        for (const char *text : bad) {
            CAPTURE(text);
            CHECK_THROWS_AS(parse_config_text(text), ConfigError);
        }
        CHECK_THROWS_AS(load_config("/nonexistent/optiq.json"), ConfigError);
    }

    TEST_CASE("scan range arithmetic") {
        CHECK(ScanRange{0, 180, 5}.angles().size() == 37);
        CHECK(ScanRange{0, 180, 5}.angles().back() == 180.0);
        CHECK(ScanRange{10, 10, 1}.angles().size() == 1);
        CHECK_THROWS(ScanRange{0, 180, 0}.angles());
        CHECK_THROWS(ScanRange{10, 0, 5}.angles());
    }

    TEST_CASE("number formatting") {
        CHECK(format_number(0.25) == "0.25");
        CHECK(format_number(1500.0) == "1500");
        CHECK(format_number(-0.0) == "0");
        CHECK(format_number(1.0 / 3.0) == "0.333333333333");
        CHECK(format_number(1e-17) == "1e-17");
    }

    TEST_CASE("destructive CNOT CSV is fixed") {
        auto rows = truth_table(DeviceKind::dcnot, HeraldPolicy::strict);
        CHECK(truth_table_csv(DeviceKind::dcnot, rows) ==
              "in_control,in_target,p_out0,p_out1,success_prob,synthetic_counts_0,synthetic_counts_1\n"
              "0,0,1,0,0.25,1500,0\n"
              "0,1,0,1,0.25,0,1500\n"
              "1,0,0,1,0.25,0,1500\n"
              "1,1,1,0,0.25,1500,0\n");
        CHECK(truth_table_columns(DeviceKind::cnot).size() == 11);
    }

    TEST_CASE("seeded count sampling is reproducible integers") {
        auto a = truth_table(DeviceKind::dcnot, HeraldPolicy::strict);
        auto b = a;
        sample_counts(a, 9);
        sample_counts(b, 9);
        for (size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].synthetic_counts == b[k].synthetic_counts);
            for (double x : a[k].synthetic_counts) CHECK(x == std::floor(x));
        }
    }

    TEST_CASE("run records round-trip and reject damage") {
        auto c = parse_config_text(R"({"schema_version": 1, "device": "dcnot"})");
        auto rows = truth_table(DeviceKind::dcnot, HeraldPolicy::strict);
        json rec = make_run_record("truth-table", c, truth_table_columns(c.device), truth_table_values(rows));
        CHECK_NOTHROW(validate_run_record(json::parse(rec.dump())));
        CHECK(rec["tool"] == "optiq");
        CHECK(rec.contains("timestamp"));

        json extra = rec;
        extra["surprise"] = 1;
        CHECK_THROWS_AS(validate_run_record(extra), ConfigError);
        json short_row = rec;
        short_row["results"]["rows"][0].erase(0);
        CHECK_THROWS_AS(validate_run_record(short_row), ConfigError);
        json bad_config = rec;
        bad_config["config"]["device"] = "toffoli";
        CHECK_THROWS_AS(validate_run_record(bad_config), ConfigError);
    }

    TEST_CASE("truth table invariant checks") {
        auto rows = truth_table(DeviceKind::dcnot, HeraldPolicy::strict);
        CHECK_NOTHROW(check_truth_table(rows));
        rows[0].success_probability = 1.5;
        CHECK_THROWS_AS(check_truth_table(rows), InvariantViolation);
        rows = truth_table(DeviceKind::dcnot, HeraldPolicy::strict);
        rows[1].output_distribution[0] = 0.7;
        CHECK_THROWS_AS(check_truth_table(rows), InvariantViolation);
    }

    TEST_CASE("CLI truth-table, formats and determinism") {
        TempDir dir;
        const auto cfg = dir.write("d.json", R"({"schema_version": 1, "device": "dcnot"})");
        auto a = run_cli({"truth-table", "--config", cfg});
        auto b = run_cli({"truth-table", "--config", cfg});
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(count_lines(a.out) == 5);

        const auto out = (dir.path / "t.json").string();
        CHECK(run_cli({"truth-table", "--config", cfg, "--format", "json", "--out", out}).code == 0);
        json rec = json::parse(slurp(out));
        CHECK_NOTHROW(validate_run_record(rec));
        CHECK(rec["results"]["rows"].size() == 4);

        const auto parity = dir.write("p.json", R"({"schema_version": 1, "device": "parity"})");
        auto p = run_cli({"truth-table", "--config", parity});
        CHECK(p.out.find("\n0,1,0,0,0,0,0\n") != std::string::npos);
        CHECK(p.out.find("\n1,0,0,0,0,0,0\n") != std::string::npos);

        const auto cnot = dir.write("c.json", R"({"schema_version": 1, "device": "cnot", "policy": "feedforward"})");
        auto c = run_cli({"truth-table", "--config", cnot});
        CHECK(c.code == 0);
        CHECK(c.out.find("1,1,0,0,1,0,0.25,0,0,1500,0\n") != std::string::npos);
    }

    TEST_CASE("CLI scan") {
        TempDir dir;
        const auto cfg = dir.write("s.json", R"({"schema_version": 1, "device": "parity",
            "inputs": {"q1": {"angle_deg": 20}, "q2": {"angle_deg": 45}}})");
        const auto out = (dir.path / "scan.csv").string();
        auto r = run_cli({"scan", "--config", cfg, "--start", "0", "--stop", "180", "--step", "5", "--out", out});
        CHECK(r.code == 0);
        CHECK(count_lines(slurp(out)) == 38);
        json fit = json::parse(slurp(out + ".fit.json"));
        CHECK(std::abs(fit["theta0_deg"].get<double>() - 20.0) < 1e-6);
        CHECK(std::abs(fit["amplitude"].get<double>() - 0.25) < 1e-10);

        auto j = run_cli({"scan", "--config", cfg, "--format", "json"});
        CHECK(j.code == 0);
        json rec = json::parse(j.out);
        CHECK_NOTHROW(validate_run_record(rec));
        CHECK(rec["results"]["rows"].size() == 37);

        CHECK(run_cli({"scan", "--config", cfg, "--step", "0"}).code == 2);
        CHECK(run_cli({"scan", "--config", cfg, "--start", "90", "--stop", "10"}).code == 2);
        const auto dcnot = dir.write("d.json", R"({"schema_version": 1, "device": "dcnot"})");
        CHECK(run_cli({"scan", "--config", dcnot}).code == 2);
    }

    TEST_CASE("CLI sweep-visibility") {
        TempDir dir;
        const auto cfg = dir.write("d.json", R"({"schema_version": 1, "device": "dcnot", "grid": {"random_pairs": 20}})");
        auto r = run_cli({"sweep-visibility", "--config", cfg, "--v", "0,0.5,1"});
        CHECK(r.code == 0);
        CHECK(r.out.find("\n1,0,0\n") != std::string::npos);
        CHECK(r.out.find("\n0,0.5,") != std::string::npos);
        CHECK(run_cli({"sweep-visibility", "--config", cfg, "--v", "1.5"}).code == 2);
    }

    TEST_CASE("CLI errors and oracle-check") {
        TempDir dir;
        const auto bad = dir.write("bad.json", "{not json");
        auto r = run_cli({"truth-table", "--config", bad});
        CHECK(r.code == 2);
        CHECK(!r.err.empty());
        CHECK(run_cli({"truth-table"}).code == 2);
        CHECK(run_cli({"no-such-command"}).code == 2);
        CHECK(run_cli({}).code == 2);
        CHECK(run_cli({"truth-table", "--config", "/nonexistent.json"}).code == 2);

        auto o = run_cli({"oracle-check", "--trials", "20", "--seed", "4"});
        CHECK(o.code == 0);
        CHECK(o.out.find("PASS") != std::string::npos);
        CHECK(run_cli({"--version"}).code == 0);
    }
}
