#include "optiq/io.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace optiq {

namespace {

using nlohmann::json;

void reject_unknown(const json &obj, std::initializer_list<const char *> allowed, const std::string &where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &[key, value] : obj.items()) {
        if (!ok.count(key)) throw ConfigError("unknown field '" + key + "' in " + where);
    }
}

double number_at(const json &obj, const char *key, const std::string &where) {
    const json &v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
    return x;
}

double number_or(const json &obj, const char *key, double fallback, const std::string &where) {
    return obj.contains(key) ? number_at(obj, key, where) : fallback;
}

cplx parse_amplitude(const json &a, const std::string &where) {
    if (a.is_number()) return cplx(a.get<double>(), 0.0);
    if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
        return cplx(a[0].get<double>(), a[1].get<double>());
    }
    throw ConfigError(where + " amplitude must be a number or a [re, im] pair");
}

QubitState parse_qubit(const json &q, const std::string &where) {
    reject_unknown(q, {"angle_deg", "phase_deg", "amplitudes", "bit"}, where);
    const int forms = static_cast<int>(q.contains("angle_deg")) + static_cast<int>(q.contains("amplitudes")) +
                      static_cast<int>(q.contains("bit"));
    if (forms != 1) throw ConfigError(where + " needs exactly one of angle_deg, amplitudes, bit");
    if (q.contains("phase_deg") && !q.contains("angle_deg")) {
        throw ConfigError(where + ".phase_deg is only valid together with angle_deg");
    }
    try {
        if (q.contains("bit")) {
            if (!q["bit"].is_number_integer()) throw ConfigError(where + ".bit must be 0 or 1");
            return QubitState::basis(q["bit"].get<int>());
        }
        if (q.contains("angle_deg")) {
            return QubitState::from_angle(number_at(q, "angle_deg", where), number_or(q, "phase_deg", 0.0, where));
        }
        const json &amps = q["amplitudes"];
        if (!amps.is_array() || amps.size() != 2) throw ConfigError(where + ".amplitudes must hold two entries");
        return QubitState::normalize(parse_amplitude(amps[0], where), parse_amplitude(amps[1], where));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_csv(const std::vector<std::string> &cells) {
    std::string line;
    for (size_t k = 0; k < cells.size(); ++k) {
        if (k) line += ',';
        line += cells[k];
    }
    line += '\n';
    return line;
}

std::string csv_body(const std::vector<std::string> &columns, const std::vector<std::vector<double>> &rows) {
    std::string out = join_csv(columns);
    for (const auto &row : rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double x : row) cells.push_back(format_number(x));
        out += join_csv(cells);
    }
    return out;
}

}  // namespace

std::string_view tool_version() {
#ifdef OPTIQ_VERSION
    return OPTIQ_VERSION;
#else
    return "0.0.0";
#endif
}

std::vector<double> ScanRange::angles() const {
    if (!(step_deg > 0.0)) throw ConfigError("scan step must be positive");
    if (!(stop_deg >= start_deg)) throw ConfigError("scan range is empty (stop < start)");
    const auto n = static_cast<long>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
    if (n > 100000) throw ConfigError("scan range has too many points");
    std::vector<double> out;
    out.reserve(n);
    for (long k = 0; k < n; ++k) out.push_back(start_deg + static_cast<double>(k) * step_deg);
    return out;
}

OpticsConfig ExperimentConfig::optics() const {
    return OpticsConfig{reflection_phase_deg * std::numbers::pi / 180.0, extinction.leak};
}

ExperimentConfig parse_config(const json &j) {
    reject_unknown(j,
                   {"schema_version", "device", "policy", "inputs", "visibility", "extinction", "reflection_phase_deg",
                    "pair_rate_per_minute", "format", "scan", "sweep", "grid"},
                   "config");
    ExperimentConfig c;
    c.source = j;
    try {
        if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
            j["schema_version"].get<int>() != kConfigSchemaVersion) {
            throw ConfigError("config.schema_version must be " + std::to_string(kConfigSchemaVersion));
        }
        if (!j.contains("device") || !j["device"].is_string()) throw ConfigError("config.device is required");
        c.device = parse_device(j["device"].get<std::string>());
        if (j.contains("policy")) {
            if (!j["policy"].is_string()) throw ConfigError("config.policy must be a string");
            c.policy = parse_policy(j["policy"].get<std::string>());
        }
        if (j.contains("inputs")) {
            const json &in = j["inputs"];
            reject_unknown(in, {"control", "target", "q1", "q2"}, "config.inputs");
            const bool named = in.contains("q1") || in.contains("q2");
            if (named && c.device != DeviceKind::parity) throw ConfigError("inputs q1/q2 apply to the parity device only");
            if (named && (in.contains("control") || in.contains("target"))) {
                throw ConfigError("use either q1/q2 or control/target, not both");
            }
            if (in.contains("control")) c.inputs.control = parse_qubit(in["control"], "config.inputs.control");
            if (in.contains("target")) c.inputs.target = parse_qubit(in["target"], "config.inputs.target");
            if (in.contains("q1")) c.inputs.target = parse_qubit(in["q1"], "config.inputs.q1");
            if (in.contains("q2")) c.inputs.control = parse_qubit(in["q2"], "config.inputs.q2");
        }
        if (j.contains("visibility")) {
            const json &v = j["visibility"];
            reject_unknown(v, {"overlap", "delay_um", "coherence_length_um"}, "config.visibility");
            if (v.contains("overlap") && v.contains("delay_um")) {
                throw ConfigError("config.visibility takes overlap or delay_um, not both");
            }
            if (v.contains("overlap")) {
                c.visibility = VisibilityModel(number_at(v, "overlap", "config.visibility"));
            } else if (v.contains("delay_um")) {
                c.visibility = VisibilityModel::from_delay(
                    number_at(v, "delay_um", "config.visibility"),
                    number_or(v, "coherence_length_um", kDefaultCoherenceLengthUm, "config.visibility"));
            }
        }
        if (j.contains("extinction")) {
            reject_unknown(j["extinction"], {"leak"}, "config.extinction");
            c.extinction.leak = number_or(j["extinction"], "leak", 0.0, "config.extinction");
            if (!(c.extinction.leak >= 0.0 && c.extinction.leak < 1.0)) {
                throw ConfigError("config.extinction.leak must lie in [0, 1)");
            }
        }
        c.reflection_phase_deg = number_or(j, "reflection_phase_deg", 0.0, "config");
        c.pair_rate_per_minute = number_or(j, "pair_rate_per_minute", kDefaultPairRatePerMinute, "config");
        if (!(c.pair_rate_per_minute >= 0.0)) throw ConfigError("config.pair_rate_per_minute must be non-negative");
        if (j.contains("format")) {
            const std::string f = j["format"].is_string() ? j["format"].get<std::string>() : "";
            if (f == "csv") {
                c.format = OutputFormat::csv;
            } else if (f == "json") {
                c.format = OutputFormat::json;
            } else {
                throw ConfigError("config.format must be \"csv\" or \"json\"");
            }
        }
        if (j.contains("scan")) {
            reject_unknown(j["scan"], {"start_deg", "stop_deg", "step_deg"}, "config.scan");
            c.scan.start_deg = number_or(j["scan"], "start_deg", c.scan.start_deg, "config.scan");
            c.scan.stop_deg = number_or(j["scan"], "stop_deg", c.scan.stop_deg, "config.scan");
            c.scan.step_deg = number_or(j["scan"], "step_deg", c.scan.step_deg, "config.scan");
            c.scan.angles();
        }
        if (j.contains("sweep")) {
            reject_unknown(j["sweep"], {"visibilities"}, "config.sweep");
            const json &vs = j["sweep"].at("visibilities");
            if (!vs.is_array() || vs.empty()) throw ConfigError("config.sweep.visibilities must be a non-empty array");
            c.sweep_visibilities.clear();
            for (const auto &v : vs) {
                if (!v.is_number()) throw ConfigError("config.sweep.visibilities must hold numbers");
                double x = v.get<double>();
                if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("sweep visibility out of [0, 1]");
                c.sweep_visibilities.push_back(x);
            }
        }
        if (j.contains("grid")) {
            reject_unknown(j["grid"], {"random_pairs", "seed"}, "config.grid");
            const json &g = j["grid"];
            if (g.contains("random_pairs")) {
                if (!g["random_pairs"].is_number_integer() || g["random_pairs"].get<int>() < 0) {
                    throw ConfigError("config.grid.random_pairs must be a non-negative integer");
                }
                c.grid.random_pairs = g["random_pairs"].get<int>();
            }
            if (g.contains("seed")) {
                if (!g["seed"].is_number_unsigned()) throw ConfigError("config.grid.seed must be a non-negative integer");
                c.grid.seed = g["seed"].get<std::uint64_t>();
            }
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig parse_config_text(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;  // drops the sign of -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::vector<std::string> truth_table_columns(DeviceKind kind) {
    if (kind == DeviceKind::cnot) {
        return {"in_control",         "in_target",          "p_out00",            "p_out01",
                "p_out10",            "p_out11",            "success_prob",       "synthetic_counts_00",
                "synthetic_counts_01", "synthetic_counts_10", "synthetic_counts_11"};
    }
    return {"in_control", "in_target",          "p_out0",
            "p_out1",     "success_prob",       "synthetic_counts_0",
            "synthetic_counts_1"};
}

std::vector<std::vector<double>> truth_table_values(const std::vector<TruthTableRow> &rows) {
    std::vector<std::vector<double>> out;
    for (const auto &r : rows) {
        std::vector<double> v{static_cast<double>(r.in_control), static_cast<double>(r.in_target)};
        v.insert(v.end(), r.output_distribution.begin(), r.output_distribution.end());
        v.push_back(r.success_probability);
        v.insert(v.end(), r.synthetic_counts.begin(), r.synthetic_counts.end());
        out.push_back(std::move(v));
    }
    return out;
}

std::string truth_table_csv(DeviceKind kind, const std::vector<TruthTableRow> &rows) {
    return csv_body(truth_table_columns(kind), truth_table_values(rows));
}

std::vector<std::vector<double>> scan_values(const std::vector<ScanPoint> &points, double pair_rate_per_minute,
                                             std::optional<std::uint64_t> sample_seed) {
    std::optional<std::mt19937_64> rng;
    if (sample_seed) rng.emplace(*sample_seed);
    std::vector<std::vector<double>> rows;
    for (const auto &p : points) {
        double counts = pair_rate_per_minute * p.coincidence_probability;
        if (rng) {
            counts = counts > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(counts)(*rng)) : 0.0;
        }
        rows.push_back({p.angle_deg, p.coincidence_probability, counts});
    }
    return rows;
}

std::string scan_csv(const std::vector<ScanPoint> &points, double pair_rate_per_minute,
                     std::optional<std::uint64_t> sample_seed) {
    return csv_body({"theta_deg", "coincidence_prob", "synthetic_counts"},
                    scan_values(points, pair_rate_per_minute, sample_seed));
}

nlohmann::json fit_json(const MalusFit &fit) {
    return json{{"model", "a + b*cos(2*theta) + c*sin(2*theta)"},
                {"theta0_deg", fit.peak_angle_deg},
                {"zero_deg", fit.zero_angle_deg},
                {"amplitude", fit.amplitude},
                {"floor", fit.floor},
                {"rms_residual", fit.rms_residual}};
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::vector<std::vector<double>> values;
    for (const auto &r : rows) values.push_back({r.visibility, r.worst_case_error, r.mean_error});
    return csv_body({"v", "worst_case_error", "mean_error"}, values);
}

void sample_counts(std::vector<TruthTableRow> &rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto &r : rows) {
        for (double &c : r.synthetic_counts) {
            if (c > 0.0) {
                std::poisson_distribution<long long> d(c);
                c = static_cast<double>(d(rng));
            } else {
                c = 0.0;
            }
        }
    }
}

nlohmann::json make_run_record(const std::string &command, const ExperimentConfig &config,
                               const std::vector<std::string> &columns,
                               const std::vector<std::vector<double>> &rows, const nlohmann::json &extra) {
    json results{{"columns", columns}, {"rows", rows}};
    for (const auto &[k, v] : extra.items()) results[k] = v;
    return json{{"record_schema", kRecordSchemaVersion},
                {"tool", "optiq"},
                {"version", std::string(tool_version())},
                {"timestamp", iso_timestamp()},
                {"command", command},
                {"config", config.source},
                {"results", results}};
}

void validate_run_record(const nlohmann::json &record) {
    reject_unknown(record, {"record_schema", "tool", "version", "timestamp", "command", "config", "results"},
                   "record");
    if (!record.contains("record_schema") || record["record_schema"] != kRecordSchemaVersion) {
        throw ConfigError("record.record_schema must be " + std::to_string(kRecordSchemaVersion));
    }
    for (const char *key : {"tool", "version", "timestamp", "command"}) {
        if (!record.contains(key) || !record[key].is_string()) {
            throw ConfigError(std::string("record.") + key + " must be a string");
        }
    }
    static const std::set<std::string> commands{"truth-table", "scan", "sweep-visibility"};
    if (!commands.count(record["command"].get<std::string>())) throw ConfigError("record.command is unknown");
    if (!record.contains("config")) throw ConfigError("record.config is missing");
    parse_config(record["config"]);
    if (!record.contains("results") || !record["results"].is_object()) throw ConfigError("record.results is missing");
    const json &res = record["results"];
    if (!res.contains("columns") || !res["columns"].is_array()) throw ConfigError("record.results.columns missing");
    if (!res.contains("rows") || !res["rows"].is_array()) throw ConfigError("record.results.rows missing");
    for (const auto &c : res["columns"]) {
        if (!c.is_string()) throw ConfigError("record.results.columns must hold strings");
    }
    for (const auto &row : res["rows"]) {
        if (!row.is_array() || row.size() != res["columns"].size()) {
            throw ConfigError("record.results.rows must match the column count");
        }
        for (const auto &x : row) {
            if (!x.is_number()) throw ConfigError("record.results.rows must hold numbers");
        }
    }
}

void check_truth_table(const std::vector<TruthTableRow> &rows) {
    constexpr double tol = 1e-9;
    for (const auto &r : rows) {
        if (!std::isfinite(r.success_probability) || r.success_probability < -tol || r.success_probability > 1 + tol) {
            throw InvariantViolation("success probability out of [0, 1]: " + format_number(r.success_probability));
        }
        if (r.success_probability > 0.0) {
            double sum = 0.0;
            for (double p : r.output_distribution) {
                if (!std::isfinite(p) || p < -tol) throw InvariantViolation("negative output probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > tol) {
                throw InvariantViolation("output distribution sums to " + format_number(sum));
            }
        }
    }
}

}  // namespace optiq
