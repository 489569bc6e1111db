#include "optiq/cli.h"

#include <cmath>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "optiq/io.h"
#include "optiq/oracle_check.h"

namespace optiq::cli {

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App *sub, CommonOptions &o) {
    sub->add_option("--config", o.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--out", o.out_path, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", o.seed, "Sample integer Poisson counts with this seed");
}

OutputFormat resolve_format(const CommonOptions &o, const ExperimentConfig &c) {
    if (o.format.empty()) return c.format;
    return o.format == "json" ? OutputFormat::json : OutputFormat::csv;
}

void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
}

int cmd_truth_table(const CommonOptions &o, std::ostream &out) {
    const ExperimentConfig c = load_config(o.config_path);
    const OpticsConfig optics = c.optics();
    auto rows = truth_table(
        c.device,
        [&](const DeviceInputs &in) { return run_with_visibility(c.device, in, c.visibility, c.policy, optics); },
        c.pair_rate_per_minute);
    check_truth_table(rows);
    if (o.seed) sample_counts(rows, *o.seed);
    if (resolve_format(o, c) == OutputFormat::json) {
        auto record = make_run_record("truth-table", c, truth_table_columns(c.device), truth_table_values(rows));
        emit(record.dump(2) + "\n", o.out_path, out);
    } else {
        emit(truth_table_csv(c.device, rows), o.out_path, out);
    }
    return kExitOk;
}

int cmd_scan(const CommonOptions &o, std::optional<double> start, std::optional<double> stop,
             std::optional<double> step, const std::string &fit_out, std::ostream &out) {
    ExperimentConfig c = load_config(o.config_path);
    if (c.device != DeviceKind::parity) throw ConfigError("scan runs the parity device only");
    if (c.visibility.overlap() != 1.0) throw ConfigError("scan models the ideal-visibility device only");
    if (start) c.scan.start_deg = *start;
    if (stop) c.scan.stop_deg = *stop;
    if (step) c.scan.step_deg = *step;
    const std::vector<double> angles = c.scan.angles();

    const auto points = coherence_scan(c.inputs.target, c.inputs.control, angles, c.policy, c.optics());
    for (const auto &p : points) {
        if (!std::isfinite(p.coincidence_probability) || p.coincidence_probability < -1e-12 ||
            p.coincidence_probability > 1.0 + 1e-12) {
            throw InvariantViolation("coincidence probability out of [0, 1]");
        }
    }
    nlohmann::json fit = nullptr;
    if (points.size() >= 3) fit = fit_json(fit_malus(points));

    if (resolve_format(o, c) == OutputFormat::json) {
        auto record = make_run_record("scan", c, {"theta_deg", "coincidence_prob", "synthetic_counts"},
                                      scan_values(points, c.pair_rate_per_minute, o.seed), {{"fit", fit}});
        emit(record.dump(2) + "\n", o.out_path, out);
        return kExitOk;
    }
    emit(scan_csv(points, c.pair_rate_per_minute, o.seed), o.out_path, out);
    std::string sidecar = fit_out;
    if (sidecar.empty() && !o.out_path.empty()) sidecar = o.out_path + ".fit.json";
    if (!sidecar.empty()) emit(fit.dump(2) + "\n", sidecar, out);
    return kExitOk;
}

int cmd_sweep(const CommonOptions &o, const std::vector<double> &vs, std::ostream &out) {
    ExperimentConfig c = load_config(o.config_path);
    if (!vs.empty()) c.sweep_visibilities = vs;
    std::vector<SweepRow> rows;
    for (double v : c.sweep_visibilities) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("visibility " + format_number(v) + " is outside [0, 1]");
        const ErrorReport r =
            error_report(c.device, VisibilityModel(v), c.policy, c.extinction, c.grid, c.optics().reflection_phase);
        if (!std::isfinite(r.worst_case_error) || !std::isfinite(r.mean_error)) {
            throw InvariantViolation("non-finite error estimate");
        }
        rows.push_back(SweepRow{v, r.worst_case_error, r.mean_error});
    }
    if (resolve_format(o, c) == OutputFormat::json) {
        std::vector<std::vector<double>> values;
        for (const auto &r : rows) values.push_back({r.visibility, r.worst_case_error, r.mean_error});
        auto record = make_run_record("sweep-visibility", c, {"v", "worst_case_error", "mean_error"}, values);
        emit(record.dump(2) + "\n", o.out_path, out);
    } else {
        emit(sweep_csv(rows), o.out_path, out);
    }
    return kExitOk;
}

int cmd_oracle_check(int trials, std::uint64_t seed, std::ostream &out) {
    constexpr double tolerance = 1e-10;
    const OracleCheckResult r = run_oracle_check(trials, seed);
    out << "oracle-check: trials=" << r.trials << " amplitudes=" << r.amplitudes_compared
        << " max_deviation=" << format_number(r.max_deviation) << " tolerance=" << format_number(tolerance) << "\n";
    if (!(r.max_deviation <= tolerance)) {
        throw InvariantViolation("lifted amplitudes disagree with the permanent oracle");
    }
    out << "oracle-check: PASS\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Post-selected linear-optical logic simulator", "optiq"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    CommonOptions tt_opts;
    auto *tt = app.add_subcommand("truth-table", "Truth table over all computational-basis inputs");
    add_common(tt, tt_opts);

    CommonOptions scan_opts;
    std::optional<double> start, stop, step;
    std::string fit_out;
    auto *scan = app.add_subcommand("scan", "Coincidence rate versus output analyzer angle (parity check)");
    add_common(scan, scan_opts);
    scan->add_option("--start", start, "First analyzer angle in degrees");
    scan->add_option("--stop", stop, "Last analyzer angle in degrees");
    scan->add_option("--step", step, "Angle step in degrees");
    scan->add_option("--fit-out", fit_out, "Fit sidecar path (default: <out>.fit.json)");

    CommonOptions sweep_opts;
    std::vector<double> vs;
    auto *sweep = app.add_subcommand("sweep-visibility", "Worst-case and mean error versus visibility");
    add_common(sweep, sweep_opts);
    sweep->add_option("--v", vs, "Visibility values")->delimiter(',');

    int trials = 100;
    std::uint64_t oracle_seed = 1;
    auto *oracle = app.add_subcommand("oracle-check", "Compare Fock-space evolution with the permanent oracle");
    oracle->add_option("--trials", trials, "Number of random unitaries")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oracle_seed, "Random seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << tool_version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (*tt) return cmd_truth_table(tt_opts, out);
        if (*scan) return cmd_scan(scan_opts, start, stop, step, fit_out, out);
        if (*sweep) return cmd_sweep(sweep_opts, vs, out);
        if (*oracle) return cmd_oracle_check(trials, oracle_seed, out);
    } catch (const InvariantViolation &e) {
        err << "numerical invariant violated: " << e.what() << "\n";
        return kExitInvariantViolation;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

}  // namespace optiq::cli
