#ifndef OPTIQ_IO_H
#define OPTIQ_IO_H

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "optiq/devices.h"
#include "optiq/imperfections.h"

namespace optiq {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kRecordSchemaVersion = 1;

std::string_view tool_version();

/// Invalid or unparseable experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A computed result broke a probability or normalization invariant (exit code 3).
class InvariantViolation : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct ScanRange {
    double start_deg = 0.0;
    double stop_deg = 180.0;
    double step_deg = 5.0;

    /// start, start+step, ... up to stop inclusive (within 1e-9 of a step).
    std::vector<double> angles() const;
};

struct ExperimentConfig {
    DeviceKind device = DeviceKind::dcnot;
    HeraldPolicy policy = HeraldPolicy::strict;
    DeviceInputs inputs{QubitState::zero(), QubitState::zero()};
    VisibilityModel visibility;
    ExtinctionSpec extinction;
    double reflection_phase_deg = 0.0;
    double pair_rate_per_minute = kDefaultPairRatePerMinute;
    OutputFormat format = OutputFormat::csv;
    ScanRange scan;
    std::vector<double> sweep_visibilities{0.0, 0.25, 0.5, 0.75, 1.0};
    InputGrid grid;
    /// Input as given, echoed into run records.
    nlohmann::json source = nlohmann::json::object();

    OpticsConfig optics() const;
};

/// Throws ConfigError on malformed input, unknown fields, or invalid values.
ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig parse_config_text(const std::string &text);
ExperimentConfig load_config(const std::string &path);

/// Locale-independent shortest form with 12 significant digits.
std::string format_number(double x);

std::vector<std::string> truth_table_columns(DeviceKind kind);
std::vector<std::vector<double>> truth_table_values(const std::vector<TruthTableRow> &rows);
std::string truth_table_csv(DeviceKind kind, const std::vector<TruthTableRow> &rows);

struct SweepRow {
    double visibility = 1.0;
    double worst_case_error = 0.0;
    double mean_error = 0.0;
};

std::vector<std::vector<double>> scan_values(const std::vector<ScanPoint> &points, double pair_rate_per_minute,
                                             std::optional<std::uint64_t> sample_seed = std::nullopt);
std::string scan_csv(const std::vector<ScanPoint> &points, double pair_rate_per_minute,
                     std::optional<std::uint64_t> sample_seed = std::nullopt);
nlohmann::json fit_json(const MalusFit &fit);
std::string sweep_csv(const std::vector<SweepRow> &rows);

/// Replaces expected counts with Poisson draws from a seeded generator.
void sample_counts(std::vector<TruthTableRow> &rows, std::uint64_t seed);

/// Columns of numbers as written to CSV, wrapped with a config echo, tool
/// version and timestamp.
nlohmann::json make_run_record(const std::string &command, const ExperimentConfig &config,
                               const std::vector<std::string> &columns,
                               const std::vector<std::vector<double>> &rows,
                               const nlohmann::json &extra = nlohmann::json::object());

/// Re-parses the embedded config and checks the table shape; throws ConfigError.
void validate_run_record(const nlohmann::json &record);

/// Checks probabilities and distributions of a truth table; throws InvariantViolation.
void check_truth_table(const std::vector<TruthTableRow> &rows);

}  // namespace optiq

#endif
