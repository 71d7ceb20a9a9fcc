#pragma once

#include "garchci/distributions.hpp"
#include "garchci/garch.hpp"
#include "garchci/interval.hpp"
#include "garchci/logavg.hpp"
#include "garchci/resampling.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace garchci {

struct ExperimentConfig {
    GarchParams params{0.1, 0.1, 0.1};
    std::vector<InnovationSpec> innovations;
    std::vector<MethodSpec> methods;
    std::size_t n = 600;
    std::size_t n_reps = 1000;
    double level = 0.95;
    std::uint64_t seed = 42;
    std::size_t burn_in = kDefaultBurnIn;
    LogAvgConfig logavg;
    StableGate stable;
    /// Worker threads; 0 uses the hardware concurrency. Does not affect results.
    unsigned threads = 0;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// JSON document mirroring ExperimentConfig; see README for the schema.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct CoverageCell {
    std::string innovation;
    MethodSpec method;
    std::size_t n = 0;
    double coverage = 0.0;
    double mean_length = 0.0;
    double se = 0.0;  ///< sqrt(c (1 - c) / successes)
    std::size_t n_reps = 0;
    std::size_t successes = 0;
    std::size_t failures = 0;
    /// Replications where the method could not form an interval (plug-in
    /// variance undefined). Counted in `successes` as non-covering.
    std::size_t no_interval = 0;
    double mean_gate_attempts = 0.0;
    std::string first_failure;
    std::uint64_t seed = 0;
    std::uint64_t stream_begin = 0;
    std::uint64_t stream_end = 0;  ///< exclusive
};

struct CoverageReport {
    std::vector<ExperimentConfig> configs;
    std::vector<CoverageCell> cells;

    const CoverageCell* find(const std::string& innovation, double order, std::size_t n) const;
};

/// Replication r uses RngStream(cfg.seed, r); every method gets its own
/// substream so results do not depend on which other methods run.
/// A MomentCondition from a method counts as a non-covering replication;
/// any other per-replication error is a failure, excluded from the rates.
CoverageReport run_experiment(const ExperimentConfig& cfg);

enum class TableId { Table1, Table2 };

TableId parse_table_id(const std::string& text);

/// Restricts a reproduction grid, e.g. "p=1.8", "innovation=t8", "n=100"
/// (comma-separated terms combine with AND).
struct GridFilter {
    std::optional<double> order;
    std::optional<std::string> innovation;
    std::optional<std::size_t> n;

    static GridFilter parse(const std::string& text);
    bool keeps_order(double p) const;
    bool keeps_innovation(const InnovationSpec& spec) const;
    bool keeps_n(std::size_t value) const;
};

struct ReproduceOptions {
    std::uint64_t seed = 42;
    std::optional<std::size_t> n_reps;  ///< defaults to the fixture's replication count
    unsigned threads = 0;
    GridFilter filter;
};

/// The embedded reference values (data/reference_tables.json).
const nlohmann::json& reference_tables();

/// The experiment grid for a table, before running it.
std::vector<ExperimentConfig> table_configs(TableId table, const ReproduceOptions& opts);

CoverageReport reproduce_table(TableId table, const ReproduceOptions& opts);

struct CheckLine {
    std::string innovation;
    std::string method;
    std::size_t n = 0;
    std::string quantity;  ///< "coverage" or "length"
    double reproduced = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;  ///< absolute for coverage, relative for length
    bool pass = false;
};

/// Compares every reproduced cell against the reference table. Coverage
/// tolerances widen to 3 standard errors when fewer replications than the
/// reference were run.
std::vector<CheckLine> check_against_reference(TableId table, const CoverageReport& report);

void write_csv(std::ostream& out, const CoverageReport& report);
nlohmann::json to_json(const CoverageReport& report, const std::vector<CheckLine>* checks = nullptr);

}  // namespace garchci
