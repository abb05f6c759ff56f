#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hadflow/flow.hpp"
#include "hadflow/functionals.hpp"
#include "hadflow/pursuit.hpp"

namespace hadflow {

// One validated scenario document. Which fields a command needs is checked
// by the command itself.
struct Scenario {
    Json raw;
    SpacePtr space;
    FunctionalPtr functional;
    std::optional<MovingTarget> target;
    EvaderSet evaders;
    std::vector<Point> points;
    std::optional<Point> x0;
    double t0 = 0.0;
    std::optional<double> horizon;
    std::optional<Scheme> scheme;
    std::uint64_t seed = 0;
    double capture_eps = 0.0;
    std::optional<std::pair<int, int>> levels;
    int substeps = 8;
    std::optional<double> h;
    std::optional<double> pitch;
    std::string trajectory_file = "trajectory.csv";
    std::string report_file = "report.json";
    std::string table_file = "convergence.csv";
};

// Throws ValidationError naming the offending field.
Scenario parse_scenario(const Json& doc);

struct CommandOutput {
    int exit_code = 0;
    Json report;
    std::string csv;       // empty when the command emits no table
    std::string csv_name;  // file name for `csv`
};

CommandOutput cmd_flow(const Scenario& s);
CommandOutput cmd_pursue(const Scenario& s);
CommandOutput cmd_barycenter(const Scenario& s);
CommandOutput cmd_convergence(const Scenario& s);
CommandOutput cmd_resolve(const Scenario& s);

// Exit code for an exception escaping a command: 2 configuration or
// admissibility, 3 motion contract, 4 solver or capability failure.
int exit_code_for(const std::exception& e);

// Shortest decimal with 17 significant digits, independent of locale.
std::string format_double(double v);

// Invariant suites.
struct InvariantResult {
    std::string name;
    std::size_t samples = 0;
    double worst_slack = 0.0;  // >= 0 means the invariant held everywhere
    bool holds = true;
};

struct SuiteResult {
    std::string suite;
    std::vector<InvariantResult> invariants;
    bool holds() const;
};

const std::vector<std::string>& suite_names();

// Runs one named suite (or "all") deterministically from `seed`; `jobs`
// threads share independent suites.
std::vector<SuiteResult> run_checks(const std::string& selector, std::uint64_t seed, int jobs = 1);

Json checks_to_json(const std::vector<SuiteResult>& results, std::uint64_t seed);

// Catalog instances shared by the suites, the fixtures tool and acceptance.
struct CatalogEntry {
    std::string key;
    FunctionalPtr f;
};
std::vector<SpacePtr> catalog_spaces();
std::vector<CatalogEntry> catalog_functionals();

}  // namespace hadflow
