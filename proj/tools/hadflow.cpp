#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hadflow/cli.hpp"

namespace fs = std::filesystem;
using namespace hadflow;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string suite = "all";
};

Json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

int emit(const Options& opt, const std::string& report_name, const CommandOutput& r) {
    fs::create_directories(opt.out);
    const std::string text = r.report.dump(2) + "\n";
    write_file(fs::path(opt.out) / report_name, text);
    if (!r.csv.empty()) write_file(fs::path(opt.out) / r.csv_name, r.csv);
    std::cout << text;
    return r.exit_code;
}

using Command = CommandOutput (*)(const Scenario&);

int run_scenario(const Options& opt, Command cmd) {
    Scenario s = parse_scenario(read_config(opt.config));
    if (opt.seed) s.seed = *opt.seed;
    const std::string report_name = s.report_file;
    return emit(opt, report_name, cmd(s));
}

int run_check(const Options& opt) {
    const std::uint64_t seed = opt.seed.value_or(0);
    const auto results = run_checks(opt.suite, seed, opt.jobs);
    const Json report = checks_to_json(results, seed);
    const bool ok = report["holds"].get<bool>();
    emit(opt, "check.json", CommandOutput{0, report, "", ""});
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient flows and pursuit curves on Hadamard spaces"};
    app.require_subcommand(1);
    Options opt;
    Command selected = nullptr;
    bool check = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", opt.seed, "Seed for sampled checks (overrides the scenario)");
        sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    };
    const std::vector<std::pair<std::string, Command>> commands = {
        {"flow", cmd_flow},
        {"pursue", cmd_pursue},
        {"barycenter", cmd_barycenter},
        {"convergence", cmd_convergence},
        {"resolve", cmd_resolve},
    };
    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "Scenario JSON")->required();
        add_common(sub);
        sub->callback([&selected, c = cmd] { selected = c; });
    }
    auto* check_cmd = app.add_subcommand("check", "Run invariant suites");
    check_cmd->add_option("suite", opt.suite, "Suite name or 'all'")->capture_default_str();
    add_common(check_cmd);
    check_cmd->callback([&] { check = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return check ? run_check(opt) : run_scenario(opt, selected);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
