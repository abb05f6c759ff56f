#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hadflow/cli.hpp"

using namespace hadflow;

namespace {

Json line_space() { return Json{{"kind", "euclidean"}, {"dim", 1}}; }
Json plane_space() { return Json{{"kind", "euclidean"}, {"dim", 2}}; }

Json drift_scenario() {
    return Json{{"space", line_space()},
                {"functional", {{"kind", "linear_drift"}}},
                {"x0", {0.0}},
                {"horizon", 2.0},
                {"scheme", {{"euler_proximal", {{"h", 1e-3}}}}}};
}

Json point_target(double x1, double y1, double x2, double y2, double t_end) {
    return Json{{"kind", "point"}, {"keyframes", {{0.0, {x1, y1}}, {t_end, {x2, y2}}}}};
}

std::string rejection(const Json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Scenario, RejectsNamingTheField) {
    Json doc = drift_scenario();
    doc["horizen"] = 1.0;
    EXPECT_NE(rejection(doc).find("horizen"), std::string::npos);
    doc = drift_scenario();
    doc["substeps"] = 0;
    EXPECT_NE(rejection(doc).find("substeps"), std::string::npos);
    doc = drift_scenario();
    doc["levels"] = {5, 3};
    EXPECT_NE(rejection(doc).find("levels"), std::string::npos);
    doc = drift_scenario();
    doc["x0"] = {0.0, 1.0};
    EXPECT_NE(rejection(doc).find("x0"), std::string::npos);
    doc = drift_scenario();
    doc["seed"] = -1;
    EXPECT_NE(rejection(doc).find("seed"), std::string::npos);
    doc = drift_scenario();
    doc["outputs"] = {{"plot", "a.png"}};
    EXPECT_NE(rejection(doc).find("outputs.plot"), std::string::npos);
    doc = drift_scenario();
    doc.erase("space");
    EXPECT_NE(rejection(doc).find("space"), std::string::npos);
}

TEST(Scenario, SeedIsUnsigned64) {
    Json doc = drift_scenario();
    doc["seed"] = std::uint64_t{18446744073709551615ull};
    EXPECT_EQ(parse_scenario(doc).seed, 18446744073709551615ull);
}

TEST(CmdFlow, LinearDriftReachesClosedForm) {
    const auto out = cmd_flow(parse_scenario(drift_scenario()));
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_NEAR(out.report["final_point"][0].get<double>(), 4.0, 2e-3);
    EXPECT_EQ(out.report["termination"], "completed");
    EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "t,x,F,grad_norm");
    EXPECT_EQ(out.csv_name, "trajectory.csv");
}

TEST(CmdFlow, MovingMinReportsLocus) {
    Json doc{{"space", {{"kind", "quadrant"}}},
             {"functional", {{"kind", "moving_min"}}},
             {"x0", {2.0, 0.5}},
             {"horizon", 3.0},
             {"scheme", {{"euler_proximal", {{"h", 1e-3}}}}}};
    const auto out = cmd_flow(parse_scenario(doc));
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_EQ(out.report["termination"], "singular_locus");
    EXPECT_NEAR(out.report["termination_time"].get<double>(), 0.75, 5e-3);
}

TEST(CmdFlow, InadmissibleStepExitsTwo) {
    // No catalog member has lambda < 0; non-positive steps are the reachable
    // admissibility failures here.
    for (const Json& scheme : {Json{{"euler_proximal", {{"h", -1.0}}}}, Json{{"euler_proximal", {{"h", 0.0}}}}}) {
        Json doc = drift_scenario();
        doc["scheme"] = scheme;
        try {
            cmd_flow(parse_scenario(doc));
            ADD_FAILURE() << "expected a rejection";
        } catch (const std::exception& e) {
            EXPECT_EQ(exit_code_for(e), 2);
        }
    }
}

TEST(CmdPursue, StationaryCaptureAndRayGap) {
    Json doc{{"space", plane_space()},
             {"target", point_target(3, 4, 3, 4, 1)},
             {"x0", {0.0, 0.0}},
             {"horizon", 10.0},
             {"scheme", {{"euler_proximal", {{"h", 1e-3}}}}}};
    auto out = cmd_pursue(parse_scenario(doc));
    EXPECT_NEAR(out.report["capture_time"].get<double>(), 5.0, 2e-3);
    EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "t,x,y,gap");

    doc["target"] = point_target(0, 0, 10, 0, 10);
    doc["x0"] = {-1.0, 0.0};
    doc["scheme"] = {{"euler_proximal", {{"h", 1e-2}}}};
    out = cmd_pursue(parse_scenario(doc));
    EXPECT_TRUE(out.report["capture_time"].is_null());
    EXPECT_NEAR(out.report["final_gap"].get<double>(), 1.0, 1e-6);
}

TEST(CmdPursue, ContractViolationExitsThree) {
    Json doc{{"space", plane_space()},
             {"target", point_target(0, 0, 2, 0, 1)},
             {"x0", {-1.0, 0.0}},
             {"horizon", 1.0},
             {"scheme", {{"euler_proximal", {{"h", 1e-2}}}}}};
    try {
        cmd_pursue(parse_scenario(doc));
        FAIL() << "expected a contract violation";
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), 3);
    }
}

TEST(CmdBarycenter, PointsAndPursuitOfStaticPair) {
    Json doc{{"space", plane_space()}, {"points", {{0.0, 0.0}, {2.0, 4.0}}}};
    auto out = cmd_barycenter(parse_scenario(doc));
    EXPECT_DOUBLE_EQ(out.report["barycenter"][0].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(out.report["barycenter"][1].get<double>(), 2.0);

    Json pursuit{{"space", plane_space()},
                 {"evaders", {point_target(0, 0, 0, 0, 1), point_target(2, 4, 2, 4, 1)}},
                 {"x0", {5.0, 2.0}},
                 {"horizon", 10.0},
                 {"scheme", {{"euler_proximal", {{"h", 1e-3}}}}}};
    out = cmd_barycenter(parse_scenario(pursuit));
    // Midpoint (1, 2) at distance 4.
    EXPECT_NEAR(out.report["capture_time"].get<double>(), 4.0, 2e-3);
    EXPECT_NEAR(out.report["final_point"][0].get<double>(), 1.0, 1e-3);
    EXPECT_NEAR(out.report["final_point"][1].get<double>(), 2.0, 1e-3);

    doc["evaders"] = pursuit["evaders"];
    EXPECT_THROW(cmd_barycenter(parse_scenario(doc)), ValidationError);
}

TEST(CmdConvergence, DriftTimeIndependentAndPursuit) {
    Json doc{{"space", line_space()}, {"functional", {{"kind", "linear_drift"}}}, {"x0", {0.0}}, {"horizon", 1.0}};
    auto out = cmd_convergence(parse_scenario(doc));
    EXPECT_GE(out.report["fitted_order"].get<double>(), 0.95);
    EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "n,measured,predicted,ratio");

    doc["functional"] = {{"kind", "sum_squared"}, {"anchors", {{1.0}}}};
    doc["levels"] = {2, 6};
    out = cmd_convergence(parse_scenario(doc));
    std::istringstream rows(out.csv);
    std::string row;
    std::getline(rows, row);
    while (std::getline(rows, row)) {
        const auto a = row.find(',');
        EXPECT_EQ(std::stod(row.substr(a + 1, row.find(',', a + 1) - a - 1)), 0.0) << row;
    }

    // Point evader: the measured decay sits at 2^-1, the fast end of the range.
    Json pursuit{{"space", plane_space()},
                 {"target", point_target(0, 0, 10, 0, 10)},
                 {"x0", {0.0, 5.0}},
                 {"horizon", 1.0},
                 {"levels", {9, 14}},
                 {"substeps", 2}};
    out = cmd_convergence(parse_scenario(pursuit));
    const double decay = out.report["decay_ratio"].get<double>();
    EXPECT_GE(decay, 0.5 - 1e-3);
    EXPECT_LE(decay, std::sqrt(0.5));
    EXPECT_EQ(out.report["existence_condition"], "verified");
    EXPECT_TRUE(out.report["within_bound"].get<bool>());
}

TEST(CmdConvergence, CoarseLevelsFailAdmissibility) {
    Json pursuit{{"space", plane_space()},
                 {"target", point_target(0, 0, 10, 0, 10)},
                 {"x0", {0.0, 5.0}},
                 {"horizon", 1.0}};
    try {
        cmd_convergence(parse_scenario(pursuit));
        FAIL() << "expected a step size rejection";
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), 2);
    }
}

TEST(CmdResolve, AnalyticWithOracle) {
    Json doc{{"space", line_space()},
             {"functional", {{"kind", "linear_drift"}}},
             {"x0", {0.0}},
             {"h", 0.1},
             {"pitch", 1e-4}};
    const auto out = cmd_resolve(parse_scenario(doc));
    EXPECT_EQ(out.report["method"], "analytic");
    EXPECT_NEAR(out.report["point"][0].get<double>(), 0.1, 1e-15);
    EXPECT_LE(out.report["oracle"]["distance"].get<double>(), 1e-4);
}

TEST(Check, SuitesPassAndAreDeterministic) {
    const auto a = run_checks("cat0", 7);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_TRUE(a[0].holds());
    const auto b = run_checks("cat0", 7, 2);
    EXPECT_EQ(checks_to_json(a, 7).dump(), checks_to_json(b, 7).dump());
    for (const auto& inv : a[0].invariants) EXPECT_GE(inv.samples, 1000u) << inv.name;
    const auto h = run_checks("hoelder", 7);
    for (const auto& inv : h[0].invariants)
        if (inv.name == "hoelder/linear_drift/R1") EXPECT_GE(inv.worst_slack, -1e-9);
    EXPECT_THROW(run_checks("nope", 1), ValidationError);
}

TEST(Check, ParallelAllMatchesSequential) {
    const auto seq = run_checks("all", 3, 1);
    const auto par = run_checks("all", 3, 4);
    EXPECT_EQ(checks_to_json(seq, 3).dump(), checks_to_json(par, 3).dump());
    EXPECT_EQ(seq.size(), suite_names().size());
    for (const auto& s : seq) EXPECT_TRUE(s.holds()) << s.suite;
}

TEST(Output, FormatDouble) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(-2.0), "-2");
    EXPECT_EQ(format_double(1e-20), "9.9999999999999995e-21");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(ValidationError("x")), 2);
    EXPECT_EQ(exit_code_for(StepSizeError("x")), 2);
    EXPECT_EQ(exit_code_for(ContractError("x", 0, 1)), 3);
    EXPECT_EQ(exit_code_for(CapabilityError("x")), 4);
    EXPECT_EQ(exit_code_for(SolverError("x", Point{})), 4);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}
