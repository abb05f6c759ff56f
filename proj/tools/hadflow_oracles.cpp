// Certifies reference values by brute force and writes them to a fixtures
// file read by the acceptance suite.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "hadflow/cli.hpp"
#include "hadflow/oracles.hpp"

using namespace hadflow;

namespace {

constexpr double kPitch = 1e-4;
constexpr int kInstances = 50;

Json resolve_fixtures(std::uint64_t seed) {
    Rng rng(seed);
    const double steps[] = {0.1, 0.05, 0.01};
    Json out = Json::array();
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        for (int i = 0; i < kInstances; ++i) {
            const double t0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const Point x0 = s.canonical(s.sample_point(rng));
            const double h = steps[i % 3];
            const auto o = oracle_resolve(*e.f, t0, x0, h, kPitch);
            out.push_back(Json{{"key", e.key},
                               {"instance", i},
                               {"t0", t0},
                               {"x0", s.point_to_json(x0)},
                               {"h", h},
                               {"pitch", kPitch},
                               {"point", s.point_to_json(o.point)}});
        }
    }
    return out;
}

// Evader at speed 1/2 along the x-axis, pursuer from (0, 5).
Json half_speed_pursuit() {
    const auto plane = std::make_shared<EuclideanSpace>(2);
    const double h_ref = 1e-5;
    const auto evader = MovingTarget::keyframed(
        plane, {{0.0, PointShape{make_point({0, 0})}}, {10.0, PointShape{make_point({5, 0})}}});
    const auto r = pursue(evader, make_point({0, 5}), 0.0, 10.0, EulerProximal{h_ref});
    if (!r.capture_time) throw SolverError("reference pursuit did not capture", r.trajectory.final_point());
    return Json{{"h_ref", h_ref}, {"capture_time", *r.capture_time}};
}

// Grid argmin of the mean squared distance on the tripod.
Json tripod_barycenter() {
    const auto space = std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    const std::vector<Point> pts{Point::tree(0, 0.5), Point::tree(1, 0.5), Point::tree(2, 0.5)};
    const SumSquaredDistances g(space, pts);
    const double pitch = 1e-5;
    Point best;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < space->edges().size(); ++e) {
        const double len = space->edges()[e].length;
        const auto n = static_cast<long>(std::ceil(len / pitch));
        for (long k = 0; k <= n; ++k) {
            const Point p = space->canonical(Point::tree(e, std::min(len, k * pitch)));
            const double v = g.value(0.0, p);
            if (v < best_value) {
                best_value = v;
                best = p;
            }
        }
    }
    Json points = Json::array();
    for (const auto& p : pts) points.push_back(space->point_to_json(p));
    return Json{{"points", points}, {"pitch", pitch}, {"point", space->point_to_json(best)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate oracle fixtures"};
    std::string path = "fixtures.json";
    std::uint64_t seed = 20240607;
    app.add_option("output", path, "Fixtures file")->capture_default_str();
    app.add_option("--seed", seed, "Instance seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    try {
        const Json doc{{"seed", seed},
                       {"resolve", resolve_fixtures(seed)},
                       {"half_speed_pursuit", half_speed_pursuit()},
                       {"tripod_barycenter", tripod_barycenter()}};
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << doc.dump(1) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
