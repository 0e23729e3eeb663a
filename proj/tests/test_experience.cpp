#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace iertc;
using namespace iertc::test;

namespace {

ExperiencePath random_path(Rng& rng, int dim, int k) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Config> w;
    for (int i = 0; i < k; ++i) {
        Config q(dim);
        for (int j = 0; j < dim; ++j) q[j] = n(rng);
        w.push_back(q);
    }
    return ExperiencePath::from_waypoints(std::move(w));
}

Config random_config(Rng& rng, int dim) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    Config q(dim);
    for (int j = 0; j < dim; ++j) q[j] = u(rng);
    return q;
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

} // namespace

TEST_SUITE("experience") {

TEST_CASE("arc-length phases") {
    const auto p = ExperiencePath::from_waypoints({vec({0, 0}), vec({1, 0}), vec({1, 3})});
    REQUIRE(p.phases.size() == 3);
    CHECK(p.phases[0] == 0.0);
    CHECK(p.phases[1] == doctest::Approx(0.25));
    CHECK(p.phases[2] == 1.0);
    CHECK_NOTHROW(p.validate());

    const auto still = ExperiencePath::from_waypoints({vec({0, 0}), vec({0, 0}), vec({0, 0})});
    CHECK(still.phases == std::vector<double>{0.0, 0.5, 1.0});
    CHECK_THROWS_AS(ExperiencePath::from_waypoints({vec({0, 0})}), InputError);

    ExperiencePath bad = p;
    bad.phases[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("retrieve examples") {
    PathLibrary lib(2);
    CHECK_THROWS_AS(retrieve(lib, vec({0, 0}), vec({1, 1})), LibraryError);

    lib.add(ExperiencePath::from_waypoints({vec({0, 0}), vec({1, 1})}));
    CHECK(retrieve_index(lib, vec({9, 9}), vec({-9, 4})) == 0);

    lib.add(ExperiencePath::from_waypoints({vec({5, 5}), vec({6, 6})}));
    CHECK(retrieve_index(lib, vec({0.1, 0}), vec({1, 1})) == 0);
    CHECK(similarity_distance(lib[0].path, vec({0.1, 0}), vec({1, 1})) == doctest::Approx(0.1));
    // sqrt(4.9^2 + 5^2) + sqrt(5^2 + 5^2)
    CHECK(similarity_distance(lib[1].path, vec({0.1, 0}), vec({1, 1})) == doctest::Approx(14.0718).epsilon(1e-4));
    CHECK(retrieve_index(lib, vec({5, 5}), vec({6, 6})) == 1);

    // Ties go to the lowest index.
    lib.add(ExperiencePath::from_waypoints({vec({5, 5}), vec({6, 6})}));
    CHECK(retrieve_index(lib, vec({5, 5}), vec({6, 6})) == 1);
    CHECK_THROWS_AS(retrieve(lib, vec({0, 0, 0}), vec({1, 1, 1})), InputError);
}

TEST_CASE("retrieve agrees with an exhaustive minimum") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + trial % 4;
        PathLibrary lib(dim);
        const int n = 1 + trial % 50;
        for (int i = 0; i < n; ++i) lib.add(random_path(rng, dim, 2 + i % 4));
        const Config s = random_config(rng, dim), g = random_config(rng, dim);
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < lib.size(); ++i) {
            const double d = (s - lib[i].path.front()).norm() + (g - lib[i].path.back()).norm();
            if (d < best) best = d, arg = i;
        }
        CHECK(retrieve_index(lib, s, g) == arg);
    }
}

TEST_CASE("discretize examples") {
    const auto line = ExperiencePath::from_waypoints({vec({0, 0}), vec({4, 0})});
    const auto d = discretize_phases(line, 4);
    REQUIRE(d.size() == 5);
    for (int i = 0; i <= 4; ++i) {
        CHECK(d.phases[i] == doctest::Approx(i / 4.0));
        CHECK(d.waypoints[i][0] == doctest::Approx(double(i)));
        CHECK(d.waypoints[i][1] == 0.0);
    }

    const auto twice = discretize_phases(d, 4);
    for (int i = 0; i <= 4; ++i) CHECK((twice.waypoints[i] - d.waypoints[i]).norm() <= 1e-12);

    const auto ell = ExperiencePath::from_waypoints({vec({0, 0}), vec({1, 0}), vec({1, 1})});
    const auto mid = discretize_phases(ell, 2);
    CHECK((mid.waypoints[1] - vec({1, 0})).norm() <= 1e-12);

    CHECK_THROWS_AS(discretize_phases(line, 1), InputError);
}

TEST_CASE("discretize preserves endpoints exactly") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_path(rng, 3, 2 + trial % 7);
        const auto d = discretize_phases(p, 2 + trial % 30);
        CHECK(d.front() == p.front());
        CHECK(d.back() == p.back());
        CHECK_NOTHROW(d.validate());
    }
}

TEST_CASE("map experience examples") {
    const auto p = ExperiencePath::from_waypoints({vec({0, 0}), vec({0.5, 0}), vec({1, 0})});
    const auto identity = map_experience(p, vec({0, 0}), vec({1, 0}));
    CHECK(identity == p);

    const auto sheared = map_experience(p, vec({0, 0}), vec({1, 1}));
    CHECK((sheared.waypoints[1] - vec({0.5, 0.5})).norm() <= 1e-12);
    CHECK(sheared.waypoints[2] == vec({1, 1}));
    CHECK(sheared.phases == p.phases);

    const auto two = ExperiencePath::from_waypoints({vec({0, 0}), vec({1, 0})});
    const auto moved = map_experience(two, vec({2, 2}), vec({3, 2}));
    CHECK(moved.waypoints[0] == vec({2, 2}));
    CHECK(moved.waypoints[1] == vec({3, 2}));
}

TEST_CASE("map experience endpoint exactness and affine consistency") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const int dim = 2 + trial % 5;
        const auto p = random_path(rng, dim, 2 + trial % 9);
        const Config s = random_config(rng, dim), g = random_config(rng, dim);
        const auto m = map_experience(p, s, g);
        CHECK(m.front() == s);
        CHECK(m.back() == g);
        const auto again = map_experience(m, s, g);
        for (std::size_t i = 0; i < m.size(); ++i)
            CHECK((again.waypoints[i] - m.waypoints[i]).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("phase grid") {
    const PhaseGrid g(10);
    CHECK(g.value(0) == 0.0);
    CHECK(g.value(10) == 1.0);
    CHECK(g.index_of(0.3) == 3);
    CHECK(g.on_grid(0.7));
    CHECK_FALSE(g.on_grid(0.75));
    CHECK_THROWS_AS(PhaseGrid(1), InputError);
}

TEST_CASE("library dimension and prefix") {
    PathLibrary lib;
    lib.add(ExperiencePath::from_waypoints({vec({0, 0}), vec({1, 1})}));
    CHECK(lib.dim() == 2);
    CHECK_THROWS_AS(lib.add(ExperiencePath::from_waypoints({vec({0, 0, 0}), vec({1, 1, 1})})), InputError);
    lib.add(ExperiencePath::from_waypoints({vec({0, 1}), vec({1, 0})}));
    CHECK(lib.prefix(1).size() == 1);
    CHECK(lib.prefix(1)[0] == lib[0]);
    CHECK(lib.prefix(10) == lib);
}

TEST_CASE("library round trip") {
    const auto path = temp_file("iertc_library_roundtrip.jsonl");
    PathLibrary empty(4);
    save_library(empty, path);
    CHECK(load_library(path) == empty);

    Rng rng(23);
    PathLibrary lib(3);
    for (int i = 0; i < 100; ++i)
        lib.add(random_path(rng, 3, 2 + i % 6), ExperienceMeta{"scene-" + std::to_string(i),
                                                             0xfedcba9876543210ULL + i, "rrt_connect", 1.0 / (i + 3)});
    save_library(lib, path);
    CHECK(load_library(path) == lib);
    std::filesystem::remove(path);
}

TEST_CASE("library load errors name the entry") {
    const auto path = temp_file("iertc_library_bad.jsonl");
    {
        std::ofstream out(path);
        out << R"({"phases":[0,1],"waypoints":[[0,0],[1,1]]})" << '\n';
        out << R"({"phases":[0,1],"waypoints":[[0,0,0],[1,1,1]]})" << '\n';
    }
    try {
        load_library(path);
        FAIL("expected a load error");
    } catch (const LibraryError& e) {
        CHECK(std::string(e.what()).find("entry 1") != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << "{oops\n";
    }
    CHECK_THROWS_AS(load_library(path), LibraryError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_library(path), LibraryError);
}

}
