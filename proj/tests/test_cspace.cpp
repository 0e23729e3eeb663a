#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace iertc;
using namespace iertc::test;

TEST_SUITE("cspace") {

TEST_CASE("config space rejects degenerate bounds") {
    CHECK_THROWS_AS(ConfigSpace(vec({0, 0}), vec({1, 0})), InputError);
    CHECK_THROWS_AS(ConfigSpace(vec({0}), vec({1})), InputError);
    CHECK_THROWS_AS(ConfigSpace(vec({0, 0}), vec({1, 1, 1})), InputError);
    ConfigSpace s(vec({0, -1}), vec({2, 1}));
    CHECK(s.dim() == 2);
    CHECK(s.diagonal() == doctest::Approx(std::sqrt(8.0)));
    CHECK(s.measure() == doctest::Approx(4.0));
}

TEST_CASE("scene resolution defaults and bounds") {
    const Scene s = unit_scene(2);
    CHECK(s.delta() == doctest::Approx(0.01 * std::sqrt(2.0)));
    CHECK_NOTHROW(unit_scene(2, {}, 0.05 * std::sqrt(2.0)));
    CHECK_THROWS_AS(unit_scene(2, {}, 0.06 * std::sqrt(2.0)), InputError);
    CHECK_THROWS_AS(unit_scene(2, {box({0.5, 0.5}, {0.4, 0.6})}), InputError);
    CHECK_THROWS_AS(unit_scene(2, {Sphere{vec({0.5, 0.5}), 0.0}}), InputError);
}

TEST_CASE("state validity examples") {
    const Scene boxed = unit_scene(2, {box({0.4, 0.4}, {0.6, 0.6})});
    CHECK_FALSE(is_state_valid(vec({0.5, 0.5}), boxed));
    CHECK(is_state_valid(vec({0.2, 0.5}), boxed));

    const Scene empty = square_scene(1.0);
    CHECK(is_state_valid(vec({0, 0}), empty));
    CHECK_FALSE(is_state_valid(vec({2, 0}), empty));
    CHECK_THROWS_AS(is_state_valid(vec({0, 0, 0}), empty), InputError);

    const Scene ball = unit_scene(2, {Sphere{vec({0.5, 0.5}), 0.1}});
    CHECK_FALSE(is_state_valid(vec({0.55, 0.5}), ball));
    CHECK(is_state_valid(vec({0.65, 0.5}), ball));
}

TEST_CASE("motion validity examples") {
    const Scene s = square_scene(1.0, {box({-0.1, -0.1}, {0.1, 0.1})});
    CHECK_FALSE(is_motion_valid(vec({-1, 0}), vec({1, 0}), s));
    CHECK(is_motion_valid(vec({0.5, 0.5}), vec({0.5, 0.5}), s));
    CHECK(is_motion_valid(vec({-1, 1}), vec({1, 1}), s));
    CHECK_THROWS_AS(is_motion_valid(vec({0, 0}), vec({0, 0, 0}), s), InputError);

    // Dense oracle at spacing delta / 10 agrees on the free motion.
    const Config a = vec({-1, 1}), b = vec({1, 1});
    const int n = static_cast<int>(std::ceil(distance(a, b) / (s.delta() / 10)));
    bool dense = true;
    for (int i = 0; i <= n; ++i) dense = dense && is_state_valid(a + (b - a) * (double(i) / n), s);
    CHECK(dense);
}

TEST_CASE("motion validity is symmetric and refinement-monotone") {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int invalid = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Obstacle> obs;
        for (int k = 0; k < 4; ++k) {
            const Config c = vec({u(rng), u(rng)});
            const double h = 0.01 + 0.05 * u(rng);
            obs.emplace_back(AxisBox{c.array() - h, c.array() + h});
        }
        obs.emplace_back(Sphere{vec({u(rng), u(rng)}), 0.01 + 0.04 * u(rng)});
        const Scene s = unit_scene(2, obs, 0.05);
        const Config a = vec({u(rng), u(rng)}), b = vec({u(rng), u(rng)});
        const bool ab = is_motion_valid(a, b, s);
        CHECK(ab == is_motion_valid(b, a, s));
        if (!ab) {
            ++invalid;
            for (double d : {0.03, 0.01, 0.004, 0.001}) CHECK_FALSE(is_motion_valid(a, b, s.with_delta(d)));
        }
    }
    CHECK(invalid > 20);
}

TEST_CASE("segment validity") {
    const Scene s = square_scene(1.0, {box({-0.1, -0.1}, {0.1, 0.1})});
    MicroSegment free;
    free.waypoints = {vec({-0.9, 0.9}), vec({0, 0.9}), vec({0.9, 0.9})};
    CHECK(is_segment_valid(free, s));
    MicroSegment blocked;
    blocked.waypoints = {vec({-0.9, 0.9}), vec({-0.9, 0.0}), vec({0.9, 0.0}), vec({0.9, 0.9})};
    CHECK_FALSE(is_segment_valid(blocked, s));
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        MicroSegment leg;
        leg.waypoints = {sample_uniform(s.space(), rng), sample_uniform(s.space(), rng)};
        CHECK(is_segment_valid(leg, s) == is_motion_valid(leg.waypoints[0], leg.waypoints[1], s));
    }
    MicroSegment single;
    single.waypoints = {vec({0, 0.9})};
    CHECK_THROWS_AS(is_segment_valid(single, s), InputError);
}

TEST_CASE("distance") {
    CHECK(distance(vec({0, 0}), vec({3, 4})) == 5.0);
    CHECK(distance(vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
    Rng rng(1);
    const ConfigSpace space(Config::Zero(4), Config::Ones(4));
    for (int i = 0; i < 100; ++i) {
        const Config a = sample_uniform(space, rng), b = sample_uniform(space, rng);
        CHECK(distance(a, b) == distance(b, a));
    }
    CHECK_THROWS_AS(distance(vec({0, 0}), vec({0, 0, 0})), InputError);
}

TEST_CASE("uniform sampling") {
    const ConfigSpace space(Config::Zero(2), Config::Ones(2));
    Rng rng(42);
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int i = 0; i < 10000; ++i) {
        const Config q = sample_uniform(space, rng);
        CHECK(space.contains(q));
        mean += q;
    }
    mean /= 10000.0;
    CHECK(mean[0] == doctest::Approx(0.5).epsilon(0.1));
    CHECK(mean[1] == doctest::Approx(0.5).epsilon(0.1));

    const ConfigSpace thin(vec({0.0, 0.3}), vec({1.0, 0.3 + 1e-12}));
    Rng r2(3);
    CHECK(sample_uniform(thin, r2)[1] == doctest::Approx(0.3));

    Rng x(9), y(9);
    CHECK(sample_uniform(space, x) == sample_uniform(space, y));
}

TEST_CASE("planar arm forward kinematics") {
    PlanarArm arm{{1.0, 0.5}, Eigen::Vector2d(0.0, 0.0)};
    const auto p = arm.joint_positions(vec({std::numbers::pi / 2, -std::numbers::pi / 2}));
    REQUIRE(p.size() == 3);
    CHECK(p[1].x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p[1].y() == doctest::Approx(1.0));
    CHECK(p[2].x() == doctest::Approx(0.5));
    CHECK(p[2].y() == doctest::Approx(1.0));
}

TEST_CASE("planar arm scene constraints") {
    const double pi = std::numbers::pi;
    const ConfigSpace joints(Config::Constant(2, -pi), Config::Constant(2, pi));
    CHECK_THROWS_AS(Scene(joints, PlanarArm{{0.5, 0.5, 0.5}}, {}), InputError);
    CHECK_THROWS_AS(Scene(ConfigSpace(Config::Constant(2, -4), Config::Constant(2, 4)), PlanarArm{{0.5, 0.5}}, {}),
                    InputError);
    CHECK_THROWS_AS(Scene(joints, PlanarArm{{0.5, 0.5}}, {AxisBox{vec({0, 0, 0}), vec({1, 1, 1})}}), InputError);
    CHECK_NOTHROW(Scene(joints, PlanarArm{{0.5, 0.5}}, {box({0.2, 0.2}, {0.4, 0.4})}));
}

// Brute-force oracle: sample every link densely and test point containment.
bool raster_collides(const PlanarArm& arm, const Config& q, const std::vector<Obstacle>& obstacles) {
    const auto p = arm.joint_positions(q);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const int n = 4000;
        for (int k = 0; k <= n; ++k) {
            const Eigen::Vector2d x = p[i] + (p[i + 1] - p[i]) * (double(k) / n);
            for (const auto& o : obstacles) {
                if (const auto* b = std::get_if<AxisBox>(&o)) {
                    if (x.x() >= b->min[0] && x.x() <= b->max[0] && x.y() >= b->min[1] && x.y() <= b->max[1])
                        return true;
                } else {
                    const auto& s = std::get<Sphere>(o);
                    if ((x - Eigen::Vector2d(s.center[0], s.center[1])).norm() <= s.radius) return true;
                }
            }
        }
    }
    return false;
}

TEST_CASE("planar arm validity agrees with a rasterization oracle") {
    const double pi = std::numbers::pi;
    Rng rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int collisions = 0, agreed = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int links = 2 + trial % 3;
        PlanarArm arm;
        for (int i = 0; i < links; ++i) arm.link_lengths.push_back(0.2 + 0.3 * u(rng));
        arm.base = Eigen::Vector2d(0.5 * u(rng), 0.5 * u(rng));
        std::vector<Obstacle> obs;
        for (int k = 0; k < 3; ++k) {
            const double cx = 2 * u(rng) - 0.5, cy = 2 * u(rng) - 0.5, h = 0.05 + 0.2 * u(rng);
            obs.emplace_back(box({cx - h, cy - h}, {cx + h, cy + h}));
        }
        obs.emplace_back(Sphere{vec({2 * u(rng) - 0.5, 2 * u(rng) - 0.5}), 0.05 + 0.2 * u(rng)});
        const Scene scene(ConfigSpace(Config::Constant(links, -pi), Config::Constant(links, pi)), arm, obs);
        const Config q = sample_uniform(scene.space(), rng);
        const bool oracle = raster_collides(arm, q, obs);
        collisions += oracle;
        agreed += (is_state_valid(q, scene) == !oracle);
    }
    CHECK(agreed == 150);
    CHECK(collisions > 20);
    CHECK(collisions < 130);
}

TEST_CASE("segment primitives") {
    const AxisBox b = box({0, 0}, {1, 1});
    CHECK(segment_intersects_box({-1, 0.5}, {2, 0.5}, b));
    CHECK_FALSE(segment_intersects_box({-1, 1.5}, {2, 1.5}, b));
    CHECK(segment_intersects_box({0.2, 0.2}, {0.3, 0.3}, b));
    CHECK_FALSE(segment_intersects_box({-1, -1}, {-0.5, 2}, b));
    const Sphere c{vec({0, 0}), 1.0};
    CHECK(segment_intersects_circle({-2, 0}, {2, 0}, c));
    CHECK_FALSE(segment_intersects_circle({-2, 1.5}, {2, 1.5}, c));
    CHECK(segment_intersects_circle({0.1, 0.1}, {0.2, 0.2}, c));
    CHECK_FALSE(segment_intersects_circle({2, 0}, {3, 0}, c));
}

TEST_CASE("scene JSON round trip is lossless") {
    const double pi = std::numbers::pi;
    const Scene point = unit_scene(3, {AxisBox{vec({0.1, 0.2, 0.3}), vec({0.4, 0.5, 0.6})},
                                       Sphere{vec({0.7, 0.7, 0.7}), 0.1 / 3.0}},
                                   0.0123456789012345);
    CHECK(scene_from_json(scene_to_json(point)) == point);
    const Scene arm(ConfigSpace(Config::Constant(3, -pi), Config::Constant(3, pi)),
                    PlanarArm{{0.4, 1.0 / 3.0, 0.2}, Eigen::Vector2d(0.1, -0.2)},
                    {box({0.5, 0.5}, {0.7, 0.9}), Sphere{vec({0.1, 0.9}), 0.05}});
    CHECK(scene_from_json(scene_to_json(arm)) == arm);

    const auto path = std::filesystem::temp_directory_path() / "iertc_scene_roundtrip.json";
    save_scene(arm, path);
    CHECK(load_scene(path) == arm);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(scene_from_json("{not json"), InputError);
    CHECK_THROWS_AS(scene_from_json(R"({"dim":2,"lower":[0,0],"upper":[1,1],"robot":{"kind":"Blimp"},"obstacles":[]})"),
                    InputError);
}

TEST_CASE("state checks are metered per thread") {
    const Scene s = unit_scene(2);
    const auto before = thread_state_checks();
    is_state_valid(vec({0.5, 0.5}), s);
    is_state_valid(vec({0.2, 0.5}), s);
    CHECK(thread_state_checks() - before == 2);
}

}
