#pragma once

#include "iertc/cspace.hpp"
#include "iertc/experience.hpp"

#include <initializer_list>
#include <vector>

namespace iertc::test {

inline Config vec(std::initializer_list<double> xs) {
    Config q(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) q[i++] = x;
    return q;
}

inline AxisBox box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return {vec(lo), vec(hi)}; }

inline Scene unit_scene(int dim, std::vector<Obstacle> obstacles = {}, double delta = 0.0) {
    return Scene(ConfigSpace(Config::Zero(dim), Config::Ones(dim)), PointRobot{}, std::move(obstacles), delta);
}

inline Scene square_scene(double half, std::vector<Obstacle> obstacles = {}, double delta = 0.0) {
    return Scene(ConfigSpace(Config::Constant(2, -half), Config::Constant(2, half)), PointRobot{},
                 std::move(obstacles), delta);
}

inline PathLibrary straight_library(const Config& a, const Config& b) {
    PathLibrary lib(static_cast<int>(a.size()));
    lib.add(ExperiencePath::from_waypoints({a, b}));
    return lib;
}

} // namespace iertc::test
