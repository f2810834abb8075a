#pragma once

#include <cstdint>
#include <random>

#include "rowexit/headland.hpp"

namespace rowexit {

struct OdometryResult {
    int steps = 0;
    double traveled = 0;  // true distance, steps * step_distance
    double error = 0;     // traveled - target
};

/// Dead-reckoning baseline for stage 2. The robot advances in exact steps; after
/// each step the odometer reports the cumulative distance plus N(0, noise_std).
/// The robot halts on the first reading >= m * l.
OdometryResult odometry_stage2(const RobotGeometry& robot, double step_distance, double noise_std,
                               std::mt19937_64& rng);
OdometryResult odometry_stage2(const RobotGeometry& robot, double step_distance, double noise_std,
                               std::uint64_t seed);

}  // namespace rowexit
