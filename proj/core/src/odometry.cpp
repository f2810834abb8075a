#include "rowexit/odometry.hpp"

#include <algorithm>
#include <cmath>

#include "rowexit/error.hpp"

namespace rowexit {

OdometryResult odometry_stage2(const RobotGeometry& robot, double step_distance, double noise_std,
                               std::mt19937_64& rng) {
    robot.validate();
    if (!(step_distance > 0)) fail(ErrorCode::InvalidArgument, "step_distance must be > 0");
    if (!(noise_std >= 0)) fail(ErrorCode::InvalidArgument, "noise_std must be >= 0");

    const double target = robot.target_distance();
    // Absorbs representation error in k * step when the target is an exact multiple.
    const double slack = 1e-12 * std::max(1.0, target);
    const int cap = static_cast<int>(std::ceil(target / step_distance)) * 4 + 1000;
    std::normal_distribution<double> noise(0.0, noise_std > 0 ? noise_std : 1.0);

    OdometryResult r;
    for (int k = 1; k <= cap; ++k) {
        const double traveled = k * step_distance;
        const double reading = noise_std > 0 ? traveled + noise(rng) : traveled;
        if (reading >= target - slack) {
            r.steps = k;
            r.traveled = traveled;
            r.error = traveled - target;
            return r;
        }
    }
    r.steps = cap;
    r.traveled = cap * step_distance;
    r.error = r.traveled - target;
    return r;
}

OdometryResult odometry_stage2(const RobotGeometry& robot, double step_distance, double noise_std,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return odometry_stage2(robot, step_distance, noise_std, rng);
}

}  // namespace rowexit
