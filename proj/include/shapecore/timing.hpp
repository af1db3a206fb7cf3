#pragma once

#include <chrono>

namespace shapecore {

/// Wall-clock milliseconds per pipeline stage. total_ms spans the whole run,
/// so it also covers area/volume summation and bookkeeping.
struct StageTimings {
    double file_read_ms = 0.0;
    double mesh_ms = 0.0;
    double diameters_ms = 0.0;
    double total_ms = 0.0;
};

class Stopwatch {
public:
    using Clock = std::chrono::steady_clock;

    Stopwatch() : start_(Clock::now()) {}

    void reset() { start_ = Clock::now(); }

    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }

private:
    Clock::time_point start_;
};

}  // namespace shapecore
