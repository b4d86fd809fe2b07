#pragma once

#include <string>
#include <vector>

#include "tdgan/evalharness.hpp"

namespace tdgan {

struct RunConfig {
    std::string scenario_path;
    std::vector<Method> methods;
    std::vector<uint64_t> seeds;
    std::string out_path;
    double iters_scale = 1.0;
    size_t n_eval = 2000;
    size_t threads = 0;  // 0 = TDGAN_THREADS env, else hardware

    void validate() const;
};

// Canonical (method, seed, task, label) ordering, lexicographic on the
// method name and numeric elsewhere.
void sort_rows(std::vector<MetricRow>& rows);

// Header + rows, values with 9 significant digits.
std::string format_csv(const std::vector<MetricRow>& rows);

// Fans (method, seed) jobs across a worker pool, assembles one CSV. Output
// is a pure function of (scenario bytes, flags); the thread count only
// affects wall time.
std::vector<MetricRow> collect_rows(const Scenario& s, const RunConfig& cfg);

// Full pipeline: load, run, write. Returns a process exit code; on any
// failure nothing half-written is left at out_path.
int run(const RunConfig& cfg);

size_t resolve_thread_count(size_t requested, size_t jobs);

}  // namespace tdgan
