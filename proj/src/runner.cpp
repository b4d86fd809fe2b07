#include "tdgan/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <tuple>

#include "tdgan/errors.hpp"
#include "tdgan/scenario.hpp"

namespace tdgan {

void RunConfig::validate() const {
    if (methods.empty()) throw ConfigError("at least one method required");
    if (seeds.empty()) throw ConfigError("at least one seed required");
    if (!(iters_scale > 0.0)) throw ConfigError("iters-scale must be > 0");
    if (n_eval == 0) throw ConfigError("n_eval must be >= 1");
}

void sort_rows(std::vector<MetricRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
        return std::make_tuple(std::string(method_name(a.method)), a.seed, a.task_index, a.label, a.value) <
               std::make_tuple(std::string(method_name(b.method)), b.seed, b.task_index, b.label, b.value);
    });
}

std::string format_csv(const std::vector<MetricRow>& rows) {
    std::string out = "method,seed,task,label,metric,value\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.9g", r.value);
        out += method_name(r.method);
        out += ',' + std::to_string(r.seed) + ',' + std::to_string(r.task_index) + ',' + std::to_string(r.label) +
               ",energy_distance," + buf + '\n';
    }
    return out;
}

size_t resolve_thread_count(size_t requested, size_t jobs) {
    size_t t = requested;
    if (t == 0) {
        if (const char* env = std::getenv("TDGAN_THREADS")) {
            char* end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end && *end == '\0' && v > 0) t = v;
        }
    }
    if (t == 0) t = std::max<size_t>(1, std::thread::hardware_concurrency());
    return std::min(t, std::max<size_t>(1, jobs));
}

std::vector<MetricRow> collect_rows(const Scenario& s, const RunConfig& cfg) {
    struct Job {
        Method method;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (Method m : cfg.methods)
        for (uint64_t seed : cfg.seeds) jobs.push_back({m, seed});

    std::vector<std::vector<MetricRow>> results(jobs.size());
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                RunMethodOptions mo;
                mo.iters_scale = cfg.iters_scale;
                mo.n_eval = cfg.n_eval;
                results[i] = run_method(s, jobs[i].method, jobs[i].seed, mo);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const size_t nthreads = resolve_thread_count(cfg.threads, jobs.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<MetricRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    sort_rows(rows);
    return rows;
}

int run(const RunConfig& cfg) {
    std::vector<MetricRow> rows;
    try {
        cfg.validate();
        Scenario s = load_scenario_file(cfg.scenario_path);
        rows = collect_rows(s, cfg);
    } catch (const std::exception& e) {
        // nothing has been written yet
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const std::string csv = format_csv(rows);
    std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << csv) || !out.flush()) {
        out.close();
        std::remove(cfg.out_path.c_str());
        std::cerr << "error: cannot write output file '" << cfg.out_path << "'\n";
        return 1;
    }
    return 0;
}

}  // namespace tdgan
