#include "tdgan/verify_suites.hpp"

#include <cmath>
#include <cstdio>

namespace tdgan {

namespace {

DensityModel normal_model(double mean, double var) {
    const double sd = std::sqrt(var);
    DensityModel m;
    m.sample = [mean, sd](Rng& rng) { return rng.normal(mean, sd); };
    m.pdf = [mean, var](double x) {
        const double diff = x - mean;
        return std::exp(-0.5 * diff * diff / var) / std::sqrt(2.0 * M_PI * var);
    };
    return m;
}

}  // namespace

SuiteResult lemma2_suite(uint64_t seed) {
    DiscTrainBudget budget;
    budget.steps = 12000;
    budget.batch = 256;
    budget.adam = AdamHyper{1e-3, 0.5, 0.999, 1e-8};
    budget.hidden = {32, 32};
    budget.seed = seed;

    std::vector<double> grid(201);
    for (size_t i = 0; i < grid.size(); ++i) grid[i] = -4.0 + 9.0 * static_cast<double>(i) / 200.0;

    SuiteResult r;
    r.name = "lemma2 optimal discriminator";
    r.threshold = 0.05;
    r.value = verify_optimal_discriminator(normal_model(0.0, 1.0), normal_model(1.0, 1.0), budget, grid);
    r.pass = r.value <= r.threshold;
    char buf[128];
    std::snprintf(buf, sizeof buf, "mean |D(x) - p/(p+q)| = %.4f over 201-point grid [-4,5]", r.value);
    r.detail = buf;
    return r;
}

SuiteResult lemma1_suite(uint64_t seed) {
    Rng frozen_rng(derive_seed(seed, {tag("lemma1_frozen")}));
    Rng fresh_rng(derive_seed(seed, {tag("lemma1_fresh")}));
    Generator frozen = make_generator(1, 2, 2, {32}, frozen_rng);
    Generator fresh = make_generator(1, 2, 2, {32}, fresh_rng);

    LabelStore store;
    store.merge({{0, 1}, {1, 1}});

    RemindingBudget budget;
    budget.steps = 10000;
    budget.batch = 64;
    budget.adam = AdamHyper{2e-3, 0.5, 0.999, 1e-8};
    budget.eval_batch = 512;
    budget.seed = seed;

    RemindingReport report = verify_reminding_convergence(frozen, fresh, store, budget);

    SuiteResult r;
    r.name = "lemma1 reminding convergence";
    r.threshold = 1e-3;
    r.value = report.final_loss;
    r.pass = r.value <= r.threshold;
    char buf[128];
    std::snprintf(buf, sizeof buf, "loss %.3e -> %.3e after %zu steps", report.initial_loss, report.final_loss,
                  budget.steps);
    r.detail = buf;
    return r;
}

}  // namespace tdgan
