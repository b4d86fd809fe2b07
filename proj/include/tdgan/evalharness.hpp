#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "tdgan/federation.hpp"

namespace tdgan {

enum class Method { Tdgan, Finetune, Joint, Local };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct MetricRow {
    Method method;
    uint64_t seed = 0;
    size_t task_index = 0;  // 1-based
    LabelId label = 0;
    // metric is always the two-sample energy distance in this artifact
    double value = 0.0;
};

// Two-sample energy distance between the empirical distributions of the
// column sets A and B (V-statistic):
//   2 mean_{i,j} ||A_i - B_j|| - mean_{i,i'} ||A_i - A_i'|| - mean_{j,j'} ||B_j - B_j'||
// with the within-set means taken over all ordered pairs including i = i',
// which makes the statistic exactly zero on identical samples and
// nonnegative always. The cross term is accumulated in a canonical argument
// order so that swapping A and B returns the identical double.
double energy_distance(const Mat& a, const Mat& b);

// Per label: n_eval fakes G(u,y) against n_eval ground-truth draws.
std::vector<MetricRow> eval_generator(const Generator& g, const CondGaussianMixture& truth,
                                      const std::set<LabelId>& labels, size_t n_eval, uint64_t eval_root,
                                      size_t task_index);

// 95th-percentile (or other q) of the truth-vs-truth energy distance null at
// sample size n_eval; the statistical noise floor used by the comparisons.
double energy_null_quantile(const CondGaussianMixture& truth, LabelId label, size_t n_eval, size_t reps, double q,
                            uint64_t seed);

struct RunMethodOptions {
    double iters_scale = 1.0;
    size_t n_eval = 2000;
    IterationHook iteration_hook;  // forwarded to training (tdgan/finetune only)
    Transport* transport = nullptr;
};

// Runs one comparison method over the scenario and evaluates the resulting
// generator(s) after every task on the labels seen so far (tdgan, finetune,
// joint) or on the owning center's labels (local).
std::vector<MetricRow> run_method(const Scenario& s, Method method, uint64_t seed, const RunMethodOptions& opts = {});

// -------- numerical verification of the loss-function guarantees --------

struct DensityModel {
    std::function<double(Rng&)> sample;
    std::function<double(double)> pdf;
};

struct DiscTrainBudget {
    size_t steps = 20000;
    size_t batch = 256;
    AdamHyper adam{1e-3, 0.5, 0.999, 1e-8};
    std::vector<size_t> hidden{32, 32};
    bool zero_init = false;  // start from an all-zero net (D == 0.5 everywhere)
    uint64_t seed = 1;
};

// Trains a fresh discriminator on real draws from p against fake draws from
// q, then reports the mean over the grid of |D(x) - p(x)/(p(x)+q(x))|.
double verify_optimal_discriminator(const DensityModel& p, const DensityModel& q, const DiscTrainBudget& budget,
                                    const std::vector<double>& grid);

struct RemindingBudget {
    size_t steps = 10000;
    size_t batch = 64;
    AdamHyper adam{2e-3, 0.5, 0.999, 1e-8};
    size_t eval_batch = 512;
    uint64_t seed = 1;
};

struct RemindingReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> step_losses;  // minibatch loss before each step
};

// Optimizes only the reminding loss from `fresh` toward `frozen` over labels
// drawn from the store; the final loss is measured on a large held-out batch.
RemindingReport verify_reminding_convergence(const Generator& frozen, Generator fresh, const LabelStore& store,
                                             const RemindingBudget& budget);

}  // namespace tdgan
