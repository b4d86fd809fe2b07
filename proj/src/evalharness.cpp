#include "tdgan/evalharness.hpp"

#include <algorithm>
#include <cmath>

#include "tdgan/errors.hpp"

namespace tdgan {

const char* method_name(Method m) {
    switch (m) {
        case Method::Tdgan: return "tdgan";
        case Method::Finetune: return "finetune";
        case Method::Joint: return "joint";
        case Method::Local: return "local";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "tdgan") return Method::Tdgan;
    if (name == "finetune") return Method::Finetune;
    if (name == "joint") return Method::Joint;
    if (name == "local") return Method::Local;
    throw ConfigError("unknown method '" + name + "'");
}

namespace {

double col_dist(const Mat& a, size_t i, const Mat& b, size_t j) {
    double acc = 0.0;
    for (size_t d = 0; d < a.rows(); ++d) {
        const double diff = a(d, i) - b(d, j);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// mean over all ordered pairs, diagonal (zero) terms included
double within_mean(const Mat& a) {
    const size_t n = a.cols();
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) acc += col_dist(a, i, a, j);
    return 2.0 * acc / (static_cast<double>(n) * static_cast<double>(n));
}

double cross_mean(const Mat& a, const Mat& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.cols(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) acc += col_dist(a, i, b, j);
    return acc / (static_cast<double>(a.cols()) * static_cast<double>(b.cols()));
}

bool lex_before(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) return a.rows() < b.rows();
    if (a.cols() != b.cols()) return a.cols() < b.cols();
    return std::lexicographical_compare(a.values().begin(), a.values().end(), b.values().begin(), b.values().end());
}

}  // namespace

double energy_distance(const Mat& a, const Mat& b) {
    if (a.cols() == 0 || b.cols() == 0) throw ConfigError("energy_distance: empty sample set");
    if (a.rows() != b.rows()) throw ShapeError("energy_distance: dimension mismatch");
    // identical samples have distance 0 by definition; returning it directly
    // keeps the identity exact instead of accumulating rounding residue
    if (a.same_shape(b) && a.values() == b.values()) return 0.0;
    // canonical argument order: the sums then run over the same terms in the
    // same sequence however the caller ordered the sets
    const Mat* first = &a;
    const Mat* second = &b;
    if (lex_before(b, a)) std::swap(first, second);
    return 2.0 * cross_mean(*first, *second) - (within_mean(*first) + within_mean(*second));
}

std::vector<MetricRow> eval_generator(const Generator& g, const CondGaussianMixture& truth,
                                      const std::set<LabelId>& labels, size_t n_eval, uint64_t eval_root,
                                      size_t task_index) {
    std::vector<MetricRow> rows;
    for (LabelId y : labels) {
        if (y >= truth.vocab()) throw DomainError("eval label outside vocabulary");
        Rng rng(derive_seed(eval_root, {task_index, y}));
        Mat noise = sample_noise(g.noise_dim, n_eval, rng);
        Mat fakes = gen_forward(g, noise, std::vector<LabelId>(n_eval, y));
        Mat truths = truth.sample_batch(y, n_eval, rng);
        MetricRow row;
        row.method = Method::Tdgan;  // caller overwrites
        row.task_index = task_index;
        row.label = y;
        row.value = std::max(0.0, energy_distance(fakes, truths));
        rows.push_back(row);
    }
    return rows;
}

double energy_null_quantile(const CondGaussianMixture& truth, LabelId label, size_t n_eval, size_t reps, double q,
                            uint64_t seed) {
    if (reps == 0) throw ConfigError("null calibration needs reps >= 1");
    std::vector<double> draws(reps);
    for (size_t r = 0; r < reps; ++r) {
        Rng rng(derive_seed(seed, {tag("null"), label, r}));
        Mat a = truth.sample_batch(label, n_eval, rng);
        Mat b = truth.sample_batch(label, n_eval, rng);
        draws[r] = std::max(0.0, energy_distance(a, b));
    }
    std::sort(draws.begin(), draws.end());
    const size_t ix = std::min(reps - 1, static_cast<size_t>(std::ceil(q * static_cast<double>(reps))) - 1);
    return draws[ix];
}

namespace {

Scenario scale_iterations(Scenario s, double scale) {
    if (!(scale > 0.0)) throw ConfigError("iters_scale must be > 0");
    for (auto& task : s.tasks)
        task.iterations = static_cast<size_t>(std::llround(static_cast<double>(task.iterations) * scale));
    return s;
}

std::vector<MetricRow> eval_after_tasks(const ScenarioResult& res, const Scenario& s, Method method, uint64_t seed,
                                        size_t n_eval, uint64_t eval_root) {
    std::vector<MetricRow> rows;
    for (size_t t = 1; t <= res.task_snapshots.size(); ++t) {
        auto task_rows = eval_generator(res.task_snapshots[t - 1], *s.truth, res.task_supports[t - 1], n_eval,
                                        eval_root, t);
        for (auto& r : task_rows) {
            r.method = method;
            r.seed = seed;
        }
        rows.insert(rows.end(), task_rows.begin(), task_rows.end());
    }
    return rows;
}

}  // namespace

std::vector<MetricRow> run_method(const Scenario& s, Method method, uint64_t seed, const RunMethodOptions& opts) {
    Scenario scaled = scale_iterations(s, opts.iters_scale);
    const uint64_t run_root = scenario_run_root(scaled, seed);
    const uint64_t eval_root = derive_seed(run_root, {tag("eval")});

    switch (method) {
        case Method::Tdgan:
        case Method::Finetune: {
            RunOptions ro;
            ro.extra_seed = seed;
            if (method == Method::Finetune) ro.lambda_override = 0.0;
            ro.iteration_hook = opts.iteration_hook;
            ro.transport = opts.transport;
            ScenarioResult res = run_scenario(scaled, ro);
            return eval_after_tasks(res, scaled, method, seed, opts.n_eval, eval_root);
        }
        case Method::Joint: {
            // All centers pooled into one center in one task, iteration
            // budget matched to the sum of the sequential tasks.
            std::map<LabelId, uint64_t> pooled_counts;
            size_t total_iters = 0;
            for (const auto& task : scaled.tasks) {
                total_iters += task.iterations;
                for (const auto& c : task.centers)
                    for (const auto& [y, n] : c.label_counts()) pooled_counts[y] += n;
            }
            Scenario pooled = scaled;
            pooled.tasks.clear();
            TaskSpec task;
            task.centers.emplace_back("pooled", scaled.truth, pooled_counts);
            task.iterations = total_iters;
            pooled.tasks.push_back(std::move(task));

            RunOptions ro;
            ro.extra_seed = seed;
            ro.transport = opts.transport;
            ScenarioResult res = run_scenario(pooled, ro);
            return eval_after_tasks(res, pooled, method, seed, opts.n_eval, eval_root);
        }
        case Method::Local: {
            // An independent GAN per center, evaluated on that center's labels.
            std::vector<MetricRow> rows;
            for (size_t t = 1; t <= scaled.tasks.size(); ++t) {
                for (const auto& center : scaled.tasks[t - 1].centers) {
                    Scenario sub = scaled;
                    sub.tasks.clear();
                    TaskSpec task = scaled.tasks[t - 1];
                    task.centers = {center};
                    sub.tasks.push_back(std::move(task));

                    RunOptions ro;
                    ro.extra_seed = seed;
                    ro.transport = opts.transport;
                    ScenarioResult res = run_scenario(sub, ro);

                    std::set<LabelId> labels;
                    for (const auto& [y, n] : center.label_counts())
                        if (n > 0) labels.insert(y);
                    auto center_rows = eval_generator(res.task_snapshots[0], *scaled.truth, labels, opts.n_eval,
                                                      eval_root, t);
                    for (auto& r : center_rows) {
                        r.method = method;
                        r.seed = seed;
                        r.task_index = t;
                    }
                    rows.insert(rows.end(), center_rows.begin(), center_rows.end());
                }
            }
            return rows;
        }
    }
    throw ConfigError("unreachable method");
}

double verify_optimal_discriminator(const DensityModel& p, const DensityModel& q, const DiscTrainBudget& budget,
                                    const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("verifier needs a nonempty grid");

    Rng init_rng(derive_seed(budget.seed, {tag("lemma2_init")}));
    Discriminator d = make_discriminator(1, 1, budget.hidden, init_rng);
    if (budget.zero_init) {
        for (auto& layer : d.net.layers) {
            layer.w *= 0.0;
            layer.b *= 0.0;
        }
    }
    AdamState opt = AdamState::init(d.net, budget.adam);

    Rng data_rng(derive_seed(budget.seed, {tag("lemma2_data")}));
    const std::vector<LabelId> ys(budget.batch, 0);
    for (size_t step = 0; step < budget.steps; ++step) {
        Mat real(1, budget.batch), fake(1, budget.batch);
        for (size_t j = 0; j < budget.batch; ++j) real(0, j) = p.sample(data_rng);
        for (size_t j = 0; j < budget.batch; ++j) fake(0, j) = q.sample(data_rng);
        disc_update(d, opt, real, ys, fake, ys);
    }

    Mat xs(1, grid.size());
    for (size_t j = 0; j < grid.size(); ++j) xs(0, j) = grid[j];
    Mat pred = disc_forward(d, xs, std::vector<LabelId>(grid.size(), 0));

    double err = 0.0;
    for (size_t j = 0; j < grid.size(); ++j) {
        const double target = optimal_disc_value(p.pdf(grid[j]), q.pdf(grid[j]));
        err += std::fabs(pred(0, j) - target);
    }
    return err / static_cast<double>(grid.size());
}

RemindingReport verify_reminding_convergence(const Generator& frozen, Generator fresh, const LabelStore& store,
                                             const RemindingBudget& budget) {
    if (store.empty()) throw StateError("reminding verification needs a nonempty label store");

    auto eval_loss = [&](const Generator& g, uint64_t s) {
        Rng rng(s);
        std::vector<LabelId> labels = store.sample(budget.eval_batch, rng);
        Mat noise = sample_noise(g.noise_dim, budget.eval_batch, rng);
        return reminding_loss_and_grads(g, frozen, labels, noise).value;
    };
    const uint64_t eval_seed = derive_seed(budget.seed, {tag("lemma1_eval")});

    RemindingReport report;
    report.initial_loss = eval_loss(fresh, eval_seed);
    report.step_losses.reserve(budget.steps);

    AdamState opt = AdamState::init(fresh.net, budget.adam);
    for (size_t step = 0; step < budget.steps; ++step) {
        Rng rng(derive_seed(budget.seed, {tag("lemma1_step"), step}));
        std::vector<LabelId> labels = store.sample(budget.batch, rng);
        Mat noise = sample_noise(fresh.noise_dim, budget.batch, rng);
        GenLossGrads lg = reminding_loss_and_grads(fresh, frozen, labels, noise);
        report.step_losses.push_back(lg.value);
        adam_step(fresh.net, lg.grads, opt);
    }
    report.final_loss = eval_loss(fresh, eval_seed);
    return report;
}

}  // namespace tdgan
