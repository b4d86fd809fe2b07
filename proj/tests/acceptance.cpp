// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Each criterion pins its thresholds in code; nothing is calibrated
// at run time except the Monte-Carlo null floors, which are part of the
// stated oracles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tdgan/evalharness.hpp"
#include "tdgan/grad_check.hpp"
#include "tdgan/runner.hpp"
#include "tdgan/scenario.hpp"
#include "tdgan/verify_suites.hpp"

using namespace tdgan;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Criterion> g_results;
std::vector<int> g_selected;  // empty = all

bool selected(int id) {
    return g_selected.empty() || std::find(g_selected.begin(), g_selected.end(), id) != g_selected.end();
}

template <typename F>
void run_criterion(int id, const std::string& name, F&& body) {
    if (!selected(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Criterion c{id, name, false, "", 0.0};
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%2d] %s  %-44s %6.1fs  %s\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds,
                c.detail.c_str());
    std::fflush(stdout);
    g_results.push_back(std::move(c));
}

std::string scenario_path(const char* name) { return std::string(TDGAN_SCENARIO_DIR) + "/" + name; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---- criterion 1: gradient correctness on all four losses ----

double digesting_value_only(const Generator& g, const Discriminator& d, const std::vector<LabelId>& y, const Mat& u) {
    Mat fake = gen_forward(g, u, y);
    Mat p = disc_forward(d, fake, y);
    double acc = 0.0;
    for (size_t j = 0; j < p.cols(); ++j)
        acc += std::log(std::min(std::max(1.0 - p(0, j), kProbFloor), 1.0 - kProbFloor));
    return acc / static_cast<double>(p.cols());
}

void criterion_gradients(Criterion& c) {
    double worst = 0.0;
    for (uint64_t restart = 0; restart < 5; ++restart) {
        Rng rng(derive_seed(1000 + restart, {tag("acc1")}));
        Generator g = make_generator(2, 3, 3, {8, 8}, rng);
        Generator frozen = make_generator(2, 3, 3, {8, 8}, rng);
        Discriminator d = make_discriminator(2, 3, {8, 8}, rng);

        const size_t batch = 6;
        std::vector<LabelId> y;
        for (size_t i = 0; i < batch; ++i) y.push_back(rng.uniform_int(3));
        Mat u = sample_noise(3, batch, rng);
        Mat real(2, batch), fake(2, batch);
        for (size_t i = 0; i < real.size(); ++i) real.data()[i] = rng.normal();
        for (size_t i = 0; i < fake.size(); ++i) fake.data()[i] = rng.normal();

        // discriminator objective (minimized form)
        {
            auto loss = [&](const MlpParams& p) {
                Discriminator probe = d;
                probe.net = p;
                Mat pr = disc_forward(probe, real, y);
                Mat pf = disc_forward(probe, fake, y);
                double acc = 0.0;
                for (size_t j = 0; j < batch; ++j)
                    acc += std::log(std::max(pr(0, j), kProbFloor)) + std::log(std::max(1.0 - pf(0, j), kProbFloor));
                return -acc / static_cast<double>(batch);
            };
            DiscLossGrads lg = disc_loss_and_grads(d, real, y, fake, y);
            worst = std::max(worst, grad_check(loss, d.net, lg.grads, 1e-5));
        }
        // digesting
        {
            auto loss = [&](const MlpParams& p) {
                Generator probe = g;
                probe.net = p;
                return digesting_value_only(probe, d, y, u);
            };
            GenLossGrads lg = digesting_gen_grads(g, {&d}, {1.0}, {y}, {u});
            worst = std::max(worst, grad_check(loss, g.net, lg.grads, 1e-5));
        }
        // reminding
        {
            auto loss = [&](const MlpParams& p) {
                Generator probe = g;
                probe.net = p;
                return reminding_loss_and_grads(probe, frozen, y, u).value;
            };
            GenLossGrads lg = reminding_loss_and_grads(g, frozen, y, u);
            worst = std::max(worst, grad_check(loss, g.net, lg.grads, 1e-5));
        }
        // combined with lambda = 1
        {
            const double lambda = 1.0;
            auto loss = [&](const MlpParams& p) {
                Generator probe = g;
                probe.net = p;
                return digesting_value_only(probe, d, y, u) +
                       lambda * reminding_loss_and_grads(probe, frozen, y, u).value;
            };
            GenLossGrads dig = digesting_gen_grads(g, {&d}, {1.0}, {y}, {u});
            GenLossGrads rem = reminding_loss_and_grads(g, frozen, y, u);
            MlpGrads combined = dig.grads;
            combined.axpy(lambda, rem.grads);
            worst = std::max(worst, grad_check(loss, g.net, combined, 1e-5));
        }
    }
    c.pass = worst <= 1e-4;
    c.detail = "max rel err " + fmt(worst) + " (<= 1e-4), 4 losses x 5 restarts";
}

// ---- criteria 4/5/7 helpers ----

std::map<LabelId, double> labels_after_task(const std::vector<MetricRow>& rows, size_t task) {
    std::map<LabelId, double> out;
    for (const auto& r : rows)
        if (r.task_index == task) out[r.label] = r.value;
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) g_selected.push_back(std::atoi(argv[i]));
    std::printf("TDGAN acceptance suite\n");

    run_criterion(1, "gradient correctness (all losses)", [](Criterion& c) { criterion_gradients(c); });

    run_criterion(2, "lemma 2: digesting learns the density ratio", [](Criterion& c) {
        SuiteResult r = lemma2_suite(1);
        c.pass = r.pass;
        c.detail = "mean |D - p/(p+q)| = " + fmt(r.value) + " (<= 0.05)";
    });

    run_criterion(3, "lemma 1: reminding loss converges to zero", [](Criterion& c) {
        SuiteResult r = lemma1_suite(1);
        c.pass = r.pass;
        c.detail = "final loss " + fmt(r.value) + " (<= 1e-3, 10k steps)";
    });

    // The end-to-end distribution check and the forgetting comparison share runs.
    Scenario disjoint = load_scenario_file(scenario_path("two_task_disjoint.scn"));
    const std::vector<uint64_t> seeds{1, 2, 3};
    std::vector<std::vector<MetricRow>> tdgan_rows, finetune_rows;

    run_criterion(4, "end-to-end recovery of p(x|y) on disjoint supports", [&](Criterion& c) {
        // oracle first: Monte-Carlo null 95th percentile at n_eval = 2000
        double eps_stat = 0.0;
        for (LabelId y = 0; y < 4; ++y)
            eps_stat = std::max(eps_stat, energy_null_quantile(*disjoint.truth, y, 2000, 200, 0.95, 424242));
        const double threshold = 3.0 * eps_stat;

        bool all = true;
        double worst = 0.0;
        for (uint64_t seed : seeds) {
            auto rows = run_method(disjoint, Method::Tdgan, seed, {});
            auto after2 = labels_after_task(rows, 2);
            for (LabelId y = 0; y < 4; ++y) {
                all = all && after2.count(y) == 1;
                if (after2.count(y)) {
                    worst = std::max(worst, after2[y]);
                    all = all && after2[y] <= threshold;
                }
            }
            tdgan_rows.push_back(std::move(rows));
        }
        c.pass = all;
        c.detail = "worst label distance " + fmt(worst) + " vs 3*eps_stat = " + fmt(threshold) + " (3 seeds)";
    });

    run_criterion(5, "forgetting: fine-tuning collapses, tdgan holds", [&](Criterion& c) {
        if (tdgan_rows.size() != seeds.size()) {  // criterion 4 skipped
            tdgan_rows.clear();
            for (uint64_t seed : seeds) tdgan_rows.push_back(run_method(disjoint, Method::Tdgan, seed, {}));
        }
        std::vector<double> ratios;
        for (size_t i = 0; i < seeds.size(); ++i) {
            auto ft = run_method(disjoint, Method::Finetune, seeds[i], {});
            auto ft2 = labels_after_task(ft, 2);
            auto td2 = labels_after_task(tdgan_rows.at(i), 2);
            const double ft_old = (ft2[0] + ft2[1]) / 2.0;
            const double td_old = (td2[0] + td2[1]) / 2.0;
            ratios.push_back(ft_old / td_old);
            finetune_rows.push_back(std::move(ft));
        }
        const double med = median(ratios);
        c.pass = med >= 3.0;
        c.detail = "median finetune/tdgan distance ratio on old labels = " + fmt(med) + " (>= 3)";
    });

    run_criterion(6, "baseline collapse identities (bitwise)", [&](Criterion& c) {
        // (a) single-task scenario: tdgan and finetune trajectories identical
        Scenario single = disjoint;
        single.tasks.resize(1);
        single.tasks[0].iterations = 120;

        auto trajectory = [](const Scenario& s, Method m) {
            std::vector<uint64_t> digests;
            RunMethodOptions opts;
            opts.n_eval = 16;
            opts.iteration_hook = [&](size_t, size_t, const GeneratorNode& node) {
                digests.push_back(params_digest(node.gen.net));
            };
            run_method(s, m, 1, opts);
            return digests;
        };
        const bool a = trajectory(single, Method::Tdgan) == trajectory(single, Method::Finetune);

        // (b) lambda = 0 tdgan vs finetune, bitwise, on a two-task scenario
        Scenario lam0 = disjoint;
        lam0.hyper.lambda = 0.0;
        for (auto& t : lam0.tasks) {
            t.lambda.reset();
            t.iterations = 120;
        }
        Scenario plain = disjoint;
        for (auto& t : plain.tasks) t.iterations = 120;
        const bool b = trajectory(lam0, Method::Tdgan) == trajectory(plain, Method::Finetune);

        c.pass = a && b;
        c.detail = std::string("single-task ") + (a ? "identical" : "DIFFER") + ", lambda=0 " +
                   (b ? "identical" : "DIFFER");
    });

    run_criterion(7, "joint learning upper bound on homogeneous tasks", [&](Criterion& c) {
        Scenario multi = load_scenario_file(scenario_path("two_task_multicenter.scn"));
        double eps_stat = 0.0;
        for (LabelId y = 0; y < multi.vocab; ++y)
            eps_stat = std::max(eps_stat, energy_null_quantile(*multi.truth, y, 2000, 200, 0.95, 515151));

        std::vector<double> gaps;  // joint mean - tdgan mean, per seed
        for (uint64_t seed : seeds) {
            auto joint = run_method(multi, Method::Joint, seed, {});
            auto td = run_method(multi, Method::Tdgan, seed, {});
            double joint_mean = 0.0;
            for (const auto& r : joint) joint_mean += r.value;
            joint_mean /= static_cast<double>(joint.size());
            // tdgan after its final task, all labels
            auto td_final = labels_after_task(td, multi.tasks.size());
            double td_mean = 0.0;
            for (const auto& [y, v] : td_final) td_mean += v;
            td_mean /= static_cast<double>(td_final.size());
            gaps.push_back(joint_mean - td_mean);
        }
        const double med = median(gaps);
        c.pass = med <= eps_stat;
        c.detail = "median(joint - tdgan) = " + fmt(med) + " (<= eps_stat = " + fmt(eps_stat) + ")";
    });

    run_criterion(8, "protocol invariants: transparency + privacy audit", [&](Criterion& c) {
        // transparency: message-assembled digesting gradient vs monolithic
        auto truth = disjoint.truth;
        Rng g_rng(1);
        GeneratorNode node;
        node.gen = make_generator(1, 4, 4, {16}, g_rng);
        node.opt = AdamState::init(node.gen.net, AdamHyper{});
        std::vector<DiscriminatorNode> centers;
        std::vector<uint64_t> sizes{32, 96};
        for (size_t k = 0; k < 2; ++k) {
            Rng d_rng(50 + k);
            Discriminator d = make_discriminator(1, 4, {16}, d_rng);
            AdamState opt = AdamState::init(d.net, AdamHyper{});
            centers.emplace_back(CenterDataset(k ? "b" : "a", truth,
                                               std::map<LabelId, uint64_t>{{k, sizes[k]}}),
                                 std::move(d), std::move(opt));
        }
        std::vector<double> pi = mixture_weights(sizes);
        Transport tr(true);
        std::vector<DiscriminatorNode*> online{&centers[0], &centers[1]};
        std::vector<Rng> lr1, nr1;
        for (size_t k = 0; k < 2; ++k) {
            lr1.emplace_back(derive_seed(7, {tag("l"), k}));
            nr1.emplace_back(derive_seed(7, {tag("n"), k}));
        }
        GenLossGrads msg = digest_exchange(node, online, pi, 8, tr, lr1, nr1, false);

        std::vector<std::vector<LabelId>> ys;
        std::vector<Mat> us;
        for (size_t k = 0; k < 2; ++k) {
            Rng lr2(derive_seed(7, {tag("l"), k})), nr2(derive_seed(7, {tag("n"), k}));
            ys.push_back(centers[k].dataset().sample_labels(8, lr2));
            us.push_back(sample_noise(4, 8, nr2));
        }
        GenLossGrads mono = digesting_gen_grads(node.gen, {&centers[0].disc(), &centers[1].disc()}, pi, ys, us, false);

        double gap = std::fabs(msg.value - mono.value);
        for (size_t i = 0; i < mono.grads.layers.size(); ++i) {
            gap = std::max(gap, max_abs_diff(msg.grads.layers[i].w, mono.grads.layers[i].w));
            gap = std::max(gap, max_abs_diff(msg.grads.layers[i].b, mono.grads.layers[i].b));
        }
        const bool transparent = gap <= 1e-12;

        // privacy audit across all shipped scenarios (protocol structure is
        // iteration-invariant, so short runs audit every message kind)
        bool audit = true;
        size_t audited = 0;
        for (const char* name : {"two_task_disjoint.scn", "two_task_multicenter.scn", "three_task_hetero.scn"}) {
            Scenario s = load_scenario_file(scenario_path(name));
            for (auto& t : s.tasks) t.iterations = 20;
            Transport trace(true);
            RunOptions ro;
            ro.transport = &trace;
            run_scenario(s, ro);
            for (const auto& e : trace.trace()) {
                if (e.to == Dest::Generator) {
                    ++audited;
                    audit = audit && (e.variant == 0 || e.variant == 2);
                }
            }
        }
        c.pass = transparent && audit && audited > 0;
        c.detail = "gradient gap " + fmt(gap) + " (<= 1e-12); " + std::to_string(audited) +
                   " generator-bound messages all LabelBatch/Feedback";
    });

    run_criterion(9, "determinism: byte-identical CSV across runs and threads", [&](Criterion& c) {
        const std::string cli = TDGAN_CLI_PATH;
        const std::string base = "/tmp/tdgan_acceptance_det";
        auto run_once = [&](const std::string& out, int threads) {
            std::string cmd = "TDGAN_THREADS=" + std::to_string(threads) + " " + cli + " --scenario " +
                              scenario_path("two_task_disjoint.scn") +
                              " --methods tdgan,finetune,joint,local --seeds 1,2 --iters-scale 0.01 --n-eval 64" +
                              " --out " + out;
            return std::system(cmd.c_str());
        };
        auto slurp = [](const std::string& path) {
            std::ifstream in(path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        const int r1 = run_once(base + "_1.csv", 1);
        const int r2 = run_once(base + "_2.csv", 1);
        const int r3 = run_once(base + "_3.csv", 4);
        const std::string c1 = slurp(base + "_1.csv"), c2 = slurp(base + "_2.csv"), c3 = slurp(base + "_3.csv");
        c.pass = r1 == 0 && r2 == 0 && r3 == 0 && !c1.empty() && c1 == c2 && c1 == c3;
        c.detail = "two runs + thread counts {1,4}: " + std::string(c.pass ? "identical" : "DIFFER");
        std::remove((base + "_1.csv").c_str());
        std::remove((base + "_2.csv").c_str());
        std::remove((base + "_3.csv").c_str());
    });

    run_criterion(10, "mixture bookkeeping property tests (1000 cases)", [](Criterion& c) {
        Rng rng(77001);
        bool ok = true;
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            const size_t vocab = 1 + rng.uniform_int(8);
            auto random_counts = [&]() {
                std::map<LabelId, uint64_t> m;
                for (size_t y = 0; y < vocab; ++y)
                    if (rng.uniform() < 0.5) m[y] = rng.uniform_int(40);
                uint64_t tot = 0;
                for (auto& [y, n] : m) tot += n;
                if (tot == 0) m[rng.uniform_int(vocab)] = 1 + rng.uniform_int(9);
                return m;
            };
            auto a = random_counts(), b = random_counts();
            uint64_t n_a = 0, n_b = 0;
            for (auto& [y, n] : a) n_a += n;
            for (auto& [y, n] : b) n_b += n;

            LabelStore s;
            s.merge(a);
            auto before = s.support();
            s.merge(b);
            // alpha formula
            const double alpha = static_cast<double>(n_b) / static_cast<double>(n_a + n_b);
            for (size_t y = 0; y < vocab; ++y) {
                const double s_old = static_cast<double>(a.count(y) ? a.at(y) : 0) / static_cast<double>(n_a);
                const double g_new = static_cast<double>(b.count(y) ? b.at(y) : 0) / static_cast<double>(n_b);
                ok = ok && std::fabs(s.probability(y) - ((1 - alpha) * s_old + alpha * g_new)) <= 1e-12;
            }
            // support monotone
            auto after = s.support();
            for (LabelId y : before) ok = ok && after.count(y) == 1;
            // pi normalization
            std::vector<uint64_t> sizes;
            const size_t k = 1 + rng.uniform_int(6);
            for (size_t i = 0; i < k; ++i) sizes.push_back(1 + rng.uniform_int(200));
            auto pi = mixture_weights(sizes);
            double sum = 0.0;
            for (double p : pi) sum += p;
            ok = ok && std::fabs(sum - 1.0) <= 1e-12;
        }
        c.pass = ok;
        c.detail = ok ? "alpha-formula, support monotonicity, pi normalization" : "property violated";
    });

    size_t passed = 0;
    for (const auto& r : g_results)
        if (r.pass) ++passed;
    std::printf("\n%zu/%zu criteria passed\n", passed, g_results.size());
    return passed == g_results.size() ? 0 : 1;
}
