#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tdgan/gancore.hpp"

namespace tdgan {

// Wire messages of the training protocol. Field order is part of the
// contract so a serialized codec can be added without renegotiation. No
// variant carries real data x; the generator only ever sees labels and
// loss gradients.
struct LabelBatch {
    std::string center_id;
    std::vector<LabelId> labels;
};

struct FakeBatch {
    std::string center_id;
    Mat fakes;  // dim x m
    std::vector<LabelId> labels;
};

struct Feedback {
    std::string center_id;
    Mat dloss_dfake;  // dim x m, per-sample d[(1/m) sum log(1-D(x_hat))]/d x_hat
    double value = 0.0;
};

using Message = std::variant<LabelBatch, FakeBatch, Feedback>;

enum class Dest { Generator, Center };

struct TraceEntry {
    Dest to;
    size_t variant;  // index into Message: 0 LabelBatch, 1 FakeBatch, 2 Feedback
    std::string center_id;
};

// Synchronous in-process mailbox pair. All payloads between the generator
// node and center nodes pass through here, so a recorded trace is a complete
// audit of what crossed the boundary.
class Transport {
public:
    explicit Transport(bool record_trace = false) : record_(record_trace) {}

    void send_to_generator(Message m);
    void send_to_center(Message m);
    Message recv_at_generator();
    Message recv_at_center();

    const std::vector<TraceEntry>& trace() const { return trace_; }
    void clear_trace() { trace_.clear(); }

private:
    std::deque<Message> generator_box_;
    std::deque<Message> center_box_;
    std::vector<TraceEntry> trace_;
    bool record_;
};

// A temporary discriminator hosted at one data center. Created fresh each
// task; real samples never leave its methods.
class DiscriminatorNode {
public:
    DiscriminatorNode(CenterDataset dataset, Discriminator disc, AdamState opt)
        : dataset_(std::move(dataset)), disc_(std::move(disc)), opt_(std::move(opt)) {}

    const std::string& center_id() const { return dataset_.center_id(); }
    const CenterDataset& dataset() const { return dataset_; }
    const Discriminator& disc() const { return disc_; }
    bool online() const { return online_; }
    void set_online(bool v) { online_ = v; }

    // Phase openers: sample m labels from g_t^k and post them to the generator.
    void send_label_batch(Transport& tr, size_t m, Rng& rng) const;

    // Phase 1 closer: consume a FakeBatch, pair it with private real samples
    // drawn for the same labels, take one discriminator ascent step.
    double update_from_fake_batch(Transport& tr, Rng& real_rng, double lr_scale);

    // Phase 2 closer: consume a FakeBatch and answer with Feedback.
    void send_feedback(Transport& tr, bool nonsaturating) const;

private:
    CenterDataset dataset_;
    Discriminator disc_;
    AdamState opt_;
    bool online_ = true;
};

// The central node: current generator, previous-task snapshot, and the
// empirical label record s_{t-1}.
struct GeneratorNode {
    Generator gen;
    std::optional<Generator> frozen;  // absent iff t = 1
    LabelStore store;
    AdamState opt;
};

struct TaskSpec {
    std::vector<CenterDataset> centers;
    size_t iterations = 0;
    // Per-task overrides of the global hyperparameters.
    std::optional<double> lambda;
    std::optional<size_t> m;
    std::optional<size_t> n;
    std::optional<size_t> d_iters;
};

struct Scenario {
    size_t vocab = 0;
    size_t data_dim = 0;
    std::shared_ptr<const CondGaussianMixture> truth;
    std::vector<TaskSpec> tasks;
    GanHyper hyper;
    uint64_t seed = 1;
    std::vector<size_t> g_hidden{64, 64};
    std::vector<size_t> d_hidden{64, 64};

    void validate() const;
    GanHyper task_hyper(size_t task_index) const;  // 1-based
};

// Deep, immutable copy of the generator; later updates to the original do
// not affect it.
Generator snapshot(const Generator& g);

// Phase-2 digesting exchange through the transport: per center, a LabelBatch
// arrives at the generator, fakes travel back, Feedback returns, and the
// generator assembles the pi-weighted gradient in center-index order.
GenLossGrads digest_exchange(GeneratorNode& gen_node, const std::vector<DiscriminatorNode*>& online,
                             const std::vector<double>& pi, size_t m, Transport& tr,
                             std::vector<Rng>& label_rngs, std::vector<Rng>& noise_rngs, bool nonsaturating);

// One Algorithm-1 iteration at step t: d_iters discriminator passes, the
// digesting exchange, the reminding gradient when t > 1, one generator step.
void train_iteration(GeneratorNode& gen_node, std::vector<DiscriminatorNode>& centers, const std::vector<double>& pi,
                     const GanHyper& hyper, size_t t, uint64_t run_root, size_t iter, size_t total_iters,
                     Transport& tr);

// Optional observation hook, called after every training iteration.
using IterationHook = std::function<void(size_t task, size_t iter, const GeneratorNode&)>;

// Runs one task: `iterations` train_iteration passes, then merges the task's
// label counts into the store and refreshes the frozen snapshot.
void run_task(GeneratorNode& gen_node, std::vector<DiscriminatorNode>& centers, size_t t, const GanHyper& hyper,
              size_t iterations, uint64_t run_root, Transport& tr, const IterationHook& hook = nullptr);

struct RunOptions {
    uint64_t extra_seed = 0;                  // mixed with the scenario seed
    std::optional<double> lambda_override;    // forces lambda (fine-tuning uses 0)
    IterationHook iteration_hook;
    Transport* transport = nullptr;           // external transport, e.g. for audits
};

struct ScenarioResult {
    GeneratorNode node;
    std::vector<Generator> task_snapshots;           // generator after each task
    std::vector<std::set<LabelId>> task_supports;    // Omega_t after each task
};

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opts = {});

// Stream-seed derivations used by the protocol; exposed so tests can replay
// the exact batches a run consumed.
uint64_t scenario_run_root(const Scenario& s, uint64_t extra_seed);
uint64_t stream_g_init(uint64_t run_root);
uint64_t stream_d_init(uint64_t run_root, size_t t, size_t k);
uint64_t stream_labels(uint64_t run_root, size_t t, size_t k, size_t iter, size_t phase);
uint64_t stream_noise(uint64_t run_root, size_t t, size_t k, size_t iter, size_t phase);
uint64_t stream_real(uint64_t run_root, size_t t, size_t k, size_t iter, size_t pass);
uint64_t stream_remind(uint64_t run_root, size_t t, size_t iter);

}  // namespace tdgan
