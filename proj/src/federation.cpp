#include "tdgan/federation.hpp"


#include "tdgan/errors.hpp"

namespace tdgan {

void Transport::send_to_generator(Message m) {
    if (record_) trace_.push_back({Dest::Generator, m.index(), std::visit([](const auto& v) { return v.center_id; }, m)});
    generator_box_.push_back(std::move(m));
}

void Transport::send_to_center(Message m) {
    if (record_) trace_.push_back({Dest::Center, m.index(), std::visit([](const auto& v) { return v.center_id; }, m)});
    center_box_.push_back(std::move(m));
}

Message Transport::recv_at_generator() {
    if (generator_box_.empty()) throw ProtocolError("generator mailbox empty");
    Message m = std::move(generator_box_.front());
    generator_box_.pop_front();
    return m;
}

Message Transport::recv_at_center() {
    if (center_box_.empty()) throw ProtocolError("center mailbox empty");
    Message m = std::move(center_box_.front());
    center_box_.pop_front();
    return m;
}

void DiscriminatorNode::send_label_batch(Transport& tr, size_t m, Rng& rng) const {
    if (!online_) throw ProtocolError("offline center " + center_id() + " addressed");
    tr.send_to_generator(LabelBatch{center_id(), dataset_.sample_labels(m, rng)});
}

double DiscriminatorNode::update_from_fake_batch(Transport& tr, Rng& real_rng, double lr_scale) {
    if (!online_) throw ProtocolError("offline center " + center_id() + " addressed");
    Message msg = tr.recv_at_center();
    auto* fb = std::get_if<FakeBatch>(&msg);
    if (!fb || fb->center_id != center_id()) throw ProtocolError("center " + center_id() + " expected its FakeBatch");
    Mat real = dataset_.draw_real(fb->labels, real_rng);
    return disc_update(disc_, opt_, real, fb->labels, fb->fakes, fb->labels, lr_scale);
}

void DiscriminatorNode::send_feedback(Transport& tr, bool nonsaturating) const {
    if (!online_) throw ProtocolError("offline center " + center_id() + " addressed");
    Message msg = tr.recv_at_center();
    auto* fb = std::get_if<FakeBatch>(&msg);
    if (!fb || fb->center_id != center_id()) throw ProtocolError("center " + center_id() + " expected its FakeBatch");
    DigestFeedback out = digest_feedback(disc_, fb->fakes, fb->labels, nonsaturating);
    tr.send_to_generator(Feedback{center_id(), std::move(out.dloss_dfake), out.value});
}

void Scenario::validate() const {
    if (vocab == 0) throw ConfigError("scenario vocab_size must be >= 1");
    if (data_dim == 0) throw ConfigError("scenario data_dim must be >= 1");
    if (!truth) throw ConfigError("scenario has no ground-truth distribution");
    if (truth->dim() != data_dim) throw ConfigError("scenario data_dim does not match ground truth");
    if (tasks.empty()) throw ConfigError("scenario has no tasks");
    for (size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].centers.empty()) throw ConfigError("task " + std::to_string(t + 1) + " has no centers");
    }
    if (g_hidden.empty() || d_hidden.empty()) throw ConfigError("hidden layer lists must be nonempty");
    hyper.validate();
}

GanHyper Scenario::task_hyper(size_t task_index) const {
    const TaskSpec& task = tasks.at(task_index - 1);
    GanHyper h = hyper;
    if (task.lambda) h.lambda = *task.lambda;
    if (task.m) h.m = *task.m;
    if (task.n) h.n = *task.n;
    if (task.d_iters) h.d_iters = *task.d_iters;
    h.validate();
    return h;
}

Generator snapshot(const Generator& g) { return g; }

uint64_t scenario_run_root(const Scenario& s, uint64_t extra_seed) {
    return derive_seed(s.seed, {tag("run"), extra_seed});
}
uint64_t stream_g_init(uint64_t run_root) { return derive_seed(run_root, {tag("g_init")}); }
uint64_t stream_d_init(uint64_t run_root, size_t t, size_t k) { return derive_seed(run_root, {tag("d_init"), t, k}); }
uint64_t stream_labels(uint64_t run_root, size_t t, size_t k, size_t iter, size_t phase) {
    return derive_seed(run_root, {tag("labels"), t, k, iter, phase});
}
uint64_t stream_noise(uint64_t run_root, size_t t, size_t k, size_t iter, size_t phase) {
    return derive_seed(run_root, {tag("noise"), t, k, iter, phase});
}
uint64_t stream_real(uint64_t run_root, size_t t, size_t k, size_t iter, size_t pass) {
    return derive_seed(run_root, {tag("real"), t, k, iter, pass});
}
uint64_t stream_remind(uint64_t run_root, size_t t, size_t iter) {
    return derive_seed(run_root, {tag("remind"), t, iter});
}

GenLossGrads digest_exchange(GeneratorNode& gen_node, const std::vector<DiscriminatorNode*>& online,
                             const std::vector<double>& pi, size_t m, Transport& tr, std::vector<Rng>& label_rngs,
                             std::vector<Rng>& noise_rngs, bool nonsaturating) {
    if (online.empty()) throw StateError("digest exchange with no online centers");
    if (online.size() != pi.size()) throw ShapeError("digest exchange: pi size mismatch");

    GenLossGrads total;
    total.grads = MlpGrads::zeros_like(gen_node.gen.net);
    for (size_t k = 0; k < online.size(); ++k) {
        online[k]->send_label_batch(tr, m, label_rngs[k]);

        Message req = tr.recv_at_generator();
        auto* lb = std::get_if<LabelBatch>(&req);
        if (!lb) throw ProtocolError("generator expected a LabelBatch");
        Mat noise = sample_noise(gen_node.gen.noise_dim, lb->labels.size(), noise_rngs[k]);
        ForwardCache cache;
        Mat fakes = gen_forward(gen_node.gen, noise, lb->labels, &cache);
        tr.send_to_center(FakeBatch{lb->center_id, std::move(fakes), lb->labels});

        online[k]->send_feedback(tr, nonsaturating);

        Message resp = tr.recv_at_generator();
        auto* fb = std::get_if<Feedback>(&resp);
        if (!fb) throw ProtocolError("generator expected Feedback");
        if (fb->center_id != online[k]->center_id()) throw ProtocolError("feedback from unexpected center");
        total.value += pi[k] * fb->value;
        total.grads.axpy(1.0, apply_feedback(gen_node.gen, cache, fb->dloss_dfake, pi[k]));
    }
    return total;
}

void train_iteration(GeneratorNode& gen_node, std::vector<DiscriminatorNode>& centers, const std::vector<double>& pi,
                     const GanHyper& hyper, size_t t, uint64_t run_root, size_t iter, size_t total_iters,
                     Transport& tr) {
    if (centers.empty()) throw ProtocolError("train_iteration with no centers");
    const double lr_scale = lr_schedule_scale(hyper.lr_schedule, iter, total_iters);
    const double d_lr_scale = lr_schedule_scale(hyper.d_lr_schedule.value_or(hyper.lr_schedule), iter, total_iters);

    // Update online discriminators.
    for (size_t pass = 0; pass < hyper.d_iters; ++pass) {
        for (size_t k = 0; k < centers.size(); ++k) {
            Rng label_rng(stream_labels(run_root, t, k, iter, pass));
            Rng noise_rng(stream_noise(run_root, t, k, iter, pass));
            Rng real_rng(stream_real(run_root, t, k, iter, pass));

            centers[k].send_label_batch(tr, hyper.m, label_rng);
            Message req = tr.recv_at_generator();
            auto* lb = std::get_if<LabelBatch>(&req);
            if (!lb) throw ProtocolError("generator expected a LabelBatch");
            Mat noise = sample_noise(gen_node.gen.noise_dim, lb->labels.size(), noise_rng);
            Mat fakes = gen_forward(gen_node.gen, noise, lb->labels);
            tr.send_to_center(FakeBatch{lb->center_id, std::move(fakes), lb->labels});
            centers[k].update_from_fake_batch(tr, real_rng, d_lr_scale);
        }
    }

    // Digesting gradient, assembled from per-center feedback. Phase tag
    // d_iters keeps these streams distinct from every discriminator pass.
    std::vector<DiscriminatorNode*> online;
    std::vector<Rng> label_rngs, noise_rngs;
    for (size_t k = 0; k < centers.size(); ++k) {
        online.push_back(&centers[k]);
        label_rngs.emplace_back(stream_labels(run_root, t, k, iter, hyper.d_iters));
        noise_rngs.emplace_back(stream_noise(run_root, t, k, iter, hyper.d_iters));
    }
    GenLossGrads digesting = digest_exchange(gen_node, online, pi, hyper.m, tr, label_rngs, noise_rngs,
                                             hyper.nonsaturating);

    // Reminding gradient if t > 1. Skipped at lambda = 0 (its stream is
    // private, so skipping cannot shift any other draw).
    std::optional<MlpGrads> reminding;
    if (t > 1 && hyper.lambda != 0.0) {
        if (!gen_node.frozen) throw StateError("t > 1 requires a frozen generator");
        Rng remind_rng(stream_remind(run_root, t, iter));
        std::vector<LabelId> labels = gen_node.store.sample(hyper.n, remind_rng);
        Mat noise = sample_noise(gen_node.gen.noise_dim, hyper.n, remind_rng);
        GenLossGrads rem = reminding_loss_and_grads(gen_node.gen, *gen_node.frozen, labels, noise);
        reminding = std::move(rem.grads);
    }

    generator_update(gen_node.gen, gen_node.opt, digesting.grads, reminding, hyper.lambda, lr_scale);
}

void run_task(GeneratorNode& gen_node, std::vector<DiscriminatorNode>& centers, size_t t, const GanHyper& hyper,
              size_t iterations, uint64_t run_root, Transport& tr, const IterationHook& hook) {
    if (centers.empty()) throw ProtocolError("run_task with no centers");
    if (t > 1 && !gen_node.frozen) throw StateError("run_task at t > 1 without a frozen generator");
    for (const auto& c : centers)
        if (!c.online()) throw ProtocolError("run_task: center " + c.center_id() + " is offline");

    std::vector<uint64_t> sizes;
    for (const auto& c : centers) sizes.push_back(c.dataset().size());
    const std::vector<double> pi = mixture_weights(sizes);

    for (size_t iter = 0; iter < iterations; ++iter) {
        train_iteration(gen_node, centers, pi, hyper, t, run_root, iter, iterations, tr);
        if (hook) hook(t, iter, gen_node);
    }

    std::map<LabelId, uint64_t> task_counts;
    for (const auto& c : centers)
        for (const auto& [y, n] : c.dataset().label_counts()) task_counts[y] += n;
    gen_node.store.merge(task_counts);
    gen_node.frozen = snapshot(gen_node.gen);
}

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opts) {
    s.validate();
    const uint64_t run_root = scenario_run_root(s, opts.extra_seed);

    Transport local_transport;
    Transport& tr = opts.transport ? *opts.transport : local_transport;

    ScenarioResult result;
    {
        Rng init_rng(stream_g_init(run_root));
        result.node.gen = make_generator(s.data_dim, s.vocab, s.hyper.noise_dim, s.g_hidden, init_rng);
        result.node.opt = AdamState::init(result.node.gen.net, s.hyper.g_adam);
    }

    for (size_t t = 1; t <= s.tasks.size(); ++t) {
        GanHyper hyper = s.task_hyper(t);
        if (opts.lambda_override) hyper.lambda = *opts.lambda_override;

        std::vector<DiscriminatorNode> centers;
        centers.reserve(s.tasks[t - 1].centers.size());
        for (size_t k = 0; k < s.tasks[t - 1].centers.size(); ++k) {
            Rng d_rng(stream_d_init(run_root, t, k));
            Discriminator d = make_discriminator(s.data_dim, s.vocab, s.d_hidden, d_rng);
            AdamState d_opt = AdamState::init(d.net, hyper.d_adam);
            centers.emplace_back(s.tasks[t - 1].centers[k], std::move(d), std::move(d_opt));
        }

        run_task(result.node, centers, t, hyper, s.tasks[t - 1].iterations, run_root, tr, opts.iteration_hook);
        result.task_snapshots.push_back(snapshot(result.node.gen));
        result.task_supports.push_back(result.node.store.support());
    }
    return result;
}

}  // namespace tdgan
