#include "tdgan/gancore.hpp"

#include <cmath>
#include <string>

#include "tdgan/errors.hpp"

namespace tdgan {

namespace {

double log_clamped(double p) { return std::log(std::min(std::max(p, kProbFloor), 1.0 - kProbFloor)); }

// d log(clamp(p)) / dp: zero on the clamped flats.
double dlog_clamped(double p) {
    if (p <= kProbFloor || p >= 1.0 - kProbFloor) return 0.0;
    return 1.0 / p;
}

// Stack a one-hot label block under the payload rows.
Mat with_onehot(const Mat& payload, const std::vector<LabelId>& labels, size_t vocab) {
    if (payload.cols() != labels.size()) throw ShapeError("label count does not match batch");
    Mat input(payload.rows() + vocab, payload.cols());
    for (size_t i = 0; i < payload.rows(); ++i)
        for (size_t j = 0; j < payload.cols(); ++j) input(i, j) = payload(i, j);
    for (size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] >= vocab) throw DomainError("label " + std::to_string(labels[j]) + " outside vocabulary");
        input(payload.rows() + labels[j], j) = 1.0;
    }
    return input;
}

Mat top_rows(const Mat& m, size_t rows) {
    Mat out(rows, m.cols());
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

}  // namespace

void Generator::validate() const {
    net.validate();
    if (net.in_dim() != noise_dim + vocab) throw ShapeError("generator input width != noise_dim + vocab");
    if (net.output != Act::Linear) throw ConfigError("generator output activation must be linear");
}

void Discriminator::validate() const {
    net.validate();
    if (net.out_dim() != 1) throw ShapeError("discriminator must have a single output");
    if (net.in_dim() <= vocab) throw ShapeError("discriminator input width must exceed vocab");
    if (net.output != Act::Sigmoid) throw ConfigError("discriminator output activation must be sigmoid");
}

void GanHyper::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (m < 1 || n < 1) throw ConfigError("batch sizes m, n must be >= 1");
    if (d_iters < 1) throw ConfigError("d_iters must be >= 1");
    if (noise_dim < 1) throw ConfigError("noise_dim must be >= 1");
    g_adam.validate();
    d_adam.validate();
}

double lr_schedule_scale(LrSchedule s, size_t iter, size_t total) {
    if (s == LrSchedule::Constant || total == 0) return 1.0;
    if (s == LrSchedule::Linear) return static_cast<double>(total - iter) / static_cast<double>(total);
    const size_t half = total / 2;
    if (iter < half) return 1.0;
    return static_cast<double>(total - iter) / static_cast<double>(total - half);
}

Generator make_generator(size_t data_dim, size_t vocab, size_t noise_dim, const std::vector<size_t>& hidden,
                         Rng& rng) {
    std::vector<size_t> dims;
    dims.push_back(noise_dim + vocab);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(data_dim);
    Generator g;
    g.net = init_mlp(dims, Act::Tanh, Act::Linear, rng);
    g.noise_dim = noise_dim;
    g.vocab = vocab;
    return g;
}

Discriminator make_discriminator(size_t data_dim, size_t vocab, const std::vector<size_t>& hidden, Rng& rng) {
    std::vector<size_t> dims;
    dims.push_back(data_dim + vocab);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    Discriminator d;
    d.net = init_mlp(dims, Act::Relu, Act::Sigmoid, rng);
    d.vocab = vocab;
    return d;
}

Mat sample_noise(size_t noise_dim, size_t batch, Rng& rng) {
    Mat u(noise_dim, batch);
    for (size_t i = 0; i < u.size(); ++i) u.data()[i] = rng.uniform();
    return u;
}

Mat gen_forward(const Generator& g, const Mat& noise, const std::vector<LabelId>& labels, ForwardCache* cache) {
    if (noise.rows() != g.noise_dim) throw ShapeError("gen_forward: noise rows != noise_dim");
    for (double v : noise.values())
        if (v < 0.0 || v > 1.0) throw DomainError("gen_forward: noise entries must lie in [0,1]");
    return mlp_forward(g.net, with_onehot(noise, labels, g.vocab), cache);
}

Mat disc_forward(const Discriminator& d, const Mat& x, const std::vector<LabelId>& labels, ForwardCache* cache) {
    if (x.rows() != d.data_dim()) throw ShapeError("disc_forward: data rows != discriminator data dim");
    return mlp_forward(d.net, with_onehot(x, labels, d.vocab), cache);
}

DiscLossGrads disc_loss_and_grads(const Discriminator& d, const Mat& real_x, const std::vector<LabelId>& real_y,
                                  const Mat& fake_x, const std::vector<LabelId>& fake_y) {
    if (real_x.cols() != fake_x.cols()) throw ShapeError("disc_loss_and_grads: real/fake batch sizes differ");
    const size_t m = real_x.cols();
    const double inv_m = 1.0 / static_cast<double>(m);

    ForwardCache real_cache, fake_cache;
    Mat p_real = disc_forward(d, real_x, real_y, &real_cache);
    Mat p_fake = disc_forward(d, fake_x, fake_y, &fake_cache);

    double objective = 0.0;
    Mat g_real(1, m), g_fake(1, m);
    for (size_t j = 0; j < m; ++j) {
        const double pr = p_real(0, j);
        const double pf = p_fake(0, j);
        objective += inv_m * (log_clamped(pr) + log_clamped(1.0 - pf));
        // gradient of the minimized loss (-objective)
        g_real(0, j) = -inv_m * dlog_clamped(pr);
        g_fake(0, j) = inv_m * dlog_clamped(1.0 - pf);
    }

    DiscLossGrads out;
    out.objective = objective;
    out.grads = mlp_backward(d.net, real_cache, g_real);
    out.grads.axpy(1.0, mlp_backward(d.net, fake_cache, g_fake));
    return out;
}

double disc_update(Discriminator& d, AdamState& opt, const Mat& real_x, const std::vector<LabelId>& real_y,
                   const Mat& fake_x, const std::vector<LabelId>& fake_y, double lr_scale) {
    DiscLossGrads lg = disc_loss_and_grads(d, real_x, real_y, fake_x, fake_y);
    adam_step(d.net, lg.grads, opt, lr_scale);
    return lg.objective;
}

DigestFeedback digest_feedback(const Discriminator& d, const Mat& fake_x, const std::vector<LabelId>& fake_y,
                               bool nonsaturating) {
    const size_t m = fake_x.cols();
    const double inv_m = 1.0 / static_cast<double>(m);

    ForwardCache cache;
    Mat p = disc_forward(d, fake_x, fake_y, &cache);

    double value = 0.0;
    Mat output_grad(1, m);
    for (size_t j = 0; j < m; ++j) {
        const double pj = p(0, j);
        if (nonsaturating) {
            value += -inv_m * log_clamped(pj);
            output_grad(0, j) = -inv_m * dlog_clamped(pj);
        } else {
            value += inv_m * log_clamped(1.0 - pj);
            output_grad(0, j) = -inv_m * dlog_clamped(1.0 - pj);
        }
    }

    Mat input_grad;
    mlp_backward(d.net, cache, output_grad, &input_grad);

    DigestFeedback fb;
    fb.value = value;
    fb.dloss_dfake = top_rows(input_grad, d.data_dim());
    return fb;
}

MlpGrads apply_feedback(const Generator& g, const ForwardCache& cache, const Mat& dloss_dfake, double scale) {
    if (cache.post.empty() || !dloss_dfake.same_shape(cache.post.back()))
        throw ProtocolError("feedback shape does not match the fake batch it answers");
    Mat scaled = dloss_dfake;
    scaled *= scale;
    return mlp_backward(g.net, cache, scaled);
}

GenLossGrads digesting_gen_grads(const Generator& g, const std::vector<const Discriminator*>& online,
                                 const std::vector<double>& pi, const std::vector<std::vector<LabelId>>& label_batches,
                                 const std::vector<Mat>& noise_batches, bool nonsaturating) {
    if (online.empty()) throw StateError("digesting: no online discriminators");
    if (online.size() != pi.size() || online.size() != label_batches.size() || online.size() != noise_batches.size())
        throw ShapeError("digesting: per-center argument lists disagree");

    GenLossGrads out;
    out.grads = MlpGrads::zeros_like(g.net);
    for (size_t k = 0; k < online.size(); ++k) {
        ForwardCache cache;
        Mat fake = gen_forward(g, noise_batches[k], label_batches[k], &cache);
        DigestFeedback fb = digest_feedback(*online[k], fake, label_batches[k], nonsaturating);
        out.value += pi[k] * fb.value;
        out.grads.axpy(1.0, apply_feedback(g, cache, fb.dloss_dfake, pi[k]));
    }
    return out;
}

GenLossGrads reminding_loss_and_grads(const Generator& current, const Generator& frozen,
                                      const std::vector<LabelId>& labels, const Mat& noise) {
    if (labels.empty()) throw ConfigError("reminding: empty batch");
    const size_t n = labels.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    ForwardCache cache;
    Mat x_now = gen_forward(current, noise, labels, &cache);
    Mat x_old = gen_forward(frozen, noise, labels);
    if (!x_now.same_shape(x_old)) throw ShapeError("reminding: generators disagree on output shape");

    GenLossGrads out;
    Mat diff = x_now - x_old;
    for (double v : diff.values()) out.value += inv_n * v * v;
    diff *= 2.0 * inv_n;
    out.grads = mlp_backward(current.net, cache, diff);
    return out;
}

void generator_update(Generator& g, AdamState& opt, const MlpGrads& digesting,
                      const std::optional<MlpGrads>& reminding, double lambda, double lr_scale) {
    if (lambda != 0.0 && reminding.has_value()) {
        MlpGrads combined = digesting;
        combined.axpy(lambda, *reminding);
        adam_step(g.net, combined, opt, lr_scale);
    } else {
        adam_step(g.net, digesting, opt, lr_scale);
    }
}

double optimal_disc_value(double p_density, double q_density) {
    if (p_density < 0.0 || q_density < 0.0) throw DomainError("optimal_disc_value: negative density");
    const double total = p_density + q_density;
    if (total == 0.0) throw DomainError("optimal_disc_value: both densities zero");
    return p_density / total;
}

}  // namespace tdgan
