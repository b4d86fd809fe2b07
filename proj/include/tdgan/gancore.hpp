#pragma once

#include <optional>
#include <vector>

#include "tdgan/adam.hpp"
#include "tdgan/datamodel.hpp"
#include "tdgan/mlp.hpp"

namespace tdgan {

// Sigmoid outputs are clamped to [kProbFloor, 1-kProbFloor] before any log,
// so loss values stay finite even when a discriminator saturates.
inline constexpr double kProbFloor = 1e-12;

// Conditional generator G(u, y): input is d_u uniform noise rows stacked on a
// one-hot label block, output is a data-space point (linear output layer).
struct Generator {
    MlpParams net;
    size_t noise_dim = 0;
    size_t vocab = 0;

    size_t data_dim() const { return net.out_dim(); }
    void validate() const;
};

// Conditional discriminator D(x, y): data rows stacked on a one-hot label
// block, single sigmoid output.
struct Discriminator {
    MlpParams net;
    size_t vocab = 0;

    size_t data_dim() const { return net.in_dim() - vocab; }
    void validate() const;
};

enum class LrSchedule { Constant, LinearHalf, Linear };

struct GanHyper {
    double lambda = 1.0;   // reminding weight
    size_t m = 64;         // per-center batch
    size_t n = 64;         // reminding batch
    size_t d_iters = 1;    // discriminator passes per generator step
    AdamHyper g_adam;
    AdamHyper d_adam;
    size_t noise_dim = 4;
    bool nonsaturating = false;  // -log D(x_hat) generator gradient instead of log(1-D)
    LrSchedule lr_schedule = LrSchedule::Constant;
    // Discriminators follow lr_schedule unless this is set; keeping them at
    // constant lr leaves a sharp critic while the generator anneals.
    std::optional<LrSchedule> d_lr_schedule;

    void validate() const;
};

// lr multiplier at `iter` of `total` under a schedule: constant 1, flat for
// the first half then linearly decayed, or linearly decayed from the start.
double lr_schedule_scale(LrSchedule s, size_t iter, size_t total);

Generator make_generator(size_t data_dim, size_t vocab, size_t noise_dim, const std::vector<size_t>& hidden, Rng& rng);
Discriminator make_discriminator(size_t data_dim, size_t vocab, const std::vector<size_t>& hidden, Rng& rng);

// d_u x batch matrix of uniform(0,1) noise.
Mat sample_noise(size_t noise_dim, size_t batch, Rng& rng);

Mat gen_forward(const Generator& g, const Mat& noise, const std::vector<LabelId>& labels,
                ForwardCache* cache = nullptr);
// 1 x batch raw sigmoid outputs.
Mat disc_forward(const Discriminator& d, const Mat& x, const std::vector<LabelId>& labels,
                 ForwardCache* cache = nullptr);

struct DiscLossGrads {
    double objective = 0.0;  // (1/m) sum[log D(x) + log(1-D(x_hat))], the quantity ascended
    MlpGrads grads;          // gradient of -objective (feed to Adam for descent)
};

DiscLossGrads disc_loss_and_grads(const Discriminator& d, const Mat& real_x, const std::vector<LabelId>& real_y,
                                  const Mat& fake_x, const std::vector<LabelId>& fake_y);

// One ascent step on the discriminator objective; returns the objective value
// measured before the step.
double disc_update(Discriminator& d, AdamState& opt, const Mat& real_x, const std::vector<LabelId>& real_y,
                   const Mat& fake_x, const std::vector<LabelId>& fake_y, double lr_scale = 1.0);

// What a center returns to the generator for one fake batch: the per-sample
// gradient of its digesting term w.r.t. the fakes, plus the term's value.
// value = (1/m) sum_i log(1-D(x_hat_i, y_i))   (minimax form)
//       = -(1/m) sum_i log D(x_hat_i, y_i)     (non-saturating form)
struct DigestFeedback {
    Mat dloss_dfake;  // dim x m
    double value = 0.0;
};

DigestFeedback digest_feedback(const Discriminator& d, const Mat& fake_x, const std::vector<LabelId>& fake_y,
                               bool nonsaturating = false);

struct GenLossGrads {
    double value = 0.0;
    MlpGrads grads;
};

// Monolithic digesting pass: value = sum_k pi_k (1/m) sum_i log(1-D_k(G(u,y),y))
// and its exact generator gradient, accumulated in center-index order.
GenLossGrads digesting_gen_grads(const Generator& g, const std::vector<const Discriminator*>& online,
                                 const std::vector<double>& pi, const std::vector<std::vector<LabelId>>& label_batches,
                                 const std::vector<Mat>& noise_batches, bool nonsaturating = false);

// Backprop a feedback gradient through the generator cache of the batch that
// produced it. Scale folds in the center's mixture weight.
MlpGrads apply_feedback(const Generator& g, const ForwardCache& cache, const Mat& dloss_dfake, double scale);

// value = (1/n) sum_i ||G_t(u_i,y_i) - G_frozen(u_i,y_i)||^2, exact grads
// w.r.t. G_t only; both generators see the same noise columns.
GenLossGrads reminding_loss_and_grads(const Generator& current, const Generator& frozen,
                                      const std::vector<LabelId>& labels, const Mat& noise);

// One Adam descent step on g_digest + lambda * g_remind. The reminding term
// is skipped entirely when absent or when lambda == 0, so a lambda=0 run is
// bit-identical to a digesting-only run.
void generator_update(Generator& g, AdamState& opt, const MlpGrads& digesting,
                      const std::optional<MlpGrads>& reminding, double lambda, double lr_scale = 1.0);

// Closed-form optimum p/(p+q) of the per-point discriminator objective.
double optimal_disc_value(double p_density, double q_density);

}  // namespace tdgan
