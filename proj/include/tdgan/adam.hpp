#pragma once

#include "tdgan/mlp.hpp"

namespace tdgan {

struct AdamHyper {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

// Bias-corrected Adam moments, shapes mirroring the parameters they drive.
struct AdamState {
    MlpGrads m;
    MlpGrads v;
    uint64_t step_count = 0;
    AdamHyper hyper;

    static AdamState init(const MlpParams& params, const AdamHyper& hyper);
};

// One descent step: params -= lr_scale*lr * mhat / (sqrt(vhat) + eps).
// lr_scale implements per-step learning-rate schedules.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, double lr_scale = 1.0);

}  // namespace tdgan
