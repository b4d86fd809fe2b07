#include "tdgan/adam.hpp"

#include <cmath>

#include "tdgan/errors.hpp"

namespace tdgan {

void AdamHyper::validate() const {
    if (!(lr > 0.0)) throw ConfigError("adam lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam beta1 must be in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam beta2 must be in [0,1)");
    if (!(eps > 0.0)) throw ConfigError("adam eps must be > 0");
}

AdamState AdamState::init(const MlpParams& params, const AdamHyper& h) {
    h.validate();
    AdamState s;
    s.m = MlpGrads::zeros_like(params);
    s.v = MlpGrads::zeros_like(params);
    s.step_count = 0;
    s.hyper = h;
    return s;
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, double lr_scale) {
    if (grads.layers.size() != params.layers.size()) throw ShapeError("adam_step: grads/params layer mismatch");
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double b1 = state.hyper.beta1, b2 = state.hyper.beta2;
    const double corr1 = 1.0 - std::pow(b1, t);
    const double corr2 = 1.0 - std::pow(b2, t);
    const double lr = state.hyper.lr * lr_scale;

    for (size_t i = 0; i < params.layers.size(); ++i) {
        auto update = [&](Mat& theta, Mat& m, Mat& v, const Mat& g) {
            if (!theta.same_shape(g)) throw ShapeError("adam_step: gradient shape mismatch");
            for (size_t j = 0; j < theta.size(); ++j) {
                const double gj = g.data()[j];
                double& mj = m.data()[j];
                double& vj = v.data()[j];
                mj = b1 * mj + (1.0 - b1) * gj;
                vj = b2 * vj + (1.0 - b2) * gj * gj;
                const double mhat = mj / corr1;
                const double vhat = vj / corr2;
                theta.data()[j] -= lr * mhat / (std::sqrt(vhat) + state.hyper.eps);
            }
        };
        update(params.layers[i].w, state.m.layers[i].w, state.v.layers[i].w, grads.layers[i].w);
        update(params.layers[i].b, state.m.layers[i].b, state.v.layers[i].b, grads.layers[i].b);
        params.layers[i].w.check_finite("adam_step");
        params.layers[i].b.check_finite("adam_step");
    }
}

}  // namespace tdgan
