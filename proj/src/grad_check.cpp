#include "tdgan/grad_check.hpp"

#include <cmath>

#include "tdgan/errors.hpp"

namespace tdgan {

double grad_check(const std::function<double(const MlpParams&)>& loss, const MlpParams& at, const MlpGrads& analytic,
                  double eps) {
    if (!(eps > 0.0)) throw ConfigError("grad_check eps must be > 0");
    if (analytic.layers.size() != at.layers.size()) throw ShapeError("grad_check: analytic grads do not match params");

    MlpParams probe = at;
    double worst = 0.0;
    auto sweep = [&](Mat& theta, const Mat& g) {
        for (size_t j = 0; j < theta.size(); ++j) {
            const double saved = theta.data()[j];
            theta.data()[j] = saved + eps;
            const double up = loss(probe);
            theta.data()[j] = saved - eps;
            const double down = loss(probe);
            theta.data()[j] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) throw NumericError("grad_check: non-finite loss");
            const double fd = (up - down) / (2.0 * eps);
            const double an = g.data()[j];
            const double rel = std::fabs(an - fd) / std::max({1.0, std::fabs(an), std::fabs(fd)});
            worst = std::max(worst, rel);
        }
    };
    for (size_t i = 0; i < probe.layers.size(); ++i) {
        sweep(probe.layers[i].w, analytic.layers[i].w);
        sweep(probe.layers[i].b, analytic.layers[i].b);
    }
    return worst;
}

}  // namespace tdgan
