#pragma once

#include <functional>

#include "tdgan/mlp.hpp"

namespace tdgan {

// Central-finite-difference verification of an analytic gradient.
//
// loss must be a deterministic function of the parameters (fix all batches
// and noise before calling). analytic is the implementation's gradient at
// `at`. Returns max over all parameter coordinates of
//     |analytic - fd| / max(1, |analytic|, |fd|).
double grad_check(const std::function<double(const MlpParams&)>& loss, const MlpParams& at,
                  const MlpGrads& analytic, double eps = 1e-5);

}  // namespace tdgan
