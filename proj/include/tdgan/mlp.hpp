#pragma once

#include <functional>
#include <vector>

#include "tdgan/mat.hpp"
#include "tdgan/rng.hpp"

namespace tdgan {

enum class Act { Tanh, Relu, Linear, Sigmoid };

struct Layer {
    Mat w;  // out x in
    Mat b;  // out x 1
};

// Fully connected network. Hidden layers share one activation; the output
// layer has its own. Layer i's input width must equal layer i-1's output
// width; construction and forward both enforce it.
struct MlpParams {
    std::vector<Layer> layers;
    Act hidden = Act::Tanh;
    Act output = Act::Linear;

    size_t in_dim() const;
    size_t out_dim() const;
    size_t param_count() const;
    void validate() const;
};

// Gradients mirror the parameter shapes.
struct MlpGrads {
    std::vector<Layer> layers;

    static MlpGrads zeros_like(const MlpParams& p);
    MlpGrads& axpy(double s, const MlpGrads& o);
    MlpGrads& operator*=(double s);
    double max_abs() const;
};

struct ForwardCache {
    Mat input;
    std::vector<Mat> pre;   // z_l = W_l a_{l-1} + b_l
    std::vector<Mat> post;  // a_l = act(z_l)
};

// Glorot-uniform weights, zero biases. dims = [in, h1, ..., out].
MlpParams init_mlp(const std::vector<size_t>& dims, Act hidden, Act output, Rng& rng);

// output is out_dim x batch; cache feeds mlp_backward.
Mat mlp_forward(const MlpParams& params, const Mat& input, ForwardCache* cache = nullptr);

// Exact gradient of sum(output .* output_grad) w.r.t. parameters and input.
// cache must come from mlp_forward on the same params.
MlpGrads mlp_backward(const MlpParams& params, const ForwardCache& cache, const Mat& output_grad,
                      Mat* input_grad = nullptr);

// FNV-1a over the raw parameter bytes; used for bitwise trajectory comparisons.
uint64_t params_digest(const MlpParams& p);

}  // namespace tdgan
