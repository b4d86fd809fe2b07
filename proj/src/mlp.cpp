#include "tdgan/mlp.hpp"

#include <cmath>
#include <cstring>

#include "tdgan/errors.hpp"

namespace tdgan {

namespace {

Mat apply_act(const Mat& z, Act act) {
    Mat a = z;
    switch (act) {
        case Act::Linear:
            break;
        case Act::Tanh:
            for (size_t i = 0; i < a.size(); ++i) a.data()[i] = std::tanh(a.data()[i]);
            break;
        case Act::Relu:
            for (size_t i = 0; i < a.size(); ++i) a.data()[i] = a.data()[i] > 0.0 ? a.data()[i] : 0.0;
            break;
        case Act::Sigmoid:
            for (size_t i = 0; i < a.size(); ++i) a.data()[i] = 1.0 / (1.0 + std::exp(-a.data()[i]));
            break;
    }
    return a;
}

// d act(z) / dz expressed through z and a = act(z)
Mat act_deriv(const Mat& z, const Mat& a, Act act) {
    Mat d(z.rows(), z.cols(), 1.0);
    switch (act) {
        case Act::Linear:
            break;
        case Act::Tanh:
            for (size_t i = 0; i < d.size(); ++i) d.data()[i] = 1.0 - a.data()[i] * a.data()[i];
            break;
        case Act::Relu:
            for (size_t i = 0; i < d.size(); ++i) d.data()[i] = z.data()[i] > 0.0 ? 1.0 : 0.0;
            break;
        case Act::Sigmoid:
            for (size_t i = 0; i < d.size(); ++i) d.data()[i] = a.data()[i] * (1.0 - a.data()[i]);
            break;
    }
    return d;
}

}  // namespace

size_t MlpParams::in_dim() const {
    if (layers.empty()) throw ConfigError("MlpParams has no layers");
    return layers.front().w.cols();
}

size_t MlpParams::out_dim() const {
    if (layers.empty()) throw ConfigError("MlpParams has no layers");
    return layers.back().w.rows();
}

size_t MlpParams::param_count() const {
    size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

void MlpParams::validate() const {
    if (layers.empty()) throw ConfigError("MlpParams has no layers");
    for (size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.b.rows() != l.w.rows() || l.b.cols() != 1) throw ShapeError("bias shape mismatch in layer " + std::to_string(i));
        if (i > 0 && l.w.cols() != layers[i - 1].w.rows())
            throw ShapeError("layer " + std::to_string(i) + " input width does not chain");
    }
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
    MlpGrads g;
    g.layers.reserve(p.layers.size());
    for (const auto& l : p.layers) g.layers.push_back({Mat::zeros(l.w.rows(), l.w.cols()), Mat::zeros(l.b.rows(), 1)});
    return g;
}

MlpGrads& MlpGrads::axpy(double s, const MlpGrads& o) {
    if (layers.size() != o.layers.size()) throw ShapeError("grads axpy: layer count mismatch");
    for (size_t i = 0; i < layers.size(); ++i) {
        layers[i].w.axpy(s, o.layers[i].w);
        layers[i].b.axpy(s, o.layers[i].b);
    }
    return *this;
}

MlpGrads& MlpGrads::operator*=(double s) {
    for (auto& l : layers) {
        l.w *= s;
        l.b *= s;
    }
    return *this;
}

double MlpGrads::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        for (double v : l.w.values()) m = std::max(m, std::fabs(v));
        for (double v : l.b.values()) m = std::max(m, std::fabs(v));
    }
    return m;
}

MlpParams init_mlp(const std::vector<size_t>& dims, Act hidden, Act output, Rng& rng) {
    if (dims.size() < 2) throw ConfigError("init_mlp needs at least [in, out] dims");
    MlpParams p;
    p.hidden = hidden;
    p.output = output;
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        const size_t in = dims[i], out = dims[i + 1];
        if (in == 0 || out == 0) throw ConfigError("init_mlp: zero layer width");
        Mat w(out, in);
        const double s = std::sqrt(6.0 / static_cast<double>(in + out));
        for (size_t j = 0; j < w.size(); ++j) w.data()[j] = rng.uniform(-s, s);
        p.layers.push_back({std::move(w), Mat::zeros(out, 1)});
    }
    return p;
}

Mat mlp_forward(const MlpParams& params, const Mat& input, ForwardCache* cache) {
    params.validate();
    if (input.rows() != params.in_dim())
        throw ShapeError("mlp_forward: input rows " + std::to_string(input.rows()) + " != in_dim " +
                         std::to_string(params.in_dim()));
    if (cache) {
        cache->input = input;
        cache->pre.clear();
        cache->post.clear();
    }
    Mat a = input;
    for (size_t i = 0; i < params.layers.size(); ++i) {
        const Act act = (i + 1 == params.layers.size()) ? params.output : params.hidden;
        Mat z = add_col_broadcast(matmul(params.layers[i].w, a), params.layers[i].b);
        a = apply_act(z, act);
        if (cache) {
            cache->pre.push_back(std::move(z));
            cache->post.push_back(a);
        }
    }
    a.check_finite("mlp_forward");
    return a;
}

MlpGrads mlp_backward(const MlpParams& params, const ForwardCache& cache, const Mat& output_grad, Mat* input_grad) {
    const size_t L = params.layers.size();
    if (cache.pre.size() != L || cache.post.size() != L) throw ShapeError("mlp_backward: cache does not match params");
    if (!output_grad.same_shape(cache.post.back())) throw ShapeError("mlp_backward: output_grad shape mismatch");

    MlpGrads grads = MlpGrads::zeros_like(params);
    Mat delta = output_grad;
    for (size_t i = L; i-- > 0;) {
        const Act act = (i + 1 == L) ? params.output : params.hidden;
        delta = hadamard(delta, act_deriv(cache.pre[i], cache.post[i], act));
        const Mat& a_prev = (i == 0) ? cache.input : cache.post[i - 1];
        grads.layers[i].w = matmul_nt(delta, a_prev);
        grads.layers[i].b = row_sums(delta);
        if (i > 0 || input_grad) delta = matmul_tn(params.layers[i].w, delta);
    }
    if (input_grad) {
        delta.check_finite("mlp_backward input_grad");
        *input_grad = std::move(delta);
    }
    return grads;
}

uint64_t params_digest(const MlpParams& p) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto fold = [&h](const Mat& m) {
        for (double v : m.values()) {
            uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            for (int s = 0; s < 64; s += 8) {
                h ^= (bits >> s) & 0xffU;
                h *= 0x100000001b3ULL;
            }
        }
    };
    for (const auto& l : p.layers) {
        fold(l.w);
        fold(l.b);
    }
    return h;
}

}  // namespace tdgan
