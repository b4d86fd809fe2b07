#include "tdgan/datamodel.hpp"

#include <cmath>

#include "tdgan/errors.hpp"

namespace tdgan {

CondGaussianMixture::CondGaussianMixture(size_t dim, std::vector<std::vector<Component>> per_label)
    : dim_(dim), per_label_(std::move(per_label)) {
    if (dim_ == 0) throw ConfigError("mixture dim must be >= 1");
    for (size_t y = 0; y < per_label_.size(); ++y) {
        const auto& comps = per_label_[y];
        if (comps.empty()) throw ConfigError("label " + std::to_string(y) + " has no mixture components");
        double wsum = 0.0;
        for (const auto& c : comps) {
            if (c.mean.size() != dim_ || c.var.size() != dim_)
                throw ConfigError("label " + std::to_string(y) + ": component dim mismatch");
            if (c.weight < 0.0) throw ConfigError("label " + std::to_string(y) + ": negative component weight");
            for (double v : c.var)
                if (!(v > 0.0)) throw ConfigError("label " + std::to_string(y) + ": variances must be > 0");
            wsum += c.weight;
        }
        if (std::fabs(wsum - 1.0) > 1e-12)
            throw ConfigError("label " + std::to_string(y) + ": weights must sum to 1");
    }
}

void CondGaussianMixture::require_label(LabelId y) const {
    if (y >= per_label_.size()) throw DomainError("unknown label " + std::to_string(y));
}

const std::vector<CondGaussianMixture::Component>& CondGaussianMixture::components(LabelId y) const {
    require_label(y);
    return per_label_[y];
}

std::vector<double> CondGaussianMixture::sample(LabelId y, Rng& rng) const {
    require_label(y);
    const auto& comps = per_label_[y];
    size_t k = 0;
    if (comps.size() > 1) {
        std::vector<double> w(comps.size());
        for (size_t i = 0; i < comps.size(); ++i) w[i] = comps[i].weight;
        k = rng.categorical(w);
    }
    std::vector<double> x(dim_);
    for (size_t d = 0; d < dim_; ++d) x[d] = rng.normal(comps[k].mean[d], std::sqrt(comps[k].var[d]));
    return x;
}

Mat CondGaussianMixture::sample_batch(LabelId y, size_t n, Rng& rng) const {
    Mat out(dim_, n);
    for (size_t j = 0; j < n; ++j) {
        auto x = sample(y, rng);
        for (size_t d = 0; d < dim_; ++d) out(d, j) = x[d];
    }
    return out;
}

double CondGaussianMixture::pdf(const std::vector<double>& x, LabelId y) const {
    require_label(y);
    if (x.size() != dim_) throw ShapeError("pdf: point dim mismatch");
    double density = 0.0;
    for (const auto& c : per_label_[y]) {
        double logp = 0.0;
        for (size_t d = 0; d < dim_; ++d) {
            const double diff = x[d] - c.mean[d];
            logp += -0.5 * diff * diff / c.var[d] - 0.5 * std::log(2.0 * M_PI * c.var[d]);
        }
        density += c.weight * std::exp(logp);
    }
    return density;
}

std::vector<double> mixture_weights(const std::vector<uint64_t>& sizes) {
    if (sizes.empty()) throw ConfigError("mixture_weights: no centers");
    uint64_t total = 0;
    for (uint64_t n : sizes) {
        if (n == 0) throw ConfigError("mixture_weights: center size must be > 0");
        total += n;
    }
    std::vector<double> pi(sizes.size());
    for (size_t i = 0; i < sizes.size(); ++i) pi[i] = static_cast<double>(sizes[i]) / static_cast<double>(total);
    return pi;
}

double LabelStore::probability(LabelId y) const {
    if (total_ == 0) return 0.0;
    auto it = counts_.find(y);
    return it == counts_.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_);
}

void LabelStore::merge(const std::map<LabelId, uint64_t>& new_labels) {
    uint64_t added = 0;
    for (const auto& [y, c] : new_labels) added += c;
    if (added == 0) throw ConfigError("labelstore merge: all-zero new counts");
    for (const auto& [y, c] : new_labels) {
        if (c > 0) counts_[y] += c;
    }
    total_ += added;
}

std::vector<LabelId> LabelStore::sample(size_t m, Rng& rng) const {
    if (total_ == 0) throw StateError("labelstore sample: store is empty");
    std::vector<LabelId> ids;
    std::vector<double> weights;
    ids.reserve(counts_.size());
    weights.reserve(counts_.size());
    for (const auto& [y, c] : counts_) {
        if (c > 0) {
            ids.push_back(y);
            weights.push_back(static_cast<double>(c));
        }
    }
    std::vector<LabelId> out(m);
    for (size_t i = 0; i < m; ++i) out[i] = ids[rng.categorical(weights)];
    return out;
}

std::set<LabelId> LabelStore::support() const {
    std::set<LabelId> s;
    for (const auto& [y, c] : counts_)
        if (c > 0) s.insert(y);
    return s;
}

CenterDataset::CenterDataset(std::string center_id, std::shared_ptr<const CondGaussianMixture> truth,
                             std::map<LabelId, uint64_t> label_counts)
    : center_id_(std::move(center_id)), truth_(std::move(truth)), label_counts_(std::move(label_counts)) {
    if (!truth_) throw ConfigError("center " + center_id_ + ": missing ground truth");
    for (const auto& [y, c] : label_counts_) {
        if (y >= truth_->vocab()) throw ConfigError("center " + center_id_ + ": label out of vocabulary");
        size_ += c;
    }
    if (size_ == 0) throw ConfigError("center " + center_id_ + ": dataset size must be > 0");
}

std::vector<LabelId> CenterDataset::sample_labels(size_t m, Rng& rng) const {
    std::vector<LabelId> ids;
    std::vector<double> weights;
    for (const auto& [y, c] : label_counts_) {
        if (c > 0) {
            ids.push_back(y);
            weights.push_back(static_cast<double>(c));
        }
    }
    std::vector<LabelId> out(m);
    for (size_t i = 0; i < m; ++i) out[i] = ids[rng.categorical(weights)];
    return out;
}

Mat CenterDataset::draw_real(const std::vector<LabelId>& labels, Rng& rng) const {
    Mat out(truth_->dim(), labels.size());
    for (size_t j = 0; j < labels.size(); ++j) {
        auto x = truth_->sample(labels[j], rng);
        for (size_t d = 0; d < x.size(); ++d) out(d, j) = x[d];
    }
    return out;
}

}  // namespace tdgan
