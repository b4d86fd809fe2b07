#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tdgan/mat.hpp"
#include "tdgan/rng.hpp"

namespace tdgan {

// Index into a fixed label vocabulary of size L.
using LabelId = size_t;

// Ground truth p(x|y): one mixture of diagonal Gaussians per label.
class CondGaussianMixture {
public:
    struct Component {
        double weight;
        std::vector<double> mean;  // length dim
        std::vector<double> var;   // length dim, all > 0
    };

    CondGaussianMixture(size_t dim, std::vector<std::vector<Component>> per_label);

    size_t dim() const { return dim_; }
    size_t vocab() const { return per_label_.size(); }
    const std::vector<Component>& components(LabelId y) const;

    // One draw from the label-y mixture.
    std::vector<double> sample(LabelId y, Rng& rng) const;
    // n draws as columns of a dim x n matrix.
    Mat sample_batch(LabelId y, size_t n, Rng& rng) const;
    // Exact mixture density at x.
    double pdf(const std::vector<double>& x, LabelId y) const;

private:
    size_t dim_;
    std::vector<std::vector<Component>> per_label_;

    void require_label(LabelId y) const;
};

// pi_k = n_k / sum(n). All sizes must be positive.
std::vector<double> mixture_weights(const std::vector<uint64_t>& sizes);

// Central server's empirical record of the cumulative label marginal: counts
// over the vocabulary, so merging is exact and order-independent. The
// normalized distribution after a merge equals (1-alpha)*old + alpha*new
// with alpha = n_new / (N_old + n_new).
class LabelStore {
public:
    LabelStore() = default;

    uint64_t total() const { return total_; }
    bool empty() const { return total_ == 0; }
    const std::map<LabelId, uint64_t>& counts() const { return counts_; }
    double probability(LabelId y) const;

    void merge(const std::map<LabelId, uint64_t>& new_labels);
    std::vector<LabelId> sample(size_t m, Rng& rng) const;
    std::set<LabelId> support() const;

private:
    std::map<LabelId, uint64_t> counts_;
    uint64_t total_ = 0;
};

class DiscriminatorNode;

// One center's private data: an empirical label marginal g_t^k plus on-demand
// conditional draws from the shared ground truth. Raw x samples never leave
// this type except through the owning discriminator node.
class CenterDataset {
public:
    CenterDataset(std::string center_id, std::shared_ptr<const CondGaussianMixture> truth,
                  std::map<LabelId, uint64_t> label_counts);

    const std::string& center_id() const { return center_id_; }
    uint64_t size() const { return size_; }
    const std::map<LabelId, uint64_t>& label_counts() const { return label_counts_; }
    const CondGaussianMixture& truth() const { return *truth_; }

    // m iid draws from g_t^k (labels are the shareable part of the data).
    std::vector<LabelId> sample_labels(size_t m, Rng& rng) const;

private:
    // Real conditional samples, one column per requested label. Only the
    // center's own discriminator-update path may call this.
    Mat draw_real(const std::vector<LabelId>& labels, Rng& rng) const;
    friend class DiscriminatorNode;

    std::string center_id_;
    std::shared_ptr<const CondGaussianMixture> truth_;
    std::map<LabelId, uint64_t> label_counts_;
    uint64_t size_ = 0;
};

}  // namespace tdgan
