#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "shortclass/common.hpp"

namespace shortclass::neural {

// Row-major 2-D tensor. Everything the networks need fits in two axes;
// sequence data is kept as [batch*len, cols] and reshaped for free.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}
    std::size_t size() const { return data.size(); }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct Node;
using Var = std::shared_ptr<Node>;

// Reverse-mode tape node. A forward op allocates the value and captures a
// closure that routes the node's gradient into its parents.
struct Node {
    Tensor value;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<Var> parents;
    std::function<void(Node&)> backward_fn;

    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

Var constant(Tensor t);
Var parameter(Tensor t);

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var add_bias(const Var& a, const Var& bias);  // bias is [1 x n], broadcast over rows
Var mul(const Var& a, const Var& b);
Var relu(const Var& x);
Var sigmoid(const Var& x);
Var tanh_act(const Var& x);

// Gather rows of table (one per id); ids index rows directly (pad id 0 is a
// normal trainable row).
Var embedding_rows(const Var& table, const std::vector<std::int32_t>& ids);

// Metadata-only reshape; rows*cols must be preserved.
Var reshape(const Var& x, std::size_t rows, std::size_t cols);

Var concat_cols(const Var& a, const Var& b);

// Columns [start, start+count) as a new tensor.
Var slice_cols(const Var& x, std::size_t start, std::size_t count);

// Inverted dropout: kept activations scaled by 1/(1-rate) so the expected
// train-mode output equals the eval-mode output. Eval mode returns x itself.
Var dropout(const Var& x, double rate, Rng& rng, bool train);

// Zero-padded 1-D cross-correlation over a [B x L*E] input viewed as (L, E)
// per row. weights are [F x K*E]; bias [1 x F]; output [B*L x F].
Var conv1d_same(const Var& x, const Var& weights, const Var& bias,
                std::size_t batch, std::size_t len, std::size_t emb,
                std::size_t kernel);

// Max over a pooling window along the time axis of a [B*L x F] tensor;
// window == len gives global pooling ([B x F]). Ties route the gradient to
// the earliest position.
Var maxpool_time(const Var& x, std::size_t batch, std::size_t len, std::size_t window);

// Mean binary cross-entropy on logits z [B x 1]; numerically stable form.
Var bce_with_logits_mean(const Var& z, const std::vector<double>& targets);

// Mean BCE on probabilities (clamped at 1e-12); exists for the layer-wise
// gradient checks and degenerate uses, training goes through the fused form.
Var bce_mean(const Var& p, const std::vector<double>& targets);

// coef * sum(w^2) as a scalar node (L2 penalty with coef = lambda/2).
Var sum_squares_scaled(const Var& w, double coef);

Var add_scalars(const std::vector<Var>& scalars);

// Zero every gradient reachable from loss, then backpropagate d(loss)=1.
void backward(const Var& loss);

// Xavier-uniform sample in +/- sqrt(6/(fan_in+fan_out)).
Tensor xavier_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                      std::size_t fan_out, Rng& rng);

// Adam with the published defaults (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
public:
    Adam(std::vector<Var> params, double learning_rate);
    void step();

private:
    std::vector<Var> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    double lr_;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    std::size_t t_ = 0;
};

}  // namespace shortclass::neural
