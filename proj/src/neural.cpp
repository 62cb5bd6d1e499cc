#include "shortclass/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace shortclass::neural {

std::string to_string(Arch a) {
    switch (a) {
        case Arch::fcnn: return "fcnn";
        case Arch::cnn: return "cnn";
        case Arch::lstm: return "lstm";
    }
    return "?";
}

Arch arch_from_string(const std::string& s) {
    if (s == "fcnn") return Arch::fcnn;
    if (s == "cnn") return Arch::cnn;
    if (s == "lstm") return Arch::lstm;
    throw DataError("unknown architecture: " + s);
}

std::pair<Var, Var> lstm_cell(const Var& x_t, const Var& h_prev, const Var& c_prev,
                              const Var& w_gates, const Var& u_gates, const Var& b_gates) {
    const std::size_t h = h_prev->value.cols;
    Var pre = add_bias(add(matmul(x_t, w_gates), matmul(h_prev, u_gates)), b_gates);
    Var i_gate = sigmoid(slice_cols(pre, 0, h));
    Var f_gate = sigmoid(slice_cols(pre, h, h));
    Var g_cand = tanh_act(slice_cols(pre, 2 * h, h));
    Var o_gate = sigmoid(slice_cols(pre, 3 * h, h));
    Var c_next = add(mul(f_gate, c_prev), mul(i_gate, g_cand));
    Var h_next = mul(o_gate, tanh_act(c_next));
    return {h_next, c_next};
}

namespace {

struct NetGraph {
    Arch arch;
    NetConfig cfg;
    std::size_t vocab_size = 0;
    std::vector<std::pair<std::string, Var>> params;

    Var get(const std::string& name) const {
        for (const auto& [n, v] : params)
            if (n == name) return v;
        throw NumericError("missing parameter: " + name);
    }

    static NetGraph build(Arch arch, const NetConfig& cfg, std::size_t vocab_size) {
        NetGraph g;
        g.arch = arch;
        g.cfg = cfg;
        g.vocab_size = vocab_size;
        Rng rng(derive_seed(cfg.seed, 0x1e7 + static_cast<std::uint64_t>(arch)));
        const std::size_t e = cfg.embedding_dim;
        const std::size_t l = cfg.max_len;

        auto xavier = [&](std::size_t rows, std::size_t cols, std::size_t fi, std::size_t fo) {
            return parameter(xavier_uniform(rows, cols, fi, fo, rng));
        };
        auto zeros = [&](std::size_t rows, std::size_t cols) {
            return parameter(Tensor(rows, cols, 0.0));
        };

        g.params.emplace_back("embedding", xavier(vocab_size + 1, e, vocab_size + 1, e));
        switch (arch) {
            case Arch::fcnn: {
                const std::size_t u = cfg.units;
                g.params.emplace_back("w1", xavier(l * e, u, l * e, u));
                g.params.emplace_back("b1", zeros(1, u));
                g.params.emplace_back("w2", xavier(u, 1, u, 1));
                g.params.emplace_back("b2", zeros(1, 1));
                break;
            }
            case Arch::cnn: {
                const std::size_t f = cfg.filters;
                const std::size_t ke = cfg.kernel_size * e;
                g.params.emplace_back("conv_w", xavier(f, ke, ke, f));
                g.params.emplace_back("conv_b", zeros(1, f));
                g.params.emplace_back("w2", xavier(f, 1, f, 1));
                g.params.emplace_back("b2", zeros(1, 1));
                break;
            }
            case Arch::lstm: {
                const std::size_t h = cfg.units;
                g.params.emplace_back("w_gates", xavier(e, 4 * h, e, 4 * h));
                g.params.emplace_back("u_gates", xavier(h, 4 * h, h, 4 * h));
                g.params.emplace_back("b_gates", zeros(1, 4 * h));
                if (cfg.bidirectional) {
                    g.params.emplace_back("w_gates_bwd", xavier(e, 4 * h, e, 4 * h));
                    g.params.emplace_back("u_gates_bwd", xavier(h, 4 * h, h, 4 * h));
                    g.params.emplace_back("b_gates_bwd", zeros(1, 4 * h));
                }
                const std::size_t head_in = cfg.bidirectional ? 2 * h : h;
                g.params.emplace_back("w2", xavier(head_in, 1, head_in, 1));
                g.params.emplace_back("b2", zeros(1, 1));
                break;
            }
        }
        return g;
    }

    static NetGraph from_trained(const TrainedNet& net) {
        NetGraph g;
        g.arch = net.arch;
        g.cfg = net.config;
        g.vocab_size = net.vocab_size;
        for (const auto& [name, tensor] : net.params)
            g.params.emplace_back(name, constant(tensor));
        return g;
    }

    // Weight matrices carrying the L2 penalty; biases and embeddings do not.
    std::vector<Var> l2_params() const {
        std::vector<Var> out;
        for (const auto& [name, v] : params)
            if (name[0] == 'w' || name == "conv_w" || name[0] == 'u') out.push_back(v);
        return out;
    }

    std::vector<Var> all_params() const {
        std::vector<Var> out;
        for (const auto& [_, v] : params) out.push_back(v);
        return out;
    }

    Var run_lstm(const SequenceBatch& batch, const std::vector<std::size_t>& idx,
                 bool train, Rng* rng, bool backward_dir) {
        const std::size_t b = idx.size();
        const std::size_t l = batch.max_len;
        const std::size_t h = cfg.units;
        const char* suffix = backward_dir ? "_bwd" : "";
        Var w = get(std::string("w_gates") + suffix);
        Var u = get(std::string("u_gates") + suffix);
        Var bg = get(std::string("b_gates") + suffix);
        Var emb = get("embedding");

        Var h_state = constant(Tensor(b, h, 0.0));
        Var c_state = constant(Tensor(b, h, 0.0));
        std::vector<std::int32_t> ids(b);
        for (std::size_t step = 0; step < l; ++step) {
            const std::size_t t = backward_dir ? l - 1 - step : step;
            for (std::size_t r = 0; r < b; ++r) ids[r] = batch.rows[idx[r]][t];
            Var x_t = embedding_rows(emb, ids);
            if (train && rng) x_t = dropout(x_t, cfg.dropout_rate, *rng, true);
            auto [h_next, c_next] = lstm_cell(x_t, h_state, c_state, w, u, bg);
            h_state = h_next;
            c_state = c_next;
        }
        return h_state;
    }

    // Logits [B x 1] for the selected rows.
    Var forward_logits(const SequenceBatch& batch, const std::vector<std::size_t>& idx,
                       bool train, Rng* rng) {
        const std::size_t b = idx.size();
        const std::size_t l = batch.max_len;
        const std::size_t e = cfg.embedding_dim;
        Var emb_table = get("embedding");

        switch (arch) {
            case Arch::fcnn: {
                std::vector<std::int32_t> ids;
                ids.reserve(b * l);
                for (std::size_t r : idx)
                    ids.insert(ids.end(), batch.rows[r].begin(), batch.rows[r].end());
                Var emb = reshape(embedding_rows(emb_table, ids), b, l * e);
                if (train && rng) emb = dropout(emb, cfg.dropout_rate, *rng, true);
                Var hidden = relu(add_bias(matmul(emb, get("w1")), get("b1")));
                return add_bias(matmul(hidden, get("w2")), get("b2"));
            }
            case Arch::cnn: {
                std::vector<std::int32_t> ids;
                ids.reserve(b * l);
                for (std::size_t r : idx)
                    ids.insert(ids.end(), batch.rows[r].begin(), batch.rows[r].end());
                Var emb = reshape(embedding_rows(emb_table, ids), b, l * e);
                if (train && rng) emb = dropout(emb, cfg.dropout_rate, *rng, true);
                Var conv = relu(conv1d_same(emb, get("conv_w"), get("conv_b"), b, l, e,
                                            cfg.kernel_size));
                Var pooled = maxpool_time(conv, b, l, l);
                return add_bias(matmul(pooled, get("w2")), get("b2"));
            }
            case Arch::lstm: {
                Var out = run_lstm(batch, idx, train, rng, false);
                if (cfg.bidirectional)
                    out = concat_cols(out, run_lstm(batch, idx, train, rng, true));
                if (train && rng && cfg.layer_dropout > 0.0)
                    out = dropout(out, cfg.layer_dropout, *rng, true);
                return add_bias(matmul(out, get("w2")), get("b2"));
            }
        }
        throw NumericError("unreachable");
    }
};

std::vector<double> targets_for(const std::vector<int>& y,
                                const std::vector<std::size_t>& idx) {
    std::vector<double> t(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) t[i] = static_cast<double>(y[idx[i]]);
    return t;
}

// Mean data loss (no regularization) over the whole batch, eval mode.
double eval_bce(NetGraph& graph, const SequenceBatch& x, const std::vector<int>& y) {
    const std::size_t chunk = 256;
    double total = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < x.rows.size(); start += chunk) {
        idx.clear();
        for (std::size_t i = start; i < std::min(x.rows.size(), start + chunk); ++i)
            idx.push_back(i);
        Var z = graph.forward_logits(x, idx, false, nullptr);
        Var loss = bce_with_logits_mean(z, targets_for(y, idx));
        total += loss->value.data[0] * static_cast<double>(idx.size());
    }
    return total / static_cast<double>(x.rows.size());
}

}  // namespace

TrainedNet train_net(Arch arch, const SequenceBatch& x, const std::vector<int>& y,
                     const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                     const NetConfig& config) {
    if (x.rows.empty()) throw DataError("train_net: empty training set");
    if (valid_x.rows.empty()) throw DataError("train_net: empty validation set");
    if (x.rows.size() != y.size() || valid_x.rows.size() != valid_y.size())
        throw DataError("train_net: label count mismatch");
    if (arch == Arch::cnn && config.kernel_size > x.max_len)
        throw DataError("train_net: kernel_size exceeds max_len");
    if (config.epochs == 0 || config.batch_size == 0)
        throw DataError("train_net: epochs and batch_size must be >= 1");

    NetConfig cfg = config;
    cfg.max_len = x.max_len;

    NetGraph graph = NetGraph::build(arch, cfg, x.vocab_size);
    Adam adam(graph.all_params(), cfg.learning_rate);
    Rng dropout_rng(derive_seed(cfg.seed, 0xd20));
    Rng shuffle_rng(derive_seed(cfg.seed, 0x5bf));

    const std::size_t n = x.rows.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainedNet net;
    net.arch = arch;
    net.config = cfg;
    net.vocab_size = x.vocab_size;

    double best_valid = std::numeric_limits<double>::infinity();
    std::vector<Tensor> best_params;
    std::size_t bad_epochs = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            std::vector<std::size_t> idx(
                order.begin() + static_cast<std::ptrdiff_t>(start),
                order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + cfg.batch_size)));
            Var z = graph.forward_logits(x, idx, true, &dropout_rng);
            Var loss = bce_with_logits_mean(z, targets_for(y, idx));
            if (cfg.l2_strength > 0.0) {
                std::vector<Var> terms = {loss};
                for (const auto& w : graph.l2_params())
                    terms.push_back(sum_squares_scaled(w, 0.5 * cfg.l2_strength));
                loss = add_scalars(terms);
            }
            backward(loss);
            adam.step();
            loss_sum += loss->value.data[0] * static_cast<double>(idx.size());
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.valid_loss = eval_bce(graph, valid_x, valid_y);
        if (!std::isfinite(stats.train_loss) || !std::isfinite(stats.valid_loss))
            throw NumericError("train_net: non-finite loss");
        net.history.push_back(stats);

        if (stats.valid_loss < best_valid) {
            best_valid = stats.valid_loss;
            net.best_epoch = epoch;
            bad_epochs = 0;
            best_params.clear();
            for (const auto& [_, v] : graph.params) best_params.push_back(v->value);
        } else if (++bad_epochs >= cfg.patience) {
            break;
        }
    }

    for (std::size_t i = 0; i < graph.params.size(); ++i)
        net.params.emplace_back(graph.params[i].first, std::move(best_params[i]));
    return net;
}

TrainedNet train_fcnn(const SequenceBatch& x, const std::vector<int>& y,
                      const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                      const NetConfig& config) {
    return train_net(Arch::fcnn, x, y, valid_x, valid_y, config);
}

TrainedNet train_cnn(const SequenceBatch& x, const std::vector<int>& y,
                     const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                     const NetConfig& config) {
    return train_net(Arch::cnn, x, y, valid_x, valid_y, config);
}

TrainedNet train_lstm(const SequenceBatch& x, const std::vector<int>& y,
                      const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                      const NetConfig& config) {
    return train_net(Arch::lstm, x, y, valid_x, valid_y, config);
}

std::vector<double> TrainedNet::score_probs(const SequenceBatch& batch) const {
    NetGraph graph = NetGraph::from_trained(*this);
    const std::size_t chunk = 256;
    std::vector<double> probs;
    probs.reserve(batch.rows.size());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < batch.rows.size(); start += chunk) {
        idx.clear();
        for (std::size_t i = start; i < std::min(batch.rows.size(), start + chunk); ++i)
            idx.push_back(i);
        Var z = graph.forward_logits(batch, idx, false, nullptr);
        for (double v : z->value.data) probs.push_back(1.0 / (1.0 + std::exp(-v)));
    }
    return probs;
}

}  // namespace shortclass::neural
