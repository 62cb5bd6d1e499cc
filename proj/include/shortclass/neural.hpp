#pragma once

#include <string>
#include <vector>

#include "shortclass/autodiff.hpp"
#include "shortclass/vectorize.hpp"

namespace shortclass::neural {

using vectorize::SequenceBatch;

enum class Arch { fcnn, cnn, lstm };

std::string to_string(Arch a);
Arch arch_from_string(const std::string& s);

struct NetConfig {
    std::size_t embedding_dim = 16;
    std::size_t units = 16;        // fcnn hidden width / lstm state size
    std::size_t filters = 16;      // cnn
    std::size_t kernel_size = 3;   // cnn
    double layer_dropout = 0.0;    // lstm output dropout
    double dropout_rate = 0.2;
    double learning_rate = 1e-2;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::size_t patience = 3;
    double l2_strength = 0.0;
    std::size_t max_vocab = 1000;  // consumed by the caller when fitting the vocabulary
    std::size_t max_len = 24;
    std::uint64_t seed = 0;
    bool bidirectional = false;  // lstm
};

struct EpochStats {
    double train_loss = 0.0;
    double valid_loss = 0.0;
};

struct TrainedNet {
    Arch arch = Arch::fcnn;
    NetConfig config;
    std::size_t vocab_size = 0;
    std::vector<std::pair<std::string, Tensor>> params;  // weights at the best epoch
    std::size_t best_epoch = 0;                          // 1-based
    std::vector<EpochStats> history;

    // P(label = 1), eval mode, chunked so big batches stay in memory bounds.
    std::vector<double> score_probs(const SequenceBatch& batch) const;
};

TrainedNet train_fcnn(const SequenceBatch& x, const std::vector<int>& y,
                      const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                      const NetConfig& config);
TrainedNet train_cnn(const SequenceBatch& x, const std::vector<int>& y,
                     const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                     const NetConfig& config);
TrainedNet train_lstm(const SequenceBatch& x, const std::vector<int>& y,
                      const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                      const NetConfig& config);

TrainedNet train_net(Arch arch, const SequenceBatch& x, const std::vector<int>& y,
                     const SequenceBatch& valid_x, const std::vector<int>& valid_y,
                     const NetConfig& config);

// Single LSTM step exposed for gradient checks: returns (h', c').
std::pair<Var, Var> lstm_cell(const Var& x_t, const Var& h_prev, const Var& c_prev,
                              const Var& w_gates, const Var& u_gates, const Var& b_gates);

}  // namespace shortclass::neural
