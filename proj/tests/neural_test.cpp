#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "shortclass/classic.hpp"
#include "shortclass/corpus.hpp"
#include "shortclass/metrics.hpp"
#include "shortclass/neural.hpp"
#include "shortclass/textprep.hpp"
#include "shortclass/vectorize.hpp"

using namespace shortclass;
using namespace shortclass::neural;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> unit(-scale, scale);
    Tensor t(rows, cols);
    for (double& v : t.data) v = unit(rng);
    return t;
}

// Central finite differences against the analytic gradient of a scalar loss.
// loss_fn must rebuild the graph from the live parameter values each call.
void check_gradients(std::vector<Var> params, const std::function<Var()>& loss_fn,
                     double tol = 1e-4) {
    Var loss = loss_fn();
    backward(loss);
    std::vector<std::vector<double>> analytic;
    for (const auto& p : params) analytic.push_back(p->grad);

    const double h = 1e-5;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = params[pi];
        REQUIRE(analytic[pi].size() == p->value.size());
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            double saved = p->value.data[i];
            p->value.data[i] = saved + h;
            double up = loss_fn()->value.data[0];
            p->value.data[i] = saved - h;
            double down = loss_fn()->value.data[0];
            p->value.data[i] = saved;
            double numeric = (up - down) / (2.0 * h);
            double denom = std::max({1e-8, std::abs(numeric), std::abs(analytic[pi][i])});
            CHECK(std::abs(numeric - analytic[pi][i]) / denom < tol);
        }
    }
}

// Scalar reduction r1^T X r2 with fixed random coefficients; exercises matmul
// twice and funnels any [m x n] tensor into a scalar.
Var reduce_scalar(const Var& x, const Tensor& left, const Tensor& right) {
    return matmul(matmul(constant(left), x), constant(right));
}

}  // namespace

TEST_CASE("sigmoid of a dot product at zero weights has gradient x/4") {
    Tensor w0(1, 3, 0.0);
    Var w = parameter(w0);
    Tensor x(3, 1);
    x.data = {0.5, -1.0, 2.0};
    Var loss = sigmoid(matmul(w, constant(x)));
    backward(loss);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(w->grad[i] == doctest::Approx(0.25 * x.data[i]));
}

TEST_CASE("constants receive no gradient") {
    Rng rng(50);
    Tensor xt = random_tensor(2, 2, rng);
    Var c = constant(xt);
    Var w = parameter(random_tensor(2, 2, rng));
    Var loss = reduce_scalar(mul(c, w), random_tensor(1, 2, rng), random_tensor(2, 1, rng));
    backward(loss);
    CHECK_FALSE(c->requires_grad);
    CHECK(c->grad.empty());
    CHECK(w->grad.size() == 4);
}

TEST_CASE("gradient check: dense layer with bias and relu") {
    Rng rng(51);
    Var w = parameter(random_tensor(4, 3, rng));
    Var b = parameter(random_tensor(1, 3, rng));
    Var x = parameter(random_tensor(5, 4, rng));
    Tensor l = random_tensor(1, 5, rng), r = random_tensor(3, 1, rng);
    check_gradients({w, b, x},
                    [&] { return reduce_scalar(relu(add_bias(matmul(x, w), b)), l, r); });
}

TEST_CASE("gradient check: sigmoid and tanh") {
    Rng rng(52);
    Var x = parameter(random_tensor(3, 4, rng));
    Tensor l = random_tensor(1, 3, rng), r = random_tensor(4, 1, rng);
    check_gradients({x}, [&] { return reduce_scalar(sigmoid(x), l, r); });
    check_gradients({x}, [&] { return reduce_scalar(tanh_act(x), l, r); });
}

TEST_CASE("gradient check: elementwise add and mul") {
    Rng rng(53);
    Var a = parameter(random_tensor(3, 3, rng));
    Var b = parameter(random_tensor(3, 3, rng));
    Tensor l = random_tensor(1, 3, rng), r = random_tensor(3, 1, rng);
    check_gradients({a, b}, [&] { return reduce_scalar(mul(add(a, b), b), l, r); });
}

TEST_CASE("gradient check: embedding lookup with repeated ids") {
    Rng rng(54);
    Var table = parameter(random_tensor(6, 3, rng));
    std::vector<std::int32_t> ids = {0, 2, 2, 5, 1, 0};
    Tensor l = random_tensor(1, 6, rng), r = random_tensor(3, 1, rng);
    check_gradients({table}, [&] { return reduce_scalar(embedding_rows(table, ids), l, r); });
}

TEST_CASE("gradient check: reshape, slice and concat") {
    Rng rng(55);
    Var a = parameter(random_tensor(2, 6, rng));
    Var b = parameter(random_tensor(2, 2, rng));
    Tensor l = random_tensor(1, 2, rng), r = random_tensor(5, 1, rng);
    check_gradients({a, b}, [&] {
        Var sliced = slice_cols(a, 1, 3);
        Var cat = concat_cols(sliced, b);
        return reduce_scalar(cat, l, r);
    });
    Tensor l2 = random_tensor(1, 4, rng), r2 = random_tensor(3, 1, rng);
    check_gradients({a}, [&] { return reduce_scalar(reshape(a, 4, 3), l2, r2); });
}

TEST_CASE("conv1d forward matches the hand-computed example") {
    // input [1,2,3], kernel [1,0,-1], zero padded -> [-2,-2,2]
    Tensor x(1, 3);
    x.data = {1.0, 2.0, 3.0};
    Tensor w(1, 3);
    w.data = {1.0, 0.0, -1.0};
    Tensor b(1, 1, 0.0);
    Var out = conv1d_same(constant(x), constant(w), constant(b), 1, 3, 1, 3);
    REQUIRE(out->value.size() == 3);
    CHECK(out->value.data[0] == doctest::Approx(-2.0));
    CHECK(out->value.data[1] == doctest::Approx(-2.0));
    CHECK(out->value.data[2] == doctest::Approx(2.0));

    Var pooled = maxpool_time(out, 1, 3, 3);
    REQUIRE(pooled->value.size() == 1);
    CHECK(pooled->value.data[0] == doctest::Approx(2.0));
}

TEST_CASE("gradient check: conv1d and maxpool over a batch") {
    Rng rng(56);
    const std::size_t batch = 2, len = 5, emb = 3, kernel = 3, filters = 4;
    Var x = parameter(random_tensor(batch, len * emb, rng));
    Var w = parameter(random_tensor(filters, kernel * emb, rng));
    Var b = parameter(random_tensor(1, filters, rng));
    Tensor l = random_tensor(1, batch, rng), r = random_tensor(filters, 1, rng);
    check_gradients({x, w, b}, [&] {
        Var conv = conv1d_same(x, w, b, batch, len, emb, kernel);
        return reduce_scalar(maxpool_time(conv, batch, len, len), l, r);
    });
}

TEST_CASE("gradient check: even kernel width and windowed pooling") {
    Rng rng(57);
    const std::size_t batch = 1, len = 6, emb = 2, kernel = 2, filters = 3;
    Var x = parameter(random_tensor(batch, len * emb, rng));
    Var w = parameter(random_tensor(filters, kernel * emb, rng));
    Var b = parameter(random_tensor(1, filters, rng));
    Tensor l = random_tensor(1, batch * 3, rng), r = random_tensor(filters, 1, rng);
    check_gradients({x, w, b}, [&] {
        Var conv = conv1d_same(x, w, b, batch, len, emb, kernel);
        return reduce_scalar(maxpool_time(conv, batch, len, 2), l, r);
    });
}

TEST_CASE("gradient check: bce on probabilities and on logits") {
    Rng rng(58);
    std::vector<double> targets = {1.0, 0.0, 1.0, 0.0, 1.0};
    Var z = parameter(random_tensor(5, 1, rng));
    check_gradients({z}, [&] { return bce_with_logits_mean(z, targets); });
    check_gradients({z}, [&] { return bce_mean(sigmoid(z), targets); });
}

TEST_CASE("bce on logits equals bce after sigmoid") {
    Rng rng(59);
    std::vector<double> targets = {1.0, 0.0, 0.0};
    Var z = parameter(random_tensor(3, 1, rng));
    double fused = bce_with_logits_mean(z, targets)->value.data[0];
    double chained = bce_mean(sigmoid(z), targets)->value.data[0];
    CHECK(fused == doctest::Approx(chained).epsilon(1e-12));
}

TEST_CASE("gradient check: dropout in eval mode is the identity") {
    Rng rng(60);
    Rng drop_rng(1);
    Var x = parameter(random_tensor(3, 4, rng));
    Tensor l = random_tensor(1, 3, rng), r = random_tensor(4, 1, rng);
    Var through = dropout(x, 0.5, drop_rng, false);
    CHECK(through.get() == x.get());  // eval mode passes the node through
    check_gradients({x}, [&] { return reduce_scalar(dropout(x, 0.5, drop_rng, false), l, r); });
}

TEST_CASE("gradient check: sum of squares penalty") {
    Rng rng(61);
    Var w = parameter(random_tensor(3, 3, rng));
    check_gradients({w}, [&] { return sum_squares_scaled(w, 0.37); });
}

TEST_CASE("gradient check: lstm cell and a 3-step chain") {
    Rng rng(62);
    const std::size_t e = 3, hdim = 4, batch = 2;
    Var w = parameter(random_tensor(e, 4 * hdim, rng, 0.5));
    Var u = parameter(random_tensor(hdim, 4 * hdim, rng, 0.5));
    Var b = parameter(random_tensor(1, 4 * hdim, rng, 0.5));
    Var x0 = parameter(random_tensor(batch, e, rng));
    Var x1 = parameter(random_tensor(batch, e, rng));
    Var x2 = parameter(random_tensor(batch, e, rng));
    Tensor l = random_tensor(1, batch, rng), r = random_tensor(hdim, 1, rng);

    check_gradients({w, u, b, x0, x1, x2}, [&] {
        Var h = constant(Tensor(batch, hdim, 0.0));
        Var c = constant(Tensor(batch, hdim, 0.0));
        for (const Var& x : {x0, x1, x2}) {
            auto [hn, cn] = lstm_cell(x, h, c, w, u, b);
            h = hn;
            c = cn;
        }
        return reduce_scalar(h, l, r);
    });
}

TEST_CASE("lstm cell keeps a zero state on zero input with zero biases") {
    Rng rng(63);
    const std::size_t e = 3, hdim = 4;
    Var w = parameter(random_tensor(e, 4 * hdim, rng));
    Var u = parameter(random_tensor(hdim, 4 * hdim, rng));
    Var b = parameter(Tensor(1, 4 * hdim, 0.0));
    Var h = constant(Tensor(1, hdim, 0.0));
    Var c = constant(Tensor(1, hdim, 0.0));
    Var x = constant(Tensor(1, e, 0.0));
    for (int step = 0; step < 4; ++step) {
        auto [hn, cn] = lstm_cell(x, h, c, w, u, b);
        h = hn;
        c = cn;
        for (double v : c->value.data) CHECK(v == 0.0);
        for (double v : h->value.data) CHECK(v == 0.0);
    }
}

TEST_CASE("dropout uses inverted scaling: train-mode expectation matches eval") {
    Rng drop_rng(65);
    Tensor x(1, 1);
    x.data = {2.0};
    Var xv = constant(x);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += dropout(xv, 0.3, drop_rng, true)->value.data[0];
    double mean = acc / n;
    CHECK(std::abs(mean - 2.0) / 2.0 < 0.01);
}

TEST_CASE("xavier uniform stays in its bound with near-zero mean") {
    Rng rng(66);
    const std::size_t fan_in = 30, fan_out = 20;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Tensor t = xavier_uniform(100, 100, fan_in, fan_out, rng);
    double mean = 0.0;
    for (double v : t.data) {
        CHECK(std::abs(v) <= limit);
        mean += v;
    }
    mean /= static_cast<double>(t.size());
    CHECK(std::abs(mean) < 0.01);
}

namespace {

struct KeywordFixture {
    vectorize::SequenceBatch train_seq, valid_seq;
    std::vector<int> train_y, valid_y;
};

KeywordFixture keyword_corpus(std::size_t n, std::uint64_t seed, std::size_t max_len = 12) {
    corpus::SyntheticConfig sc;
    sc.n = n;
    sc.ratio = 1.0;
    sc.topic_terms = {"climate", "globalwarming", "emission"};
    sc.noise_vocab_size = 150;
    sc.seed = seed;
    corpus::Dataset ds = corpus::generate_synthetic(sc);
    corpus::DataSplit split = corpus::stratified_split(ds, 0.15, 0.15, seed);

    textprep::PrepConfig prep;  // no stopwords needed for synthetic text
    std::vector<textprep::TokenList> tokens(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        tokens[i] = textprep::clean_and_tokenize(ds.documents[i].raw_text, prep);

    std::vector<textprep::TokenList> train_tokens, valid_tokens;
    KeywordFixture fx;
    for (std::size_t i : split.train) {
        train_tokens.push_back(tokens[i]);
        fx.train_y.push_back(ds.documents[i].label);
    }
    for (std::size_t i : split.valid) {
        valid_tokens.push_back(tokens[i]);
        fx.valid_y.push_back(ds.documents[i].label);
    }
    auto vocab = vectorize::build_vocab(train_tokens, 200);
    fx.train_seq = vectorize::sequence_batch(train_tokens, vocab, max_len);
    fx.valid_seq = vectorize::sequence_batch(valid_tokens, vocab, max_len);
    return fx;
}

double valid_f1(const TrainedNet& net, const KeywordFixture& fx) {
    auto probs = net.score_probs(fx.valid_seq);
    std::vector<int> labels;
    for (double p : probs) labels.push_back(p >= 0.5 ? 1 : 0);
    return metrics::compute_report(fx.valid_y, labels, probs).f1;
}

}  // namespace

TEST_CASE("fcnn separates the planted-keyword corpus") {
    KeywordFixture fx = keyword_corpus(2000, 7);
    NetConfig cfg;
    cfg.embedding_dim = 12;
    cfg.units = 12;
    cfg.epochs = 8;
    cfg.patience = 3;
    cfg.max_len = 12;
    cfg.seed = 7;
    TrainedNet net = train_fcnn(fx.train_seq, fx.train_y, fx.valid_seq, fx.valid_y, cfg);
    CHECK(valid_f1(net, fx) >= 0.95);
    CHECK(net.best_epoch >= 1);
    CHECK(net.history.size() >= net.best_epoch);
}

TEST_CASE("cnn separates the planted-keyword corpus") {
    KeywordFixture fx = keyword_corpus(2000, 8);
    NetConfig cfg;
    cfg.embedding_dim = 12;
    cfg.filters = 12;
    cfg.kernel_size = 3;
    cfg.epochs = 8;
    cfg.patience = 3;
    cfg.max_len = 12;
    cfg.seed = 8;
    TrainedNet net = train_cnn(fx.train_seq, fx.train_y, fx.valid_seq, fx.valid_y, cfg);
    CHECK(valid_f1(net, fx) >= 0.95);
}

TEST_CASE("full-batch training loss is non-increasing over the first epochs") {
    KeywordFixture fx = keyword_corpus(300, 9);
    NetConfig cfg;
    cfg.embedding_dim = 8;
    cfg.units = 8;
    cfg.dropout_rate = 0.0;
    cfg.learning_rate = 2e-3;
    cfg.batch_size = fx.train_seq.rows.size();  // full batch
    cfg.epochs = 5;
    cfg.patience = 5;
    cfg.max_len = 12;
    cfg.seed = 9;
    TrainedNet net = train_fcnn(fx.train_seq, fx.train_y, fx.valid_seq, fx.valid_y, cfg);
    REQUIRE(net.history.size() == 5);
    for (std::size_t e = 1; e < net.history.size(); ++e)
        CHECK(net.history[e].train_loss <= net.history[e - 1].train_loss + 1e-12);
}

TEST_CASE("early stopping restores the best epoch and replays its loss exactly") {
    // training on random labels while validating on the inverted labels makes
    // the validation loss rise as soon as the net starts memorizing
    Rng rng(70);
    std::uniform_int_distribution<std::int32_t> tok(1, 20);
    std::uniform_int_distribution<int> bit(0, 1);
    vectorize::SequenceBatch train, valid;
    train.max_len = valid.max_len = 6;
    train.vocab_size = valid.vocab_size = 20;
    std::vector<int> train_y, valid_y;
    for (int i = 0; i < 40; ++i) {
        std::vector<std::int32_t> row(6);
        for (auto& v : row) v = tok(rng);
        int label = bit(rng);
        train.rows.push_back(row);
        train_y.push_back(label);
        valid.rows.push_back(row);
        valid_y.push_back(1 - label);
    }
    NetConfig cfg;
    cfg.embedding_dim = 8;
    cfg.units = 16;
    cfg.dropout_rate = 0.0;
    cfg.learning_rate = 5e-2;
    cfg.batch_size = 8;
    cfg.epochs = 30;
    cfg.patience = 2;
    cfg.max_len = 6;
    cfg.seed = 70;
    TrainedNet net = train_fcnn(train, train_y, valid, valid_y, cfg);

    REQUIRE(!net.history.empty());
    // best_epoch is the argmin of the recorded validation losses
    std::size_t argmin = 0;
    for (std::size_t e = 0; e < net.history.size(); ++e)
        if (net.history[e].valid_loss < net.history[argmin].valid_loss) argmin = e;
    CHECK(net.best_epoch == argmin + 1);
    // halted patience epochs after the best one (or ran to the cap)
    if (net.history.size() < cfg.epochs)
        CHECK(net.history.size() == net.best_epoch + cfg.patience);

    // exact replay: restored parameters reproduce the recorded minimum
    auto probs = net.score_probs(valid);
    double replayed = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double z = std::log(probs[i]) - std::log1p(-probs[i]);
        replayed += std::max(z, 0.0) - z * valid_y[i] + std::log1p(std::exp(-std::abs(z)));
    }
    replayed /= static_cast<double>(probs.size());
    CHECK(replayed ==
          doctest::Approx(net.history[net.best_epoch - 1].valid_loss).epsilon(1e-9));
}

TEST_CASE("patience halt: rising validation loss stops training after patience epochs") {
    Rng rng(71);
    std::uniform_int_distribution<std::int32_t> tok(1, 15);
    vectorize::SequenceBatch train, valid;
    train.max_len = valid.max_len = 5;
    train.vocab_size = valid.vocab_size = 15;
    std::vector<int> train_y, valid_y;
    for (int i = 0; i < 30; ++i) {
        std::vector<std::int32_t> row(5);
        for (auto& v : row) v = tok(rng);
        train.rows.push_back(row);
        train_y.push_back(i % 2);
        valid.rows.push_back(row);
        valid_y.push_back(1 - i % 2);
    }
    NetConfig cfg;
    cfg.embedding_dim = 6;
    cfg.units = 12;
    cfg.dropout_rate = 0.0;
    cfg.learning_rate = 3e-2;
    cfg.batch_size = 10;
    cfg.epochs = 40;
    cfg.patience = 2;
    cfg.max_len = 5;
    cfg.seed = 71;
    TrainedNet net = train_fcnn(train, train_y, valid, valid_y, cfg);
    REQUIRE(net.history.size() < 40);
    CHECK(net.history.size() == net.best_epoch + 2);
}

TEST_CASE("training is deterministic at a fixed seed") {
    KeywordFixture fx = keyword_corpus(400, 10);
    NetConfig cfg;
    cfg.embedding_dim = 8;
    cfg.units = 8;
    cfg.epochs = 3;
    cfg.max_len = 12;
    cfg.seed = 10;
    TrainedNet a = train_fcnn(fx.train_seq, fx.train_y, fx.valid_seq, fx.valid_y, cfg);
    TrainedNet b = train_fcnn(fx.train_seq, fx.train_y, fx.valid_seq, fx.valid_y, cfg);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].train_loss == b.history[e].train_loss);
        CHECK(a.history[e].valid_loss == b.history[e].valid_loss);
    }
}

TEST_CASE("lstm learns token order where bag-of-words cannot") {
    // label = does token A precede token B
    Rng rng(72);
    std::uniform_int_distribution<std::int32_t> filler(3, 12);
    std::uniform_int_distribution<std::size_t> pos(0, 7);
    auto make_row = [&](bool a_first) {
        std::vector<std::int32_t> row(8);
        for (auto& v : row) v = filler(rng);
        std::size_t i = pos(rng), j = pos(rng);
        while (i == j) j = pos(rng);
        std::size_t lo = std::min(i, j), hi = std::max(i, j);
        row[lo] = a_first ? 1 : 2;
        row[hi] = a_first ? 2 : 1;
        return row;
    };
    vectorize::SequenceBatch train, valid;
    train.max_len = valid.max_len = 8;
    train.vocab_size = valid.vocab_size = 12;
    std::vector<int> train_y, valid_y;
    for (int i = 0; i < 700; ++i) {
        bool a_first = i % 2 == 0;
        train.rows.push_back(make_row(a_first));
        train_y.push_back(a_first ? 1 : 0);
    }
    for (int i = 0; i < 200; ++i) {
        bool a_first = i % 2 == 1;
        valid.rows.push_back(make_row(a_first));
        valid_y.push_back(a_first ? 1 : 0);
    }

    NetConfig cfg;
    cfg.embedding_dim = 8;
    cfg.units = 12;
    cfg.dropout_rate = 0.0;
    cfg.learning_rate = 2e-2;
    cfg.batch_size = 32;
    cfg.epochs = 25;
    cfg.patience = 25;
    cfg.max_len = 8;
    cfg.seed = 72;
    TrainedNet net = train_lstm(train, train_y, valid, valid_y, cfg);
    auto probs = net.score_probs(valid);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        correct += ((probs[i] >= 0.5 ? 1 : 0) == valid_y[i]);
    double acc = static_cast<double>(correct) / static_cast<double>(valid_y.size());
    CHECK(acc >= 0.9);

    // the bag-of-words view is uninformative: every row holds one A and one B
    // plus iid fillers, so multinomial NB stays near the prior
    auto to_counts = [](const vectorize::SequenceBatch& batch) {
        vectorize::FeatureMatrix m;
        m.n_cols = 13;
        for (const auto& row : batch.rows) {
            std::vector<double> dense(13, 0.0);
            for (auto id : row) dense[static_cast<std::size_t>(id)] += 1.0;
            kernels::SparseRow sparse;
            for (std::size_t j = 0; j < dense.size(); ++j)
                if (dense[j] != 0.0) sparse.emplace_back(static_cast<std::uint32_t>(j), dense[j]);
            m.rows.push_back(std::move(sparse));
        }
        return m;
    };
    auto nb = classic::train_multinomial_nb(to_counts(train), train_y, 1.0);
    auto nb_pred = nb->classify(to_counts(valid));
    std::size_t nb_correct = 0;
    for (std::size_t i = 0; i < valid_y.size(); ++i)
        nb_correct += (nb_pred.labels[i] == valid_y[i]);
    CHECK(static_cast<double>(nb_correct) / static_cast<double>(valid_y.size()) <= 0.65);
}

TEST_CASE("bidirectional lstm trains and scores") {
    KeywordFixture fx = keyword_corpus(400, 12);
    NetConfig cfg;
    cfg.embedding_dim = 8;
    cfg.units = 8;
    cfg.epochs = 3;
    cfg.max_len = 12;
    cfg.bidirectional = true;
    cfg.layer_dropout = 0.1;
    cfg.seed = 12;
    TrainedNet net = train_lstm(fx.train_seq, fx.train_y, fx.valid_seq, fx.valid_y, cfg);
    auto probs = net.score_probs(fx.valid_seq);
    CHECK(probs.size() == fx.valid_seq.rows.size());
    for (double p : probs) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("training input validation") {
    vectorize::SequenceBatch x;
    x.max_len = 4;
    x.vocab_size = 5;
    x.rows = {{1, 2, 0, 0}};
    std::vector<int> y = {1};
    NetConfig cfg;
    cfg.max_len = 4;
    vectorize::SequenceBatch empty;
    CHECK_THROWS_AS(train_fcnn(x, y, empty, {}, cfg), DataError);
    cfg.kernel_size = 9;
    CHECK_THROWS_AS(train_cnn(x, y, x, y, cfg), DataError);
}
