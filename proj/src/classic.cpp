#include "shortclass/classic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shortclass/common.hpp"

namespace shortclass::classic {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::lexicon: return "lexicon";
        case ModelKind::logreg: return "logreg";
        case ModelKind::svm: return "svm";
        case ModelKind::nb: return "nb";
        case ModelKind::knn: return "knn";
        case ModelKind::rf: return "rf";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "lexicon") return ModelKind::lexicon;
    if (s == "logreg") return ModelKind::logreg;
    if (s == "svm") return ModelKind::svm;
    if (s == "nb") return ModelKind::nb;
    if (s == "knn") return ModelKind::knn;
    if (s == "rf") return ModelKind::rf;
    throw DataError("unknown model kind: " + s);
}

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::counts: return "counts";
        case FeatureKind::tfidf: return "tfidf";
        case FeatureKind::tokens: return "tokens";
    }
    return "?";
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "counts") return FeatureKind::counts;
    if (s == "tfidf") return FeatureKind::tfidf;
    if (s == "tokens") return FeatureKind::tokens;
    throw DataError("unknown feature kind: " + s);
}

namespace {

void check_compatible(const ClassifierModel& model, const FeatureMatrix& x) {
    if (model.feature_kind() == FeatureKind::tokens) return;
    if (model.n_features() > 0 && x.n_cols != model.n_features())
        throw DataError("dimension mismatch: model expects " +
                        std::to_string(model.n_features()) + " features, matrix has " +
                        std::to_string(x.n_cols));
    bool want_tfidf = model.feature_kind() == FeatureKind::tfidf;
    bool have_tfidf = x.rep == Representation::tfidf;
    if (want_tfidf != have_tfidf)
        throw DataError("representation mismatch: model expects " +
                        to_string(model.feature_kind()));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double sparse_margin(const kernels::SparseRow& row, const std::vector<double>& w,
                     double bias) {
    double z = bias;
    for (const auto& [j, v] : row) z += w[j] * v;
    return z;
}

}  // namespace

Prediction ClassifierModel::classify(const FeatureMatrix& x) const {
    check_compatible(*this, x);
    Prediction p;
    p.scores = decision_scores(x);
    p.labels.reserve(p.scores.size());
    for (double s : p.scores) p.labels.push_back(label_from_score(s));
    return p;
}

Prediction classify(const ClassifierModel& model, const FeatureMatrix& x) {
    return model.classify(x);
}

// ---------------------------------------------------------------------------
// Lexicon
// ---------------------------------------------------------------------------

Lexicon published_lexicon() {
    return Lexicon{{"climate", "climatechange", "globalwarming", "climaterealists", "agw"}, 1};
}

int lexicon_classify(const TokenList& tokens, const Lexicon& lexicon) {
    std::size_t matches = 0;
    for (const auto& tok : tokens) {
        if (lexicon.key_terms.count(tok)) {
            if (++matches >= lexicon.min_matches) return 1;
        }
    }
    return 0;
}

std::vector<double> LexiconModel::decision_scores(const FeatureMatrix&) const {
    throw DataError("lexicon model scores token lists, not feature matrices");
}

Prediction LexiconModel::classify_tokens(const std::vector<TokenList>& docs) const {
    Prediction p;
    p.labels.reserve(docs.size());
    p.scores.reserve(docs.size());
    for (const auto& doc : docs) {
        int label = lexicon_classify(doc, lexicon_);
        p.labels.push_back(label);
        p.scores.push_back(static_cast<double>(label));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

double logreg_loss(const FeatureMatrix& x, const std::vector<int>& y,
                   const std::vector<double>& weights, double bias, double l2_strength) {
    const double n = static_cast<double>(x.n_rows());
    double loss = 0.0;
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        double z = sparse_margin(x.rows[i], weights, bias);
        // stable BCE on logits: max(z,0) - z*y + log(1 + exp(-|z|))
        loss += std::max(z, 0.0) - z * y[i] + std::log1p(std::exp(-std::abs(z)));
    }
    loss /= n;
    double sq = 0.0;
    for (double w : weights) sq += w * w;
    return loss + 0.5 * l2_strength * sq;
}

std::vector<double> LogRegModel::decision_scores(const FeatureMatrix& x) const {
    std::vector<double> out(x.n_rows());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(x.n_rows()); ++i)
        out[static_cast<std::size_t>(i)] =
            sigmoid(sparse_margin(x.rows[static_cast<std::size_t>(i)], weights_, bias_));
    return out;
}

std::unique_ptr<LogRegModel> train_logreg(const FeatureMatrix& x,
                                          const std::vector<int>& y,
                                          const LogRegConfig& config) {
    if (x.n_rows() != y.size()) throw DataError("train_logreg: X rows != |y|");
    if (x.n_rows() == 0) throw DataError("train_logreg: empty training set");
    const std::size_t n = x.n_rows();
    const std::size_t m = x.n_cols;

    std::vector<double> w(m, 0.0);
    double b = 0.0;
    double lr = config.learning_rate;
    double loss = logreg_loss(x, y, w, b, config.l2_strength);
    if (!std::isfinite(loss)) throw NumericError("train_logreg: non-finite initial loss");

    std::vector<double> grad_w(m);
    std::vector<double> cand_w(m);
    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double err = sigmoid(sparse_margin(x.rows[i], w, b)) - y[i];
            for (const auto& [j, v] : x.rows[i]) grad_w[j] += err * v;
            grad_b += err;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < m; ++j)
            grad_w[j] = grad_w[j] * inv_n + config.l2_strength * w[j];
        grad_b *= inv_n;

        // Step-halving keeps the regularized loss non-increasing.
        bool accepted = false;
        double new_loss = loss;
        for (int half = 0; half < 50; ++half) {
            for (std::size_t j = 0; j < m; ++j) cand_w[j] = w[j] - lr * grad_w[j];
            double cand_b = b - lr * grad_b;
            new_loss = logreg_loss(x, y, cand_w, cand_b, config.l2_strength);
            if (std::isfinite(new_loss) && new_loss <= loss) {
                w.swap(cand_w);
                b = cand_b;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) break;  // no descent direction at float precision
        if (!std::isfinite(new_loss))
            throw NumericError("train_logreg: non-finite loss (learning rate too large)");
        if (loss - new_loss < config.tol) {
            loss = new_loss;
            break;
        }
        loss = new_loss;
    }

    FeatureKind fk = x.rep == Representation::tfidf ? FeatureKind::tfidf : FeatureKind::counts;
    return std::make_unique<LogRegModel>(std::move(w), b, fk);
}

// ---------------------------------------------------------------------------
// Linear SVM
// ---------------------------------------------------------------------------

double svm_objective(const FeatureMatrix& x, const std::vector<int>& y,
                     const std::vector<double>& weights, double bias, double c) {
    double sq = 0.0;
    for (double w : weights) sq += w * w;
    double hinge_sum = 0.0;
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        double yy = y[i] == 1 ? 1.0 : -1.0;
        double margin = yy * sparse_margin(x.rows[i], weights, bias);
        hinge_sum += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * sq + c * hinge_sum;
}

std::vector<double> LinearSvmModel::decision_scores(const FeatureMatrix& x) const {
    std::vector<double> out(x.n_rows());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(x.n_rows()); ++i)
        out[static_cast<std::size_t>(i)] =
            sparse_margin(x.rows[static_cast<std::size_t>(i)], weights_, bias_);
    return out;
}

std::unique_ptr<LinearSvmModel> train_linear_svm(const FeatureMatrix& x,
                                                 const std::vector<int>& y,
                                                 const SvmConfig& config) {
    if (x.n_rows() != y.size()) throw DataError("train_linear_svm: X rows != |y|");
    if (x.n_rows() == 0) throw DataError("train_linear_svm: empty training set");
    if (config.c <= 0.0) throw DataError("train_linear_svm: C must be positive");
    const std::size_t n = x.n_rows();
    const std::size_t m = x.n_cols;
    // The C-form objective rescaled to lambda/2 ||w||^2 + mean hinge.
    const double lambda = 1.0 / (config.c * static_cast<double>(n));

    std::vector<double> w(m, 0.0);
    double b = 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, 0x57a7));

    // Step counter starts one epoch in: 1/(lambda t) at t=1 equals C*N, which
    // launches the unregularized bias into the void; offset keeps early steps
    // at O(C) while preserving the 1/(lambda t) schedule.
    std::size_t t = n;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto& row = x.rows[idx];
            const double yy = y[idx] == 1 ? 1.0 : -1.0;
            const double margin = yy * sparse_margin(row, w, b);
            const double decay = 1.0 - eta * lambda;  // = 1 - 1/t
            for (double& wj : w) wj *= decay;
            if (margin < 1.0) {
                for (const auto& [j, v] : row) w[j] += eta * yy * v;
                b += eta * yy;
            }
        }
        for (double wj : w)
            if (!std::isfinite(wj))
                throw NumericError("train_linear_svm: divergent weights");
    }

    FeatureKind fk = x.rep == Representation::tfidf ? FeatureKind::tfidf : FeatureKind::counts;
    return std::make_unique<LinearSvmModel>(std::move(w), b, fk);
}

// ---------------------------------------------------------------------------
// Multinomial naive Bayes
// ---------------------------------------------------------------------------

std::vector<double> MultinomialNbModel::decision_scores(const FeatureMatrix& x) const {
    std::vector<double> out(x.n_rows());
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(x.n_rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double s_pos = log_prior_pos_;
        double s_neg = log_prior_neg_;
        for (const auto& [j, v] : x.rows[i]) {
            s_pos += v * log_lik_pos_[j];
            s_neg += v * log_lik_neg_[j];
        }
        double hi = std::max(s_pos, s_neg);
        double lse = hi + std::log(std::exp(s_pos - hi) + std::exp(s_neg - hi));
        out[i] = std::exp(s_pos - lse);
    }
    return out;
}

std::unique_ptr<MultinomialNbModel> train_multinomial_nb(const FeatureMatrix& x,
                                                         const std::vector<int>& y,
                                                         double alpha) {
    if (x.n_rows() != y.size()) throw DataError("train_multinomial_nb: X rows != |y|");
    if (x.rep != Representation::counts)
        throw DataError("train_multinomial_nb: multinomial likelihood is defined on counts, "
                        "got tfidf");
    if (alpha <= 0.0) throw DataError("train_multinomial_nb: alpha must be positive");

    const std::size_t m = x.n_cols;
    std::vector<double> count_pos(m, 0.0), count_neg(m, 0.0);
    double total_pos = 0.0, total_neg = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        auto& counts = y[i] == 1 ? count_pos : count_neg;
        auto& total = y[i] == 1 ? total_pos : total_neg;
        (y[i] == 1 ? n_pos : n_neg)++;
        for (const auto& [j, v] : x.rows[i]) {
            counts[j] += v;
            total += v;
        }
    }
    if (n_pos == 0 || n_neg == 0)
        throw DataError("train_multinomial_nb: a class is absent from the training data");

    const double n = static_cast<double>(x.n_rows());
    const double v_count = static_cast<double>(m);
    std::vector<double> ll_pos(m), ll_neg(m);
    for (std::size_t j = 0; j < m; ++j) {
        ll_pos[j] = std::log((count_pos[j] + alpha) / (total_pos + alpha * v_count));
        ll_neg[j] = std::log((count_neg[j] + alpha) / (total_neg + alpha * v_count));
    }
    return std::make_unique<MultinomialNbModel>(
        std::log(static_cast<double>(n_pos) / n), std::log(static_cast<double>(n_neg) / n),
        std::move(ll_pos), std::move(ll_neg));
}

// ---------------------------------------------------------------------------
// k nearest neighbors
// ---------------------------------------------------------------------------

namespace {

double sq_norm(const kernels::SparseRow& row) {
    double s = 0.0;
    for (const auto& [_, v] : row) s += v * v;
    return s;
}

// Indices of the k nearest rows; distance ties broken by lower index.
std::vector<std::size_t> k_nearest(const kernels::SparseRow& query,
                                   const FeatureMatrix& train_x,
                                   const std::vector<double>& row_sq_norms,
                                   std::size_t k) {
    std::vector<double> dists;
    kernels::sq_distances(query, sq_norm(query), train_x.rows, row_sq_norms, dists);
    std::vector<std::size_t> idx(dists.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (dists[a] != dists[b]) return dists[a] < dists[b];
                          return a < b;
                      });
    idx.resize(k);
    return idx;
}

void check_k(std::size_t k, std::size_t n_train) {
    if (n_train == 0) throw DataError("knn: empty training set");
    if (k == 0 || k % 2 == 0) throw DataError("knn: k must be odd, got " + std::to_string(k));
    if (k > n_train) throw DataError("knn: k exceeds training size");
}

}  // namespace

int knn_predict(const FeatureMatrix& train_x, const std::vector<int>& train_y,
                const kernels::SparseRow& query, std::size_t k) {
    check_k(k, train_x.n_rows());
    std::vector<double> norms(train_x.n_rows());
    for (std::size_t i = 0; i < train_x.n_rows(); ++i) norms[i] = sq_norm(train_x.rows[i]);
    auto nearest = k_nearest(query, train_x, norms, k);
    std::size_t votes = 0;
    for (std::size_t i : nearest) votes += (train_y[i] == 1);
    return 2 * votes > k ? 1 : 0;
}

KnnModel::KnnModel(FeatureMatrix train_x, std::vector<int> train_y, std::size_t k,
                   std::size_t leaf_size)
    : train_x_(std::move(train_x)),
      train_y_(std::move(train_y)),
      k_(k),
      leaf_size_(leaf_size) {
    check_k(k_, train_x_.n_rows());
    if (train_x_.n_rows() != train_y_.size()) throw DataError("knn: X rows != |y|");
    row_sq_norms_.resize(train_x_.n_rows());
    for (std::size_t i = 0; i < train_x_.n_rows(); ++i)
        row_sq_norms_[i] = sq_norm(train_x_.rows[i]);
}

std::vector<double> KnnModel::decision_scores(const FeatureMatrix& x) const {
    std::vector<double> out(x.n_rows());
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        auto nearest = k_nearest(x.rows[i], train_x_, row_sq_norms_, k_);
        std::size_t votes = 0;
        for (std::size_t t : nearest) votes += (train_y_[t] == 1);
        out[i] = static_cast<double>(votes) / static_cast<double>(k_);
    }
    return out;
}

}  // namespace shortclass::classic
