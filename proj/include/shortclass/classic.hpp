#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "shortclass/vectorize.hpp"

namespace shortclass::classic {

using vectorize::FeatureMatrix;
using vectorize::Representation;
using textprep::TokenList;

enum class ModelKind { lexicon, logreg, svm, nb, knn, rf };
enum class FeatureKind { counts, tfidf, tokens };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct Prediction {
    std::vector<int> labels;
    std::vector<double> scores;
};

// Unified contract: scores are monotone in each model's native decision
// value; probabilistic kinds label score >= threshold, margin kinds
// score >= 0. Fitted models are immutable and safe for concurrent scoring.
class ClassifierModel {
public:
    virtual ~ClassifierModel() = default;
    virtual ModelKind kind() const = 0;
    virtual FeatureKind feature_kind() const = 0;
    virtual double threshold() const { return 0.5; }
    virtual std::size_t n_features() const = 0;
    virtual std::vector<double> decision_scores(const FeatureMatrix& x) const = 0;
    virtual int label_from_score(double score) const { return score >= threshold() ? 1 : 0; }
    Prediction classify(const FeatureMatrix& x) const;
};

Prediction classify(const ClassifierModel& model, const FeatureMatrix& x);

// ---------------------------------------------------------------------------
// Lexicon
// ---------------------------------------------------------------------------

struct Lexicon {
    std::unordered_set<std::string> key_terms;
    std::size_t min_matches = 1;
};

// The benchmark default: a published climate keyword lexicon.
Lexicon published_lexicon();

int lexicon_classify(const TokenList& tokens, const Lexicon& lexicon);

class LexiconModel : public ClassifierModel {
public:
    explicit LexiconModel(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
    ModelKind kind() const override { return ModelKind::lexicon; }
    FeatureKind feature_kind() const override { return FeatureKind::tokens; }
    std::size_t n_features() const override { return 0; }
    std::vector<double> decision_scores(const FeatureMatrix&) const override;
    Prediction classify_tokens(const std::vector<TokenList>& docs) const;
    const Lexicon& lexicon() const { return lexicon_; }

private:
    Lexicon lexicon_;
};

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LogRegConfig {
    double l2_strength = 1e-4;
    double learning_rate = 1.0;
    std::size_t max_iter = 500;
    double tol = 1e-7;
    std::uint64_t seed = 0;
};

class LogRegModel : public ClassifierModel {
public:
    LogRegModel(std::vector<double> weights, double bias, FeatureKind fk)
        : weights_(std::move(weights)), bias_(bias), feature_kind_(fk) {}
    ModelKind kind() const override { return ModelKind::logreg; }
    FeatureKind feature_kind() const override { return feature_kind_; }
    std::size_t n_features() const override { return weights_.size(); }
    std::vector<double> decision_scores(const FeatureMatrix& x) const override;
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
    FeatureKind feature_kind_;
};

// Full-batch gradient descent on L2-regularized binary cross-entropy with
// step-halving; the regularized loss never increases across iterations.
std::unique_ptr<LogRegModel> train_logreg(const FeatureMatrix& x,
                                          const std::vector<int>& y,
                                          const LogRegConfig& config);

double logreg_loss(const FeatureMatrix& x, const std::vector<int>& y,
                   const std::vector<double>& weights, double bias, double l2_strength);

// ---------------------------------------------------------------------------
// Linear SVM
// ---------------------------------------------------------------------------

struct SvmConfig {
    double c = 1.0;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
};

class LinearSvmModel : public ClassifierModel {
public:
    LinearSvmModel(std::vector<double> weights, double bias, FeatureKind fk)
        : weights_(std::move(weights)), bias_(bias), feature_kind_(fk) {}
    ModelKind kind() const override { return ModelKind::svm; }
    FeatureKind feature_kind() const override { return feature_kind_; }
    double threshold() const override { return 0.0; }
    std::size_t n_features() const override { return weights_.size(); }
    std::vector<double> decision_scores(const FeatureMatrix& x) const override;
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
    FeatureKind feature_kind_;
};

// Epoch-shuffled subgradient descent with step 1/(lambda t) on
// (1/2)||w||^2 + C sum hinge. Scores are raw margins.
std::unique_ptr<LinearSvmModel> train_linear_svm(const FeatureMatrix& x,
                                                 const std::vector<int>& y,
                                                 const SvmConfig& config);

double svm_objective(const FeatureMatrix& x, const std::vector<int>& y,
                     const std::vector<double>& weights, double bias, double c);

// ---------------------------------------------------------------------------
// Multinomial naive Bayes
// ---------------------------------------------------------------------------

class MultinomialNbModel : public ClassifierModel {
public:
    MultinomialNbModel(double log_prior_pos, double log_prior_neg,
                       std::vector<double> log_lik_pos, std::vector<double> log_lik_neg)
        : log_prior_pos_(log_prior_pos),
          log_prior_neg_(log_prior_neg),
          log_lik_pos_(std::move(log_lik_pos)),
          log_lik_neg_(std::move(log_lik_neg)) {}
    ModelKind kind() const override { return ModelKind::nb; }
    FeatureKind feature_kind() const override { return FeatureKind::counts; }
    std::size_t n_features() const override { return log_lik_pos_.size(); }
    // Posterior probability of class 1, normalized via log-sum-exp.
    std::vector<double> decision_scores(const FeatureMatrix& x) const override;
    double log_prior_pos() const { return log_prior_pos_; }
    double log_prior_neg() const { return log_prior_neg_; }
    const std::vector<double>& log_lik_pos() const { return log_lik_pos_; }
    const std::vector<double>& log_lik_neg() const { return log_lik_neg_; }

private:
    double log_prior_pos_;
    double log_prior_neg_;
    std::vector<double> log_lik_pos_;
    std::vector<double> log_lik_neg_;
};

std::unique_ptr<MultinomialNbModel> train_multinomial_nb(const FeatureMatrix& x,
                                                         const std::vector<int>& y,
                                                         double alpha);

// ---------------------------------------------------------------------------
// k nearest neighbors
// ---------------------------------------------------------------------------

int knn_predict(const FeatureMatrix& train_x, const std::vector<int>& train_y,
                const kernels::SparseRow& query, std::size_t k);

class KnnModel : public ClassifierModel {
public:
    KnnModel(FeatureMatrix train_x, std::vector<int> train_y, std::size_t k,
             std::size_t leaf_size = 30);
    ModelKind kind() const override { return ModelKind::knn; }
    FeatureKind feature_kind() const override {
        return train_x_.rep == Representation::tfidf ? FeatureKind::tfidf : FeatureKind::counts;
    }
    std::size_t n_features() const override { return train_x_.n_cols; }
    // Fraction of the k nearest neighbors labeled 1; k odd keeps it off 0.5.
    std::vector<double> decision_scores(const FeatureMatrix& x) const override;
    std::size_t k() const { return k_; }
    std::size_t leaf_size() const { return leaf_size_; }
    const FeatureMatrix& train_x() const { return train_x_; }
    const std::vector<int>& train_y() const { return train_y_; }

private:
    FeatureMatrix train_x_;
    std::vector<int> train_y_;
    std::vector<double> row_sq_norms_;
    std::size_t k_;
    std::size_t leaf_size_;  // spatial-index knob, accepted and ignored (brute force)
};

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct RandomForestConfig {
    std::size_t n_trees = 50;
    std::size_t max_depth = 12;    // 0 = unlimited
    std::size_t max_features = 0;  // 0 = ceil(sqrt(M))
    bool bootstrap = true;         // test hook
    std::uint64_t seed = 0;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf_label = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int predict(const kernels::SparseRow& row) const;
};

class RandomForestModel : public ClassifierModel {
public:
    RandomForestModel(std::vector<DecisionTree> trees, std::size_t n_features,
                      FeatureKind fk)
        : trees_(std::move(trees)), n_features_(n_features), feature_kind_(fk) {}
    ModelKind kind() const override { return ModelKind::rf; }
    FeatureKind feature_kind() const override { return feature_kind_; }
    std::size_t n_features() const override { return n_features_; }
    // Fraction of trees voting 1; an exact tie predicts the negative class.
    std::vector<double> decision_scores(const FeatureMatrix& x) const override;
    int label_from_score(double score) const override { return score > 0.5 ? 1 : 0; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

private:
    std::vector<DecisionTree> trees_;
    std::size_t n_features_;
    FeatureKind feature_kind_;
};

// Bagged Gini trees; per-tree seeds derive from (seed, tree index) so the
// forest is identical regardless of how tree training is scheduled.
std::unique_ptr<RandomForestModel> train_random_forest(const FeatureMatrix& x,
                                                       const std::vector<int>& y,
                                                       const RandomForestConfig& config);

}  // namespace shortclass::classic
