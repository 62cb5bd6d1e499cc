#include "shortclass/model_io.hpp"

#include <algorithm>
#include <fstream>

#include "shortclass/common.hpp"

namespace shortclass::model_io {

namespace {

constexpr int kFormatVersion = 1;

json sparse_row_to_json(const kernels::SparseRow& row) {
    json idx = json::array(), val = json::array();
    for (const auto& [j, v] : row) {
        idx.push_back(j);
        val.push_back(v);
    }
    return json{{"idx", idx}, {"val", val}};
}

kernels::SparseRow sparse_row_from_json(const json& j) {
    kernels::SparseRow row;
    const auto& idx = j.at("idx");
    const auto& val = j.at("val");
    for (std::size_t i = 0; i < idx.size(); ++i)
        row.emplace_back(idx[i].get<std::uint32_t>(), val[i].get<double>());
    return row;
}

json tensor_to_json(const neural::Tensor& t) {
    return json{{"rows", t.rows}, {"cols", t.cols}, {"data", t.data}};
}

neural::Tensor tensor_from_json(const json& j) {
    neural::Tensor t(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    t.data = j.at("data").get<std::vector<double>>();
    if (t.data.size() != t.rows * t.cols) throw DataError("tensor shape/data mismatch");
    return t;
}

}  // namespace

json prep_to_json(const textprep::PrepConfig& prep) {
    std::vector<std::string> stopwords(prep.stopwords.begin(), prep.stopwords.end());
    std::sort(stopwords.begin(), stopwords.end());
    return json{{"lowercase", prep.lowercase},
                {"strip_urls", prep.strip_urls},
                {"strip_mentions", prep.strip_mentions},
                {"keep_hashtag_word", prep.keep_hashtag_word},
                {"min_token_len", prep.min_token_len},
                {"stopwords", stopwords},
                {"stemming", prep.stemming}};
}

textprep::PrepConfig prep_from_json(const json& j) {
    textprep::PrepConfig prep;
    prep.lowercase = j.at("lowercase").get<bool>();
    prep.strip_urls = j.at("strip_urls").get<bool>();
    prep.strip_mentions = j.at("strip_mentions").get<bool>();
    prep.keep_hashtag_word = j.at("keep_hashtag_word").get<bool>();
    prep.min_token_len = j.at("min_token_len").get<std::size_t>();
    for (const auto& w : j.at("stopwords")) prep.stopwords.insert(w.get<std::string>());
    prep.stemming = j.at("stemming").get<bool>();
    return prep;
}

json vocab_to_json(const vectorize::Vocabulary& vocab) {
    return json{{"tokens", vocab.index_to_token},
                {"doc_frequency", vocab.doc_frequency},
                {"corpus_frequency", vocab.corpus_frequency},
                {"max_features", vocab.max_features},
                {"n_docs_fitted", vocab.n_docs_fitted},
                {"fit_fingerprint", hex64(vocab.fit_fingerprint)}};
}

vectorize::Vocabulary vocab_from_json(const json& j) {
    vectorize::Vocabulary vocab;
    vocab.index_to_token = j.at("tokens").get<std::vector<std::string>>();
    vocab.doc_frequency = j.at("doc_frequency").get<std::vector<std::size_t>>();
    vocab.corpus_frequency = j.at("corpus_frequency").get<std::vector<std::size_t>>();
    vocab.max_features = j.at("max_features").get<std::size_t>();
    vocab.n_docs_fitted = j.at("n_docs_fitted").get<std::size_t>();
    vocab.fit_fingerprint = std::stoull(j.at("fit_fingerprint").get<std::string>(), nullptr, 16);
    for (std::size_t i = 0; i < vocab.index_to_token.size(); ++i)
        vocab.token_to_index.emplace(vocab.index_to_token[i], static_cast<std::uint32_t>(i));
    return vocab;
}

json classic_model_to_json(const classic::ClassifierModel& model) {
    using classic::ModelKind;
    json j;
    j["kind"] = classic::to_string(model.kind());
    j["feature_kind"] = classic::to_string(model.feature_kind());
    j["threshold"] = model.threshold();
    switch (model.kind()) {
        case ModelKind::lexicon: {
            const auto& m = static_cast<const classic::LexiconModel&>(model);
            std::vector<std::string> terms(m.lexicon().key_terms.begin(),
                                           m.lexicon().key_terms.end());
            std::sort(terms.begin(), terms.end());
            j["key_terms"] = terms;
            j["min_matches"] = m.lexicon().min_matches;
            break;
        }
        case ModelKind::logreg: {
            const auto& m = static_cast<const classic::LogRegModel&>(model);
            j["weights"] = m.weights();
            j["bias"] = m.bias();
            break;
        }
        case ModelKind::svm: {
            const auto& m = static_cast<const classic::LinearSvmModel&>(model);
            j["weights"] = m.weights();
            j["bias"] = m.bias();
            break;
        }
        case ModelKind::nb: {
            const auto& m = static_cast<const classic::MultinomialNbModel&>(model);
            j["log_prior_pos"] = m.log_prior_pos();
            j["log_prior_neg"] = m.log_prior_neg();
            j["log_lik_pos"] = m.log_lik_pos();
            j["log_lik_neg"] = m.log_lik_neg();
            break;
        }
        case ModelKind::knn: {
            const auto& m = static_cast<const classic::KnnModel&>(model);
            j["k"] = m.k();
            j["leaf_size"] = m.leaf_size();
            j["n_cols"] = m.train_x().n_cols;
            j["train_y"] = m.train_y();
            json rows = json::array();
            for (const auto& row : m.train_x().rows) rows.push_back(sparse_row_to_json(row));
            j["train_rows"] = rows;
            break;
        }
        case ModelKind::rf: {
            const auto& m = static_cast<const classic::RandomForestModel&>(model);
            j["n_features"] = m.n_features();
            json trees = json::array();
            for (const auto& tree : m.trees()) {
                json nodes = json::array();
                for (const auto& n : tree.nodes)
                    nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right,
                                                 n.leaf_label}));
                trees.push_back(nodes);
            }
            j["trees"] = trees;
            break;
        }
    }
    return j;
}

std::shared_ptr<classic::ClassifierModel> classic_model_from_json(const json& j) {
    using classic::ModelKind;
    ModelKind kind = classic::model_kind_from_string(j.at("kind").get<std::string>());
    classic::FeatureKind fk =
        classic::feature_kind_from_string(j.at("feature_kind").get<std::string>());
    switch (kind) {
        case ModelKind::lexicon: {
            classic::Lexicon lex;
            for (const auto& t : j.at("key_terms")) lex.key_terms.insert(t.get<std::string>());
            lex.min_matches = j.at("min_matches").get<std::size_t>();
            return std::make_shared<classic::LexiconModel>(std::move(lex));
        }
        case ModelKind::logreg:
            return std::make_shared<classic::LogRegModel>(
                j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(), fk);
        case ModelKind::svm:
            return std::make_shared<classic::LinearSvmModel>(
                j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(), fk);
        case ModelKind::nb:
            return std::make_shared<classic::MultinomialNbModel>(
                j.at("log_prior_pos").get<double>(), j.at("log_prior_neg").get<double>(),
                j.at("log_lik_pos").get<std::vector<double>>(),
                j.at("log_lik_neg").get<std::vector<double>>());
        case ModelKind::knn: {
            vectorize::FeatureMatrix x;
            x.n_cols = j.at("n_cols").get<std::size_t>();
            x.rep = fk == classic::FeatureKind::tfidf ? vectorize::Representation::tfidf
                                                      : vectorize::Representation::counts;
            for (const auto& row : j.at("train_rows")) x.rows.push_back(sparse_row_from_json(row));
            return std::make_shared<classic::KnnModel>(
                std::move(x), j.at("train_y").get<std::vector<int>>(),
                j.at("k").get<std::size_t>(), j.at("leaf_size").get<std::size_t>());
        }
        case ModelKind::rf: {
            std::vector<classic::DecisionTree> trees;
            for (const auto& tj : j.at("trees")) {
                classic::DecisionTree tree;
                for (const auto& nj : tj) {
                    classic::TreeNode n;
                    n.feature = nj[0].get<std::int32_t>();
                    n.threshold = nj[1].get<double>();
                    n.left = nj[2].get<std::int32_t>();
                    n.right = nj[3].get<std::int32_t>();
                    n.leaf_label = nj[4].get<std::int32_t>();
                    tree.nodes.push_back(n);
                }
                trees.push_back(std::move(tree));
            }
            return std::make_shared<classic::RandomForestModel>(
                std::move(trees), j.at("n_features").get<std::size_t>(), fk);
        }
    }
    throw DataError("unreachable model kind");
}

namespace {

json net_config_to_json(const neural::NetConfig& c) {
    return json{{"embedding_dim", c.embedding_dim},
                {"units", c.units},
                {"filters", c.filters},
                {"kernel_size", c.kernel_size},
                {"layer_dropout", c.layer_dropout},
                {"dropout_rate", c.dropout_rate},
                {"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"epochs", c.epochs},
                {"patience", c.patience},
                {"l2_strength", c.l2_strength},
                {"max_vocab", c.max_vocab},
                {"max_len", c.max_len},
                {"seed", c.seed},
                {"bidirectional", c.bidirectional}};
}

neural::NetConfig net_config_from_json(const json& j) {
    neural::NetConfig c;
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.units = j.at("units").get<std::size_t>();
    c.filters = j.at("filters").get<std::size_t>();
    c.kernel_size = j.at("kernel_size").get<std::size_t>();
    c.layer_dropout = j.at("layer_dropout").get<double>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.l2_strength = j.at("l2_strength").get<double>();
    c.max_vocab = j.at("max_vocab").get<std::size_t>();
    c.max_len = j.at("max_len").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.bidirectional = j.at("bidirectional").get<bool>();
    return c;
}

}  // namespace

json net_to_json(const neural::TrainedNet& net) {
    json params = json::object();
    for (const auto& [name, tensor] : net.params) params[name] = tensor_to_json(tensor);
    json history = json::array();
    for (const auto& e : net.history)
        history.push_back(json{{"train_loss", e.train_loss}, {"valid_loss", e.valid_loss}});
    return json{{"arch", neural::to_string(net.arch)},
                {"config", net_config_to_json(net.config)},
                {"vocab_size", net.vocab_size},
                {"best_epoch", net.best_epoch},
                {"history", history},
                {"params", params}};
}

neural::TrainedNet net_from_json(const json& j) {
    neural::TrainedNet net;
    net.arch = neural::arch_from_string(j.at("arch").get<std::string>());
    net.config = net_config_from_json(j.at("config"));
    net.vocab_size = j.at("vocab_size").get<std::size_t>();
    net.best_epoch = j.at("best_epoch").get<std::size_t>();
    for (const auto& e : j.at("history"))
        net.history.push_back(
            {e.at("train_loss").get<double>(), e.at("valid_loss").get<double>()});
    // Parameter order matters for graph rebuilds; keep the canonical order.
    std::vector<std::string> order = {"embedding", "w1", "b1", "conv_w", "conv_b",
                                      "w_gates", "u_gates", "b_gates", "w_gates_bwd",
                                      "u_gates_bwd", "b_gates_bwd", "w2", "b2"};
    for (const auto& name : order)
        if (j.at("params").contains(name))
            net.params.emplace_back(name, tensor_from_json(j.at("params").at(name)));
    return net;
}

classic::Prediction TrainedMethod::predict_tokens(
    const std::vector<textprep::TokenList>& raw_tokens) const {
    if (method == "lexicon") {
        const auto& lex = static_cast<const classic::LexiconModel&>(*classic_model);
        return lex.classify_tokens(raw_tokens);
    }
    std::vector<textprep::TokenList> tokens;
    const std::vector<textprep::TokenList>* use = &raw_tokens;
    if (prep.stemming) {
        tokens.reserve(raw_tokens.size());
        for (const auto& t : raw_tokens) tokens.push_back(textprep::stem_tokens(t));
        use = &tokens;
    }
    if (!vocab) throw DataError("model has no vocabulary");
    if (is_neural()) {
        auto batch = vectorize::sequence_batch(*use, *vocab, max_len);
        classic::Prediction p;
        p.scores = net->score_probs(batch);
        for (double s : p.scores) p.labels.push_back(s >= 0.5 ? 1 : 0);
        return p;
    }
    auto counts = vectorize::count_matrix(*use, *vocab);
    if (rep == vectorize::Representation::tfidf) {
        auto tfidf = vectorize::tfidf_transform(counts, *vocab);
        return classic_model->classify(tfidf);
    }
    return classic_model->classify(counts);
}

classic::Prediction TrainedMethod::predict_texts(const std::vector<std::string>& texts) const {
    textprep::PrepConfig clean_prep = prep;
    clean_prep.stemming = false;  // lexicon matches pre-stem tokens
    std::vector<textprep::TokenList> raw_tokens(texts.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(texts.size()); ++i)
        raw_tokens[static_cast<std::size_t>(i)] =
            textprep::clean_and_tokenize(texts[static_cast<std::size_t>(i)], clean_prep);
    return predict_tokens(raw_tokens);
}

json trained_method_to_json(const TrainedMethod& tm) {
    json j;
    j["format_version"] = kFormatVersion;
    j["method"] = tm.method;
    j["prep"] = prep_to_json(tm.prep);
    j["representation"] = tm.rep == vectorize::Representation::tfidf ? "tfidf" : "counts";
    j["max_len"] = tm.max_len;
    j["hyperparameters"] = tm.hyperparameters.is_null() ? json::object() : tm.hyperparameters;
    if (tm.vocab) j["vocabulary"] = vocab_to_json(*tm.vocab);
    if (tm.net)
        j["model"] = net_to_json(*tm.net);
    else
        j["model"] = classic_model_to_json(*tm.classic_model);
    return j;
}

TrainedMethod trained_method_from_json(const json& j) {
    int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
        throw DataError("unsupported model format version " + std::to_string(version));
    TrainedMethod tm;
    tm.method = j.at("method").get<std::string>();
    tm.prep = prep_from_json(j.at("prep"));
    tm.rep = j.at("representation").get<std::string>() == "tfidf"
                 ? vectorize::Representation::tfidf
                 : vectorize::Representation::counts;
    tm.max_len = j.at("max_len").get<std::size_t>();
    tm.hyperparameters = j.at("hyperparameters");
    if (j.contains("vocabulary")) tm.vocab = vocab_from_json(j.at("vocabulary"));
    if (tm.method == "fcnn" || tm.method == "cnn" || tm.method == "lstm")
        tm.net = net_from_json(j.at("model"));
    else
        tm.classic_model = classic_model_from_json(j.at("model"));
    return tm;
}

void save_model(const TrainedMethod& tm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);
    out << trained_method_to_json(tm).dump(2) << "\n";
}

TrainedMethod load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed model JSON in " + path + ": " + e.what());
    }
    return trained_method_from_json(j);
}

json param_map_to_json(const tune::ParamMap& config) {
    json j = json::object();
    for (const auto& [name, v] : config) {
        switch (v.type) {
            case tune::ParamValue::Type::real: j[name] = v.real; break;
            case tune::ParamValue::Type::integer: j[name] = v.integer; break;
            case tune::ParamValue::Type::categorical: j[name] = v.categorical; break;
        }
    }
    return j;
}

tune::ParamMap param_map_from_json(const json& j) {
    tune::ParamMap config;
    for (const auto& [name, v] : j.items()) {
        if (v.is_string())
            config[name] = tune::ParamValue::of(v.get<std::string>());
        else if (v.is_number_integer())
            config[name] = tune::ParamValue::of(v.get<long long>());
        else
            config[name] = tune::ParamValue::of(v.get<double>());
    }
    return config;
}

}  // namespace shortclass::model_io
