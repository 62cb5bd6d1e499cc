#pragma once

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shortclass/classic.hpp"
#include "shortclass/neural.hpp"
#include "shortclass/textprep.hpp"
#include "shortclass/tune.hpp"
#include "shortclass/vectorize.hpp"

namespace shortclass::model_io {

using nlohmann::json;

// A fully self-contained fitted method: text prep + vocabulary + learned
// model, enough to score raw texts. This is the envelope the CLI `train`
// command writes and `evaluate` reads.
struct TrainedMethod {
    std::string method;  // lexicon|logreg|svm|nb|knn|rf|fcnn|cnn|lstm
    textprep::PrepConfig prep;
    std::optional<vectorize::Vocabulary> vocab;
    vectorize::Representation rep = vectorize::Representation::counts;
    std::size_t max_len = 0;  // sequence models
    std::shared_ptr<classic::ClassifierModel> classic_model;
    std::optional<neural::TrainedNet> net;
    json hyperparameters;  // tuned or supplied config, echoed for audit

    bool is_neural() const { return net.has_value(); }
    // raw_tokens are cleaned but unstemmed; the lexicon matches them as-is,
    // everything else consumes the prep-configured (possibly stemmed) form.
    classic::Prediction predict_tokens(const std::vector<textprep::TokenList>& raw_tokens) const;
    classic::Prediction predict_texts(const std::vector<std::string>& texts) const;
};

json prep_to_json(const textprep::PrepConfig& prep);
textprep::PrepConfig prep_from_json(const json& j);

json vocab_to_json(const vectorize::Vocabulary& vocab);
vectorize::Vocabulary vocab_from_json(const json& j);

json classic_model_to_json(const classic::ClassifierModel& model);
std::shared_ptr<classic::ClassifierModel> classic_model_from_json(const json& j);

json net_to_json(const neural::TrainedNet& net);
neural::TrainedNet net_from_json(const json& j);

json trained_method_to_json(const TrainedMethod& tm);
TrainedMethod trained_method_from_json(const json& j);

void save_model(const TrainedMethod& tm, const std::string& path);
TrainedMethod load_model(const std::string& path);

json param_map_to_json(const tune::ParamMap& config);
tune::ParamMap param_map_from_json(const json& j);

}  // namespace shortclass::model_io
