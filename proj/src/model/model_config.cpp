#include "skelact/model/model_config.hpp"

#include <json.hpp>

#include "skelact/common/error.hpp"

namespace skelact {

void ModelConfig::validate() const {
    if (input_channels < 3 || input_channels % 3 != 0)
        throw ConfigError("model.input_channels must be a positive multiple of 3");
    if (num_classes < 2) throw ConfigError("model.num_classes must be >= 2");
    if (stem_filters < 1) throw ConfigError("model.stem_filters must be >= 1");
    if (kernel_size < 1) throw ConfigError("model.kernel_size must be >= 1");
    if (dropout_prob < 0.0 || dropout_prob >= 1.0)
        throw ConfigError("model.dropout_prob must be in [0, 1)");
    if (stages.empty()) throw ConfigError("model.stages must be non-empty");
    for (size_t i = 0; i < stages.size(); ++i) {
        const StageSpec& s = stages[i];
        if (s.blocks < 1)
            throw ConfigError("model.stages[" + std::to_string(i) +
                              "].blocks must be >= 1");
        if (s.filters < 1)
            throw ConfigError("model.stages[" + std::to_string(i) +
                              "].filters must be >= 1");
        if (s.stride != 1 && s.stride != 2)
            throw ConfigError("model.stages[" + std::to_string(i) +
                              "].stride must be 1 or 2");
    }
}

std::string ModelConfig::to_json_text() const {
    nlohmann::ordered_json doc;
    doc["input_channels"] = input_channels;
    doc["num_classes"] = num_classes;
    doc["stem_filters"] = stem_filters;
    auto stages_arr = nlohmann::ordered_json::array();
    for (const StageSpec& s : stages)
        stages_arr.push_back({s.blocks, s.filters, s.stride});
    doc["stages"] = stages_arr;
    doc["kernel_size"] = kernel_size;
    doc["dropout_prob"] = dropout_prob;
    return doc.dump();
}

ModelConfig ModelConfig::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model config JSON parse error: ") + e.what());
    }
    ModelConfig cfg;
    if (doc.contains("input_channels")) cfg.input_channels = doc.at("input_channels").get<int>();
    if (doc.contains("num_classes")) cfg.num_classes = doc.at("num_classes").get<int>();
    if (doc.contains("stem_filters")) cfg.stem_filters = doc.at("stem_filters").get<int>();
    if (doc.contains("kernel_size")) cfg.kernel_size = doc.at("kernel_size").get<int>();
    if (doc.contains("dropout_prob")) cfg.dropout_prob = doc.at("dropout_prob").get<double>();
    if (doc.contains("stages")) {
        cfg.stages.clear();
        for (const auto& row : doc.at("stages")) {
            if (!row.is_array() || row.size() != 3)
                throw ConfigError("model.stages entries must be [blocks, filters, stride]");
            cfg.stages.push_back({row.at(0).get<int>(), row.at(1).get<int>(),
                                  row.at(2).get<int>()});
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace skelact
