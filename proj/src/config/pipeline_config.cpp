#include "skelact/config/pipeline_config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "skelact/common/error.hpp"

namespace skelact {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Strict section reader: every consumed key is ticked off; leftovers are
// reported with their full path.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object())
            throw ConfigError(path_.empty() ? "config root must be a JSON object"
                                            : path_ + " must be a JSON object");
    }

    ~Section() = default;

    bool has(const std::string& key) {
        seen_.insert(key);
        return doc_.contains(key);
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = doc_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key " + qualified(key) +
                              " has the wrong type");
        }
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return doc_.at(key);
    }

    std::string qualified(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (const auto& [key, value] : doc_.items()) {
            (void)value;
            if (!seen_.count(key))
                throw ConfigError("unknown config key: " + qualified(key));
        }
    }

private:
    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config key " + key + " " + what);
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text,
                                              const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }

    PipelineConfig cfg;
    Section root(doc, "");

    if (root.has("normalization")) {
        Section s(root.raw("normalization"), "normalization");
        s.read("enabled", cfg.normalization.enabled);
        s.read("reference_torso_length", cfg.normalization.reference_torso_length);
        if (s.has("rotation_reference")) {
            const std::string v =
                root.raw("normalization").at("rotation_reference").get<std::string>();
            if (v == "first_valid_frame")
                cfg.normalization.rotation_reference = RotationReference::FIRST_VALID_FRAME;
            else if (v == "per_frame")
                cfg.normalization.rotation_reference = RotationReference::PER_FRAME;
            else
                throw ConfigError(
                    "config key normalization.rotation_reference must be "
                    "'first_valid_frame' or 'per_frame'");
        }
        s.read("center_joint", cfg.normalization.center_joint);
        s.read("left_shoulder", cfg.normalization.left_shoulder);
        s.read("right_shoulder", cfg.normalization.right_shoulder);
        s.read("torso_top", cfg.normalization.torso_top);
        s.read("torso_bottom", cfg.normalization.torso_bottom);
        s.finish();
        require(cfg.normalization.reference_torso_length > 0.0,
                "normalization.reference_torso_length", "must be > 0");
    }

    if (root.has("augmentation")) {
        Section s(root.raw("augmentation"), "augmentation");
        s.read("noise_sigma", cfg.augmentation.noise_sigma);
        s.read("shift_max", cfg.augmentation.shift_max);
        s.read("crop_min_ratio", cfg.augmentation.crop_min_ratio);
        s.read("joint_dropout_prob", cfg.augmentation.joint_dropout_prob);
        s.finish();
        require(cfg.augmentation.noise_sigma >= 0.0, "augmentation.noise_sigma",
                "must be >= 0");
        require(cfg.augmentation.shift_max >= 0, "augmentation.shift_max",
                "must be >= 0");
        require(cfg.augmentation.crop_min_ratio > 0.0 &&
                    cfg.augmentation.crop_min_ratio <= 1.0,
                "augmentation.crop_min_ratio", "must be in (0, 1]");
        require(cfg.augmentation.joint_dropout_prob >= 0.0 &&
                    cfg.augmentation.joint_dropout_prob < 1.0,
                "augmentation.joint_dropout_prob", "must be in [0, 1)");
    }

    if (root.has("window")) {
        Section s(root.raw("window"), "window");
        s.read("window_seconds", cfg.window.window_seconds);
        s.read("model_fps", cfg.window.model_fps);
        s.read("hop_seconds", cfg.window.hop_seconds);
        if (s.has("pad_policy")) {
            const std::string v = root.raw("window").at("pad_policy").get<std::string>();
            if (v == "repeat")
                cfg.window.pad_policy = PadPolicy::REPEAT;
            else if (v == "zero")
                cfg.window.pad_policy = PadPolicy::ZERO;
            else
                throw ConfigError(
                    "config key window.pad_policy must be 'repeat' or 'zero'");
        }
        s.finish();
        require(cfg.window.window_seconds > 0.0, "window.window_seconds",
                "must be > 0");
        require(cfg.window.model_fps > 0.0, "window.model_fps", "must be > 0");
        require(cfg.window.hop_seconds > 0.0 &&
                    cfg.window.hop_seconds <= cfg.window.window_seconds,
                "window.hop_seconds", "must be in (0, window_seconds]");
    }

    if (root.has("model")) {
        Section s(root.raw("model"), "model");
        s.read("input_channels", cfg.model.input_channels);
        s.read("num_classes", cfg.model.num_classes);
        s.read("stem_filters", cfg.model.stem_filters);
        s.read("kernel_size", cfg.model.kernel_size);
        s.read("dropout_prob", cfg.model.dropout_prob);
        if (s.has("stages")) {
            const json& stages = root.raw("model").at("stages");
            if (!stages.is_array())
                throw ConfigError("config key model.stages must be an array");
            cfg.model.stages.clear();
            for (const auto& row : stages) {
                if (!row.is_array() || row.size() != 3)
                    throw ConfigError(
                        "config key model.stages entries must be "
                        "[blocks, filters, stride]");
                cfg.model.stages.push_back({row.at(0).get<int>(),
                                            row.at(1).get<int>(),
                                            row.at(2).get<int>()});
            }
        }
        s.finish();
        try {
            cfg.model.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("config key ") + e.what());
        }
    }

    if (root.has("train")) {
        Section s(root.raw("train"), "train");
        s.read("learning_rate", cfg.train.learning_rate);
        s.read("momentum", cfg.train.momentum);
        s.read("batch_size", cfg.train.batch_size);
        s.read("epochs", cfg.train.epochs);
        s.read("lr_decay_milestones", cfg.train.lr_decay_milestones);
        s.read("weight_decay", cfg.train.weight_decay);
        s.read("threads", cfg.train.threads);
        s.read("early_stop_train_acc", cfg.train.early_stop_train_acc);
        s.finish();
        try {
            cfg.train.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("config key ") + e.what());
        }
    }

    root.read("joint_maps", cfg.joint_maps_path);
    root.read("class_table", cfg.class_table_path);
    root.read("seed", cfg.seed);
    root.finish();

    cfg.joint_maps_path = resolve_path(cfg.joint_maps_path, base_dir);
    cfg.class_table_path = resolve_path(cfg.class_table_path, base_dir);
    for (const std::string& path : {cfg.joint_maps_path, cfg.class_table_path}) {
        if (!path.empty() && !std::filesystem::exists(path))
            throw ConfigError("config references a missing file: " + path);
    }

    cfg.augmentation.seed = cfg.seed;
    cfg.train.seed = cfg.seed;
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(),
                          std::filesystem::path(path).parent_path().string());
}

std::string PipelineConfig::to_json_text() const {
    ordered_json doc;
    doc["seed"] = seed;
    doc["joint_maps"] = joint_maps_path;
    doc["class_table"] = class_table_path;

    ordered_json norm;
    norm["enabled"] = normalization.enabled;
    norm["reference_torso_length"] = normalization.reference_torso_length;
    norm["rotation_reference"] =
        normalization.rotation_reference == RotationReference::FIRST_VALID_FRAME
            ? "first_valid_frame"
            : "per_frame";
    norm["center_joint"] = normalization.center_joint;
    norm["left_shoulder"] = normalization.left_shoulder;
    norm["right_shoulder"] = normalization.right_shoulder;
    norm["torso_top"] = normalization.torso_top;
    norm["torso_bottom"] = normalization.torso_bottom;
    doc["normalization"] = norm;

    ordered_json aug;
    aug["noise_sigma"] = augmentation.noise_sigma;
    aug["shift_max"] = augmentation.shift_max;
    aug["crop_min_ratio"] = augmentation.crop_min_ratio;
    aug["joint_dropout_prob"] = augmentation.joint_dropout_prob;
    doc["augmentation"] = aug;

    ordered_json win;
    win["window_seconds"] = window.window_seconds;
    win["model_fps"] = window.model_fps;
    win["hop_seconds"] = window.hop_seconds;
    win["pad_policy"] = window.pad_policy == PadPolicy::REPEAT ? "repeat" : "zero";
    doc["window"] = win;

    ordered_json model_doc = ordered_json::parse(model.to_json_text());
    doc["model"] = model_doc;

    ordered_json tr;
    tr["learning_rate"] = train.learning_rate;
    tr["momentum"] = train.momentum;
    tr["batch_size"] = train.batch_size;
    tr["epochs"] = train.epochs;
    tr["lr_decay_milestones"] = train.lr_decay_milestones;
    tr["weight_decay"] = train.weight_decay;
    tr["threads"] = train.threads;
    tr["early_stop_train_acc"] = train.early_stop_train_acc;
    doc["train"] = tr;

    return doc.dump(2) + "\n";
}

}  // namespace skelact
