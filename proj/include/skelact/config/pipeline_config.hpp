#pragma once

#include <cstdint>
#include <string>

#include "skelact/augment/augment.hpp"
#include "skelact/model/net.hpp"
#include "skelact/preprocess/normalize.hpp"
#include "skelact/train/trainer.hpp"
#include "skelact/window/window.hpp"

namespace skelact {

// The single JSON config file behind every subcommand. Unknown keys are
// rejected with their full path; absent keys take the documented defaults;
// referenced files must exist at load time. Relative paths resolve against
// the config file's directory.
struct PipelineConfig {
    NormalizationConfig normalization;
    AugmentConfig augmentation;
    WindowConfig window;
    ModelConfig model;
    TrainConfig train;
    std::string joint_maps_path;   // empty = built-in maps
    std::string class_table_path;  // empty = dataset-provided table
    std::uint64_t seed = 0;

    PipelineConfigSet pipeline_set() const {
        return PipelineConfigSet{normalization, augmentation, window};
    }

    static PipelineConfig from_json_text(const std::string& text,
                                         const std::string& base_dir = "");
    static PipelineConfig load(const std::string& path);
    // Fully-resolved form; reloads to an equal config.
    std::string to_json_text() const;
};

}  // namespace skelact
