#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace skelact {

// One residual stage: `blocks` residual blocks at `filters` channels; the
// first block applies `stride` and, when shapes change, a 1x1 projection
// shortcut.
struct StageSpec {
    int blocks = 2;
    int filters = 64;
    int stride = 1;
};

struct ModelConfig {
    int input_channels = 45;  // D = 3 * joints
    int num_classes = 19;     // K
    int stem_filters = 64;
    std::vector<StageSpec> stages = {{2, 64, 1}, {2, 128, 2}, {2, 256, 2}};
    int kernel_size = 8;
    double dropout_prob = 0.3;

    void validate() const;

    std::string to_json_text() const;
    static ModelConfig from_json_text(const std::string& text);
};

inline constexpr double kBnEpsilon = 1e-5;
inline constexpr double kBnMomentum = 0.9;  // running = m*running + (1-m)*batch
inline constexpr std::int64_t kMaxParameterCount = 5000000;

}  // namespace skelact
