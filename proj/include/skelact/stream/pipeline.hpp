#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skelact/core/class_table.hpp"
#include "skelact/core/joint_map.hpp"
#include "skelact/model/net.hpp"
#include "skelact/preprocess/normalize.hpp"
#include "skelact/stream/replay.hpp"
#include "skelact/window/window.hpp"

namespace skelact {

// Output of the recognizer stage, one per emitted window.
struct LabelMessage {
    double t_window_end = 0.0;  // stream time of the window's last frame
    int class_id = 0;
    std::string class_name;
    double probability = 0.0;
    double latency_ms = 0.0;  // wall clock, last frame arrival -> emission

    std::string to_json_line() const;
};

struct StageStats {
    std::string name;
    std::uint64_t received = 0;  // items that arrived at the stage's inbox
    std::uint64_t emitted = 0;   // items pushed downstream
    std::uint64_t dropped = 0;   // inbox evictions + items the stage discarded
    std::size_t queue_high_water_mark = 0;
};

struct RunStats {
    std::vector<StageStats> stages;
    std::uint64_t labels_emitted = 0;

    const StageStats& stage(const std::string& name) const;
};

struct StreamOptions {
    // Lossless mode blocks producers on full queues instead of evicting the
    // oldest item; replay at speed 0 uses it so results match batch eval.
    bool lossless = false;
    std::size_t frame_queue_capacity = 64;
    std::size_t window_queue_capacity = 4;
};

using LabelSink = std::function<void(const LabelMessage&)>;

// Runs source -> formatter (remap) -> packer (window + per-window
// normalization) -> recognizer -> sink as independent worker stages over
// bounded queues; drains cleanly and reports per-stage counters.
RunStats run_stream(FrameSource& source, const JointMap* map,
                    const NormalizationConfig& norm_cfg,
                    const WindowConfig& window_cfg, const ParamsF& params,
                    const ClassTable& classes, const LabelSink& sink,
                    const StreamOptions& options = {});

}  // namespace skelact
