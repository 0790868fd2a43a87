#include "skelact/stream/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <thread>

#include "skelact/common/error.hpp"
#include "skelact/stream/queue.hpp"

namespace skelact {

namespace {

using Clock = std::chrono::steady_clock;

struct StampedFrame {
    SkeletonFrame frame;
    Clock::time_point arrival;
};

struct StampedWindow {
    WindowTensor tensor;
    double t_end = 0.0;
    Clock::time_point last_arrival;
};

}  // namespace

std::string LabelMessage::to_json_line() const {
    nlohmann::ordered_json doc;
    doc["t"] = t_window_end;
    doc["class_id"] = class_id;
    doc["class"] = class_name;
    doc["p"] = probability;
    doc["latency_ms"] = latency_ms;
    return doc.dump();
}

const StageStats& RunStats::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return s;
    throw RuntimeError("no stage named " + name);
}

RunStats run_stream(FrameSource& source, const JointMap* map,
                    const NormalizationConfig& norm_cfg,
                    const WindowConfig& window_cfg, const ParamsF& params,
                    const ClassTable& classes, const LabelSink& sink,
                    const StreamOptions& options) {
    window_cfg.validate();
    const JointSet& target_set =
        map != nullptr ? *map->target : source.joint_set();
    if (map != nullptr && *map->source != source.joint_set())
        throw ConfigError("joint map source " + map->source->name() +
                          " does not match stream joint set " +
                          source.joint_set().name());
    const int expected_d = 3 * target_set.joint_count();
    if (params.cfg.input_channels != expected_d)
        throw ConfigError("checkpoint expects D=" +
                          std::to_string(params.cfg.input_channels) +
                          " but the formatter produces D=" +
                          std::to_string(expected_d));
    if (classes.size() != params.cfg.num_classes)
        throw ConfigError("class table has " + std::to_string(classes.size()) +
                          " classes, checkpoint expects " +
                          std::to_string(params.cfg.num_classes));
    if (std::abs(source.fps() - window_cfg.model_fps) > 1e-6)
        throw ConfigError("source fps " + std::to_string(source.fps()) +
                          " differs from model fps " +
                          std::to_string(window_cfg.model_fps) +
                          "; resample the recording first");

    BoundedQueue<StampedFrame> q_raw(options.frame_queue_capacity);
    BoundedQueue<StampedFrame> q_formatted(options.frame_queue_capacity);
    BoundedQueue<StampedWindow> q_windows(options.window_queue_capacity);
    BoundedQueue<LabelMessage> q_labels(options.window_queue_capacity);

    StageStats source_stats{"source", 0, 0, 0, 0};
    StageStats formatter_stats{"formatter", 0, 0, 0, 0};
    StageStats packer_stats{"packer", 0, 0, 0, 0};
    StageStats recognizer_stats{"recognizer", 0, 0, 0, 0};
    StageStats sink_stats{"sink", 0, 0, 0, 0};

    auto push_frame = [&](BoundedQueue<StampedFrame>& q, StampedFrame&& item,
                          StageStats& producer_stats) {
        if (options.lossless) {
            q.push_block(std::move(item));
        } else {
            q.push_drop_oldest(std::move(item));
        }
        ++producer_stats.emitted;
    };

    // source pump
    std::thread source_thread([&] {
        while (auto frame = source.next()) {
            ++source_stats.received;
            push_frame(q_raw, StampedFrame{std::move(*frame), Clock::now()},
                       source_stats);
        }
        q_raw.close();
    });

    // formatter: per-frame joint remapping
    std::thread formatter_thread([&] {
        while (auto item = q_raw.pop()) {
            bool ok = true;
            if (map != nullptr) {
                if (item->frame.joint_count() != map->source->joint_count()) {
                    ok = false;  // malformed frame: counted, never fatal
                } else {
                    SkeletonFrame out;
                    out.t = item->frame.t;
                    const int tjc = map->target->joint_count();
                    out.joints.assign(static_cast<size_t>(tjc), Vec3{});
                    out.valid.assign(static_cast<size_t>(tjc), 0);
                    for (int j = 0; j < tjc; ++j) {
                        const auto& src = map->mapping[static_cast<size_t>(j)];
                        if (!src) continue;
                        out.joints[static_cast<size_t>(j)] =
                            item->frame.joints[static_cast<size_t>(*src)];
                        out.valid[static_cast<size_t>(j)] =
                            item->frame.valid[static_cast<size_t>(*src)];
                    }
                    item->frame = std::move(out);
                }
            } else if (item->frame.joint_count() != target_set.joint_count()) {
                ok = false;
            }
            if (!ok) {
                ++formatter_stats.dropped;
                continue;
            }
            push_frame(q_formatted, std::move(*item), formatter_stats);
        }
        q_formatted.close();
    });

    // packer: sliding window, per-window normalization, tensor packing
    std::thread packer_thread([&] {
        SlidingWindower windower(window_cfg);
        std::uint64_t seen_drops = 0;
        while (auto item = q_formatted.pop()) {
            const Clock::time_point arrival = item->arrival;
            auto window = windower.push(item->frame);
            if (windower.dropped_out_of_order() != seen_drops) {
                packer_stats.dropped +=
                    windower.dropped_out_of_order() - seen_drops;
                seen_drops = windower.dropped_out_of_order();
                continue;
            }
            if (!window) continue;

            StampedWindow sw;
            sw.t_end = window->t_end;
            sw.last_arrival = arrival;
            if (norm_cfg.enabled) {
                // A live stream has no sequence start; normalization is
                // recomputed from each window's own frames.
                SkeletonSequence mini;
                mini.joint_set = &target_set;
                mini.fps = window_cfg.model_fps;
                mini.frames = std::move(window->frames);
                try {
                    mini = normalize(mini, norm_cfg);
                } catch (const Error&) {
                    ++packer_stats.dropped;  // degenerate window, skip it
                    continue;
                }
                sw.tensor = pack(mini, window_cfg);
            } else {
                FrameWindow fw{std::move(window->frames), window->t_end};
                sw.tensor = pack_window(fw, target_set, window_cfg);
            }
            if (options.lossless) {
                q_windows.push_block(std::move(sw));
            } else {
                q_windows.push_drop_oldest(std::move(sw));
            }
            ++packer_stats.emitted;
        }
        q_windows.close();
    });

    // recognizer: EVAL forward + argmax
    std::thread recognizer_thread([&] {
        while (auto item = q_windows.pop()) {
            const Prediction pred = predict(params, item->tensor);
            LabelMessage msg;
            msg.t_window_end = item->t_end;
            msg.class_id = pred.class_id;
            msg.class_name = classes.name_of(pred.class_id);
            msg.probability = pred.probabilities[static_cast<size_t>(pred.class_id)];
            msg.latency_ms = std::chrono::duration<double, std::milli>(
                                 Clock::now() - item->last_arrival)
                                 .count();
            if (options.lossless) {
                q_labels.push_block(std::move(msg));
            } else {
                q_labels.push_drop_oldest(std::move(msg));
            }
            ++recognizer_stats.emitted;
        }
        q_labels.close();
    });

    // sink
    std::uint64_t labels = 0;
    std::thread sink_thread([&] {
        while (auto msg = q_labels.pop()) {
            sink(*msg);
            ++labels;
            ++sink_stats.emitted;
        }
    });

    source_thread.join();
    formatter_thread.join();
    packer_thread.join();
    recognizer_thread.join();
    sink_thread.join();

    // inbox accounting from the queues
    formatter_stats.received = q_raw.pushed();
    formatter_stats.dropped += q_raw.evicted();
    formatter_stats.queue_high_water_mark = q_raw.high_water_mark();
    packer_stats.received = q_formatted.pushed();
    packer_stats.dropped += q_formatted.evicted();
    packer_stats.queue_high_water_mark = q_formatted.high_water_mark();
    recognizer_stats.received = q_windows.pushed();
    recognizer_stats.dropped += q_windows.evicted();
    recognizer_stats.queue_high_water_mark = q_windows.high_water_mark();
    sink_stats.received = q_labels.pushed();
    sink_stats.dropped += q_labels.evicted();
    sink_stats.queue_high_water_mark = q_labels.high_water_mark();

    RunStats stats;
    stats.labels_emitted = labels;
    stats.stages = {source_stats, formatter_stats, packer_stats,
                    recognizer_stats, sink_stats};
    return stats;
}

}  // namespace skelact
