// skelact: skeleton-based action recognition pipeline CLI.
//
// Exit codes: 0 success, 1 usage error, 2 config/data error, 3 runtime error.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "skelact/common/error.hpp"
#include "skelact/common/parallel.hpp"
#include "skelact/config/pipeline_config.hpp"
#include "skelact/core/class_table.hpp"
#include "skelact/core/joint_map.hpp"
#include "skelact/ingest/ntu.hpp"
#include "skelact/ingest/recording.hpp"
#include "skelact/model/checkpoint.hpp"
#include "skelact/stream/pipeline.hpp"
#include "skelact/stream/tcp.hpp"
#include "skelact/synth/generator.hpp"
#include "skelact/train/ablation.hpp"
#include "skelact/train/metrics.hpp"
#include "skelact/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace skelact;

namespace {

struct CommonArgs {
    std::string config_path;
    bool print_config = false;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config JSON file");
    cmd->add_flag("--print-config", args.print_config,
                  "echo the fully-resolved config and continue");
    cmd->add_option("--seed", args.seed, "override the config seed");
}

PipelineConfig load_config(const CommonArgs& args) {
    PipelineConfig cfg;
    if (!args.config_path.empty()) cfg = PipelineConfig::load(args.config_path);
    if (args.seed) {
        cfg.seed = *args.seed;
        cfg.train.seed = *args.seed;
        cfg.augmentation.seed = *args.seed;
    }
    if (args.print_config) std::cout << cfg.to_json_text();
    return cfg;
}

ClassTable resolve_class_table(const PipelineConfig& cfg,
                               const std::string& data_dir) {
    if (!cfg.class_table_path.empty()) return ClassTable::load(cfg.class_table_path);
    if (!data_dir.empty()) {
        const fs::path candidate = fs::path(data_dir) / "classes.json";
        if (fs::exists(candidate)) return ClassTable::load(candidate.string());
    }
    throw ConfigError(
        "no class table: set config key class_table or place classes.json in "
        "the data directory");
}

// Loads every .jsonl / .skeleton under dir (recursively, sorted) and remaps
// everything onto the COMMON pipeline set.
std::vector<SkeletonSequence> load_dataset(const std::string& dir,
                                           const ClassTable& table,
                                           const PipelineConfig& cfg) {
    if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".jsonl" || ext == ".skeleton") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw DataError("no .jsonl or .skeleton files under " + dir);

    std::vector<SkeletonSequence> out;
    std::string unmapped;
    for (const fs::path& path : files) {
        SkeletonSequence seq;
        if (path.extension() == ".skeleton") {
            seq = load_ntu_skeleton_file(path.string());
            const int action = *seq.label + 1;  // back to 1-based dataset ids
            if (auto id = table.id_of_source(action)) {
                seq.label = *id;
                seq.label_name = table.name_of(*id);
            } else {
                if (!unmapped.empty()) unmapped += ", ";
                unmapped += "action " + std::to_string(action) + " (" +
                            path.filename().string() + ")";
                continue;
            }
        } else {
            seq = load_recording_file(path.string(), &table);
        }
        if (*seq.joint_set != common_joint_set()) {
            const JointMap map = load_joint_map(cfg.joint_maps_path,
                                                *seq.joint_set, common_joint_set());
            seq = remap(seq, map);
        }
        out.push_back(std::move(seq));
    }
    if (!unmapped.empty())
        throw DataError("classes not in the class table: " + unmapped);
    return out;
}

int cmd_convert(const CommonArgs& common, const std::string& input,
                const std::string& output) {
    const PipelineConfig cfg = load_config(common);
    SkeletonSequence seq = load_ntu_skeleton_file(input);

    const ClassTable* table = nullptr;
    ClassTable loaded;
    if (!cfg.class_table_path.empty()) {
        loaded = ClassTable::load(cfg.class_table_path);
        table = &loaded;
    }
    if (table != nullptr && seq.label) {
        if (auto id = table->id_of_source(*seq.label + 1)) {
            seq.label = *id;
            seq.label_name = table->name_of(*id);
        } else {
            seq.label.reset();  // class not in the table: unlabeled output
            seq.label_name.reset();
        }
    } else {
        seq.label.reset();
        seq.label_name.reset();
    }
    save_recording_file(seq, output, table);
    std::cout << "wrote " << output << " (" << seq.frame_count() << " frames)\n";
    return 0;
}

int cmd_synth(const CommonArgs& common, const std::string& out_dir,
              SynthConfig synth_cfg, double shift_scale, double shift_yaw) {
    const PipelineConfig cfg = load_config(common);
    if (common.seed) synth_cfg.seed = *common.seed;
    else synth_cfg.seed = cfg.seed;
    synth_cfg.validate();

    const ClassTable table = synth_class_table(synth_cfg);
    std::vector<SkeletonSequence> sequences = generate(synth_cfg);
    if (shift_scale != 1.0 || shift_yaw != 0.0)
        sequences = domain_shift(sequences, shift_scale, shift_yaw);

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "classes.json");
        out << table.to_json_text();
    }
    std::vector<int> index_in_class(table.size(), 0);
    for (const SkeletonSequence& seq : sequences) {
        const std::string cls = table.name_of(*seq.label);
        fs::create_directories(fs::path(out_dir) / cls);
        const int idx = index_in_class[static_cast<size_t>(*seq.label)]++;
        const fs::path path =
            fs::path(out_dir) / cls / (std::to_string(idx) + ".jsonl");
        save_recording_file(seq, path.string(), &table);
    }
    std::cout << "wrote " << sequences.size() << " sequences to " << out_dir
              << "\n";
    return 0;
}

PipelineToggles toggles_from_flags(const PipelineConfig& cfg, bool no_noise,
                                   bool no_augmentation, bool no_normalization) {
    PipelineToggles t;
    t.noise = !no_noise;
    t.augmentation = !no_augmentation;
    t.normalization = cfg.normalization.enabled && !no_normalization;
    return t;
}

int cmd_train(const CommonArgs& common, const std::string& data_dir,
              const std::string& out_path, bool no_noise, bool no_augmentation,
              bool no_normalization) {
    PipelineConfig cfg = load_config(common);
    if (cfg.train.threads > 0) set_thread_count(cfg.train.threads);
    const ClassTable table = resolve_class_table(cfg, data_dir);
    if (table.size() != cfg.model.num_classes)
        throw ConfigError("class table has " + std::to_string(table.size()) +
                          " classes but model.num_classes is " +
                          std::to_string(cfg.model.num_classes));
    const std::vector<SkeletonSequence> data = load_dataset(data_dir, table, cfg);
    const PipelineToggles toggles =
        toggles_from_flags(cfg, no_noise, no_augmentation, no_normalization);

    TrainResult result =
        train(cfg.model, cfg.train, cfg.pipeline_set(), toggles, data);
    for (const EpochStats& e : result.history)
        std::cout << "epoch " << e.epoch << " loss " << e.mean_loss
                  << " train_acc " << e.train_accuracy << " lr "
                  << e.learning_rate << "\n";
    save_checkpoint_file(result.params, out_path);
    std::cout << "checkpoint written to " << out_path << "\n";
    return 0;
}

int cmd_eval(const CommonArgs& common, const std::string& checkpoint_path,
             const std::string& data_dir, bool no_normalization) {
    const PipelineConfig cfg = load_config(common);
    const ParamsF params = load_checkpoint_file(checkpoint_path);
    const ClassTable table = resolve_class_table(cfg, data_dir);
    const std::vector<SkeletonSequence> data = load_dataset(data_dir, table, cfg);

    PipelineToggles toggles;
    toggles.noise = false;
    toggles.augmentation = false;
    toggles.normalization = cfg.normalization.enabled && !no_normalization;

    const EvalReport report = evaluate(params, data, cfg.pipeline_set(), toggles,
                                       data_dir, nullptr);
    std::vector<std::string> names;
    for (const auto& e : table.entries()) names.push_back(e.name);
    std::cout << report.to_text(&names);
    return 0;
}

int cmd_ablate(const CommonArgs& common, const std::string& train_dir,
               const std::string& test_dir, const std::string& shifted_dir,
               const std::string& out_csv) {
    PipelineConfig cfg = load_config(common);
    if (cfg.train.threads > 0) set_thread_count(cfg.train.threads);
    // Row toggles decide whether normalization runs; the section itself must
    // not disable it from under the grid.
    cfg.normalization.enabled = true;
    const ClassTable table = resolve_class_table(cfg, train_dir);
    if (table.size() != cfg.model.num_classes)
        throw ConfigError("class table has " + std::to_string(table.size()) +
                          " classes but model.num_classes is " +
                          std::to_string(cfg.model.num_classes));
    const auto train_set = load_dataset(train_dir, table, cfg);
    const auto test_set = load_dataset(test_dir, table, cfg);
    const auto shifted_set = load_dataset(shifted_dir, table, cfg);

    const std::vector<AblationResult> results = run_ablation(
        cfg.model, cfg.train, cfg.pipeline_set(), train_set, test_set, shifted_set);

    std::ofstream out(out_csv);
    if (!out) throw RuntimeError("cannot write " + out_csv);
    out << ablation_csv(results);
    std::cout << ablation_table(results);
    std::cout << "csv written to " << out_csv << "\n";
    return 0;
}

int cmd_stream(const CommonArgs& common, const std::string& input_path,
               const std::string& tcp_endpoint, const std::string& checkpoint_path,
               double speed, int listen_port, std::optional<double> window_seconds,
               std::optional<double> hop_seconds, const std::string& classes_path) {
    PipelineConfig cfg = load_config(common);
    if (window_seconds) cfg.window.window_seconds = *window_seconds;
    if (hop_seconds) cfg.window.hop_seconds = *hop_seconds;
    cfg.window.validate();

    const ParamsF params = load_checkpoint_file(checkpoint_path);
    ClassTable table;
    if (!classes_path.empty())
        table = ClassTable::load(classes_path);
    else
        table = resolve_class_table(cfg, "");

    std::unique_ptr<FrameSource> source;
    if (!input_path.empty())
        source = std::make_unique<ReplaySource>(input_path, speed);
    else
        source = std::make_unique<TcpFrameSource>(tcp_endpoint);

    const JointMap* map = nullptr;
    JointMap owned_map;
    if (source->joint_set() != common_joint_set()) {
        owned_map = load_joint_map(cfg.joint_maps_path, source->joint_set(),
                                   common_joint_set());
        map = &owned_map;
    }

    std::unique_ptr<TcpLabelServer> server;
    if (listen_port >= 0) {
        server = std::make_unique<TcpLabelServer>(listen_port);
        std::cerr << "publishing labels on port " << server->port() << "\n";
    }

    StreamOptions options;
    options.lossless = speed == 0.0;
    const LabelSink sink = [&](const LabelMessage& msg) {
        if (server)
            server->publish(msg);
        else
            std::cout << msg.to_json_line() << "\n";
    };

    const RunStats stats = run_stream(*source, map, cfg.normalization, cfg.window,
                                      params, table, sink, options);
    std::cerr << "labels: " << stats.labels_emitted << "\n";
    for (const auto& s : stats.stages)
        std::cerr << s.name << ": received " << s.received << " emitted "
                  << s.emitted << " dropped " << s.dropped << " queue-hwm "
                  << s.queue_high_water_mark << "\n";
    return 0;
}

int cmd_model_info(const CommonArgs& common, const std::string& checkpoint_path) {
    ParamsF params = [&] {
        if (!checkpoint_path.empty()) return load_checkpoint_file(checkpoint_path);
        const PipelineConfig cfg = load_config(common);
        return init_params<float>(cfg.model, cfg.seed);
    }();
    std::cout << "model config: " << params.cfg.to_json_text() << "\n";
    std::cout << "tensors:\n";
    for (const auto& t : params.tensors) {
        std::cout << "  " << t.name << " [";
        for (size_t i = 0; i < t.shape.size(); ++i)
            std::cout << (i > 0 ? "x" : "") << t.shape[i];
        std::cout << "] " << t.size() << (t.trainable ? "" : " (buffer)") << "\n";
    }
    std::cout << "trainable parameters: " << params.trainable_count() << "\n";
    std::cout << "total stored values:  " << params.total_count() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skeleton-based action recognition pipeline"};
    app.require_subcommand(1);

    // convert
    auto* convert = app.add_subcommand("convert",
                                       "transcode an NTU .skeleton file to "
                                       "SKELREC-JSONL");
    CommonArgs convert_args;
    std::string convert_in, convert_out;
    add_common(convert, convert_args);
    convert->add_option("--input", convert_in, "NTU .skeleton file")->required();
    convert->add_option("--out", convert_out, "output .jsonl path")->required();

    // synth
    auto* synth = app.add_subcommand("synth",
                                     "generate a synthetic labeled dataset "
                                     "(SKELREC-JSONL tree)");
    CommonArgs synth_args;
    std::string synth_out;
    SynthConfig synth_cfg;
    double shift_scale = 1.0, shift_yaw = 0.0;
    add_common(synth, synth_args);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--samples-per-class", synth_cfg.samples_per_class,
                      "samples per class");
    synth->add_option("--fps", synth_cfg.fps, "frames per second");
    synth->add_option("--duration", synth_cfg.duration_seconds,
                      "seconds per sequence");
    synth->add_option("--scale-min", synth_cfg.actor_scale_range.first,
                      "actor scale lower bound");
    synth->add_option("--scale-max", synth_cfg.actor_scale_range.second,
                      "actor scale upper bound");
    synth->add_option("--yaw-range", synth_cfg.actor_yaw_range,
                      "actor yaw range, radians (+/-)");
    synth->add_option("--translation-range", synth_cfg.actor_translation_range,
                      "actor position range, meters (+/- in x and z)");
    synth->add_option("--jitter", synth_cfg.jitter_sigma, "jitter sigma, meters");
    synth->add_option("--shift-scale", shift_scale,
                      "domain-shift scale multiplier applied to every sample");
    synth->add_option("--shift-yaw", shift_yaw,
                      "domain-shift yaw offset, radians");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model on a dataset");
    CommonArgs train_args;
    std::string train_data, train_out;
    bool train_no_noise = false, train_no_aug = false, train_no_norm = false;
    add_common(train_cmd, train_args);
    train_cmd->add_option("--data", train_data, "dataset directory")->required();
    train_cmd->add_option("--out", train_out, "checkpoint output path")->required();
    train_cmd->add_flag("--no-noise", train_no_noise, "disable training noise");
    train_cmd->add_flag("--no-augmentation", train_no_aug,
                        "disable training augmentation");
    train_cmd->add_flag("--no-normalization", train_no_norm,
                        "disable normalization");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    CommonArgs eval_args;
    std::string eval_ckpt, eval_data;
    bool eval_no_norm = false;
    add_common(eval_cmd, eval_args);
    eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint path")->required();
    eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
    eval_cmd->add_flag("--no-normalization", eval_no_norm,
                       "disable normalization");

    // ablate
    auto* ablate = app.add_subcommand(
        "ablate", "run the 8-row noise/augmentation/normalization grid");
    CommonArgs ablate_args;
    std::string ablate_train, ablate_test, ablate_shifted, ablate_out;
    add_common(ablate, ablate_args);
    ablate->add_option("--train", ablate_train, "training dataset directory")
        ->required();
    ablate->add_option("--test", ablate_test, "in-domain test directory")
        ->required();
    ablate->add_option("--test-shifted", ablate_shifted,
                       "domain-shifted test directory")
        ->required();
    ablate->add_option("--out", ablate_out, "output CSV path")->required();

    // stream
    auto* stream_cmd = app.add_subcommand(
        "stream", "run the live pipeline over a replayed file or TCP feed");
    CommonArgs stream_args;
    std::string stream_input, stream_tcp, stream_ckpt, stream_classes;
    double stream_speed = 1.0;
    int stream_listen = -1;
    std::optional<double> stream_window, stream_hop;
    add_common(stream_cmd, stream_args);
    auto* source_group =
        stream_cmd->add_option_group("source", "frame source (exactly one)");
    source_group->add_option("--input", stream_input, "SKELREC-JSONL file");
    source_group->add_option("--tcp", stream_tcp, "HOST:PORT frame feed");
    source_group->require_option(1);
    stream_cmd->add_option("--checkpoint", stream_ckpt, "checkpoint path")
        ->required();
    stream_cmd->add_option("--speed", stream_speed,
                           "replay speed multiplier (0 = as fast as possible)");
    stream_cmd->add_option("--listen", stream_listen,
                           "publish labels on this TCP port instead of stdout");
    stream_cmd->add_option("--window-seconds", stream_window,
                           "override window length");
    stream_cmd->add_option("--hop-seconds", stream_hop, "override hop length");
    stream_cmd->add_option("--classes", stream_classes, "class table JSON");

    // model-info
    auto* info = app.add_subcommand("model-info",
                                    "report parameter shapes and counts");
    CommonArgs info_args;
    std::string info_ckpt;
    add_common(info, info_args);
    info->add_option("--checkpoint", info_ckpt,
                     "read the model from a checkpoint instead of the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (convert->parsed()) return cmd_convert(convert_args, convert_in, convert_out);
        if (synth->parsed())
            return cmd_synth(synth_args, synth_out, synth_cfg, shift_scale, shift_yaw);
        if (train_cmd->parsed())
            return cmd_train(train_args, train_data, train_out, train_no_noise,
                             train_no_aug, train_no_norm);
        if (eval_cmd->parsed())
            return cmd_eval(eval_args, eval_ckpt, eval_data, eval_no_norm);
        if (ablate->parsed())
            return cmd_ablate(ablate_args, ablate_train, ablate_test,
                              ablate_shifted, ablate_out);
        if (stream_cmd->parsed())
            return cmd_stream(stream_args, stream_input, stream_tcp, stream_ckpt,
                              stream_speed, stream_listen, stream_window,
                              stream_hop, stream_classes);
        if (info->parsed()) return cmd_model_info(info_args, info_ckpt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
