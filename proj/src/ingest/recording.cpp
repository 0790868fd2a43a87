#include "skelact/ingest/recording.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "skelact/common/error.hpp"

namespace skelact {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

int parse_subject(const std::string& text) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError("recording header subject '" + text +
                        "' is not a numeric performer id");
    return value;
}

}  // namespace

SkeletonSequence read_recording(std::istream& in, const ClassTable* table) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("recording is missing its header line");

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("line 1: header is not valid JSON: ") + e.what());
    }
    if (!header.is_object())
        throw DataError("line 1: header must be a JSON object");

    static const char* kKeys[] = {"version", "joint_set", "fps", "label", "subject"};
    for (const auto& [key, value] : header.items()) {
        (void)value;
        bool known = false;
        for (const char* k : kKeys) known = known || key == k;
        if (!known) throw DataError("line 1: unknown header key '" + key + "'");
    }
    for (const char* k : kKeys)
        if (!header.contains(k))
            throw DataError("line 1: header is missing key '" + std::string(k) + "'");

    if (!header.at("version").is_number_integer() || header.at("version").get<int>() != 1)
        throw DataError("line 1: unsupported recording version");

    SkeletonSequence seq;
    seq.joint_set = &joint_set_by_name(header.at("joint_set").get<std::string>());
    seq.fps = header.at("fps").get<double>();
    if (!(seq.fps > 0.0)) throw DataError("line 1: fps must be positive");

    if (!header.at("label").is_null()) {
        seq.label_name = header.at("label").get<std::string>();
        if (table != nullptr) seq.label = table->require_id(*seq.label_name);
    }
    if (!header.at("subject").is_null())
        seq.subject = parse_subject(header.at("subject").get<std::string>());

    const int jc = seq.joint_count();
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json frame_doc;
        try {
            frame_doc = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("line " + std::to_string(line_no) +
                            ": frame is not valid JSON: " + e.what());
        }
        if (!frame_doc.is_array() || static_cast<int>(frame_doc.size()) != jc)
            throw DataError("line " + std::to_string(line_no) + ": frame has " +
                            std::to_string(frame_doc.size()) + " joints, set " +
                            seq.joint_set->name() + " expects " + std::to_string(jc));
        SkeletonFrame frame;
        frame.t = static_cast<double>(seq.frames.size()) / seq.fps;
        frame.joints.reserve(static_cast<size_t>(jc));
        frame.valid.reserve(static_cast<size_t>(jc));
        for (const auto& joint : frame_doc) {
            if (!joint.is_array() || joint.size() != 4)
                throw DataError("line " + std::to_string(line_no) +
                                ": joints must be [x, y, z, c] arrays");
            const double c = joint.at(3).get<double>();
            if (c != 0.0 && c != 1.0)
                throw DataError("line " + std::to_string(line_no) +
                                ": joint confidence must be 0 or 1");
            Vec3 p{joint.at(0).get<double>(), joint.at(1).get<double>(),
                   joint.at(2).get<double>()};
            if (!p.finite())
                throw DataError("line " + std::to_string(line_no) +
                                ": non-finite coordinate rejected");
            if (c == 0.0) p = Vec3{};  // invalid joints are stored zeroed
            frame.joints.push_back(p);
            frame.valid.push_back(c == 0.0 ? 0 : 1);
        }
        seq.frames.push_back(std::move(frame));
    }
    seq.validate();
    return seq;
}

SkeletonSequence load_recording_file(const std::string& path, const ClassTable* table) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open recording file: " + path);
    SkeletonSequence seq = read_recording(in, table);
    seq.source = path;
    return seq;
}

void write_recording(const SkeletonSequence& seq, std::ostream& out,
                     const ClassTable* table) {
    seq.validate();
    ordered_json header;
    header["version"] = 1;
    header["joint_set"] = seq.joint_set->name();
    header["fps"] = seq.fps;
    if (seq.label && table != nullptr)
        header["label"] = table->name_of(*seq.label);
    else if (seq.label_name)
        header["label"] = *seq.label_name;
    else
        header["label"] = nullptr;
    if (seq.subject)
        header["subject"] = std::to_string(*seq.subject);
    else
        header["subject"] = nullptr;
    out << header.dump() << "\n";

    for (const SkeletonFrame& frame : seq.frames) {
        json frame_doc = json::array();
        for (size_t j = 0; j < frame.joints.size(); ++j) {
            const bool valid = frame.valid[j] != 0;
            const Vec3 p = valid ? frame.joints[j] : Vec3{};
            frame_doc.push_back(json::array({p.x, p.y, p.z, valid ? 1 : 0}));
        }
        out << frame_doc.dump() << "\n";
    }
}

void save_recording_file(const SkeletonSequence& seq, const std::string& path,
                         const ClassTable* table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open recording file for writing: " + path);
    write_recording(seq, out, table);
}

}  // namespace skelact
