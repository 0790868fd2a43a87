#include "skelact/ingest/ntu.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <vector>

#include "skelact/common/error.hpp"

namespace skelact {

namespace {

constexpr double kNtuFps = 30.0;

// Line-oriented tokenizer that tracks line numbers for error reporting.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    int line_no() const { return line_no_; }

    std::vector<std::string> next_tokens() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            std::vector<std::string> tokens;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return tokens;
        }
        throw DataError("line " + std::to_string(line_no_ + 1) +
                        ": unexpected end of file");
    }

private:
    std::istream& in_;
    int line_no_ = 0;
};

long long parse_int_token(const std::string& tok, int line_no) {
    long long value = 0;
    const auto* begin = tok.data();
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError("line " + std::to_string(line_no) +
                        ": expected an integer, got '" + tok + "'");
    return value;
}

double parse_real_token(const std::string& tok, int line_no) {
    char* endp = nullptr;
    const double value = std::strtod(tok.c_str(), &endp);
    if (endp != tok.c_str() + tok.size() || tok.empty())
        throw DataError("line " + std::to_string(line_no) +
                        ": expected a real number, got '" + tok + "'");
    if (!std::isfinite(value))
        throw DataError("line " + std::to_string(line_no) +
                        ": non-finite coordinate '" + tok + "' rejected");
    return value;
}

struct BodyTrack {
    // frame index -> joint positions for that frame
    std::map<int, std::vector<Vec3>> frames;

    // Sum of squared frame-to-frame displacement over all joints, taken over
    // consecutive frames in which the body appears.
    double motion_energy() const {
        double energy = 0.0;
        const std::vector<Vec3>* prev = nullptr;
        int prev_frame = -2;
        for (const auto& [fi, joints] : frames) {
            if (prev != nullptr && fi == prev_frame + 1) {
                for (size_t j = 0; j < joints.size(); ++j) {
                    const Vec3 d = joints[j] - (*prev)[j];
                    energy += d.x * d.x + d.y * d.y + d.z * d.z;
                }
            }
            prev = &joints;
            prev_frame = fi;
        }
        return energy;
    }
};

}  // namespace

NtuFileMeta parse_ntu_filename(const std::string& name) {
    std::string stem = name;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.find('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);
    const char* pat = "SCPRA";
    if (stem.size() != 20)
        throw DataError("NTU file name '" + name +
                        "' does not match SsssCcccPpppRrrrAaaa");
    int values[5];
    for (int i = 0; i < 5; ++i) {
        const size_t off = static_cast<size_t>(i) * 4;
        if (stem[off] != pat[i])
            throw DataError("NTU file name '" + name +
                            "' does not match SsssCcccPpppRrrrAaaa");
        int v = 0;
        for (int d = 1; d <= 3; ++d) {
            const char c = stem[off + static_cast<size_t>(d)];
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw DataError("NTU file name '" + name +
                                "' does not match SsssCcccPpppRrrrAaaa");
            v = v * 10 + (c - '0');
        }
        values[i] = v;
    }
    NtuFileMeta meta{values[0], values[1], values[2], values[3], values[4]};
    if (meta.action < 1 || meta.action > 60)
        throw DataError("NTU action id " + std::to_string(meta.action) +
                        " outside [1,60] in '" + name + "'");
    return meta;
}

SkeletonSequence parse_ntu_skeleton(std::istream& in, const NtuFileMeta& meta) {
    LineReader reader(in);

    auto head = reader.next_tokens();
    const long long frame_count = parse_int_token(head[0], reader.line_no());
    if (frame_count < 0)
        throw DataError("line " + std::to_string(reader.line_no()) +
                        ": negative frame count");

    std::map<long long, BodyTrack> tracks;
    for (int fi = 0; fi < frame_count; ++fi) {
        auto bc_tokens = reader.next_tokens();
        const long long body_count = parse_int_token(bc_tokens[0], reader.line_no());
        if (body_count < 0)
            throw DataError("line " + std::to_string(reader.line_no()) +
                            ": negative body count");
        for (int bi = 0; bi < body_count; ++bi) {
            auto id_tokens = reader.next_tokens();
            // body id + 9 tracking fields; only the id is used
            const long long body_id = parse_int_token(id_tokens[0], reader.line_no());

            auto jc_tokens = reader.next_tokens();
            const long long joint_count = parse_int_token(jc_tokens[0], reader.line_no());
            if (joint_count != 25)
                throw DataError("line " + std::to_string(reader.line_no()) +
                                ": joint count " + std::to_string(joint_count) +
                                " (NTU bodies carry exactly 25 joints)");

            std::vector<Vec3> joints;
            joints.reserve(25);
            for (int j = 0; j < 25; ++j) {
                auto jt = reader.next_tokens();
                if (jt.size() < 3)
                    throw DataError("line " + std::to_string(reader.line_no()) +
                                    ": joint line has fewer than 3 values");
                // Only the 3D position is used; the remaining depth/color/
                // orientation fields are ignored.
                Vec3 p;
                p.x = parse_real_token(jt[0], reader.line_no());
                p.y = parse_real_token(jt[1], reader.line_no());
                p.z = parse_real_token(jt[2], reader.line_no());
                joints.push_back(p);
            }
            tracks[body_id].frames[fi] = std::move(joints);
        }
    }

    SkeletonSequence seq;
    seq.joint_set = &ntu25_joint_set();
    seq.fps = kNtuFps;
    seq.label = meta.action - 1;
    seq.subject = meta.performer;

    if (!tracks.empty()) {
        // Keep the most energetic body; std::map ordering makes the tie
        // break fall to the lower body id.
        const BodyTrack* best = nullptr;
        long long best_id = 0;
        double best_energy = -1.0;
        for (const auto& [id, track] : tracks) {
            const double e = track.motion_energy();
            if (e > best_energy) {
                best_energy = e;
                best = &track;
                best_id = id;
            }
        }
        (void)best_id;
        for (const auto& [fi, joints] : best->frames) {
            SkeletonFrame frame = make_frame(fi / kNtuFps, joints);
            seq.frames.push_back(std::move(frame));
        }
    }
    seq.validate();
    return seq;
}

SkeletonSequence load_ntu_skeleton_file(const std::string& path) {
    const NtuFileMeta meta = parse_ntu_filename(path);
    std::ifstream in(path);
    if (!in) throw DataError("cannot open NTU skeleton file: " + path);
    SkeletonSequence seq = parse_ntu_skeleton(in, meta);
    seq.source = path;
    return seq;
}

}  // namespace skelact
