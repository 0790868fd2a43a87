#include "skelact/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "skelact/common/error.hpp"
#include "skelact/common/rng.hpp"

namespace skelact {

namespace {

constexpr double kPi = 3.141592653589793238462643;

// Canonical rest pose of the COMMON 15-joint set, meters, y up, subject
// facing +z with the shoulder line along x.
struct RestPose {
    Vec3 spine_base{0.0, 1.00, 0.0};
    Vec3 neck{0.0, 1.45, 0.0};
    Vec3 head{0.0, 1.62, 0.0};
    Vec3 l_shoulder{-0.20, 1.40, 0.0};
    Vec3 l_elbow{-0.25, 1.12, 0.0};
    Vec3 l_wrist{-0.27, 0.86, 0.0};
    Vec3 r_shoulder{0.20, 1.40, 0.0};
    Vec3 r_elbow{0.25, 1.12, 0.0};
    Vec3 r_wrist{0.27, 0.86, 0.0};
    Vec3 l_hip{-0.10, 0.95, 0.0};
    Vec3 l_knee{-0.12, 0.52, 0.02};
    Vec3 l_ankle{-0.13, 0.08, 0.0};
    Vec3 r_hip{0.10, 0.95, 0.0};
    Vec3 r_knee{0.12, 0.52, 0.02};
    Vec3 r_ankle{0.13, 0.08, 0.0};
};

double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

// Half-sine pulse over [t0, t0+width].
double pulse(double t, double t0, double width) {
    const double u = (t - t0) / width;
    if (u < 0.0 || u > 1.0) return 0.0;
    return std::sin(kPi * u);
}

// Joint positions of one archetype at time t, canonical scale.
RestPose pose_at(const std::string& cls, double t, double duration) {
    RestPose p;
    const double tau = duration > 0.0 ? t / duration : 0.0;

    if (cls == "wave") {
        // right arm raised, wrist swinging side to side at 1.5 Hz
        const double up = smoothstep(t / 0.4);
        p.r_elbow = Vec3{0.28, 1.12 + 0.33 * up, 0.08 * up};
        p.r_wrist = Vec3{0.30 + 0.18 * up * std::sin(2.0 * kPi * 1.5 * t),
                         0.86 + 0.84 * up, 0.10 * up};
    } else if (cls == "cheer") {
        // both arms thrown above the head, slight bounce once up
        const double up = smoothstep(t / 0.6);
        const double bounce = up * 0.04 * std::sin(2.0 * kPi * 1.2 * t);
        p.l_elbow = Vec3{-0.24, 1.12 + 0.43 * up, 0.05 * up};
        p.r_elbow = Vec3{0.24, 1.12 + 0.43 * up, 0.05 * up};
        p.l_wrist = Vec3{-0.16, 0.86 + (1.09 + bounce) * up, 0.08 * up};
        p.r_wrist = Vec3{0.16, 0.86 + (1.09 + bounce) * up, 0.08 * up};
    } else if (cls == "sit") {
        // hips drop monotonically ~0.35 m, knees travel forward
        const double d = smoothstep(tau);
        const double drop = 0.35 * d;
        const double fwd = 0.16 * d;
        for (Vec3* j : {&p.spine_base, &p.neck, &p.head, &p.l_shoulder,
                        &p.l_elbow, &p.l_wrist, &p.r_shoulder, &p.r_elbow,
                        &p.r_wrist, &p.l_hip, &p.r_hip}) {
            j->y -= drop;
            j->z += 0.5 * fwd;
        }
        p.l_knee.z += fwd;
        p.r_knee.z += fwd;
        p.l_knee.y -= 0.05 * d;
        p.r_knee.y -= 0.05 * d;
    } else if (cls == "stand") {
        // reverse of sit: start low, rise to the rest pose
        const double d = 1.0 - smoothstep(tau);
        const double drop = 0.35 * d;
        const double fwd = 0.16 * d;
        for (Vec3* j : {&p.spine_base, &p.neck, &p.head, &p.l_shoulder,
                        &p.l_elbow, &p.l_wrist, &p.r_shoulder, &p.r_elbow,
                        &p.r_wrist, &p.l_hip, &p.r_hip}) {
            j->y -= drop;
            j->z += 0.5 * fwd;
        }
        p.l_knee.z += fwd;
        p.r_knee.z += fwd;
        p.l_knee.y -= 0.05 * d;
        p.r_knee.y -= 0.05 * d;
    } else if (cls == "kick") {
        // right leg swings forward and up in one pulse
        const double k = pulse(t, 0.8, 1.2);
        p.r_ankle = p.r_ankle + Vec3{0.0, 0.38 * k, 0.52 * k};
        p.r_knee = p.r_knee + Vec3{0.0, 0.20 * k, 0.30 * k};
        p.r_hip = p.r_hip + Vec3{0.0, 0.02 * k, 0.06 * k};
    } else if (cls == "point") {
        // right arm extends forward and holds
        const double e = smoothstep(t / 0.8);
        p.r_elbow = Vec3{0.22, 1.12 + 0.16 * e, 0.24 * e};
        p.r_wrist = Vec3{0.24, 0.86 + 0.54 * e, 0.52 * e};
    } else if (cls == "throw") {
        // wind-up behind the shoulder, then a fast forward release
        const double wind = smoothstep(t / 0.9) - smoothstep((t - 0.9) / 0.5);
        const double rel = smoothstep((t - 0.9) / 0.5);
        p.r_elbow =
            Vec3{0.27, 1.12 + 0.22 * wind + 0.20 * rel, -0.16 * wind + 0.30 * rel};
        p.r_wrist = Vec3{0.30, 0.86 + 0.55 * wind + 0.62 * rel,
                         -0.30 * wind + 0.58 * rel};
    } else if (cls == "drink") {
        // right wrist to the mouth, hold, back down
        const double up = smoothstep(t / 0.8) - smoothstep((t - 2.1) / 0.7);
        p.r_elbow = Vec3{0.22, 1.12 + 0.10 * up, 0.10 * up};
        p.r_wrist = Vec3{0.27 - 0.15 * up, 0.86 + 0.66 * up, 0.14 * up};
    } else {
        throw ConfigError("unknown synthetic class: '" + cls + "'");
    }
    return p;
}

std::vector<Vec3> pose_joints(const RestPose& p) {
    // order matches common_joint_set()
    return {p.spine_base, p.neck,    p.head,    p.l_shoulder, p.l_elbow,
            p.l_wrist,    p.r_shoulder, p.r_elbow, p.r_wrist, p.l_hip,
            p.l_knee,     p.l_ankle, p.r_hip,   p.r_knee,     p.r_ankle};
}

Vec3 yaw_rotate(const Vec3& p, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Vec3{c * p.x - s * p.z, p.y, s * p.x + c * p.z};
}

// NTU action ids for the archetype names (1-based dataset numbering).
const std::map<std::string, int>& ntu_source_ids() {
    static const std::map<std::string, int> ids = {
        {"wave", 23}, {"cheer", 22}, {"sit", 8},    {"stand", 9},
        {"kick", 24}, {"point", 31}, {"throw", 7},  {"drink", 1}};
    return ids;
}

}  // namespace

void SynthConfig::validate() const {
    if (classes.empty()) throw ConfigError("synth.classes must be non-empty");
    if (samples_per_class < 1)
        throw ConfigError("synth.samples_per_class must be >= 1");
    if (!(fps > 0.0)) throw ConfigError("synth.fps must be > 0");
    if (!(duration_seconds > 0.0))
        throw ConfigError("synth.duration_seconds must be > 0");
    if (!(actor_scale_range.first > 0.0) ||
        actor_scale_range.first > actor_scale_range.second)
        throw ConfigError("synth.actor_scale_range must satisfy 0 < min <= max");
    if (actor_yaw_range < 0.0)
        throw ConfigError("synth.actor_yaw_range must be >= 0");
    if (jitter_sigma < 0.0) throw ConfigError("synth.jitter_sigma must be >= 0");
}

ClassTable synth_class_table(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<ClassTable::Entry> entries;
    for (size_t i = 0; i < cfg.classes.size(); ++i) {
        ClassTable::Entry e;
        e.class_id = static_cast<int>(i);
        e.name = cfg.classes[i];
        if (auto it = ntu_source_ids().find(e.name); it != ntu_source_ids().end())
            e.source_dataset_id = it->second;
        entries.push_back(std::move(e));
    }
    return ClassTable(std::move(entries));
}

std::vector<SkeletonSequence> generate(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<SkeletonSequence> out;
    out.reserve(cfg.classes.size() * static_cast<size_t>(cfg.samples_per_class));

    const int frames =
        static_cast<int>(std::lround(cfg.duration_seconds * cfg.fps));
    for (size_t ci = 0; ci < cfg.classes.size(); ++ci) {
        for (int si = 0; si < cfg.samples_per_class; ++si) {
            Rng rng = Rng::derive(cfg.seed, ci, static_cast<std::uint64_t>(si));
            const double actor_scale = rng.uniform(cfg.actor_scale_range.first,
                                                   cfg.actor_scale_range.second);
            const double yaw = rng.uniform(-cfg.actor_yaw_range, cfg.actor_yaw_range);
            const Vec3 offset{
                rng.uniform(-cfg.actor_translation_range, cfg.actor_translation_range),
                0.0,
                rng.uniform(-cfg.actor_translation_range, cfg.actor_translation_range)};

            SkeletonSequence seq;
            seq.joint_set = &common_joint_set();
            seq.fps = cfg.fps;
            seq.label = static_cast<int>(ci);
            seq.label_name = cfg.classes[ci];
            seq.subject = si;
            seq.source = "synth:" + cfg.classes[ci] + ":" + std::to_string(si);
            seq.frames.reserve(static_cast<size_t>(frames));
            for (int fi = 0; fi < frames; ++fi) {
                const double t = fi / cfg.fps;
                std::vector<Vec3> joints =
                    pose_joints(pose_at(cfg.classes[ci], t, cfg.duration_seconds));
                for (Vec3& p : joints) {
                    p = yaw_rotate(p * actor_scale, yaw) + offset;
                    p.x += rng.gaussian(0.0, cfg.jitter_sigma);
                    p.y += rng.gaussian(0.0, cfg.jitter_sigma);
                    p.z += rng.gaussian(0.0, cfg.jitter_sigma);
                }
                seq.frames.push_back(make_frame(t, std::move(joints)));
            }
            seq.validate();
            out.push_back(std::move(seq));
        }
    }
    return out;
}

SkeletonSequence domain_shift(const SkeletonSequence& seq,
                              double scale_multiplier, double yaw_offset) {
    SkeletonSequence out = seq;
    for (SkeletonFrame& f : out.frames)
        for (size_t j = 0; j < f.joints.size(); ++j)
            if (f.valid[j])
                f.joints[j] = yaw_rotate(f.joints[j], yaw_offset) * scale_multiplier;
    return out;
}

std::vector<SkeletonSequence> domain_shift(
    const std::vector<SkeletonSequence>& datasets, double scale_multiplier,
    double yaw_offset) {
    std::vector<SkeletonSequence> out;
    out.reserve(datasets.size());
    for (const auto& seq : datasets)
        out.push_back(domain_shift(seq, scale_multiplier, yaw_offset));
    return out;
}

}  // namespace skelact
