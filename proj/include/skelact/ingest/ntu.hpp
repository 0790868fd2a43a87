#pragma once

#include <iosfwd>
#include <string>

#include "skelact/core/skeleton.hpp"

namespace skelact {

// Fields parsed from the NTU file naming pattern SsssCcccPpppRrrrAaaa.
struct NtuFileMeta {
    int setup = 0;
    int camera = 0;
    int performer = 0;
    int replication = 0;
    int action = 0;  // 1..60
};

// Decodes "S001C001P001R001A001" (with or without the .skeleton suffix or a
// leading directory). Throws DataError on malformed names.
NtuFileMeta parse_ntu_filename(const std::string& name);

// Parses the NTU .skeleton text layout into an NTU25 sequence at 30 fps.
// When a frame contains multiple bodies, the body with the highest cumulative
// joint motion energy across the file is kept (ties break to the lower body
// id). label = meta.action - 1, subject = meta.performer.
SkeletonSequence parse_ntu_skeleton(std::istream& in, const NtuFileMeta& meta);

// Convenience wrapper: derives meta from the file name, then parses.
SkeletonSequence load_ntu_skeleton_file(const std::string& path);

}  // namespace skelact
