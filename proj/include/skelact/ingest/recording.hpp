#pragma once

#include <iosfwd>
#include <string>

#include "skelact/core/class_table.hpp"
#include "skelact/core/skeleton.hpp"

namespace skelact {

// SKELREC-JSONL v1: the portable recording format.
//   line 1: {"version":1,"joint_set":str,"fps":number,"label":str|null,
//            "subject":str|null}
//   lines 2..: one frame per line, a JSON array of J arrays [x, y, z, c]
//              with confidence c in {0,1}; c == 0 marks the joint invalid.
// UTF-8, LF terminators. Frame timestamps are implicit: frame i sits at
// i / fps seconds.

// Parses a recording. When a class table is given, the header label name is
// resolved to a class id; an unmapped name raises DataError naming it.
SkeletonSequence read_recording(std::istream& in,
                                const ClassTable* table = nullptr);

SkeletonSequence load_recording_file(const std::string& path,
                                     const ClassTable* table = nullptr);

// Writes the canonical form: header keys in fixed order, shortest
// round-trippable number formatting, invalid joints as [0.0,0.0,0.0,0].
// Reading a canonical file and writing it again is byte-identical.
void write_recording(const SkeletonSequence& seq, std::ostream& out,
                     const ClassTable* table = nullptr);

void save_recording_file(const SkeletonSequence& seq, const std::string& path,
                         const ClassTable* table = nullptr);

}  // namespace skelact
