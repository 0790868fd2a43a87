#pragma once

#include <iosfwd>
#include <string>

#include "skelact/model/net.hpp"

namespace skelact {

// Checkpoint container: magic "SKTCN1", uint32 LE config-JSON length, the
// config JSON, then every tensor (including BN running moments) as raw
// little-endian 32-bit floats in declaration order.
void save_checkpoint(const ParamsF& params, std::ostream& out);
void save_checkpoint_file(const ParamsF& params, const std::string& path);

ParamsF load_checkpoint(std::istream& in);
ParamsF load_checkpoint_file(const std::string& path);

}  // namespace skelact
