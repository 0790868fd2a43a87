#include "skelact/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "skelact/common/error.hpp"

namespace skelact {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {
constexpr char kMagic[6] = {'S', 'K', 'T', 'C', 'N', '1'};
}

void save_checkpoint(const ParamsF& params, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    const std::string cfg = params.cfg.to_json_text();
    const std::uint32_t len = static_cast<std::uint32_t>(cfg.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    for (const auto& t : params.tensors)
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!out) throw RuntimeError("checkpoint write failed");
}

void save_checkpoint_file(const ParamsF& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("cannot open checkpoint for writing: " + path);
    save_checkpoint(params, out);
}

ParamsF load_checkpoint(std::istream& in) {
    char magic[6];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a checkpoint file (bad magic)");
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len == 0 || len > (1u << 20))
        throw DataError("checkpoint has an implausible config length");
    std::string cfg_text(len, '\0');
    in.read(cfg_text.data(), len);
    if (!in) throw DataError("checkpoint truncated inside the config blob");

    const ModelConfig cfg = ModelConfig::from_json_text(cfg_text);
    // Build the parameter layout, then overwrite every tensor from the file.
    ParamsF params = init_params<float>(cfg, 0);
    for (auto& t : params.tensors) {
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
        if (!in)
            throw DataError("checkpoint truncated inside tensor " + t.name);
        for (const float v : t.data)
            if (!std::isfinite(v))
                throw DataError("checkpoint tensor " + t.name +
                                " contains non-finite values");
    }
    in.peek();
    if (!in.eof()) throw DataError("checkpoint has trailing bytes");
    return params;
}

ParamsF load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint file: " + path);
    return load_checkpoint(in);
}

}  // namespace skelact
