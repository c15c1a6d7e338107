#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>
#include <zlib.h>

#include "tsf/trainer.hpp"

namespace tsf {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic{'T', 'S', 'F', 'C', 'K', 'P', 'T', '\0'};
constexpr const char* kGateOrder = "ifgo";

void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
}

std::uint64_t get_u(std::istream& in, int bytes, const char* what) {
    std::array<unsigned char, 8> buf{};
    read_exact(in, reinterpret_cast<char*>(buf.data()), static_cast<std::size_t>(bytes), what);
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[static_cast<std::size_t>(i)];
    return v;
}

std::vector<unsigned char> encode_payload(const nn::ModelParams& params) {
    std::vector<unsigned char> bytes;
    bytes.reserve(nn::parameter_count(params) * 8);
    for (const auto& block : nn::parameter_blocks(params)) {
        for (double d : block.values) {
            const auto bits = std::bit_cast<std::uint64_t>(d);
            for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
        }
    }
    return bytes;
}

std::uint32_t crc_of(const std::vector<unsigned char>& bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const std::size_t n = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
        crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(n));
        offset += n;
    }
    return static_cast<std::uint32_t>(crc);
}

json header_of(const Checkpoint& c) {
    const auto arch = c.architecture();
    json scaler = json::array();
    for (const auto& s : c.scaler.columns) scaler.push_back(json::array({s.name, s.min, s.max}));
    json blocks = json::array();
    for (const auto& b : nn::parameter_blocks(c.params))
        blocks.push_back({{"name", std::string(b.name)}, {"size", b.values.size()}});
    return {
        {"format_version", Checkpoint::kFormatVersion},
        {"architecture",
         {{"input_size", arch.input_size},
          {"hidden_sizes", {arch.hidden1, arch.hidden2}},
          {"lookback", c.lookback},
          {"dropout_rate", arch.dropout_rate},
          {"gate_order", kGateOrder}}},
        {"train_fraction", c.train_fraction},
        {"target_column", c.target_column},
        {"manifest", c.manifest},
        {"scaler", scaler},
        {"best_val_loss", c.best_val_loss},
        {"epoch", c.epoch},
        {"blocks", blocks},
    };
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
    checkpoint.validate();
    const std::string header = header_of(checkpoint).dump();
    const auto payload = encode_payload(checkpoint.params);
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, Checkpoint::kFormatVersion);
    put_u64(out, header.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put_u64(out, payload.size() / 8);
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    put_u32(out, crc_of(payload));
    if (!out) throw CheckpointError("failed to write checkpoint");
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open '" + path + "' for writing");
    save_checkpoint(checkpoint, out);
    out.close();
    if (!out) throw CheckpointError("failed to write '" + path + "'");
}

Checkpoint load_checkpoint(std::istream& in) {
    std::array<char, 8> magic{};
    read_exact(in, magic.data(), magic.size(), "magic");
    if (magic != kMagic) throw CheckpointError("not a checkpoint file (bad magic)");
    const auto version = static_cast<std::uint32_t>(get_u(in, 4, "format version"));
    if (version != Checkpoint::kFormatVersion)
        throw CheckpointError("unsupported checkpoint format version " + std::to_string(version) + " (expected " +
                              std::to_string(Checkpoint::kFormatVersion) + ")");
    const auto header_len = get_u(in, 8, "header length");
    if (header_len > (1ull << 30)) throw CheckpointError("checkpoint header length is implausible");
    std::string header_text(header_len, '\0');
    read_exact(in, header_text.data(), header_text.size(), "header");
    const auto count = get_u(in, 8, "payload length");
    if (count > (1ull << 32)) throw CheckpointError("checkpoint payload length is implausible");
    std::vector<unsigned char> payload(count * 8);
    read_exact(in, reinterpret_cast<char*>(payload.data()), payload.size(), "weights");
    const auto stored_crc = static_cast<std::uint32_t>(get_u(in, 4, "checksum"));
    if (stored_crc != crc_of(payload)) throw CheckpointError("checkpoint weight payload failed its integrity check");

    Checkpoint c;
    try {
        const json h = json::parse(header_text);
        if (h.at("format_version").get<std::uint32_t>() != version)
            throw CheckpointError("header format version disagrees with file version");
        const auto& a = h.at("architecture");
        if (a.at("gate_order").get<std::string>() != kGateOrder)
            throw CheckpointError("unsupported gate order '" + a.at("gate_order").get<std::string>() + "'");
        nn::Architecture arch;
        arch.input_size = a.at("input_size").get<std::size_t>();
        const auto hidden = a.at("hidden_sizes").get<std::vector<std::size_t>>();
        if (hidden.size() != 2) throw CheckpointError("expected two hidden sizes");
        arch.hidden1 = hidden[0];
        arch.hidden2 = hidden[1];
        arch.dropout_rate = a.at("dropout_rate").get<double>();
        c.lookback = a.at("lookback").get<std::size_t>();
        c.train_fraction = h.at("train_fraction").get<double>();
        c.target_column = h.at("target_column").get<std::string>();
        c.manifest = h.at("manifest").get<std::vector<std::string>>();
        for (const auto& s : h.at("scaler"))
            c.scaler.columns.push_back({s.at(0).get<std::string>(), s.at(1).get<double>(), s.at(2).get<double>()});
        c.best_val_loss = h.at("best_val_loss").get<double>();
        c.epoch = h.at("epoch").get<std::size_t>();
        c.params = nn::ModelParams::zeros(arch);

        auto blocks = nn::parameter_blocks(c.params);
        const auto& declared = h.at("blocks");
        if (declared.size() != blocks.size()) throw CheckpointError("checkpoint declares wrong number of blocks");
        std::size_t expected = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (declared[i].at("name").get<std::string>() != blocks[i].name ||
                declared[i].at("size").get<std::size_t>() != blocks[i].values.size())
                throw CheckpointError("weight block " + std::string(blocks[i].name) +
                                      " is inconsistent with the architecture");
            expected += blocks[i].values.size();
        }
        if (expected != count)
            throw CheckpointError("payload holds " + std::to_string(count) + " values, architecture needs " +
                                  std::to_string(expected));
        std::size_t offset = 0;
        for (auto& block : blocks) {
            for (auto& d : block.values) {
                std::uint64_t bits = 0;
                for (int i = 7; i >= 0; --i) bits = (bits << 8) | payload[offset + static_cast<std::size_t>(i)];
                d = std::bit_cast<double>(bits);
                offset += 8;
            }
        }
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("inconsistent checkpoint: ") + e.what());
    }
    return c;
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot read '" + path + "'");
    return load_checkpoint(in);
}

}  // namespace tsf
