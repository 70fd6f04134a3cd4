#include "landslide/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace landslide {

using nlohmann::json;
using nn::LayerKind;
using nn::LayerSpec;
using nn::Model;

namespace {

constexpr char kMagic[4] = {'S', 'S', 'L', 'D'};
constexpr uint16_t kVersion = 1;
constexpr uint8_t kFlagAdam = 0x01;

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32_blob(std::string& out, const float* data, size_t count) {
    for (size_t i = 0; i < count; ++i) {
        uint32_t u;
        std::memcpy(&u, &data[i], 4);
        put_u32(out, u);
    }
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n) const {
        require(pos + n <= buf.size(), "checkpoint truncated");
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint8_t>(buf[pos]) |
                     (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        }
        pos += 4;
        return v;
    }
    void f32_blob(float* data, size_t count) {
        for (size_t i = 0; i < count; ++i) {
            const uint32_t u = u32();
            std::memcpy(&data[i], &u, 4);
        }
    }
};

json layer_to_json(const LayerSpec& spec) {
    json j{{"kind", nn::layer_kind_name(spec.kind)}};
    if (spec.kind == LayerKind::Conv3x3) j["filters"] = spec.units;
    if (spec.kind == LayerKind::Dense) j["units"] = spec.units;
    if (spec.kind == LayerKind::Dropout) j["rate"] = spec.rate;
    return j;
}

LayerSpec layer_from_json(const json& j) {
    LayerSpec spec;
    spec.kind = nn::layer_kind_from_name(j.at("kind").get<std::string>());
    if (spec.kind == LayerKind::Conv3x3) spec.units = j.at("filters").get<int>();
    if (spec.kind == LayerKind::Dense) spec.units = j.at("units").get<int>();
    if (spec.kind == LayerKind::Dropout) spec.rate = j.at("rate").get<float>();
    return spec;
}

void append_params(std::string& out, const std::vector<Model::Params>& params) {
    for (const auto& p : params) {
        if (p.w.empty()) continue;
        put_f32_blob(out, p.w.data.data(), p.w.size());
        put_f32_blob(out, p.b.data(), p.b.size());
    }
}

void read_params(Reader& r, std::vector<Model::Params>& params) {
    for (auto& p : params) {
        if (p.w.empty()) continue;
        r.f32_blob(p.w.data.data(), p.w.size());
        r.f32_blob(p.b.data(), p.b.size());
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    json spec;
    spec["input"] = {ck.model.input.h, ck.model.input.w, ck.model.input.c};
    spec["seed"] = ck.model.rng_seed;
    json layers = json::array();
    for (const auto& l : ck.model.layers) layers.push_back(layer_to_json(l));
    spec["layers"] = layers;
    if (ck.adam) {
        spec["adam"] = {{"lr", ck.adam->lr}, {"beta1", ck.adam->beta1},
                        {"beta2", ck.adam->beta2}, {"eps", ck.adam->eps},
                        {"t", ck.adam->t}};
    }
    if (ck.norm) {
        json bands = json::array();
        for (const auto& b : ck.norm->bands) bands.push_back({{"min", b.lo}, {"max", b.hi}});
        spec["normalization"] = bands;
    }
    const std::string spec_text = spec.dump();

    std::string out;
    out.append(kMagic, 4);
    put_u16(out, kVersion);
    out.push_back(static_cast<char>(ck.adam ? kFlagAdam : 0));
    put_u32(out, static_cast<uint32_t>(spec_text.size()));
    out += spec_text;
    append_params(out, ck.model.params);
    if (ck.adam) {
        append_params(out, ck.adam->m);
        append_params(out, ck.adam->v);
    }

    std::ofstream f(path, std::ios::binary);
    require(f.good(), "cannot write checkpoint: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    require(f.good(), "failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    require(f.good(), "cannot open checkpoint: " + path);
    std::string buf(static_cast<size_t>(f.tellg()), '\0');
    f.seekg(0);
    f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    require(f.good(), "short read on checkpoint: " + path);

    Reader r{buf};
    r.need(4);
    require(std::memcmp(buf.data(), kMagic, 4) == 0,
            "not a checkpoint (bad magic): " + path);
    r.pos = 4;
    const uint16_t version = r.u16();
    require(version == kVersion, "unsupported checkpoint version " + std::to_string(version));
    const uint8_t flags = r.u8();
    const uint32_t spec_len = r.u32();
    r.need(spec_len);
    json spec;
    try {
        spec = json::parse(buf.substr(r.pos, spec_len));
    } catch (const json::exception& e) {
        fail(std::string("malformed checkpoint spec block: ") + e.what());
    }
    r.pos += spec_len;

    Checkpoint ck;
    try {
        const auto& in = spec.at("input");
        nn::Shape3 input{in.at(0).get<int>(), in.at(1).get<int>(), in.at(2).get<int>()};
        std::vector<LayerSpec> layers;
        for (const auto& l : spec.at("layers")) layers.push_back(layer_from_json(l));
        // build_model re-validates shape consistency before any blob is read.
        ck.model = nn::build_model<float>(input, std::move(layers),
                                          spec.value("seed", uint64_t(0)));
        if (spec.contains("normalization")) {
            NormalizationSpec norm;
            norm.mode = NormalizationSpec::Mode::Fixed;
            for (const auto& b : spec.at("normalization")) {
                norm.bands.push_back({b.at("min").get<float>(), b.at("max").get<float>()});
            }
            ck.norm = std::move(norm);
        }
        if (spec.contains("adam")) {
            auto st = nn::AdamState::init_for(ck.model, spec.at("adam").at("lr").get<double>());
            st.beta1 = spec.at("adam").at("beta1").get<double>();
            st.beta2 = spec.at("adam").at("beta2").get<double>();
            st.eps = spec.at("adam").at("eps").get<double>();
            st.t = spec.at("adam").at("t").get<int64_t>();
            ck.adam = std::move(st);
        }
    } catch (const json::exception& e) {
        fail(std::string("malformed checkpoint spec block: ") + e.what());
    }

    size_t param_floats = 0;
    for (const auto& p : ck.model.params) {
        if (p.w.empty()) continue;
        param_floats += p.w.size() + p.b.size();
    }
    const bool has_adam_blobs = (flags & kFlagAdam) != 0;
    require(has_adam_blobs == ck.adam.has_value(),
            "checkpoint flags disagree with spec block about Adam state");
    const size_t expected = r.pos + 4 * param_floats * (has_adam_blobs ? 3 : 1);
    require(buf.size() == expected,
            "checkpoint payload size mismatch: expected " + std::to_string(expected) +
                " bytes, file holds " + std::to_string(buf.size()));

    read_params(r, ck.model.params);
    if (ck.adam) {
        read_params(r, ck.adam->m);
        read_params(r, ck.adam->v);
    }
    return ck;
}

}  // namespace landslide
