#pragma once

#include "quadrature.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lgha {

/// Writes bytes to path through a sibling temp file and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& bytes)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline nlohmann::json grid_to_json(const GridSpec& g)
{
    auto axes = nlohmann::json::array();
    for (const auto& a : g.axes)
        axes.push_back({{"name", a.name}, {"kind", axis_kind_name(a.kind)}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count}});
    return axes;
}

inline GridSpec grid_from_json(const nlohmann::json& axes)
{
    GridSpec g;
    for (const auto& a : axes)
        g.axes.push_back({axis_kind_from(a.at("kind").get<std::string>()), a.at("lo").get<double>(),
                          a.at("hi").get<double>(), a.at("count").get<std::size_t>(), a.at("name").get<std::string>()});
    return g;
}

namespace detail {

inline void put_le(std::string& out, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

inline double get_le(const unsigned char* p)
{
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{p[b]} << (8 * b);
    return std::bit_cast<double>(bits);
}

} // namespace detail

/// JSON header line, newline, then interleaved little-endian (re, im) doubles.
inline std::string encode_field(const SampledField& f)
{
    f.validate();
    nlohmann::json shape = nlohmann::json::array();
    for (const auto& a : f.grid.axes) shape.push_back(a.count);
    const nlohmann::json header{{"shape", shape}, {"axes", grid_to_json(f.grid)}, {"dtype", "c128"}, {"endian", "LE"}};
    std::string out = header.dump() + "\n";
    out.reserve(out.size() + 16 * f.values.size());
    for (const auto& v : f.values) {
        detail::put_le(out, v.real());
        detail::put_le(out, v.imag());
    }
    return out;
}

inline SampledField decode_field(const std::string& bytes)
{
    const auto nl = bytes.find('\n');
    if (nl == std::string::npos) throw Error("field: missing header line");
    const auto header = nlohmann::json::parse(bytes.substr(0, nl));
    if (header.at("dtype") != "c128" || header.at("endian") != "LE") throw Error("field: unsupported dtype/endian");
    SampledField f{grid_from_json(header.at("axes")), {}};
    const auto shape = header.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != f.grid.dim()) throw Error("field: shape/axes mismatch");
    for (std::size_t d = 0; d < shape.size(); ++d)
        if (shape[d] != f.grid.axes[d].count) throw Error("field: shape/axes mismatch");
    const std::size_t n = f.grid.size();
    if (bytes.size() - nl - 1 != 16 * n) throw Error("field: payload size mismatch");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
    f.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.values[i] = {detail::get_le(p + 16 * i), detail::get_le(p + 16 * i + 8)};
    f.validate();
    return f;
}

inline void write_field(const std::filesystem::path& path, const SampledField& f) { write_atomic(path, encode_field(f)); }

inline SampledField read_field(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_field(ss.str());
}

} // namespace lgha
