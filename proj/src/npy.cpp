#include "shapecore/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "shapecore/error.hpp"

namespace shapecore {

namespace {

constexpr std::array<std::uint8_t, 6> kMagic{0x93, 'N', 'U', 'M', 'P', 'Y'};

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::MalformedHeader, what);
}

// The header is a Python dict literal holding strings, booleans and tuples of
// integers. This is just enough of a parser for that subset.
using HeaderValue = std::variant<std::string, bool, std::vector<std::size_t>>;

class DictParser {
public:
    explicit DictParser(std::string_view text) : s_(text) {}

    std::map<std::string, HeaderValue> parse() {
        std::map<std::string, HeaderValue> out;
        expect('{');
        while (true) {
            skip_ws();
            if (peek() == '}') {
                ++pos_;
                break;
            }
            std::string key = parse_string();
            expect(':');
            out[key] = parse_value();
            skip_ws();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() == '}') {
                ++pos_;
                break;
            } else {
                malformed("expected ',' or '}' in header dict");
            }
        }
        skip_ws();
        if (pos_ != s_.size()) malformed("trailing characters after header dict");
        return out;
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) malformed(std::string("expected '") + c + "' in header dict");
        ++pos_;
    }

    std::string parse_string() {
        skip_ws();
        const char quote = peek();
        if (quote != '\'' && quote != '"') malformed("expected quoted string in header dict");
        const auto end = s_.find(quote, pos_ + 1);
        if (end == std::string_view::npos) malformed("unterminated string in header dict");
        std::string out(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        return out;
    }

    HeaderValue parse_value() {
        skip_ws();
        const char c = peek();
        if (c == '\'' || c == '"') return parse_string();
        if (s_.substr(pos_, 4) == "True") {
            pos_ += 4;
            return true;
        }
        if (s_.substr(pos_, 5) == "False") {
            pos_ += 5;
            return false;
        }
        if (c == '(') return parse_tuple();
        malformed("unsupported value in header dict");
    }

    std::vector<std::size_t> parse_tuple() {
        expect('(');
        std::vector<std::size_t> out;
        while (true) {
            skip_ws();
            if (peek() == ')') {
                ++pos_;
                return out;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) malformed("bad shape entry");
            std::size_t v = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + static_cast<std::size_t>(s_[pos_] - '0');
                ++pos_;
            }
            // numpy writes "3L" in some old Python 2 headers
            if (peek() == 'L') ++pos_;
            out.push_back(v);
            skip_ws();
            if (peek() == ',') ++pos_;
            else if (peek() != ')') malformed("bad shape tuple");
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

NpyDtype parse_descr(const std::string& descr) {
    if (descr.size() < 3) throw Error(ErrorCode::UnsupportedDtype, "dtype '" + descr + "'");
    NpyDtype dt;
    const char order = descr[0];
    if (order == '>') {
        dt.big_endian = true;
    } else if (order == '=') {
        dt.big_endian = std::endian::native == std::endian::big;
    } else if (order != '<' && order != '|') {
        throw Error(ErrorCode::UnsupportedDtype, "dtype '" + descr + "'");
    }
    const char kind = descr[1];
    std::size_t size = 0;
    try {
        std::size_t used = 0;
        size = std::stoul(descr.substr(2), &used);
        if (used != descr.size() - 2) size = 0;
    } catch (const std::exception&) {
        size = 0;
    }
    dt.size = size;
    const bool ok = (kind == 'b' && size == 1) || (kind == 'u' && size == 1) ||
                    (kind == 'i' && (size == 1 || size == 2 || size == 4 || size == 8)) ||
                    (kind == 'f' && (size == 4 || size == 8));
    if (!ok) throw Error(ErrorCode::UnsupportedDtype, "dtype '" + descr + "'");
    dt.kind = kind == 'b' ? ElementKind::Bool
              : kind == 'u' ? ElementKind::Unsigned
              : kind == 'i' ? ElementKind::Signed
                            : ElementKind::Float;
    return dt;
}

template <typename T>
T read_element(const std::uint8_t* p, bool big_endian) {
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), p, sizeof(T));
    if (big_endian != (std::endian::native == std::endian::big)) {
        std::reverse(raw.begin(), raw.end());
    }
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
}

template <typename T>
std::uint8_t binarize_value(T v, std::optional<std::int64_t> label) {
    if (label) {
        if constexpr (std::is_floating_point_v<T>) {
            return v == static_cast<T>(*label) ? 1 : 0;
        } else {
            return static_cast<std::int64_t>(v) == *label ? 1 : 0;
        }
    }
    return v != T{0} ? 1 : 0;
}

// Visits every element in file order and writes its occupancy to the
// canonical position. For C-order the file index already equals the
// canonical x + nx * (y + ny * z); Fortran order needs the transpose.
template <typename T>
void decode_payload(const std::uint8_t* payload, const NpyHeader& h, Dims dims,
                    std::optional<std::int64_t> label, std::vector<std::uint8_t>& out) {
    const std::size_t n = dims.count();
    const std::size_t step = sizeof(T);
    if (!h.fortran_order) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = binarize_value(read_element<T>(payload + i * step, h.dtype.big_endian), label);
        }
        return;
    }
    // Fortran: file offset of array element (a0, a1, a2) is a0 + d0 * (a1 + d1 * a2),
    // with a0 = z, a1 = y, a2 = x.
    std::size_t i = 0;
    for (std::size_t x = 0; x < dims.nx; ++x)
        for (std::size_t y = 0; y < dims.ny; ++y)
            for (std::size_t z = 0; z < dims.nz; ++z, ++i) {
                out[x + dims.nx * (y + dims.ny * z)] =
                    binarize_value(read_element<T>(payload + i * step, h.dtype.big_endian), label);
            }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoFailure, "cannot read '" + path.string() + "'");
    return bytes;
}

}  // namespace

std::size_t NpyHeader::element_count() const noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

NpyHeader parse_npy_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 10 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        malformed("missing NPY magic");
    }
    NpyHeader h;
    h.major = bytes[6];
    h.minor = bytes[7];
    std::size_t header_len = 0;
    std::size_t prefix = 0;
    if (h.major == 1 && h.minor == 0) {
        header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8);
        prefix = 10;
    } else if (h.major == 2 && h.minor == 0) {
        if (bytes.size() < 12) malformed("truncated v2.0 preamble");
        header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8) |
                     (static_cast<std::size_t>(bytes[10]) << 16) |
                     (static_cast<std::size_t>(bytes[11]) << 24);
        prefix = 12;
    } else {
        malformed("unsupported NPY version " + std::to_string(h.major) + "." +
                  std::to_string(h.minor));
    }
    if (bytes.size() < prefix + header_len) malformed("header runs past end of file");
    h.payload_offset = prefix + header_len;

    std::string_view text(reinterpret_cast<const char*>(bytes.data() + prefix), header_len);
    while (!text.empty() && (text.back() == '\n' || text.back() == ' ' || text.back() == '\0')) {
        text.remove_suffix(1);
    }
    const auto dict = DictParser(text).parse();

    auto descr = dict.find("descr");
    auto fortran = dict.find("fortran_order");
    auto shape = dict.find("shape");
    if (descr == dict.end() || fortran == dict.end() || shape == dict.end()) {
        malformed("header dict lacks descr/fortran_order/shape");
    }
    const auto* descr_s = std::get_if<std::string>(&descr->second);
    const auto* fortran_b = std::get_if<bool>(&fortran->second);
    const auto* shape_t = std::get_if<std::vector<std::size_t>>(&shape->second);
    if (!descr_s || !fortran_b || !shape_t) malformed("header dict has mistyped entries");

    h.dtype = parse_descr(*descr_s);
    h.fortran_order = *fortran_b;
    h.shape = *shape_t;
    return h;
}

MaskVolume decode_npy(std::span<const std::uint8_t> bytes, std::optional<std::int64_t> label) {
    const NpyHeader h = parse_npy_header(bytes);
    if (h.shape.size() != 3) {
        throw Error(ErrorCode::NotThreeDimensional,
                    "expected a 3-D array, got " + std::to_string(h.shape.size()) + " dimensions");
    }
    const Dims dims{h.shape[2], h.shape[1], h.shape[0]};
    if (dims.count() == 0) throw Error(ErrorCode::NotThreeDimensional, "zero-sized axis");

    const std::size_t need = dims.count() * h.dtype.size;
    if (bytes.size() - h.payload_offset < need) {
        throw Error(ErrorCode::TruncatedPayload,
                    "payload holds " + std::to_string(bytes.size() - h.payload_offset) +
                        " bytes, header requires " + std::to_string(need));
    }

    std::vector<std::uint8_t> out(dims.count());
    const std::uint8_t* payload = bytes.data() + h.payload_offset;
    switch (h.dtype.kind) {
        case ElementKind::Bool:
        case ElementKind::Unsigned:
            decode_payload<std::uint8_t>(payload, h, dims, label, out);
            break;
        case ElementKind::Signed:
            switch (h.dtype.size) {
                case 1: decode_payload<std::int8_t>(payload, h, dims, label, out); break;
                case 2: decode_payload<std::int16_t>(payload, h, dims, label, out); break;
                case 4: decode_payload<std::int32_t>(payload, h, dims, label, out); break;
                default: decode_payload<std::int64_t>(payload, h, dims, label, out); break;
            }
            break;
        case ElementKind::Float:
            if (h.dtype.size == 4) decode_payload<float>(payload, h, dims, label, out);
            else decode_payload<double>(payload, h, dims, label, out);
            break;
    }
    return MaskVolume(dims, std::move(out), Spacing{}, label);
}

MaskVolume load_npy(const std::filesystem::path& path, std::optional<std::int64_t> label) {
    const auto bytes = read_file(path);
    return decode_npy(bytes, label);
}

std::vector<std::uint8_t> encode_npy(const MaskVolume& vol) {
    const Dims& d = vol.dims();
    std::string dict = "{'descr': '|u1', 'fortran_order': False, 'shape': (" +
                       std::to_string(d.nz) + ", " + std::to_string(d.ny) + ", " +
                       std::to_string(d.nx) + "), }";
    // Pad with spaces so magic + version + length + dict + '\n' is a multiple of 64.
    const std::size_t unpadded = 10 + dict.size() + 1;
    dict.append((64 - unpadded % 64) % 64, ' ');
    dict.push_back('\n');

    std::vector<std::uint8_t> out(10 + dict.size() + d.count());
    std::copy(kMagic.begin(), kMagic.end(), out.begin());
    out[6] = 1;
    out[7] = 0;
    out[8] = static_cast<std::uint8_t>(dict.size() & 0xff);
    out[9] = static_cast<std::uint8_t>((dict.size() >> 8) & 0xff);
    std::memcpy(out.data() + 10, dict.data(), dict.size());
    std::copy(vol.data().begin(), vol.data().end(), out.begin() + 10 + static_cast<std::ptrdiff_t>(dict.size()));
    return out;
}

void save_npy(const MaskVolume& vol, const std::filesystem::path& path) {
    const auto bytes = encode_npy(vol);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

MaskVolume binarize(Dims dims, std::span<const double> values, std::optional<std::int64_t> label) {
    if (values.size() != dims.count()) {
        throw Error(ErrorCode::InvalidArgument, "value count does not match dims");
    }
    std::vector<std::uint8_t> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double v) { return binarize_value(v, label); });
    return MaskVolume(dims, std::move(out), Spacing{}, label);
}

}  // namespace shapecore
