#pragma once

#include <cstdint>
#include <cstring>
#include <ostream>
#include <string>

#include "hodg/errors.hpp"

// Little-endian primitives for the binary dump formats. Byte order is pinned
// by the file specs, so values are assembled bytewise instead of memcpy'd.

namespace hodg::bin {

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    std::string origin;  // path, for error messages

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size())
            throw DataError(origin + ": truncated while reading " + what + " at byte " +
                            std::to_string(pos));
    }

    std::uint16_t u16(const char* what) {
        need(2, what);
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
        pos += 2;
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
        pos += 4;
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }

    float f32(const char* what) {
        const std::uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    void expect_magic(const std::string& magic) {
        need(magic.size(), "magic");
        if (buf.compare(pos, magic.size(), magic) != 0)
            throw DataError(origin + ": bad magic, expected \"" + magic + "\"");
        pos += magic.size();
    }
};

}  // namespace hodg::bin
