#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zkdfl {

using Bytes = std::vector<std::uint8_t>;

inline void append_u32_be(Bytes& out, std::uint32_t v) {
    out.push_back((std::uint8_t)(v >> 24));
    out.push_back((std::uint8_t)(v >> 16));
    out.push_back((std::uint8_t)(v >> 8));
    out.push_back((std::uint8_t)v);
}

inline std::uint32_t read_u32_be(std::span<const std::uint8_t> in) {
    return ((std::uint32_t)in[0] << 24) | ((std::uint32_t)in[1] << 16) |
           ((std::uint32_t)in[2] << 8) | (std::uint32_t)in[3];
}

template <typename Container>
void append_bytes(Bytes& out, const Container& c) {
    out.insert(out.end(), c.begin(), c.end());
}

inline std::string to_hex(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (auto b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

inline Bytes from_hex(const std::string& s) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    if (s.size() % 2 != 0) return out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i + 1 < s.size(); i += 2) {
        int hi = nibble(s[i]), lo = nibble(s[i + 1]);
        if (hi < 0 || lo < 0) return {};
        out.push_back((std::uint8_t)((hi << 4) | lo));
    }
    return out;
}

// FNV-1a over a byte stream; used for ledger state fingerprints.
struct Fnv1a {
    std::uint64_t h = 0xCBF29CE484222325ull;
    void update(std::span<const std::uint8_t> data) {
        for (auto b : data) {
            h ^= b;
            h *= 0x100000001B3ull;
        }
    }
    void update_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (std::uint8_t)(v >> (8 * i));
            h *= 0x100000001B3ull;
        }
    }
};

} // namespace zkdfl
