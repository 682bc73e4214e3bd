#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace painmine {

// FNV-1a 64-bit hash, used for vocabulary/config fingerprints.
inline uint64_t fnv1a64(std::string_view data, uint64_t h = 14695981039346656037ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_hex(uint64_t value);

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double value);

std::string lowercase_ascii(std::string_view s);

// Whole file as a string; throws DataError if unreadable.
std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);

std::vector<std::string> split_lines(std::string_view text);

} // namespace painmine
