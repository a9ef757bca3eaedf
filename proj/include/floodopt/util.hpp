#ifndef FLOODOPT_UTIL_HPP
#define FLOODOPT_UTIL_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include "floodopt/errors.hpp"

namespace floodopt {

/// Shortest decimal text that parses back to the identical double.
inline std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// FNV-1a 64-bit content digest; identifies inputs for replay, not for security.
class Fnv1a64 {
public:
    void update(std::string_view data)
    {
        for (unsigned char c : data) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
    }
    std::string hex() const
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 0; i < 16; ++i)
            s[15 - i] = digits[(hash_ >> (4 * i)) & 0xF];
        return s;
    }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string digest_of(std::string_view data)
{
    Fnv1a64 h;
    h.update(data);
    return h.hex();
}

} // namespace floodopt

#endif
