#include "invox/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace invox::text {

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = b0;
        std::size_t len = 1;
        if ((b0 & 0x80u) == 0) {
            len = 1;
        } else if ((b0 & 0xE0u) == 0xC0u) {
            len = 2;
            cp = b0 & 0x1Fu;
        } else if ((b0 & 0xF0u) == 0xE0u) {
            len = 3;
            cp = b0 & 0x0Fu;
        } else if ((b0 & 0xF8u) == 0xF0u) {
            len = 4;
            cp = b0 & 0x07u;
        } else {
            out.push_back(b0);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(b0);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0u) != 0x80u) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3Fu);
        }
        if (!ok) {
            out.push_back(b0);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

char32_t fold_char(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    // Latin-1 uppercase block (covers á é í ó ú ý and friends)
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    switch (c) {
        case 0x010C: return 0x010D; // Č
        case 0x010E: return 0x010F; // Ď
        case 0x011A: return 0x011B; // Ě
        case 0x0147: return 0x0148; // Ň
        case 0x0158: return 0x0159; // Ř
        case 0x0160: return 0x0161; // Š
        case 0x0164: return 0x0165; // Ť
        case 0x016E: return 0x016F; // Ů
        case 0x017D: return 0x017E; // Ž
        case 0x0139: return 0x013A; // Ĺ
        case 0x013D: return 0x013E; // Ľ
        case 0x0154: return 0x0155; // Ŕ
        default: return c;
    }
}

std::u32string fold(std::u32string_view s) {
    std::u32string out(s);
    std::transform(out.begin(), out.end(), out.begin(), fold_char);
    return out;
}

std::string fold_utf8(std::string_view s) {
    return encode_utf8(fold(decode_utf8(s)));
}

bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\r' || c == U'\n' || c == U'\f' ||
           c == U'\v' || c == 0xA0;
}

bool is_punct(char32_t c) {
    return c < 0x80 && std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char32_t c) {
    return c >= U'0' && c <= U'9';
}

bool is_alpha(char32_t c) {
    if (c < 0x80) return std::isalpha(static_cast<unsigned char>(c)) != 0;
    return !is_space(c) && !is_punct(c);
}

bool is_upper(char32_t c) {
    if (c < 0x80) return std::isupper(static_cast<unsigned char>(c)) != 0;
    return fold_char(c) != c;
}

std::size_t length_utf8(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if ((static_cast<unsigned char>(s[i]) & 0xC0u) != 0x80u) ++n;
    return n;
}

std::size_t byte_of_codepoint(std::string_view s, std::size_t cp) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0u) != 0x80u) {
            if (n == cp) return i;
            ++n;
        }
    }
    return s.size();
}

std::size_t codepoint_of_byte(std::string_view s, std::size_t byte) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size() && i < byte; ++i)
        if ((static_cast<unsigned char>(s[i]) & 0xC0u) != 0x80u) ++n;
    return n;
}

std::string substr_utf8(std::string_view s, std::size_t begin, std::size_t end) {
    std::size_t b = byte_of_codepoint(s, begin);
    std::size_t e = byte_of_codepoint(s, end);
    if (e < b) e = b;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_spaces(std::string_view s) {
    std::string out;
    bool in_space = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char a = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
        char b = static_cast<char>(std::tolower(static_cast<unsigned char>(prefix[i])));
        if (a != b) return false;
    }
    return true;
}

} // namespace invox::text
