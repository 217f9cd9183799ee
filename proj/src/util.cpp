#include "hot/util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hot/errors.hpp"

namespace hot {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string format_fixed(double value, int decimals) {
    if (!std::isfinite(value)) return "nan";
    double scale = std::pow(10.0, decimals);
    double scaled = value * scale;
    double floor_v = std::floor(scaled);
    double frac = scaled - floor_v;
    double rounded;
    if (frac > 0.5) {
        rounded = floor_v + 1;
    } else if (frac < 0.5) {
        rounded = floor_v;
    } else {
        // exactly halfway: round to even
        rounded = (std::fmod(floor_v, 2.0) == 0.0) ? floor_v : floor_v + 1;
    }
    double result = rounded / scale;
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << result;
    // normalize negative zero
    std::string s = out.str();
    if (s == "-0." + std::string(decimals, '0')) s = s.substr(1);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace hot
