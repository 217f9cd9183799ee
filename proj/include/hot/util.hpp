#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hot {

std::string trim(std::string_view s);

// Whitespace split, empty tokens dropped.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::uint64_t fnv1a(std::string_view s);

// Finalizer from the splitmix64 generator; used to turn (seed, tag)
// combinations into well-mixed RNG seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Fixed-point decimal formatting with half-even rounding.
std::string format_fixed(double value, int decimals);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace hot
