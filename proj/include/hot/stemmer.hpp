#pragma once

#include <string>

namespace hot {

// Deterministic Porter stemmer for lowercase ASCII-alpha tokens; any
// other token is returned unchanged (identity for CJK).
std::string porter_stem(const std::string& token);

}  // namespace hot
