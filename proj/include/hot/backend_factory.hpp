#pragma once

#include <memory>
#include <string>

#include "hot/backend.hpp"

namespace hot {

// Builds a backend from a JSON config document:
//   {"backend": {"kind": "mock"|"markov"|"http"},
//    "mock":   {"script_path": ...},
//    "markov": {"spec_path": ...},
//    "http":   {"base_url": ..., "model": ..., "api_key_env": ...}}
// Relative paths resolve against `base_dir` when given.
std::unique_ptr<Backend> backend_from_config(const std::string& json_text,
                                             const std::string& base_dir = "");

std::unique_ptr<Backend> backend_from_config_file(const std::string& path);

}  // namespace hot
