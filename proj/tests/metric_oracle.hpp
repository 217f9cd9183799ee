// Brute-force metric reimplementations used to cross-check the library.
// Deliberately written with a different structure (materialized n-gram
// lists, per-occurrence marking) from src/metrics.cpp.
#pragma once

#include <string>
#include <vector>

namespace oracle {

double bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int n);
double nist(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int n);
double meteor(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);

}  // namespace oracle
