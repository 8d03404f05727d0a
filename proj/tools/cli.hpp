#pragma once

// Command-line front end. `run_cli` is the whole program minus process setup so
// tests can drive it in-process.
//
// Exit codes: 0 success, 1 invalid arguments or input, 2 numerical failure.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpd/harness.hpp"

namespace cpd::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17 significant digits, scientific notation.
std::string format_real(double v);

/// Header `t,e_H,e_Hh,e_M,e_I`, one row per sample, LF line endings.
std::string drift_csv(const DriftSeries& series);

/// Problem, method and epsilon folded into a file stem.
std::string cell_stem(const std::string& problem, Method method, double epsilon);

}  // namespace cpd::cli
