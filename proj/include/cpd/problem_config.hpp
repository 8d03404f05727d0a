#pragma once

// Problem config files: one `key = value` pair per line, `#` starts a comment,
// vector values are whitespace- or comma-separated reals.
//
//   name           = identifier
//   epsilon        = positive real (B is divided by it)
//   potential.kind = quadratic | inverse_radius | builtin:<problem>
//   potential.Q    = 9 reals, row-major, symmetric     (quadratic)
//   potential.q    = 3 reals                           (quadratic, default 0)
//   potential.coefficient = real                       (inverse_radius, default 0.01)
//   field.kind     = constant | builtin:<problem>
//   field.B        = 3 reals before division by epsilon (constant)
//   x0, v0         = 3 reals each
//   S              = 9 reals, row-major, skew-symmetric (default [0 1 0; -1 0 0; 0 0 0])

#include <filesystem>
#include <string_view>

#include "cpd/fields.hpp"

namespace cpd {

/// Throws ParseError on malformed input, InvalidParameter on inconsistent content.
ProblemSpec parse_problem(std::string_view text);

/// Throws NotFound when the file cannot be opened, otherwise as parse_problem.
ProblemSpec load_problem(const std::filesystem::path& path);

}  // namespace cpd
