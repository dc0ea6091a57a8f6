#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cqa/core.hpp"

namespace cqa {

/// Reads the line-oriented database format:
///
///   # comment
///   R/3 key 1
///   R(a; b, c)
///
/// Constants left of `;` fill the key positions (ascending), the rest fill
/// the remaining positions. `;` may be omitted when the key covers every
/// position. A relation must be declared before its first fact. Duplicate
/// facts are merged; one message per merge is appended to `warnings`.
Database parse_database(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Reads `R1(x; y) & R2(y; z)`. Every identifier is a variable.
ConjunctiveQuery parse_query(std::string_view text);

/// Inverse of parse_database: schema lines, then facts in canonical order.
std::string render_database(const Database& db);
std::string render_query(const ConjunctiveQuery& q);

}  // namespace cqa
