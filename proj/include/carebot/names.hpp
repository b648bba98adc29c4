#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace carebot {

/// Lowercase, trim, and turn inner whitespace runs into a single '_'.
/// "Bring Juice " -> "bring_juice", "blackOrGreen" -> "blackorgreen".
std::string normalize_name(std::string_view raw);

/// Lowercase and trim. Used for slot values and option spellings.
std::string fold_value(std::string_view raw);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

bool contains_folded(std::string_view haystack, std::string_view needle);

/// Case-insensitive whole-word search ("no" does not match inside "know").
bool contains_word(std::string_view haystack, std::string_view word);

/// Folds every value and drops later duplicates, keeping first-seen order.
std::vector<std::string> fold_unique(const std::vector<std::string>& values);

/// "a", "a or b", "a, b or c".
std::string join_alternatives(const std::vector<std::string>& values);

}  // namespace carebot
