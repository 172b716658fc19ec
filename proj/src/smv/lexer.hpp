#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "plancheck/error.hpp"

namespace plancheck::detail {

enum class TokenKind { Ident, Symbol, End };

struct Token {
  TokenKind kind;
  std::string text;
  SourcePos pos;
};

/// Splits modeling-language text into identifiers and punctuation.
/// `--` starts a comment that runs to end of line.
std::vector<Token> tokenize(std::string_view text);

/// Line/column/offset of byte `offset` in `text`.
SourcePos position_at(std::string_view text, std::size_t offset);

bool is_reserved_word(std::string_view word);

}  // namespace plancheck::detail
