#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wld::sql {

enum class TokenKind {
  Keyword,
  Identifier,
  QualifiedIdentifier,
  Literal,
  Operator,
  Punctuation,
  Placeholder,
};

std::string_view to_string(TokenKind kind);

struct SqlToken {
  TokenKind kind;
  std::string text;  // lower-cased
  std::size_t offset = 0;

  bool operator==(const SqlToken&) const = default;
};

enum class SqlErrorKind {
  UnterminatedInput,
  UnterminatedString,
  UnterminatedComment,
  UnbalancedParenthesis,
  UnexpectedCharacter,
  SyntaxError,
  UnsupportedStatement,
};

std::string_view to_string(SqlErrorKind kind);

class SqlError : public std::runtime_error {
 public:
  SqlError(SqlErrorKind kind, std::size_t offset, std::string detail);

  SqlErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SqlErrorKind kind_;
  std::size_t offset_;
  std::string detail_;
};

/// Splits raw SQL/HQL text into tokens. Whitespace and comments are dropped;
/// everything else is kept. Parentheses must balance.
std::vector<SqlToken> tokenize(std::string_view text);

bool is_keyword(std::string_view lowered);
bool is_aggregate_name(std::string_view lowered);

}  // namespace wld::sql
