#include "wld/sql_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace wld::sql {

namespace {

constexpr std::array<std::string_view, 58> kKeywords = {
    "select", "from",   "where",  "group",    "by",        "having", "order",  "join",
    "inner",  "left",   "right",  "outer",    "full",      "cross",  "fetch",  "on",
    "as",     "and",    "or",     "not",      "in",        "is",     "null",   "like",
    "ilike",  "between", "exists", "distinct", "all",      "case",   "when",   "then",
    "else",   "end",    "asc",    "desc",     "union",     "intersect", "except", "minus",
    "insert", "update", "delete", "merge",    "create",    "drop",   "alter",  "truncate",
    "with",   "escape", "limit",  "avg",      "sum",       "count",  "min",    "max",
    "into",   "set",
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '#';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Hibernate parameter names left in logged queries: p1, collection0, ...
bool is_named_placeholder(std::string_view s) {
  if (s.size() > 1 && s[0] == 'p' && all_digits(s.substr(1))) return true;
  constexpr std::string_view coll = "collection";
  return s.size() > coll.size() && s.substr(0, coll.size()) == coll && all_digits(s.substr(coll.size()));
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  std::vector<SqlToken> run() {
    while (true) {
      skip_blank();
      if (i_ >= s_.size()) break;
      lex_one();
    }
    if (!open_.empty()) {
      throw SqlError(SqlErrorKind::UnbalancedParenthesis, open_.back(), "unclosed '('");
    }
    if (out_.empty()) throw SqlError(SqlErrorKind::UnterminatedInput, s_.size(), "no tokens");
    return std::move(out_);
  }

 private:
  void skip_blank() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '-' && peek(1) == '-') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (c == '/' && peek(1) == '*') {
        std::size_t start = i_;
        std::size_t end = s_.find("*/", i_ + 2);
        if (end == std::string_view::npos) {
          throw SqlError(SqlErrorKind::UnterminatedComment, start, "comment never closed");
        }
        i_ = end + 2;
      } else {
        break;
      }
    }
  }

  char peek(std::size_t ahead) const { return i_ + ahead < s_.size() ? s_[i_ + ahead] : '\0'; }

  void push(TokenKind kind, std::string text, std::size_t offset) {
    out_.push_back(SqlToken{kind, std::move(text), offset});
  }

  void lex_one() {
    const std::size_t start = i_;
    const char c = s_[i_];
    if (c == '\'') {
      lex_string(start);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      lex_number(start);
    } else if (ident_start(c) || c == '"' || c == '`') {
      lex_identifier(start);
    } else if (c == '?') {
      ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      push(TokenKind::Placeholder, std::string(s_.substr(start, i_ - start)), start);
    } else if (c == ':' && peek(1) != ':' && ident_start(peek(1))) {
      ++i_;
      while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
      push(TokenKind::Placeholder, lower(s_.substr(start, i_ - start)), start);
    } else if (c == '(') {
      open_.push_back(start);
      ++i_;
      push(TokenKind::Punctuation, "(", start);
    } else if (c == ')') {
      if (open_.empty()) throw SqlError(SqlErrorKind::UnbalancedParenthesis, start, "unexpected ')'");
      open_.pop_back();
      ++i_;
      push(TokenKind::Punctuation, ")", start);
    } else if (c == ',' || c == ';' || c == '.') {
      ++i_;
      push(TokenKind::Punctuation, std::string(1, c), start);
    } else {
      lex_operator(start);
    }
  }

  void lex_string(std::size_t start) {
    ++i_;
    while (true) {
      if (i_ >= s_.size()) throw SqlError(SqlErrorKind::UnterminatedString, start, "string never closed");
      if (s_[i_] == '\'') {
        if (peek(1) == '\'') {
          i_ += 2;
          continue;
        }
        ++i_;
        break;
      }
      ++i_;
    }
    push(TokenKind::Literal, lower(s_.substr(start, i_ - start)), start);
  }

  void lex_number(std::size_t start) {
    auto digits = [&] {
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    };
    digits();
    if (i_ < s_.size() && s_[i_] == '.') {
      ++i_;
      digits();
    }
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t save = i_;
      ++i_;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        digits();
      } else {
        i_ = save;
      }
    }
    push(TokenKind::Literal, lower(s_.substr(start, i_ - start)), start);
  }

  // One name part, bare or quoted. Returns the lowered text without quotes.
  std::string name_part() {
    const char c = s_[i_];
    if (c == '"' || c == '`') {
      std::size_t start = i_;
      std::size_t end = s_.find(c, i_ + 1);
      if (end == std::string_view::npos) {
        throw SqlError(SqlErrorKind::UnterminatedString, start, "quoted identifier never closed");
      }
      i_ = end + 1;
      return lower(s_.substr(start + 1, end - start - 1));
    }
    std::size_t start = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    return lower(s_.substr(start, i_ - start));
  }

  void lex_identifier(std::size_t start) {
    std::string text = name_part();
    bool quoted_first = s_[start] == '"' || s_[start] == '`';
    int parts = 1;
    while (i_ + 1 < s_.size() && s_[i_] == '.') {
      char n = s_[i_ + 1];
      if (ident_start(n) || n == '"' || n == '`') {
        ++i_;
        text += '.';
        text += name_part();
        ++parts;
      } else if (n == '*') {
        i_ += 2;
        text += ".*";
        ++parts;
        break;
      } else {
        break;
      }
    }
    if (parts > 1) {
      push(TokenKind::QualifiedIdentifier, std::move(text), start);
    } else if (!quoted_first && (text == "true" || text == "false")) {
      push(TokenKind::Literal, std::move(text), start);
    } else if (!quoted_first && is_keyword(text)) {
      push(TokenKind::Keyword, std::move(text), start);
    } else if (!quoted_first && is_named_placeholder(text)) {
      push(TokenKind::Placeholder, std::move(text), start);
    } else {
      push(TokenKind::Identifier, std::move(text), start);
    }
  }

  void lex_operator(std::size_t start) {
    static constexpr std::array<std::string_view, 7> two = {"<=", ">=", "<>", "!=", "||", "::", "=="};
    for (auto op : two) {
      if (s_.substr(i_, 2) == op) {
        i_ += 2;
        push(TokenKind::Operator, std::string(op), start);
        return;
      }
    }
    const char c = s_[i_];
    if (std::string_view("=<>+-*/%").find(c) != std::string_view::npos) {
      ++i_;
      push(TokenKind::Operator, std::string(1, c), start);
      return;
    }
    throw SqlError(SqlErrorKind::UnexpectedCharacter, start, std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::vector<std::size_t> open_;
  std::vector<SqlToken> out_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::QualifiedIdentifier: return "qualified-identifier";
    case TokenKind::Literal: return "literal";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Placeholder: return "parameter-placeholder";
  }
  return "?";
}

std::string_view to_string(SqlErrorKind kind) {
  switch (kind) {
    case SqlErrorKind::UnterminatedInput: return "UnterminatedInput";
    case SqlErrorKind::UnterminatedString: return "UnterminatedString";
    case SqlErrorKind::UnterminatedComment: return "UnterminatedComment";
    case SqlErrorKind::UnbalancedParenthesis: return "UnbalancedParenthesis";
    case SqlErrorKind::UnexpectedCharacter: return "UnexpectedCharacter";
    case SqlErrorKind::SyntaxError: return "SyntaxError";
    case SqlErrorKind::UnsupportedStatement: return "UnsupportedStatement";
  }
  return "?";
}

SqlError::SqlError(SqlErrorKind kind, std::size_t offset, std::string detail)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset),
      detail_(std::move(detail)) {}

bool is_keyword(std::string_view lowered) {
  return std::find(kKeywords.begin(), kKeywords.end(), lowered) != kKeywords.end();
}

bool is_aggregate_name(std::string_view lowered) {
  return lowered == "avg" || lowered == "sum" || lowered == "count" || lowered == "min" || lowered == "max";
}

std::vector<SqlToken> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace wld::sql
