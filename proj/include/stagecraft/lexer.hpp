#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stagecraft {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line, std::size_t col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {}
  std::size_t line;
  std::size_t col;
};

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

// Shared tokenizer for all surface grammars. '#' starts a line comment.
std::vector<Token> tokenize(std::string_view src);

class TokenStream {
 public:
  explicit TokenStream(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool at_word(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }
  bool accept_sym(std::string_view s) {
    if (!at_sym(s)) return false;
    take();
    return true;
  }
  bool accept_word(std::string_view s) {
    if (!at_word(s)) return false;
    take();
    return true;
  }
  void expect_sym(std::string_view s) {
    if (!accept_sym(s)) fail("expected '" + std::string(s) + "'");
  }
  void expect_word(std::string_view s) {
    if (!accept_word(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string expect_ident();
  bool at_end() const { return peek().kind == Tok::End; }
  void expect_end() {
    if (!at_end()) fail("unexpected trailing input");
  }
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(std::string_view word);

}  // namespace stagecraft
