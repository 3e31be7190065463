#include "stagecraft/lexer.hpp"

#include <array>
#include <cctype>

namespace stagecraft {

namespace {
constexpr std::array<std::string_view, 3> kTwoCharSyms = {"->", "@!", "|-"};
constexpr std::string_view kOneCharSyms = "\\:.()[]<>+-*=@~,;{}%!|/";
}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line;
    std::size_t cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    bool matched = false;
    if (i + 1 < src.size()) {
      for (auto s : kTwoCharSyms) {
        if (src.substr(i, 2) == s) {
          out.push_back({Tok::Sym, std::string(s), l, cl});
          advance(2);
          matched = true;
          break;
        }
      }
    }
    if (matched) continue;
    if (kOneCharSyms.find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

std::string TokenStream::expect_ident() {
  if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected identifier");
  return take().text;
}

void TokenStream::fail(const std::string& msg) const {
  const Token& t = peek();
  std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  throw ParseError(msg + " near " + near, t.line, t.col);
}

bool is_keyword(std::string_view w) {
  static constexpr std::array<std::string_view, 24> kw = {
      "fix",  "if",    "then",   "else", "next", "prev", "gen",   "true",  "false", "forall", "int",  "bool",
      "bot",  "let",   "in",     "box",  "unbox", "run", "open",  "close", "circ",  "lift",   "csp", "lam"};
  for (auto k : kw)
    if (k == w) return true;
  return false;
}

}  // namespace stagecraft
