#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "stagecraft/syntax.hpp"

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(STAGECRAFT_CORPUS_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline stagecraft::Term corpus_term(const std::string& name) { return stagecraft::parse_term(read_corpus(name)); }
