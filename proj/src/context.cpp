#include "stagecraft/context.hpp"

namespace stagecraft {

std::set<std::string> TypingContext::fmv() const {
  std::set<std::string> out;
  for (const auto& [_, b] : entries_) {
    auto a = stagecraft::fmv(b.type);
    auto s = stagecraft::fmv(b.stage);
    out.insert(a.begin(), a.end());
    out.insert(s.begin(), s.end());
  }
  return out;
}

TypingContext restrict_context(const TypingContext& g, const Transition& prefix) {
  TypingContext out;
  for (const auto& [x, b] : g.entries())
    if (b.stage.has_prefix(prefix)) out.bind(x, b.type, b.stage.strip_prefix(prefix));
  return out;
}

}  // namespace stagecraft
