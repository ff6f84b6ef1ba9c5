#include "sqlaug/text.hpp"

#include <cctype>

#include "sqlaug/common.hpp"

namespace sqlaug::text {
namespace {

bool is_punct(char c) {
  return std::string_view(",.?!;:\"()").find(c) != std::string_view::npos;
}

bool is_closing(const std::string& tok) {
  return tok == "," || tok == "." || tok == "?" || tok == "!" || tok == ";" || tok == ":" ||
         tok == ")";
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  for (const std::string& word : split_whitespace(s)) {
    if (word.size() > 2 && word.front() == '[' && word.back() == ']') {
      out.push_back(word);
      continue;
    }
    std::size_t begin = 0;
    std::size_t end = word.size();
    std::vector<std::string> trailing;
    while (begin < end && is_punct(word[begin])) out.emplace_back(1, word[begin++]);
    while (end > begin && is_punct(word[end - 1])) trailing.emplace_back(1, word[--end]);
    if (end > begin) out.push_back(word.substr(begin, end - begin));
    out.insert(out.end(), trailing.rbegin(), trailing.rend());
  }
  return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  bool after_open = false;
  for (const auto& tok : tokens) {
    if (!out.empty() && !is_closing(tok) && !after_open) out.push_back(' ');
    out += tok;
    after_open = tok == "(";
  }
  return out;
}

std::string normalize_question(std::string_view q) {
  std::string folded = join(split_whitespace(to_lower(q)), " ");
  while (!folded.empty() && (is_punct(folded.back()) || folded.back() == ' ')) folded.pop_back();
  return folded;
}

std::string stem(std::string_view word) {
  std::string w = to_lower(word);
  if (w.size() > 4 && w.ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && (w.ends_with("ses") || w.ends_with("xes") || w.ends_with("ches"))) {
    return w.substr(0, w.size() - 2);
  }
  if (w.size() > 3 && w.back() == 's' && !w.ends_with("ss")) w.pop_back();
  return w;
}

Vocabulary::Vocabulary() { add("<unk>"); }

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

}  // namespace sqlaug::text
