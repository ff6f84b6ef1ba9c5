#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sqlaug::text {

/// Splits on whitespace and detaches leading/trailing punctuation
/// (, . ? ! ; : " ( )) as separate tokens. Bracketed tags such as "[AUG]"
/// stay whole. Case is preserved.
std::vector<std::string> tokenize(std::string_view s);

/// Inverse of tokenize for display: no space before closing punctuation.
std::string detokenize(const std::vector<std::string>& tokens);

/// Case-folds, collapses whitespace, and strips trailing punctuation.
std::string normalize_question(std::string_view q);

/// Crude lexical stem used for question/schema matching: lowercase, drops a
/// plural "s"/"es" suffix.
std::string stem(std::string_view word);

/// Maps strings to dense ids; id 0 is reserved for unknown.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;

  Vocabulary();
  int add(const std::string& token);
  int id(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) > 0; }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> index_;
};

}  // namespace sqlaug::text
