#include "pmean/distribution.hpp"
#include "pmean/errors.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace pmean {

namespace {

constexpr const char* kGrammar = "family(name=value,...), e.g. weibull(k=2.5,lambda=1)";

const std::map<std::string, Family>& family_names() {
  static const std::map<std::string, Family> names = {
      {"levy", Family::levy},
      {"chi_squared", Family::chi_squared},
      {"weibull", Family::weibull},
      {"skew_normal", Family::skew_normal},
      {"log_logistic", Family::log_logistic},
      {"gamma", Family::gamma},
      {"exponential", Family::exponential},
      {"uniform", Family::uniform},
      {"normal", Family::normal},
      {"pareto", Family::pareto},
      {"beta", Family::beta},
  };
  return names;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  DistributionSpec parse() {
    skip_space();
    const std::size_t name_at = pos_;
    const std::string name = identifier();
    if (name.empty()) fail(name_at, "a family name");
    const auto& names = family_names();
    auto it = names.find(name);
    if (it == names.end()) {
      std::string known;
      for (const auto& [k, v] : names) known += (known.empty() ? "" : ", ") + k;
      throw ParseError("unknown family '" + name + "' at column " + std::to_string(name_at + 1) +
                       " (known: " + known + "); expected grammar: " + kGrammar);
    }
    expect('(');
    std::map<std::string, double> params;
    skip_space();
    if (peek() == ')') {
      ++pos_;
    } else {
      for (;;) {
        skip_space();
        const std::size_t key_at = pos_;
        const std::string key = identifier();
        if (key.empty()) fail(key_at, "a parameter name");
        if (params.count(key))
          throw ParseError("duplicate parameter '" + key + "' at column " + std::to_string(key_at + 1) +
                           "; expected grammar: " + kGrammar);
        expect('=');
        params[key] = number();
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
    }
    skip_space();
    if (pos_ != s_.size()) fail(pos_, "end of input");
    return DistributionSpec::from_params(it->second, params);
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  void expect(char ch) {
    skip_space();
    if (peek() != ch) fail(pos_, std::string("'") + ch + "'");
    ++pos_;
  }

  double number() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                std::string("+-.eE").find(s_[pos_]) != std::string::npos))
      ++pos_;
    const std::string tok = s_.substr(start, pos_ - start);
    double v = 0.0;
    const char* first = tok.data();
    if (!tok.empty() && tok[0] == '+') ++first;
    auto res = std::from_chars(first, tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      pos_ = start;
      fail(start, "a number");
    }
    return v;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& expected) const {
    std::string token;
    if (at >= s_.size()) {
      token = "end of input";
    } else {
      std::size_t end = at + 1;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) ||
                                 std::string("_.+-").find(s_[end]) != std::string::npos))
        ++end;
      token = "'" + s_.substr(at, end - at) + "'";
    }
    throw ParseError("unexpected " + token + " at column " + std::to_string(at + 1) + ": expected " + expected +
                     "; grammar: " + kGrammar);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

DistributionSpec parse_distribution(const std::string& text) { return Parser(text).parse(); }

}  // namespace pmean
