#include "usc/family.hpp"

#include <cctype>
#include <optional>

#include "usc/errors.hpp"

namespace usc {

USCSpec family_kz(const Rational& z) {
  if (z.sign() < 0 || z > Rational(1, 14)) throw InputError("z = " + z.to_string() + " outside [0, 1/14]");
  return complete_symmetry_orbit({Point{z + Rational(2, 7), Rational(1, 7)}}, 7, true);
}

namespace {

/// Value of an expression at a given n, or at n = infinity. Infinite values
/// are tracked as std::nullopt; 1/infinity collapses to 0.
class Parser {
 public:
  Parser(std::string_view s, std::optional<long> n) : s_(s), n_(n) {}

  std::optional<Rational> parse() {
    auto v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("parameter expression '" + std::string(s_) + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool starts_factor() {
    skip();
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == 'n' || s_[pos_] == '(');
  }

  static std::optional<Rational> add(const std::optional<Rational>& a, const std::optional<Rational>& b, int sign) {
    if (!a || !b) return std::nullopt;
    return sign > 0 ? *a + *b : *a - *b;
  }

  std::optional<Rational> mul(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (a && b) return *a * *b;
    if ((a && a->is_zero()) || (b && b->is_zero())) fail("0 * infinity is undefined");
    return std::nullopt;
  }

  std::optional<Rational> div(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!b) {
      if (!a) fail("infinity / infinity is undefined");
      return Rational(0);
    }
    if (b->is_zero()) fail("division by zero");
    if (!a) return std::nullopt;
    return *a / *b;
  }

  std::optional<Rational> expr() {
    auto v = term();
    while (true) {
      if (eat('+')) {
        v = add(v, term(), 1);
      } else if (eat('-')) {
        v = add(v, term(), -1);
      } else {
        return v;
      }
    }
  }

  std::optional<Rational> term() {
    auto v = unary();
    while (true) {
      if (eat('*')) {
        v = mul(v, unary());
      } else if (eat('/')) {
        v = div(v, unary());
      } else if (starts_factor()) {
        v = mul(v, factor());
      } else {
        return v;
      }
    }
  }

  std::optional<Rational> unary() {
    if (eat('-')) {
      auto v = unary();
      if (!v) return std::nullopt;
      return -*v;
    }
    return factor();
  }

  std::optional<Rational> factor() {
    skip();
    if (eat('(')) {
      auto v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (pos_ < s_.size() && s_[pos_] == 'n') {
      ++pos_;
      if (!n_) return std::nullopt;
      return Rational(*n_);
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number, 'n' or '('");
    return Rational::parse(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  std::optional<long> n_;
  std::size_t pos_ = 0;
};

}  // namespace

ParameterExpression::ParameterExpression(std::string text) : text_(std::move(text)) { (void)evaluate(1); }

Rational ParameterExpression::evaluate(long n) const {
  auto v = Parser(text_, n).parse();
  if (!v) throw std::logic_error("finite n produced an infinite value");
  return *v;
}

Rational ParameterExpression::limit() const {
  auto v = Parser(text_, std::nullopt).parse();
  if (!v) throw InputError("parameter expression '" + text_ + "' diverges");
  return *v;
}

std::vector<const FamilyMember*> FamilySpec::valid_members() const {
  std::vector<const FamilyMember*> out;
  for (const auto& m : members) {
    if (m.valid) out.push_back(&m);
  }
  return out;
}

FamilySpec make_family(const std::string& generator, const std::string& params) {
  if (generator != "kz") throw InputError("unknown family generator '" + generator + "'");
  const auto colon = params.rfind(':');
  if (colon == std::string::npos) throw InputError("params must look like EXPR:n=a..b");
  const std::string range = params.substr(colon + 1);
  long lo = 0, hi = 0;
  char var = 0;
  if (std::sscanf(range.c_str(), " %c = %ld .. %ld", &var, &lo, &hi) != 3 || var != 'n' || lo < 1 || hi < lo) {
    throw InputError("bad index range '" + range + "'");
  }
  const ParameterExpression expr(params.substr(0, colon));
  FamilySpec fam;
  fam.generator = generator;
  fam.params = params;
  fam.limit_parameter = expr.limit();
  fam.limit = family_kz(fam.limit_parameter);
  for (long n = lo; n <= hi; ++n) {
    FamilyMember m;
    m.index = n;
    m.parameter = expr.evaluate(n);
    try {
      m.spec = family_kz(m.parameter);
      m.valid = true;
    } catch (const InputError& e) {
      m.note = e.what();
    }
    fam.members.push_back(std::move(m));
  }
  if (fam.valid_members().empty()) throw InputError("no valid family members for '" + params + "'");
  return fam;
}

FamilySpec constant_family(const USCSpec& spec, int count) {
  FamilySpec fam;
  fam.generator = "constant";
  fam.limit = spec;
  for (int n = 1; n <= count; ++n) {
    FamilyMember m;
    m.index = n;
    m.valid = true;
    m.spec = spec;
    fam.members.push_back(std::move(m));
  }
  return fam;
}

}  // namespace usc
