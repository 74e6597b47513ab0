#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "usc/geometry.hpp"

namespace usc {

/// K(z): boundary ring at k = 7 plus the dihedral orbit of (z + 2/7, 1/7).
USCSpec family_kz(const Rational& z);

/// Rational expression in the index n: integers, + - * / ( ), implicit
/// multiplication ("10n").
class ParameterExpression {
 public:
  explicit ParameterExpression(std::string text);
  Rational evaluate(long n) const;
  /// Value as n -> infinity; throws if the expression diverges.
  Rational limit() const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct FamilyMember {
  long index = 0;
  Rational parameter;
  bool valid = false;
  std::string note;
  USCSpec spec;
};

struct FamilySpec {
  std::string generator;
  std::string params;
  Rational limit_parameter;
  USCSpec limit;
  /// Every requested index; invalid ones carry valid = false and a note.
  std::vector<FamilyMember> members;

  std::vector<const FamilyMember*> valid_members() const;
};

/// generator "kz"; params "EXPR:n=a..b".
FamilySpec make_family(const std::string& generator, const std::string& params);
/// Members are copies of one spec.
FamilySpec constant_family(const USCSpec& spec, int count);

}  // namespace usc
