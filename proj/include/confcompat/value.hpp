// Copyright (C) 2026 The confcompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Concrete values and primitive operator semantics. Every evaluator in the
// library (formula evaluation, the solver, the forward interpreter) goes
// through these functions so that all of them agree on what `x / 0` or
// `"a" < 1` means.

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

namespace confcompat {

// Values are dynamically typed: integers (booleans are 0/1) or strings.
using Value = std::variant<std::int64_t, std::string>;

// `null` is lowered to an integer no literal in a snapshot may spell.
inline constexpr std::int64_t kNullValue = std::numeric_limits<std::int64_t>::min();

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, And, Or };
enum class UnOp { Neg };

inline std::string_view to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

inline std::string_view to_string(UnOp) { return "neg"; }

inline bool parse_binop(std::string_view s, BinOp& out) {
  static constexpr BinOp all[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Eq,
                                  BinOp::Ne,  BinOp::Lt,  BinOp::Le,  BinOp::And, BinOp::Or};
  for (BinOp op : all) {
    if (to_string(op) == s) {
      out = op;
      return true;
    }
  }
  return false;
}

inline bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }
inline bool is_str(const Value& v) { return std::holds_alternative<std::string>(v); }

// Strings are object references and therefore always truthy.
inline bool truthy(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
  return true;
}

inline Value from_bool(bool b) { return std::int64_t{b ? 1 : 0}; }

namespace detail {
inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}
}  // namespace detail

// Arithmetic on a string operand yields 0; division by zero yields 0;
// ordering comparisons are false unless both sides are integers.
inline Value eval_op(BinOp op, const Value& lhs, const Value& rhs) {
  switch (op) {
    case BinOp::Eq: return from_bool(lhs == rhs);
    case BinOp::Ne: return from_bool(lhs != rhs);
    case BinOp::And: return from_bool(truthy(lhs) && truthy(rhs));
    case BinOp::Or: return from_bool(truthy(lhs) || truthy(rhs));
    default: break;
  }
  if (!is_int(lhs) || !is_int(rhs)) return std::int64_t{0};
  const std::int64_t a = std::get<std::int64_t>(lhs);
  const std::int64_t b = std::get<std::int64_t>(rhs);
  switch (op) {
    case BinOp::Add: return detail::wrap_add(a, b);
    case BinOp::Sub: return detail::wrap_sub(a, b);
    case BinOp::Mul: return detail::wrap_mul(a, b);
    case BinOp::Div:
      if (b == 0) return std::int64_t{0};
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
      return a / b;
    case BinOp::Lt: return from_bool(a < b);
    case BinOp::Le: return from_bool(a <= b);
    default: return std::int64_t{0};
  }
}

inline Value eval_op(UnOp, const Value& v) {
  if (!is_int(v)) return std::int64_t{0};
  return detail::wrap_sub(0, std::get<std::int64_t>(v));
}

inline Value str_eq(const Value& v, std::string_view literal) {
  const auto* s = std::get_if<std::string>(&v);
  return from_bool(s != nullptr && *s == literal);
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    if (*i == kNullValue) return "null";
    return std::to_string(*i);
  }
  return quote(std::get<std::string>(v));
}

}  // namespace confcompat
