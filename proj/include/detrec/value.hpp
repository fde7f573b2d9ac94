/*
 * Copyright (c) 2026, The detrec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef DETREC_VALUE_HPP_
#define DETREC_VALUE_HPP_

#include <cstdint>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace detrec {

using Pid = int;

/// Object or harness misconfiguration (unknown cell, bad parameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A test harness broke the system model (e.g. foreign private-cell access).
/// Never an algorithm bug.
class ModelViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed textual input; carries the 1-based line it failed on (0 if n/a).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/**
 * Structured cell content: an integer, boolean, process id, a tuple of
 * values, the distinguished responses ack/fail, or bottom.
 *
 * Tuples are immutable and share their storage, so copying a Value (and thus
 * a whole memory image) never deep-copies.
 */
class Value {
 public:
  enum class Kind : std::uint8_t { kBottom, kInt, kBool, kPid, kAck, kFail, kTuple };

  Value() = default;

  static Value bottom() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Kind::kInt, v); }
  static Value boolean(bool b) { return Value(Kind::kBool, b ? 1 : 0); }
  static Value pid(Pid p) { return Value(Kind::kPid, p); }
  static Value ack() { return Value(Kind::kAck, 0); }
  static Value fail() { return Value(Kind::kFail, 0); }
  static Value tuple(std::vector<Value> items) {
    Value v(Kind::kTuple, static_cast<std::int64_t>(items.size()));
    v.items_ = std::make_shared<const std::vector<Value>>(std::move(items));
    return v;
  }

  Kind kind() const { return kind_; }
  bool is_bottom() const { return kind_ == Kind::kBottom; }
  bool is_fail() const { return kind_ == Kind::kFail; }
  bool is_tuple() const { return kind_ == Kind::kTuple; }

  std::int64_t as_int() const {
    if (kind_ != Kind::kInt && kind_ != Kind::kPid && kind_ != Kind::kBool)
      throw ModelViolation("value " + str() + " is not scalar");
    return scalar_;
  }
  bool as_bool() const { return as_int() != 0; }

  std::size_t arity() const { return items_ ? items_->size() : 0; }
  const Value& at(std::size_t i) const {
    if (!items_ || i >= items_->size())
      throw ModelViolation("tuple index out of range in " + str());
    return (*items_)[i];
  }
  const std::vector<Value>& items() const {
    static const std::vector<Value> kEmpty;
    return items_ ? *items_ : kEmpty;
  }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_ || a.scalar_ != b.scalar_) return false;
    if (a.kind_ != Kind::kTuple || a.items_ == b.items_) return true;
    return *a.items_ == *b.items_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.scalar_ != b.scalar_) return a.scalar_ < b.scalar_;
    if (a.kind_ != Kind::kTuple || a.items_ == b.items_) return false;
    return *a.items_ < *b.items_;
  }

  template <class Sink>
  void feed(Sink& sink) const {
    sink(static_cast<std::uint64_t>(kind_) << 56 ^ static_cast<std::uint64_t>(scalar_));
    if (items_)
      for (const auto& v : *items_) v.feed(sink);
  }

  /// Canonical text: 3, true, p1, ack, fail, bot, <a,b,c>.
  std::string str() const {
    switch (kind_) {
      case Kind::kBottom: return "bot";
      case Kind::kInt: return std::to_string(scalar_);
      case Kind::kBool: return scalar_ ? "true" : "false";
      case Kind::kPid: return "p" + std::to_string(scalar_);
      case Kind::kAck: return "ack";
      case Kind::kFail: return "fail";
      case Kind::kTuple: {
        std::string s = "<";
        for (std::size_t i = 0; i < arity(); ++i) {
          if (i) s += ',';
          s += at(i).str();
        }
        return s + ">";
      }
    }
    return "?";
  }

  static Value parse(std::string_view text) {
    std::size_t pos = 0;
    Value v = parse_at(text, pos);
    if (pos != text.size())
      throw ParseError("trailing characters in value '" + std::string(text) + "'", 0);
    return v;
  }

 private:
  Value(Kind k, std::int64_t s) : kind_(k), scalar_(s) {}

  static Value parse_at(std::string_view t, std::size_t& pos) {
    auto starts = [&](std::string_view w) { return t.substr(pos, w.size()) == w; };
    if (pos >= t.size()) throw ParseError("empty value", 0);
    if (t[pos] == '<') {
      ++pos;
      std::vector<Value> items;
      if (pos < t.size() && t[pos] == '>') {
        ++pos;
        return tuple(std::move(items));
      }
      while (true) {
        items.push_back(parse_at(t, pos));
        if (pos >= t.size()) throw ParseError("unterminated tuple", 0);
        if (t[pos] == ',') { ++pos; continue; }
        if (t[pos] == '>') { ++pos; break; }
        throw ParseError("unexpected character in tuple", 0);
      }
      return tuple(std::move(items));
    }
    for (auto [word, val] : {std::pair{"bot", Value::bottom()},
                             std::pair{"true", Value::boolean(true)},
                             std::pair{"false", Value::boolean(false)},
                             std::pair{"ack", Value::ack()},
                             std::pair{"fail", Value::fail()}}) {
      if (starts(word)) {
        pos += std::string_view(word).size();
        return val;
      }
    }
    bool is_pid = false;
    if (t[pos] == 'p') { is_pid = true; ++pos; }
    std::size_t start = pos;
    if (pos < t.size() && t[pos] == '-') ++pos;
    while (pos < t.size() && t[pos] >= '0' && t[pos] <= '9') ++pos;
    if (pos == start || (pos == start + 1 && t[start] == '-'))
      throw ParseError("cannot parse value '" + std::string(t) + "'", 0);
    std::int64_t n = std::stoll(std::string(t.substr(start, pos - start)));
    return is_pid ? Value::pid(static_cast<Pid>(n)) : Value::integer(n);
  }

  Kind kind_ = Kind::kBottom;
  std::int64_t scalar_ = 0;
  std::shared_ptr<const std::vector<Value>> items_;
};

inline std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.str(); }

/// Abstract operation kinds across every shipped object and sequential spec.
/// The enumerator order is the canonical descriptor order.
enum class OpKind : std::uint8_t {
  kRead,
  kWrite,
  kCas,
  kWriteMax,
  kIncrement,
  kFetchAdd,
  kEnqueue,
  kDequeue,
};

/// An operation plus its arguments, e.g. Cas(0,1).
struct OpDescriptor {
  OpKind kind = OpKind::kRead;
  std::int64_t arg0 = 0;
  std::int64_t arg1 = 0;

  static OpDescriptor read() { return {OpKind::kRead, 0, 0}; }
  static OpDescriptor write(std::int64_t v) { return {OpKind::kWrite, v, 0}; }
  static OpDescriptor cas(std::int64_t expected, std::int64_t desired) {
    return {OpKind::kCas, expected, desired};
  }
  static OpDescriptor write_max(std::int64_t v) { return {OpKind::kWriteMax, v, 0}; }
  static OpDescriptor increment() { return {OpKind::kIncrement, 0, 0}; }
  static OpDescriptor fetch_add(std::int64_t d) { return {OpKind::kFetchAdd, d, 0}; }
  static OpDescriptor enqueue(std::int64_t v) { return {OpKind::kEnqueue, v, 0}; }
  static OpDescriptor dequeue() { return {OpKind::kDequeue, 0, 0}; }

  int arity() const {
    switch (kind) {
      case OpKind::kCas: return 2;
      case OpKind::kWrite:
      case OpKind::kWriteMax:
      case OpKind::kFetchAdd:
      case OpKind::kEnqueue: return 1;
      default: return 0;
    }
  }

  friend bool operator==(const OpDescriptor& a, const OpDescriptor& b) {
    return a.kind == b.kind && a.arg0 == b.arg0 && a.arg1 == b.arg1;
  }
  friend bool operator!=(const OpDescriptor& a, const OpDescriptor& b) { return !(a == b); }
  friend bool operator<(const OpDescriptor& a, const OpDescriptor& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.arg0 != b.arg0) return a.arg0 < b.arg0;
    return a.arg1 < b.arg1;
  }

  std::string str() const {
    std::string s = name(kind);
    if (arity() == 1) s += "(" + std::to_string(arg0) + ")";
    if (arity() == 2) s += "(" + std::to_string(arg0) + "," + std::to_string(arg1) + ")";
    return s;
  }

  /// Encodes the descriptor as a cell value so it can live in Ann_p.op.
  Value to_value() const {
    return Value::tuple({Value::integer(static_cast<std::int64_t>(kind)),
                         Value::integer(arg0), Value::integer(arg1)});
  }
  static OpDescriptor from_value(const Value& v) {
    if (!v.is_tuple() || v.arity() != 3) throw ModelViolation("not an op descriptor: " + v.str());
    return {static_cast<OpKind>(v.at(0).as_int()), v.at(1).as_int(), v.at(2).as_int()};
  }

  static const char* name(OpKind k) {
    switch (k) {
      case OpKind::kRead: return "Read";
      case OpKind::kWrite: return "Write";
      case OpKind::kCas: return "Cas";
      case OpKind::kWriteMax: return "WriteMax";
      case OpKind::kIncrement: return "Increment";
      case OpKind::kFetchAdd: return "FetchAdd";
      case OpKind::kEnqueue: return "Enqueue";
      case OpKind::kDequeue: return "Dequeue";
    }
    return "?";
  }

  static OpDescriptor parse(std::string_view text) {
    std::string t(text);
    auto open = t.find('(');
    std::string head = t.substr(0, open);
    OpDescriptor d;
    bool found = false;
    for (int k = 0; k <= static_cast<int>(OpKind::kDequeue); ++k) {
      if (head == name(static_cast<OpKind>(k))) {
        d.kind = static_cast<OpKind>(k);
        found = true;
      }
    }
    if (!found) throw ParseError("unknown operation '" + t + "'", 0);
    std::vector<std::int64_t> args;
    if (open != std::string::npos) {
      if (t.back() != ')') throw ParseError("unterminated argument list in '" + t + "'", 0);
      std::stringstream ss(t.substr(open + 1, t.size() - open - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          args.push_back(std::stoll(item));
        } catch (const std::exception&) {
          throw ParseError("bad argument '" + item + "' in '" + t + "'", 0);
        }
      }
    }
    if (static_cast<int>(args.size()) != d.arity())
      throw ParseError("wrong argument count in '" + t + "'", 0);
    if (!args.empty()) d.arg0 = args[0];
    if (args.size() > 1) d.arg1 = args[1];
    return d;
  }
};

inline std::ostream& operator<<(std::ostream& os, const OpDescriptor& d) { return os << d.str(); }

/**
 * Streaming 128-bit fingerprint used for state memoization. Two independent
 * 64-bit lanes; the collision probability at desk-scale state counts is
 * negligible.
 */
class Fingerprint {
 public:
  void operator()(std::uint64_t w) {
    a_ = mix(a_ ^ w) + 0x9e3779b97f4a7c15ULL;
    b_ = mix2(b_ + w * 0xff51afd7ed558ccdULL) ^ (b_ >> 29);
  }
  std::pair<std::uint64_t, std::uint64_t> digest() const { return {mix(a_ ^ b_), mix2(b_ + a_)}; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix2(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 29;
    z *= 0x9fb21c651e98df25ULL;
    return z ^ (z >> 32);
  }

  std::uint64_t a_ = 0x243f6a8885a308d3ULL;
  std::uint64_t b_ = 0x13198a2e03707344ULL;
};

struct FingerprintHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& d) const {
    return static_cast<std::size_t>(d.first ^ (d.second * 0x9e3779b97f4a7c15ULL));
  }
};

}  // namespace detrec

#endif  // DETREC_VALUE_HPP_
