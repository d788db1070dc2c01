#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bi {

// Parse failure. Carries the byte offset of the offending token and the
// set of token descriptions that would have been accepted there.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, std::string found)
      : std::runtime_error(format(offset, expected, found)),
        offset_(offset),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  static std::string format(std::size_t offset, const std::vector<std::string>& expected,
                            const std::string& found) {
    std::string msg = "syntax error at byte " + std::to_string(offset) + ": found " + found;
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
        msg += expected[i];
      }
    }
    return msg;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string found_;
};

// `,` and `;` mixed at one level without parentheses.
class MixedContextError : public SyntaxError {
 public:
  explicit MixedContextError(std::size_t offset)
      : SyntaxError(offset, {"context-former matching the enclosing level", "')'"},
                    "a mixed ','/';' context") {}
};

class PathError : public std::runtime_error {
 public:
  explicit PathError(const std::string& what) : std::runtime_error("path error: " + what) {}
};

// Proof checking failure: which node, which rule, why.
class RuleError : public std::runtime_error {
 public:
  RuleError(std::string node, std::string rule, std::string reason)
      : std::runtime_error("rule " + rule + " at node " + node + ": " + reason),
        node_(std::move(node)),
        rule_(std::move(rule)),
        reason_(std::move(reason)) {}

  const std::string& node() const { return node_; }
  const std::string& rule() const { return rule_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string node_, rule_, reason_;
};

class SequentMismatch : public std::runtime_error {
 public:
  explicit SequentMismatch(const std::string& what)
      : std::runtime_error("sequent mismatch: " + what) {}
};

class TranslationError : public std::runtime_error {
 public:
  explicit TranslationError(const std::string& what)
      : std::runtime_error("translation error: " + what) {}
};

// A formula leaf fell outside the subformula universe of a flattening.
class OutOfUniverse : public std::runtime_error {
 public:
  explicit OutOfUniverse(const std::string& what)
      : std::runtime_error("out of universe: " + what) {}
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error("budget: " + what) {}
};

}  // namespace bi
