#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ralu/ast.hpp"

namespace ralu {

enum class TokKind {
  Name,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  EndOfFile,
};

struct Token {
  TokKind kind = TokKind::EndOfFile;
  std::string_view text; // view into the source buffer
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
  int line = 1;

  bool is(TokKind k) const { return kind == k; }
  bool is_op(std::string_view s) const { return kind == TokKind::Op && text == s; }
  bool is_name(std::string_view s) const {
    return kind == TokKind::Name && text == s;
  }
  Span span() const { return Span{byte_start, byte_end, line}; }
};

// Line-structured lexer for the object language. Tabs advance to the next
// multiple of 8 columns. Blank and comment-only lines produce no tokens.
// Newlines are suppressed inside (), [], {} and after a backslash join.
class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      if (at_line_start_ && paren_depth_ == 0) {
        if (!handle_indentation(out)) break; // hit EOF
        continue;
      }
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == ' ' || c == '\t') {
        ++pos_;
        continue;
      }
      if (c == '\r') { // tolerate CRLF
        ++pos_;
        continue;
      }
      if (c == '\n') {
        ++pos_;
        if (paren_depth_ == 0) {
          emit_newline(out);
          at_line_start_ = true;
        }
        ++line_;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        pos_ += 2;
        ++line_;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_name_or_string(out);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(out);
        continue;
      }
      if (c == '"' || c == '\'') {
        lex_string(out, pos_);
        continue;
      }
      lex_operator(out);
    }
    // Close any dangling logical line and open blocks.
    emit_newline(out);
    while (indent_stack_.size() > 1) {
      indent_stack_.pop_back();
      out.push_back(make_marker(TokKind::Dedent));
    }
    out.push_back(make_marker(TokKind::EndOfFile));
    return out;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  int paren_depth_ = 0;
  std::vector<int> indent_stack_{0};

  Token make_marker(TokKind k) const {
    Token t;
    t.kind = k;
    t.text = std::string_view();
    t.byte_start = t.byte_end = pos_;
    t.line = line_;
    return t;
  }

  void emit_newline(std::vector<Token>& out) {
    if (out.empty()) return;
    TokKind last = out.back().kind;
    if (last == TokKind::Newline || last == TokKind::Indent ||
        last == TokKind::Dedent)
      return;
    out.push_back(make_marker(TokKind::Newline));
  }

  // Measures the indentation of the next logical line and emits
  // Indent/Dedent markers. Returns false at end of input.
  bool handle_indentation(std::vector<Token>& out) {
    while (true) {
      if (pos_ >= src_.size()) return false;
      std::size_t scan = pos_;
      int col = 0;
      while (scan < src_.size() &&
             (src_[scan] == ' ' || src_[scan] == '\t')) {
        col = src_[scan] == '\t' ? (col / 8 + 1) * 8 : col + 1;
        ++scan;
      }
      if (scan >= src_.size()) return false;
      char c = src_[scan];
      if (c == '\n' || c == '\r' || c == '#') {
        // Blank or comment-only line: skip it entirely.
        while (scan < src_.size() && src_[scan] != '\n') ++scan;
        if (scan < src_.size()) {
          ++scan;
          ++line_;
        }
        pos_ = scan;
        continue;
      }
      pos_ = scan;
      at_line_start_ = false;
      if (col > indent_stack_.back()) {
        indent_stack_.push_back(col);
        out.push_back(make_marker(TokKind::Indent));
      } else {
        while (col < indent_stack_.back()) {
          indent_stack_.pop_back();
          out.push_back(make_marker(TokKind::Dedent));
        }
        if (col != indent_stack_.back())
          throw SyntaxError(Span{pos_, pos_ + 1, line_},
                            "unindent does not match any outer block");
      }
      return true;
    }
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  void lex_name_or_string(std::vector<Token>& out) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    // String prefix (f"...", r'...', rb"...", ...)
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') &&
        pos_ - start <= 2) {
      bool prefix = true;
      for (std::size_t i = start; i < pos_; ++i) {
        char p = static_cast<char>(
            std::tolower(static_cast<unsigned char>(src_[i])));
        if (p != 'f' && p != 'r' && p != 'b' && p != 'u') prefix = false;
      }
      if (prefix) {
        lex_string(out, start);
        return;
      }
    }
    push(out, TokKind::Name, start);
  }

  void lex_number(std::vector<Token>& out) {
    std::size_t start = pos_;
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X' ||
         src_[pos_ + 1] == 'o' || src_[pos_ + 1] == 'O' ||
         src_[pos_ + 1] == 'b' || src_[pos_ + 1] == 'B')) {
      pos_ += 2;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
      push(out, TokKind::Number, start);
      return;
    }
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        ++pos_;
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      } else {
        pos_ = mark; // not an exponent after all
      }
    }
    push(out, TokKind::Number, start);
  }

  void lex_string(std::vector<Token>& out, std::size_t start) {
    char quote = src_[pos_];
    bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote &&
                  src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        if (src_[pos_ + 1] == '\n') ++line_;
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple)
          throw SyntaxError(Span{start, pos_, line_},
                            "unterminated string literal");
        ++line_;
        ++pos_;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          push(out, TokKind::String, start);
          return;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote &&
            src_[pos_ + 2] == quote) {
          pos_ += 3;
          push(out, TokKind::String, start);
          return;
        }
        // lone quote inside triple-quoted string
        ++pos_;
        continue;
      }
      ++pos_;
    }
    throw SyntaxError(Span{start, pos_, line_}, "unterminated string literal");
  }

  void lex_operator(std::vector<Token>& out) {
    static const std::string_view three[] = {"**=", "//=", "<<=", ">>=",
                                             "..."};
    static const std::string_view two[] = {"**", "//", "<<", ">>", "<=", ">=",
                                           "==", "!=", "->", "+=", "-=", "*=",
                                           "/=", "%=", "&=", "|=", "^=", ":="};
    std::size_t start = pos_;
    std::string_view rest = src_.substr(pos_);
    for (auto op : three)
      if (rest.substr(0, 3) == op) {
        pos_ += 3;
        push(out, TokKind::Op, start);
        return;
      }
    for (auto op : two)
      if (rest.substr(0, 2) == op) {
        pos_ += 2;
        push(out, TokKind::Op, start);
        return;
      }
    char c = src_[pos_];
    static const std::string singles = "+-*/%<>=()[]{},:.;@&|^~";
    if (singles.find(c) == std::string::npos)
      throw SyntaxError(Span{pos_, pos_ + 1, line_},
                        std::string("unexpected character '") + c + "'");
    if (c == '(' || c == '[' || c == '{') ++paren_depth_;
    if (c == ')' || c == ']' || c == '}')
      paren_depth_ = paren_depth_ > 0 ? paren_depth_ - 1 : 0;
    ++pos_;
    push(out, TokKind::Op, start);
  }

  void push(std::vector<Token>& out, TokKind kind, std::size_t start) {
    Token t;
    t.kind = kind;
    t.text = src_.substr(start, pos_ - start);
    t.byte_start = start;
    t.byte_end = pos_;
    t.line = line_;
    out.push_back(t);
  }
};

inline std::vector<Token> lex(std::string_view source) {
  return Lexer(source).run();
}

} // namespace ralu
