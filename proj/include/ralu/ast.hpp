#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ralu/error.hpp"

namespace ralu {

// Half-open byte range into the original source, plus the 1-based line of
// its first byte. Statement text is always recovered by slicing the source
// at the span, never reconstructed from tokens.
struct Span {
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
  int line = 1;
};

enum class NodeKind {
  Module,
  FunctionDef,
  If,
  While,
  For,
  Return,
  Assign,
  AugAssign,
  ExprStmt,
};

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Module: return "Module";
    case NodeKind::FunctionDef: return "FunctionDef";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::For: return "For";
    case NodeKind::Return: return "Return";
    case NodeKind::Assign: return "Assign";
    case NodeKind::AugAssign: return "AugAssign";
    case NodeKind::ExprStmt: return "ExprStmt";
  }
  return "?";
}

// One node of the parsed object-language program. Statements are leaves;
// only Module / FunctionDef / If / While / For carry children. `text` is the
// verbatim source slice at `span`.
//
// If nodes hold then-body children [0, then_count) and else-body children
// [then_count, size). An elif chain is desugared into an If whose else-body
// is a single nested If, so `header_text` of that nested node starts with
// "elif" exactly as written in source.
struct SyntaxNode {
  NodeKind kind = NodeKind::Module;
  Span span;
  std::string text;

  // FunctionDef
  std::string name;
  std::vector<std::string> params;

  // If / While: "if <cond>" / "while <cond>" (keyword kept, colon dropped).
  // For: "for <target> in <iter>".
  std::string header_text;
  std::string target_text; // For only
  std::string iter_text;   // For only

  std::vector<SyntaxNode> children;
  std::size_t then_count = 0; // If only

  bool is_statement() const {
    return kind != NodeKind::Module && kind != NodeKind::FunctionDef;
  }
  bool is_compound() const {
    return kind == NodeKind::If || kind == NodeKind::While ||
           kind == NodeKind::For;
  }
};

struct SyntaxTree {
  std::string source;
  SyntaxNode root; // kind == Module

  const SyntaxNode* find_function(const std::string& fn) const {
    for (const auto& child : root.children)
      if (child.kind == NodeKind::FunctionDef && child.name == fn)
        return &child;
    return nullptr;
  }

  std::vector<std::string> function_names() const {
    std::vector<std::string> names;
    for (const auto& child : root.children)
      if (child.kind == NodeKind::FunctionDef) names.push_back(child.name);
    return names;
  }
};

class SyntaxError : public Error {
public:
  SyntaxError(Span span, const std::string& message)
      : Error("syntax_error",
              "line " + std::to_string(span.line) + ": " + message),
        span_(span) {}
  Span span() const { return span_; }

private:
  Span span_;
};

class UnsupportedConstruct : public Error {
public:
  UnsupportedConstruct(Span span, std::string construct)
      : Error("unsupported_construct", "line " + std::to_string(span.line) +
                                           ": unsupported construct: " +
                                           construct),
        span_(span), construct_(std::move(construct)) {}
  Span span() const { return span_; }
  const std::string& construct() const { return construct_; }

private:
  Span span_;
  std::string construct_;
};

} // namespace ralu
