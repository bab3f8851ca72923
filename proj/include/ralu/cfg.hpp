#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ralu/ast.hpp"
#include "ralu/parser.hpp"

namespace ralu {

enum class BlockRole { Entry, Exit, Body, CondHeader };

enum class EdgeKind { Seq, BranchTrue, BranchFalse, LoopBack, LoopExit };

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Seq: return "Seq";
    case EdgeKind::BranchTrue: return "BranchTrue";
    case EdgeKind::BranchFalse: return "BranchFalse";
    case EdgeKind::LoopBack: return "LoopBack";
    case EdgeKind::LoopExit: return "LoopExit";
  }
  return "?";
}

struct BlockStatement {
  const SyntaxNode* node = nullptr;
  std::string text; // header text for compound statements, else node text
};

struct BasicBlock {
  int id = 0;
  BlockRole role = BlockRole::Body;
  std::vector<BlockStatement> statements;
};

struct CfgEdge {
  int from = 0;
  int to = 0;
  EdgeKind kind = EdgeKind::Seq;
};

// Per-function control flow graph. Loop headers are CondHeader blocks whose
// outgoing pair is LoopBack (iterate) / LoopExit (leave); branch headers
// carry BranchTrue / BranchFalse. The back edge from the end of a loop body
// to its header is a plain Seq edge. A LoopExit edge is always present,
// even for constant-true conditions, so the exit stays reachable.
struct ControlFlowGraph {
  std::string function_name;
  int entry = 0;
  int exit = 0;
  std::vector<BasicBlock> blocks;
  std::vector<CfgEdge> edges;

  const BasicBlock* block(int id) const {
    for (const auto& b : blocks)
      if (b.id == id) return &b;
    return nullptr;
  }

  std::vector<const CfgEdge*> out_edges(int id) const {
    std::vector<const CfgEdge*> out;
    for (const auto& e : edges)
      if (e.from == id) out.push_back(&e);
    return out;
  }

  std::optional<int> successor(int id, EdgeKind kind) const {
    for (const auto& e : edges)
      if (e.from == id && e.kind == kind) return e.to;
    return std::nullopt;
  }

  bool is_loop_header(int id) const {
    return successor(id, EdgeKind::LoopBack).has_value();
  }

  std::vector<int> reachable_from_entry() const {
    std::vector<int> stack{entry}, seen;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      if (std::find(seen.begin(), seen.end(), cur) != seen.end()) continue;
      seen.push_back(cur);
      for (const auto& e : edges)
        if (e.from == cur) stack.push_back(e.to);
    }
    std::sort(seen.begin(), seen.end());
    return seen;
  }
};

namespace detail {

using NodeList = std::vector<const SyntaxNode*>;

class CfgBuilder {
public:
  explicit CfgBuilder(std::string function_name) {
    g_.function_name = std::move(function_name);
    g_.entry = new_block(BlockRole::Entry);
    g_.exit = new_block(BlockRole::Exit);
  }

  ControlFlowGraph build(const NodeList& body) {
    int open = emit_sequence(body, g_.entry);
    if (open >= 0) add_edge(open, g_.exit, EdgeKind::Seq);
    prune_empty_blocks();
    return std::move(g_);
  }

private:
  ControlFlowGraph g_;
  int last_closed_ = -1; // receives statements that follow a return

  int new_block(BlockRole role) {
    int id = static_cast<int>(g_.blocks.size());
    BasicBlock b;
    b.id = id;
    b.role = role;
    g_.blocks.push_back(std::move(b));
    return id;
  }

  BasicBlock& at(int id) {
    for (auto& b : g_.blocks)
      if (b.id == id) return b;
    throw Error("cfg_internal", "unknown block id");
  }

  void add_edge(int from, int to, EdgeKind kind) {
    g_.edges.push_back(CfgEdge{from, to, kind});
  }

  static NodeList children_of(const SyntaxNode& node, std::size_t first,
                              std::size_t last) {
    NodeList out;
    for (std::size_t i = first; i < last && i < node.children.size(); ++i)
      out.push_back(&node.children[i]);
    return out;
  }

  // Appends a statement, materializing a Body block if control currently
  // sits on the entry block or a condition header.
  int append_statement(int cur, const SyntaxNode& node,
                       const std::string& text) {
    if (at(cur).role != BlockRole::Body) {
      int b = new_block(BlockRole::Body);
      add_edge(cur, b, EdgeKind::Seq);
      cur = b;
    }
    at(cur).statements.push_back(BlockStatement{&node, text});
    return cur;
  }

  // Emits a statement list starting from `cur` (an open block, the entry, or
  // a fresh body block). Returns the open block where control continues, or
  // -1 when every path through the list has returned. Statements that follow
  // a return are dead code; they stay in the last closed block so the block
  // partition loses nothing.
  int emit_sequence(const NodeList& stmts, int cur) {
    for (const SyntaxNode* node : stmts) {
      if (cur < 0) {
        if (last_closed_ >= 0)
          at(last_closed_).statements.push_back(
              BlockStatement{node, node->text});
        continue;
      }
      switch (node->kind) {
        case NodeKind::Return:
          cur = append_statement(cur, *node, node->text);
          add_edge(cur, g_.exit, EdgeKind::Seq);
          last_closed_ = cur;
          cur = -1;
          break;
        case NodeKind::If:
          cur = emit_if(*node, cur);
          break;
        case NodeKind::While:
        case NodeKind::For:
          cur = emit_loop(*node, cur);
          break;
        default:
          cur = append_statement(cur, *node, node->text);
          break;
      }
    }
    return cur;
  }

  int emit_if(const SyntaxNode& node, int cur) {
    int cond = new_block(BlockRole::CondHeader);
    at(cond).statements.push_back(BlockStatement{&node, node.header_text});
    add_edge(cur, cond, EdgeKind::Seq);

    int then_entry = new_block(BlockRole::Body);
    add_edge(cond, then_entry, EdgeKind::BranchTrue);
    int then_end =
        emit_sequence(children_of(node, 0, node.then_count), then_entry);

    bool has_else = node.then_count < node.children.size();
    int else_end = -1;
    if (has_else) {
      int else_entry = new_block(BlockRole::Body);
      add_edge(cond, else_entry, EdgeKind::BranchFalse);
      else_end = emit_sequence(
          children_of(node, node.then_count, node.children.size()),
          else_entry);
    }
    if (then_end < 0 && has_else && else_end < 0) return -1;
    int join = new_block(BlockRole::Body);
    if (!has_else) add_edge(cond, join, EdgeKind::BranchFalse);
    if (then_end >= 0) add_edge(then_end, join, EdgeKind::Seq);
    if (else_end >= 0) add_edge(else_end, join, EdgeKind::Seq);
    return join;
  }

  int emit_loop(const SyntaxNode& node, int cur) {
    int header = new_block(BlockRole::CondHeader);
    at(header).statements.push_back(BlockStatement{&node, node.header_text});
    add_edge(cur, header, EdgeKind::Seq);

    int body_entry = new_block(BlockRole::Body);
    add_edge(header, body_entry, EdgeKind::LoopBack);
    int body_end =
        emit_sequence(children_of(node, 0, node.children.size()), body_entry);
    if (body_end >= 0) add_edge(body_end, header, EdgeKind::Seq);

    int after = new_block(BlockRole::Body);
    add_edge(header, after, EdgeKind::LoopExit);
    return after;
  }

  // Removes statement-free Body blocks by splicing their incoming edges to
  // their single successor. Ids of surviving blocks are untouched.
  void prune_empty_blocks() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& b : g_.blocks) {
        if (b.role != BlockRole::Body || !b.statements.empty()) continue;
        int out_count = 0;
        int target = -1;
        for (const auto& e : g_.edges)
          if (e.from == b.id) {
            ++out_count;
            target = e.to;
          }
        if (out_count != 1 || target == b.id) continue;
        int dead = b.id;
        for (auto& e : g_.edges)
          if (e.to == dead) e.to = target;
        g_.edges.erase(
            std::remove_if(g_.edges.begin(), g_.edges.end(),
                           [&](const CfgEdge& e) { return e.from == dead; }),
            g_.edges.end());
        g_.blocks.erase(std::remove_if(
                            g_.blocks.begin(), g_.blocks.end(),
                            [&](const BasicBlock& blk) { return blk.id == dead; }),
                        g_.blocks.end());
        changed = true;
        break;
      }
    }
    std::vector<CfgEdge> dedup;
    for (const auto& e : g_.edges) {
      bool seen = false;
      for (const auto& d : dedup)
        if (d.from == e.from && d.to == e.to && d.kind == e.kind) seen = true;
      if (!seen) dedup.push_back(e);
    }
    g_.edges = std::move(dedup);
  }
};

} // namespace detail

// Name under which a CFG is built over a script's top-level statements
// (everything in the module body except function definitions).
inline constexpr const char* kModuleFunctionName = "<module>";

inline ControlFlowGraph build_cfg(const SyntaxTree& tree,
                                  const std::string& function) {
  detail::NodeList body;
  if (function == kModuleFunctionName) {
    for (const auto& child : tree.root.children)
      if (child.kind != NodeKind::FunctionDef) body.push_back(&child);
    if (body.empty()) throw FunctionNotFound(kModuleFunctionName);
  } else {
    const SyntaxNode* fn = tree.find_function(function);
    if (!fn) throw FunctionNotFound(function);
    for (const auto& child : fn->children) body.push_back(&child);
  }
  return detail::CfgBuilder(function).build(body);
}

namespace detail {
inline std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}
} // namespace detail

// Deterministic DOT rendering: blocks in id order, edges in insertion order.
// Rendering the same CFG twice yields identical bytes.
inline std::string cfg_to_dot(const ControlFlowGraph& cfg) {
  std::ostringstream os;
  os << "digraph \"" << detail::dot_escape(cfg.function_name) << "\" {\n";
  os << "  rankdir=TB;\n";
  for (const auto& b : cfg.blocks) {
    std::string label;
    std::string shape = "box";
    switch (b.role) {
      case BlockRole::Entry:
        label = "entry";
        shape = "oval";
        break;
      case BlockRole::Exit:
        label = "exit";
        shape = "oval";
        break;
      case BlockRole::CondHeader:
        shape = "diamond";
        [[fallthrough]];
      case BlockRole::Body:
        for (std::size_t i = 0; i < b.statements.size(); ++i) {
          if (i) label += "\n";
          label += b.statements[i].text;
        }
        break;
    }
    os << "  b" << b.id << " [shape=" << shape << ", label=\""
       << detail::dot_escape(label) << "\"];\n";
  }
  for (const auto& e : cfg.edges)
    os << "  b" << e.from << " -> b" << e.to << " [label=\""
       << to_string(e.kind) << "\"];\n";
  os << "}\n";
  return os.str();
}

} // namespace ralu
