#pragma once

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ralu/cfg.hpp"

namespace ralu {

class NoStepsFound : public Error {
public:
  NoStepsFound() : Error("no_steps_found", "no <Step>...</Step> tags found") {}
};

enum class UnitKind { FunctionEntry, Branch, LoopBody, Linear, Line, NlStep };

enum class UnitStrategy { Cfg, LineByLine, NlSteps };

inline const char* to_string(UnitStrategy s) {
  switch (s) {
    case UnitStrategy::Cfg: return "cfg";
    case UnitStrategy::LineByLine: return "line";
    case UnitStrategy::NlSteps: return "nl-steps";
  }
  return "?";
}

struct LogicUnit {
  int index = 0;
  std::string text;
  std::string label;
  std::vector<int> block_refs; // empty for non-CFG strategies
  UnitKind kind = UnitKind::Linear;
};

struct UnitSequence {
  std::vector<LogicUnit> units;
  UnitStrategy strategy = UnitStrategy::Cfg;
  std::optional<std::string> source_program;
};

// Delimiters around quoted code fragments. The default pair is the
// backtick-open / apostrophe-close style used throughout the transcripts;
// set both to '\'' for plain ASCII quoting.
struct UnitTextOptions {
  std::string open_quote = "`";
  std::string close_quote = "'";
};

namespace unittext {

inline std::string quoted(const std::string& s, const UnitTextOptions& opt) {
  return opt.open_quote + s + opt.close_quote;
}

inline std::string run_single(const std::string& stmt,
                              const UnitTextOptions& opt) {
  return "RUN " + quoted(stmt, opt);
}

inline std::string run_block(const std::vector<std::string>& stmts) {
  std::string out = "RUN [";
  for (const auto& s : stmts) {
    out += "\n";
    out += s;
  }
  out += "\n]";
  return out;
}

inline std::string enter_function(const std::string& name) {
  return "#ENTER FUNCTION# " + name;
}

inline std::string exit_function() { return "#EXIT FUNCTION#"; }

inline std::string branch_if(const std::string& cond, const std::string& then,
                             const UnitTextOptions& opt) {
  return "#BRANCH# If Condition " + quoted(cond, opt) +
         " is satisfied, then " + then;
}

inline std::string branch_otherwise(const std::string& cond,
                                    const std::string& then,
                                    const UnitTextOptions& opt) {
  return "#BRANCH# Otherwise, when Condition " + quoted(cond, opt) +
         " is not satisfied, then " + then;
}

inline std::string loop_begin(const std::string& header,
                              const UnitTextOptions& opt) {
  return "#LOOP BEGIN# " + quoted(header, opt);
}

inline std::string loop_end() { return "#LOOP END#"; }

} // namespace unittext

namespace detail {

// ---- postdominator analysis --------------------------------------------

inline std::map<int, std::set<int>> postdominators(
    const ControlFlowGraph& g) {
  std::set<int> all;
  for (const auto& b : g.blocks) all.insert(b.id);
  std::map<int, std::set<int>> pdom;
  for (int id : all) pdom[id] = (id == g.exit) ? std::set<int>{id} : all;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int id : all) {
      if (id == g.exit) continue;
      std::set<int> meet;
      bool first = true;
      for (const auto& e : g.edges) {
        if (e.from != id) continue;
        if (first) {
          meet = pdom[e.to];
          first = false;
        } else {
          std::set<int> tmp;
          std::set_intersection(meet.begin(), meet.end(), pdom[e.to].begin(),
                                pdom[e.to].end(),
                                std::inserter(tmp, tmp.begin()));
          meet = std::move(tmp);
        }
      }
      meet.insert(id);
      if (meet != pdom[id]) {
        pdom[id] = std::move(meet);
        changed = true;
      }
    }
  }
  return pdom;
}

// The immediate postdominator is the candidate with the largest
// postdominator set (pdom sets nest along the tree path to exit).
inline int immediate_postdominator(const std::map<int, std::set<int>>& pdom,
                                   int block) {
  int best = -1;
  std::size_t best_size = 0;
  for (int cand : pdom.at(block)) {
    if (cand == block) continue;
    std::size_t sz = pdom.at(cand).size();
    if (best < 0 || sz > best_size) {
      best = cand;
      best_size = sz;
    }
  }
  return best;
}

// ---- structure tree ------------------------------------------------------

struct RegionItem {
  enum class Type { Straight, Branch, Loop };
  Type type = Type::Straight;
  int block = -1; // Straight: the block; Branch: cond header; Loop: header
  std::vector<RegionItem> true_arm;  // Branch
  std::vector<RegionItem> false_arm; // Branch
  std::vector<RegionItem> body;      // Loop
};

class RegionBuilder {
public:
  explicit RegionBuilder(const ControlFlowGraph& g)
      : g_(g), pdom_(postdominators(g)) {}

  std::vector<RegionItem> build() {
    std::vector<int> stops;
    return region(first_after_entry(), stops);
  }

  int entry_block() const { return g_.entry; }

private:
  const ControlFlowGraph& g_;
  std::map<int, std::set<int>> pdom_;

  int first_after_entry() const {
    auto next = g_.successor(g_.entry, EdgeKind::Seq);
    return next ? *next : g_.exit;
  }

  static bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  }

  // Walks blocks from `start` until hitting the exit or any block in
  // `stops` (branch joins and enclosing loop headers that bound the
  // current region).
  std::vector<RegionItem> region(int start, const std::vector<int>& stops) {
    std::vector<RegionItem> items;
    int cur = start;
    while (cur >= 0 && cur != g_.exit && !contains(stops, cur)) {
      const BasicBlock* b = g_.block(cur);
      if (!b) break;
      if (b->role == BlockRole::CondHeader && g_.is_loop_header(cur)) {
        RegionItem item;
        item.type = RegionItem::Type::Loop;
        item.block = cur;
        std::vector<int> body_stops = stops;
        body_stops.push_back(cur);
        item.body = region(*g_.successor(cur, EdgeKind::LoopBack), body_stops);
        items.push_back(std::move(item));
        cur = *g_.successor(cur, EdgeKind::LoopExit);
      } else if (b->role == BlockRole::CondHeader) {
        int t = *g_.successor(cur, EdgeKind::BranchTrue);
        int f = *g_.successor(cur, EdgeKind::BranchFalse);
        int join = immediate_postdominator(pdom_, cur);
        std::vector<int> arm_stops = stops;
        arm_stops.push_back(join);
        RegionItem item;
        item.type = RegionItem::Type::Branch;
        item.block = cur;
        item.true_arm = (t == join) ? std::vector<RegionItem>{}
                                    : region(t, arm_stops);
        item.false_arm = (f == join) ? std::vector<RegionItem>{}
                                     : region(f, arm_stops);
        items.push_back(std::move(item));
        cur = join;
      } else {
        RegionItem item;
        item.type = RegionItem::Type::Straight;
        item.block = cur;
        items.push_back(std::move(item));
        auto next = g_.successor(cur, EdgeKind::Seq);
        cur = next ? *next : g_.exit;
      }
    }
    return items;
  }
};

// ---- linearization -------------------------------------------------------

class UnitWriter {
public:
  UnitWriter(const ControlFlowGraph& g, const UnitTextOptions& opt)
      : g_(g), opt_(opt) {}

  std::vector<LogicUnit> run(const std::vector<RegionItem>& items,
                             int entry_block) {
    pending_blocks_.push_back(entry_block);
    walk(items);
    flush();
    if (!pending_blocks_.empty() && !units_.empty()) {
      for (int id : pending_blocks_) units_.back().block_refs.push_back(id);
      pending_blocks_.clear();
    }
    if (!units_.empty()) {
      units_.front().text =
          unittext::enter_function(g_.function_name) + "\n" +
          units_.front().text;
      units_.front().kind = UnitKind::FunctionEntry;
      units_.back().text += "\n" + unittext::exit_function();
      units_.back().block_refs.push_back(g_.exit);
    }
    relabel();
    return std::move(units_);
  }

private:
  const ControlFlowGraph& g_;
  const UnitTextOptions& opt_;
  std::vector<LogicUnit> units_;
  std::vector<std::string> lines_;
  std::vector<int> pending_blocks_;
  UnitKind pending_kind_ = UnitKind::Linear;

  const BasicBlock& block(int id) const { return *g_.block(id); }

  std::vector<std::string> statement_texts(int id) const {
    std::vector<std::string> out;
    for (const auto& s : block(id).statements) out.push_back(s.text);
    return out;
  }

  std::string cond_text(int id) const {
    return block(id).statements.empty() ? std::string()
                                        : block(id).statements.front().text;
  }

  void note_kind(UnitKind k) {
    // LoopBody dominates Branch dominates Linear for mixed units.
    if (k == UnitKind::LoopBody || pending_kind_ == UnitKind::Linear)
      pending_kind_ = k;
  }

  void flush() {
    if (lines_.empty()) return; // pending blocks ride along to the next unit
    LogicUnit u;
    u.index = static_cast<int>(units_.size());
    std::string text;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      if (i) text += "\n";
      text += lines_[i];
    }
    u.text = std::move(text);
    u.block_refs = std::move(pending_blocks_);
    u.kind = pending_kind_;
    pending_blocks_.clear();
    lines_.clear();
    pending_kind_ = UnitKind::Linear;
    units_.push_back(std::move(u));
  }

  void collect_blocks(const std::vector<RegionItem>& items) {
    for (const auto& item : items) {
      pending_blocks_.push_back(item.block);
      collect_blocks(item.true_arm);
      collect_blocks(item.false_arm);
      collect_blocks(item.body);
    }
  }

  // Clause used right after "then ": one statement inline, several wrapped
  // in a RUN [ ... ] block.
  std::string clause_for_block(int id) const {
    auto texts = statement_texts(id);
    if (texts.size() == 1) return unittext::run_single(texts[0], opt_);
    return unittext::run_block(texts);
  }

  // Inline rendering of arm/body contents (no unit cuts inside).
  std::string render_inline(const std::vector<RegionItem>& items,
                            bool first_as_clause) const {
    std::string out;
    bool first = true;
    auto append_line = [&](const std::string& s) {
      if (!out.empty()) out += "\n";
      out += s;
    };
    for (const auto& item : items) {
      switch (item.type) {
        case RegionItem::Type::Straight: {
          if (first && first_as_clause) {
            append_line(clause_for_block(item.block));
          } else {
            for (const auto& s : statement_texts(item.block))
              append_line(unittext::run_single(s, opt_));
          }
          break;
        }
        case RegionItem::Type::Branch: {
          std::string cond = cond_text(item.block);
          append_line(unittext::branch_if(
              cond, render_inline(item.true_arm, true), opt_));
          if (!item.false_arm.empty())
            append_line(unittext::branch_otherwise(
                cond, render_inline(item.false_arm, true), opt_));
          break;
        }
        case RegionItem::Type::Loop: {
          append_line(unittext::loop_begin(cond_text(item.block), opt_));
          std::string body = render_inline(item.body, false);
          if (!body.empty()) append_line(body);
          append_line(unittext::loop_end());
          break;
        }
      }
      first = false;
    }
    if (out.empty()) out = unittext::run_single("pass", opt_);
    return out;
  }

  void walk(const std::vector<RegionItem>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const RegionItem& item = items[i];
      switch (item.type) {
        case RegionItem::Type::Straight:
          for (const auto& s : statement_texts(item.block))
            lines_.push_back(unittext::run_single(s, opt_));
          pending_blocks_.push_back(item.block);
          break;
        case RegionItem::Type::Loop: {
          // Loop boundaries are cut points: close the running unit, emit
          // the loop (header + body) as a unit of its own.
          flush();
          lines_.push_back(unittext::loop_begin(cond_text(item.block), opt_));
          std::string body = render_inline(item.body, false);
          if (!body.empty()) lines_.push_back(body);
          lines_.push_back(unittext::loop_end());
          pending_blocks_.push_back(item.block);
          collect_blocks(item.body);
          note_kind(UnitKind::LoopBody);
          flush();
          break;
        }
        case RegionItem::Type::Branch: {
          // The If clause (condition + true arm) joins the running unit;
          // the false arm starts the next unit with the Otherwise clause.
          std::string cond = cond_text(item.block);
          lines_.push_back(unittext::branch_if(
              cond, render_inline(item.true_arm, true), opt_));
          pending_blocks_.push_back(item.block);
          collect_blocks(item.true_arm);
          note_kind(UnitKind::Branch);
          flush();
          emit_otherwise(item);
          flush(); // code at the join runs either way; it starts a new unit
          break;
        }
      }
    }
  }

  void emit_otherwise(const RegionItem& branch) {
    if (branch.false_arm.empty()) return; // no else arm: nothing to narrate
    std::string cond = cond_text(branch.block);
    const RegionItem& first = branch.false_arm.front();
    std::vector<RegionItem> rest(branch.false_arm.begin() + 1,
                                 branch.false_arm.end());
    note_kind(UnitKind::Branch);
    switch (first.type) {
      case RegionItem::Type::Branch: {
        // Fold the directly nested conditional into this unit's text, as a
        // chained "#BRANCH# ... then #BRANCH# ..." clause. Its own else arm
        // starts another unit, one fold per unit.
        std::string nested_cond = cond_text(first.block);
        lines_.push_back(unittext::branch_otherwise(
            cond,
            unittext::branch_if(nested_cond,
                                render_inline(first.true_arm, true), opt_),
            opt_));
        pending_blocks_.push_back(first.block);
        collect_blocks(first.true_arm);
        flush();
        emit_otherwise(first);
        walk(rest);
        break;
      }
      case RegionItem::Type::Straight: {
        lines_.push_back(
            unittext::branch_otherwise(cond, clause_for_block(first.block),
                                       opt_));
        pending_blocks_.push_back(first.block);
        walk(rest);
        break;
      }
      case RegionItem::Type::Loop: {
        std::string loop_text =
            unittext::loop_begin(cond_text(first.block), opt_);
        std::string body = render_inline(first.body, false);
        if (!body.empty()) loop_text += "\n" + body;
        loop_text += "\n" + unittext::loop_end();
        lines_.push_back(unittext::branch_otherwise(cond, loop_text, opt_));
        pending_blocks_.push_back(first.block);
        collect_blocks(first.body);
        note_kind(UnitKind::LoopBody);
        flush();
        walk(rest);
        break;
      }
    }
  }

  void relabel() {
    for (auto& u : units_) {
      switch (u.kind) {
        case UnitKind::FunctionEntry:
          u.label = "enter " + g_.function_name;
          break;
        case UnitKind::Branch: {
          std::string cond;
          for (int id : u.block_refs) {
            const BasicBlock* b = g_.block(id);
            if (b && b->role == BlockRole::CondHeader) {
              cond = b->statements.empty() ? "" : b->statements.front().text;
              break;
            }
          }
          u.label = cond.empty() ? "branch" : "branch on " + cond;
          break;
        }
        case UnitKind::LoopBody: {
          std::string header;
          for (int id : u.block_refs) {
            const BasicBlock* b = g_.block(id);
            if (b && b->role == BlockRole::CondHeader &&
                g_.is_loop_header(id)) {
              header = b->statements.empty() ? "" : b->statements.front().text;
              break;
            }
          }
          u.label = header.empty() ? "loop" : "loop " + header;
          break;
        }
        default:
          u.label = "sequential statements";
          break;
      }
    }
  }
};

} // namespace detail

// Partitions a CFG into ordered logic units. Cut points are conditional
// headers, loop boundaries, and the function entry; traversal is depth-first
// in source order with the true branch before the false branch. The first
// unit carries the #ENTER FUNCTION# marker and the last one #EXIT FUNCTION#.
inline UnitSequence extract_units_cfg(const ControlFlowGraph& cfg,
                                      const UnitTextOptions& options = {}) {
  detail::RegionBuilder regions(cfg);
  auto items = regions.build();
  detail::UnitWriter writer(cfg, options);
  UnitSequence seq;
  seq.strategy = UnitStrategy::Cfg;
  seq.units = writer.run(items, regions.entry_block());
  return seq;
}

// One unit per non-blank, non-comment source line; indentation is preserved
// inside the quotes.
inline UnitSequence extract_units_line_by_line(
    const std::string& program, const UnitTextOptions& options = {}) {
  UnitSequence seq;
  seq.strategy = UnitStrategy::LineByLine;
  seq.source_program = program;
  std::size_t pos = 0;
  while (pos <= program.size()) {
    std::size_t nl = program.find('\n', pos);
    std::string line = program.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? program.size() + 1 : nl + 1;
    std::string stripped = line;
    while (!stripped.empty() && (stripped.back() == '\r')) stripped.pop_back();
    std::size_t first = stripped.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // blank
    if (stripped[first] == '#') continue;      // comment-only
    LogicUnit u;
    u.index = static_cast<int>(seq.units.size());
    u.text = unittext::run_single(stripped, options);
    u.label = "line " + std::to_string(u.index + 1);
    u.kind = UnitKind::Line;
    seq.units.push_back(std::move(u));
  }
  return seq;
}

// One unit per <Step>...</Step> tag, ordered by the step number that leads
// the tag body ("<Step>2: ..."). Unnumbered steps keep document order.
inline UnitSequence extract_units_nl_steps(const std::string& cot_response) {
  struct Raw {
    long k;
    std::size_t doc_pos;
    std::string text;
  };
  std::vector<Raw> raws;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = cot_response.find("<Step>", pos);
    if (open == std::string::npos) break;
    std::size_t close = cot_response.find("</Step>", open + 6);
    if (close == std::string::npos) break;
    std::string inner = cot_response.substr(open + 6, close - open - 6);
    long k = std::numeric_limits<long>::max();
    std::size_t i = inner.find_first_not_of(" \t\n");
    if (i != std::string::npos &&
        std::isdigit(static_cast<unsigned char>(inner[i]))) {
      std::size_t end = i;
      while (end < inner.size() &&
             std::isdigit(static_cast<unsigned char>(inner[end])))
        ++end;
      if (end < inner.size() && inner[end] == ':')
        k = std::stol(inner.substr(i, end - i));
    }
    raws.push_back(Raw{k, raws.size(), std::move(inner)});
    pos = close + 7;
  }
  if (raws.empty()) throw NoStepsFound();
  std::stable_sort(raws.begin(), raws.end(), [](const Raw& a, const Raw& b) {
    return a.k < b.k;
  });
  UnitSequence seq;
  seq.strategy = UnitStrategy::NlSteps;
  for (auto& r : raws) {
    LogicUnit u;
    u.index = static_cast<int>(seq.units.size());
    u.text = r.text;
    u.label = "step " + std::to_string(u.index + 1);
    u.kind = UnitKind::NlStep;
    seq.units.push_back(std::move(u));
  }
  return seq;
}

} // namespace ralu
