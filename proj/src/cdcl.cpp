#include "cdcl.hpp"

#include <algorithm>
#include <cassert>

namespace lexdiff::detail {
namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartBase = 100;

// Luby sequence value for 0-based index x with base y (MiniSat's formulation).
double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  for (; size < x + 1; seq++, size = 2 * size + 1) {
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double out = 1.0;
  for (int i = 0; i < seq; ++i) out *= y;
  return out;
}

}  // namespace

int Cdcl::new_var() {
  int v = num_vars();
  assigns_.push_back(kUndef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  phase_.push_back(true);
  seen_.push_back(0);
  activity_.push_back(0.0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

bool Cdcl::add_clause(std::vector<Lit> lits) {
  assert(decision_level() == 0);
  if (!ok_) return false;
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> kept;
  Lit prev = kNoLit;
  for (Lit l : lits) {
    if (value(l) == kTrue || l == negate(prev)) return true;
    if (value(l) != kFalse && l != prev) kept.push_back(l);
    prev = l;
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    ok_ = propagate() == kNoReason;
    return ok_;
  }
  attach(std::move(kept), false);
  return true;
}

void Cdcl::remove_clauses_with(Lit l, std::size_t from) {
  for (std::size_t i = from; i < clauses_.size(); ++i) {
    auto& c = clauses_[i];
    if (c.deleted) continue;
    if (std::find(c.lits.begin(), c.lits.end(), l) != c.lits.end()) {
      c.deleted = true;
      if (c.learnt) --learnt_count_;
      c.lits.clear();
      c.lits.shrink_to_fit();
    }
  }
}

int Cdcl::attach(std::vector<Lit> lits, bool learnt) {
  int cref = static_cast<int>(clauses_.size());
  watches_[static_cast<std::size_t>(lits[0])].push_back({cref, lits[1]});
  watches_[static_cast<std::size_t>(lits[1])].push_back({cref, lits[0]});
  clauses_.push_back({std::move(lits), learnt, false, 0.0});
  if (learnt) ++learnt_count_;
  return cref;
}

void Cdcl::enqueue(Lit l, int reason) {
  auto v = static_cast<std::size_t>(var_of(l));
  assigns_[v] = is_negative(l) ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int Cdcl::propagate() {
  int confl = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = negate(p);
    auto& ws = watches_[static_cast<std::size_t>(false_lit)];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i++];
      ClauseData& c = clauses_[static_cast<std::size_t>(w.cref)];
      if (c.deleted) continue;
      if (value(w.blocker) == kTrue) {
        ws[j++] = w;
        continue;
      }
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      Lit first = c.lits[0];
      Watcher kept{w.cref, first};
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = kept;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != kFalse) {
          c.lits[1] = c.lits[k];
          c.lits[k] = false_lit;
          watches_[static_cast<std::size_t>(c.lits[1])].push_back(kept);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = kept;
      if (value(first) == kFalse) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return confl;
}

void Cdcl::analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level) {
  int path = 0;
  Lit p = kNoLit;
  learnt.assign(1, kNoLit);
  auto index = static_cast<std::ptrdiff_t>(trail_.size()) - 1;

  do {
    ClauseData& c = clauses_[static_cast<std::size_t>(confl)];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p == kNoLit ? 0 : 1); k < c.lits.size(); ++k) {
      Lit q = c.lits[k];
      auto v = static_cast<std::size_t>(var_of(q));
      if (!seen_[v] && level(var_of(q)) > 0) {
        bump_var(var_of(q));
        seen_[v] = 1;
        if (level(var_of(q)) >= decision_level()) {
          ++path;
        } else {
          learnt.push_back(q);
        }
      }
    }
    while (!seen_[static_cast<std::size_t>(var_of(trail_[static_cast<std::size_t>(index--)]))]) {
    }
    p = trail_[static_cast<std::size_t>(index + 1)];
    confl = reason_[static_cast<std::size_t>(var_of(p))];
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
    --path;
  } while (path > 0);
  learnt[0] = negate(p);

  // Local minimization: drop literals implied by others already in the clause.
  std::vector<Lit> to_clear(learnt.begin(), learnt.end());
  std::size_t keep = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
  }
  learnt.resize(keep);
  for (Lit l : to_clear) seen_[static_cast<std::size_t>(var_of(l))] = 0;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k) {
      if (level(var_of(learnt[k])) > level(var_of(learnt[max_i]))) max_i = k;
    }
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level(var_of(learnt[1]));
  }
}

bool Cdcl::redundant(Lit l) const {
  int r = reason_[static_cast<std::size_t>(var_of(l))];
  if (r == kNoReason) return false;
  const auto& c = clauses_[static_cast<std::size_t>(r)].lits;
  for (std::size_t k = 1; k < c.size(); ++k) {
    int v = var_of(c[k]);
    if (!seen_[static_cast<std::size_t>(v)] && level(v) > 0) return false;
  }
  return true;
}

void Cdcl::analyze_final(Lit p) {
  conflict_.clear();
  conflict_.push_back(p);
  if (decision_level() == 0) return;
  seen_[static_cast<std::size_t>(var_of(p))] = 1;
  for (auto i = static_cast<std::ptrdiff_t>(trail_.size()) - 1;
       i >= static_cast<std::ptrdiff_t>(trail_lim_[0]); --i) {
    Lit t = trail_[static_cast<std::size_t>(i)];
    auto x = static_cast<std::size_t>(var_of(t));
    if (!seen_[x]) continue;
    int r = reason_[x];
    if (r == kNoReason) {
      if (level(var_of(t)) > 0) conflict_.push_back(negate(t));
    } else {
      const auto& c = clauses_[static_cast<std::size_t>(r)].lits;
      for (std::size_t k = 1; k < c.size(); ++k) {
        if (level(var_of(c[k])) > 0) seen_[static_cast<std::size_t>(var_of(c[k]))] = 1;
      }
    }
    seen_[x] = 0;
  }
  seen_[static_cast<std::size_t>(var_of(p))] = 0;
}

void Cdcl::cancel_until(int target) {
  if (decision_level() <= target) return;
  for (auto c = static_cast<std::ptrdiff_t>(trail_.size()) - 1;
       c >= static_cast<std::ptrdiff_t>(trail_lim_[static_cast<std::size_t>(target)]); --c) {
    Lit l = trail_[static_cast<std::size_t>(c)];
    auto v = static_cast<std::size_t>(var_of(l));
    assigns_[v] = kUndef;
    reason_[v] = kNoReason;
    phase_[v] = is_negative(l);
    if (heap_pos_[v] < 0) heap_insert(var_of(l));
  }
  trail_.resize(static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(target)]));
  trail_lim_.resize(static_cast<std::size_t>(target));
  qhead_ = trail_.size();
}

Lit Cdcl::pick_branch() {
  while (!heap_.empty()) {
    int v = heap_pop();
    if (assigns_[static_cast<std::size_t>(v)] == kUndef) {
      return make_lit(v, phase_[static_cast<std::size_t>(v)]);
    }
  }
  return kNoLit;
}

bool Cdcl::locked(int cref) const {
  const auto& c = clauses_[static_cast<std::size_t>(cref)];
  if (c.lits.empty()) return false;
  auto v = static_cast<std::size_t>(var_of(c.lits[0]));
  return reason_[v] == cref && value(c.lits[0]) == kTrue;
}

void Cdcl::reduce_learnts() {
  std::vector<int> learnts;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const auto& c = clauses_[i];
    if (c.learnt && !c.deleted) learnts.push_back(static_cast<int>(i));
  }
  std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
    const auto& ca = clauses_[static_cast<std::size_t>(a)];
    const auto& cb = clauses_[static_cast<std::size_t>(b)];
    if (ca.activity != cb.activity) return ca.activity < cb.activity;
    return a < b;
  });
  std::size_t half = learnts.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    int cref = learnts[i];
    auto& c = clauses_[static_cast<std::size_t>(cref)];
    if (c.lits.size() > 2 && !locked(cref)) {
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      --learnt_count_;
    }
  }
}

Cdcl::SearchResult Cdcl::search(int restart_conflicts, const std::vector<Lit>& assumptions) {
  int local_conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    int confl = propagate();
    if (confl != kNoReason) {
      ++total_conflicts_;
      ++local_conflicts;
      if (decision_level() == 0) {
        ok_ = false;
        conflict_.clear();
        return SearchResult::Unsat;
      }
      int backtrack_level = 0;
      analyze(confl, learnt, backtrack_level);
      cancel_until(backtrack_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        Lit asserting = learnt[0];
        int cref = attach(learnt, true);
        bump_clause(clauses_[static_cast<std::size_t>(cref)]);
        enqueue(asserting, cref);
      }
      decay();
      if (budget_left_ >= 0 && --budget_left_ < 0) return SearchResult::Budget;
      if (deadline_ && std::chrono::steady_clock::now() > *deadline_) return SearchResult::Budget;
      continue;
    }

    if (restart_conflicts >= 0 && local_conflicts >= restart_conflicts) {
      cancel_until(0);
      return SearchResult::Restart;
    }
    if (static_cast<double>(learnt_count_) - static_cast<double>(trail_.size()) >= max_learnts_) {
      reduce_learnts();
    }

    Lit next = kNoLit;
    while (decision_level() < static_cast<int>(assumptions.size())) {
      Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      if (value(a) == kTrue) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (value(a) == kFalse) {
        analyze_final(negate(a));
        return SearchResult::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == kNoLit) {
      next = pick_branch();
      if (next == kNoLit) return SearchResult::Sat;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

Cdcl::Status Cdcl::solve(const std::vector<Lit>& assumptions, std::int64_t max_conflicts,
                         std::optional<std::chrono::steady_clock::time_point> deadline) {
  model_.clear();
  conflict_.clear();
  if (!ok_) return Status::Unsat;
  budget_left_ = max_conflicts;
  deadline_ = deadline;
  max_learnts_ = std::max(static_cast<double>(clauses_.size()) / 3.0, 1000.0);

  SearchResult result = SearchResult::Restart;
  for (int round = 0; result == SearchResult::Restart; ++round) {
    int limit = static_cast<int>(luby(2.0, round) * kRestartBase);
    result = search(limit, assumptions);
    max_learnts_ *= 1.05;
  }
  Status status = Status::Budget;
  if (result == SearchResult::Sat) {
    model_.resize(assigns_.size());
    for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == kTrue;
    status = Status::Sat;
  } else if (result == SearchResult::Unsat) {
    status = Status::Unsat;
  }
  cancel_until(0);
  return status;
}

void Cdcl::bump_var(int v) {
  auto i = static_cast<std::size_t>(v);
  activity_[i] += var_inc_;
  if (activity_[i] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[i] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[i]));
}

void Cdcl::bump_clause(ClauseData& c) {
  c.activity += clause_inc_;
  if (c.activity > 1e20) {
    for (auto& cl : clauses_) {
      if (cl.learnt) cl.activity *= 1e-20;
    }
    clause_inc_ *= 1e-20;
  }
}

void Cdcl::decay() {
  var_inc_ /= kVarDecay;
  clause_inc_ /= kClauseDecay;
}

bool Cdcl::heap_less(int a, int b) const {
  double aa = activity_[static_cast<std::size_t>(a)];
  double ab = activity_[static_cast<std::size_t>(b)];
  if (aa != ab) return aa > ab;
  return a < b;
}

void Cdcl::heap_insert(int v) {
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Cdcl::heap_up(std::size_t pos) {
  int v = heap_[pos];
  while (pos > 0) {
    std::size_t parent = (pos - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[pos] = heap_[parent];
    heap_pos_[static_cast<std::size_t>(heap_[pos])] = static_cast<int>(pos);
    pos = parent;
  }
  heap_[pos] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(pos);
}

void Cdcl::heap_down(std::size_t pos) {
  int v = heap_[pos];
  for (;;) {
    std::size_t child = 2 * pos + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[pos] = heap_[child];
    heap_pos_[static_cast<std::size_t>(heap_[pos])] = static_cast<int>(pos);
    pos = child;
  }
  heap_[pos] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(pos);
}

int Cdcl::heap_pop() {
  int top = heap_.front();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace lexdiff::detail
