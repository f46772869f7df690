#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

namespace lexdiff::detail {

// Literal encoding: 2 * var + (negative ? 1 : 0).
using Lit = int;
inline constexpr Lit kNoLit = -1;
inline Lit make_lit(int var, bool negative) { return 2 * var + (negative ? 1 : 0); }
inline int var_of(Lit l) { return l >> 1; }
inline bool is_negative(Lit l) { return (l & 1) != 0; }
inline Lit negate(Lit l) { return l ^ 1; }

/// Conflict-driven clause-learning core in the MiniSat mould.
class Cdcl {
 public:
  enum class Status { Sat, Unsat, Budget };

  int new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  /// Adds a clause at decision level 0. Returns false once the clause set is
  /// known to be unsatisfiable.
  bool add_clause(std::vector<Lit> lits);
  /// Drops every clause at index >= `from` containing `l`; callers use it
  /// once `l` is fixed true.
  void remove_clauses_with(Lit l, std::size_t from = 0);
  std::size_t clause_count() const { return clauses_.size(); }

  Status solve(const std::vector<Lit>& assumptions, std::int64_t max_conflicts,
               std::optional<std::chrono::steady_clock::time_point> deadline);

  /// Model of the last Sat answer, one value per variable.
  const std::vector<bool>& model() const { return model_; }
  /// Negations of the failed assumptions after an Unsat answer.
  const std::vector<Lit>& final_conflict() const { return conflict_; }
  bool okay() const { return ok_; }
  std::uint64_t conflicts() const { return total_conflicts_; }

 private:
  static constexpr std::int8_t kTrue = 1;
  static constexpr std::int8_t kFalse = -1;
  static constexpr std::int8_t kUndef = 0;
  static constexpr int kNoReason = -1;

  struct ClauseData {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0.0;
  };
  struct Watcher {
    int cref;
    Lit blocker;
  };
  enum class SearchResult { Sat, Unsat, Restart, Budget };

  std::int8_t value(Lit l) const {
    std::int8_t a = assigns_[static_cast<std::size_t>(var_of(l))];
    return is_negative(l) ? static_cast<std::int8_t>(-a) : a;
  }
  int level(int v) const { return level_[static_cast<std::size_t>(v)]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level);
  bool redundant(Lit l) const;
  void analyze_final(Lit p);
  void cancel_until(int level);
  Lit pick_branch();
  int attach(std::vector<Lit> lits, bool learnt);
  bool locked(int cref) const;
  void reduce_learnts();
  SearchResult search(int restart_conflicts, const std::vector<Lit>& assumptions);

  void bump_var(int v);
  void bump_clause(ClauseData& c);
  void decay();

  // Max-activity heap over variables; ties go to the lower index.
  bool heap_less(int a, int b) const;
  void heap_insert(int v);
  void heap_up(std::size_t pos);
  void heap_down(std::size_t pos);
  int heap_pop();

  bool ok_ = true;
  std::vector<ClauseData> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<bool> phase_;  // true = try negative first
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  std::size_t learnt_count_ = 0;
  double max_learnts_ = 0.0;

  std::vector<bool> model_;
  std::vector<Lit> conflict_;
  std::uint64_t total_conflicts_ = 0;
  std::int64_t budget_left_ = -1;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

}  // namespace lexdiff::detail
