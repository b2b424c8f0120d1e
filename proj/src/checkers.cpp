#include "gme/verify/checkers.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace gme::verify {

namespace {

std::string describe(const TraceEvent& e) {
  std::ostringstream os;
  os << "seq=" << e.seq << " pid=" << e.pid << " inst=" << e.instance
     << " session=" << e.session << " kind=" << static_cast<int>(e.kind);
  return os.str();
}

}  // namespace

Verdict check_gme(const std::vector<TraceEvent>& trace) {
  Verdict v;
  v.property = "group-mutual-exclusion";
  // Per instance: session -> number of processes inside a CS of that session.
  std::unordered_map<std::uint32_t, std::map<Word, std::uint32_t>> in_cs;
  // Open passage session per (pid, instance).
  std::unordered_map<std::uint64_t, Word> open;
  auto key = [](std::uint32_t pid, std::uint32_t inst) {
    return (static_cast<std::uint64_t>(pid) << 32) | inst;
  };

  for (const TraceEvent& e : trace) {
    switch (e.kind) {
      case EventKind::kEnterReturn: {
        const auto k = key(e.pid, e.instance);
        if (open.count(k)) {
          v.pass = false;
          v.harness_error = true;
          v.detail = "non-alternating enter/exit: " + describe(e);
          return v;
        }
        open[k] = e.session;
        auto& sessions = in_cs[e.instance];
        ++sessions[e.session];
        if (sessions.size() > 1) {
          v.pass = false;
          std::ostringstream os;
          os << "instance " << e.instance << " hosts "
             << sessions.size() << " distinct sessions concurrently; offending event: "
             << describe(e);
          v.detail = os.str();
          return v;
        }
        break;
      }
      case EventKind::kExitCall: {
        const auto k = key(e.pid, e.instance);
        auto it = open.find(k);
        if (it == open.end()) {
          v.pass = false;
          v.harness_error = true;
          v.detail = "exit without matching enter: " + describe(e);
          return v;
        }
        auto& sessions = in_cs[e.instance];
        auto sit = sessions.find(it->second);
        if (sit == sessions.end() || sit->second == 0) {
          v.pass = false;
          v.harness_error = true;
          v.detail = "CS accounting underflow: " + describe(e);
          return v;
        }
        if (--sit->second == 0) sessions.erase(sit);
        open.erase(it);
        break;
      }
      default:
        break;
    }
  }
  return v;
}

namespace {

struct Passage {
  std::uint32_t pid = 0;
  std::uint32_t instance = 0;
  std::uint64_t announce_seq = 0;
  std::uint64_t enter_seq = 0;
  std::uint64_t exit_seq = 0;
  bool complete = false;
};

}  // namespace

Verdict check_context_switch(const std::vector<TraceEvent>& trace, std::uint32_t n,
                             ContextSwitchStats* stats_out) {
  Verdict v;
  v.property = "context-switch-bound";

  // Pair each pid's ANNOUNCE / ENTER_RETURN / EXIT_CALL events in order.
  std::unordered_map<std::uint32_t, Passage> open;  // by pid
  std::vector<Passage> passages;
  std::unordered_map<std::uint32_t, std::vector<std::uint64_t>> established;
  for (const TraceEvent& e : trace) {
    switch (e.kind) {
      case EventKind::kAnnounce: {
        Passage p;
        p.pid = e.pid;
        p.instance = e.instance;
        p.announce_seq = e.seq;
        open[e.pid] = p;
        break;
      }
      case EventKind::kEnterReturn: {
        auto it = open.find(e.pid);
        if (it == open.end()) {
          // Passages without an announce (e.g. baseline traces) are skipped.
          break;
        }
        it->second.enter_seq = e.seq;
        break;
      }
      case EventKind::kExitCall: {
        auto it = open.find(e.pid);
        if (it == open.end()) break;
        it->second.exit_seq = e.seq;
        it->second.complete = true;
        passages.push_back(it->second);
        open.erase(it);
        break;
      }
      case EventKind::kSessionEstablished:
        established[e.instance].push_back(e.seq);
        break;
      default:
        break;
    }
  }

  // Group passages per instance.
  std::unordered_map<std::uint32_t, std::vector<const Passage*>> by_instance;
  for (const Passage& p : passages) by_instance[p.instance].push_back(&p);

  ContextSwitchStats stats;
  for (auto& [inst, list] : by_instance) {
    std::vector<std::uint64_t> announces;
    std::vector<std::uint64_t> exits;
    announces.reserve(list.size());
    exits.reserve(list.size());
    for (const Passage* p : list) {
      announces.push_back(p->announce_seq);
      exits.push_back(p->exit_seq);
    }
    std::sort(announces.begin(), announces.end());
    std::sort(exits.begin(), exits.end());

    // Concurrency curve for point contention: +1 at announce, -1 at exit.
    std::vector<std::pair<std::uint64_t, int>> events;
    events.reserve(2 * list.size());
    for (const Passage* p : list) {
      events.push_back({p->announce_seq, +1});
      events.push_back({p->exit_seq, -1});
    }
    std::sort(events.begin(), events.end());
    std::vector<std::uint64_t> curve_seq(events.size());
    std::vector<std::uint32_t> curve_val(events.size());
    std::int64_t cur = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      cur += events[i].second;
      curve_seq[i] = events[i].first;
      curve_val[i] = static_cast<std::uint32_t>(cur);
    }
    // Sparse table for range-max over the curve.
    const std::size_t sz = curve_val.size();
    std::size_t levels = 1;
    while ((1u << levels) <= sz) ++levels;
    std::vector<std::vector<std::uint32_t>> table(levels);
    table[0] = curve_val;
    for (std::size_t l = 1; l < levels; ++l) {
      const std::size_t span = 1u << l;
      if (sz + 1 < span) break;
      table[l].resize(sz - span + 1);
      for (std::size_t i = 0; i + span <= sz; ++i) {
        table[l][i] = std::max(table[l - 1][i], table[l - 1][i + span / 2]);
      }
    }
    auto range_max = [&](std::size_t lo, std::size_t hi) -> std::uint32_t {
      if (lo > hi) return 0;
      const std::size_t len = hi - lo + 1;
      std::size_t l = 0;
      while ((2u << l) <= len) ++l;
      return std::max(table[l][lo], table[l][hi + 1 - (1u << l)]);
    };

    auto& est = established[inst];
    std::sort(est.begin(), est.end());

    for (const Passage* p : list) {
      // Established sessions strictly inside (announce, enter-return).
      const auto lo = std::upper_bound(est.begin(), est.end(), p->announce_seq);
      const auto hi = std::lower_bound(est.begin(), est.end(), p->enter_seq);
      const auto established_count = static_cast<std::uint32_t>(hi - lo);

      // Interval contention over [announce, exit-call], excluding self:
      // overlap iff other.announce <= my.exit && other.exit >= my.announce.
      const auto not_started =
          announces.end() - std::upper_bound(announces.begin(), announces.end(),
                                             p->exit_seq);
      const auto already_done =
          std::lower_bound(exits.begin(), exits.end(), p->announce_seq) - exits.begin();
      const auto cbar = static_cast<std::uint32_t>(
          list.size() - 1 - static_cast<std::size_t>(not_started) -
          static_cast<std::size_t>(already_done));

      const std::uint32_t bound = std::min(cbar, n) + 1;
      if (established_count > bound) {
        v.pass = false;
        std::ostringstream os;
        os << "instance " << inst << " pid " << p->pid << ": " << established_count
           << " sessions established while waiting, bound min(" << cbar << "," << n
           << ")+1=" << bound;
        v.detail = os.str();
        return v;
      }

      // Point contention over the passage window.
      const std::size_t wlo = static_cast<std::size_t>(
          std::lower_bound(curve_seq.begin(), curve_seq.end(), p->announce_seq) -
          curve_seq.begin());
      const std::size_t whi = static_cast<std::size_t>(
          std::upper_bound(curve_seq.begin(), curve_seq.end(), p->exit_seq) -
          curve_seq.begin());
      const std::uint32_t cdot = whi > wlo ? range_max(wlo, whi - 1) : 1;

      ++stats.passages;
      stats.max_established = std::max(stats.max_established, established_count);
      stats.total_established += established_count;
      stats.amortized_budget += cdot + 1;
    }
  }

  if (stats.total_established > stats.amortized_budget) {
    v.pass = false;
    std::ostringstream os;
    os << "amortized context-switch bound exceeded: " << stats.total_established
       << " established vs budget " << stats.amortized_budget;
    v.detail = os.str();
  }
  if (stats_out) *stats_out = stats;
  return v;
}

}  // namespace gme::verify
