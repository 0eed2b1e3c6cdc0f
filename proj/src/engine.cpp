#include "flint/engine.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <sstream>

#include "flint/error.hpp"
#include "flint/feasibility.hpp"

namespace flint::symex {

namespace {

using flc::IrExpr;
using flc::IrFunction;
using flc::IrInstruction;
using flc::IrOp;
using flc::IrProgram;
using flc::MemoryObjectDecl;
using flc::SrcLoc;
using flc::wrap_width;

SymOp map_op(IrOp op) {
  switch (op) {
    case IrOp::Add: return SymOp::Add; case IrOp::Sub: return SymOp::Sub;
    case IrOp::Mul: return SymOp::Mul; case IrOp::Eq: return SymOp::Eq;
    case IrOp::Ne: return SymOp::Ne; case IrOp::Lt: return SymOp::Lt;
    case IrOp::Le: return SymOp::Le; case IrOp::Gt: return SymOp::Gt;
    case IrOp::Ge: return SymOp::Ge; case IrOp::And: return SymOp::And;
    case IrOp::Or: return SymOp::Or; case IrOp::Not: return SymOp::Not;
    case IrOp::Select: return SymOp::Select;
    case IrOp::Div: case IrOp::Mod: break;
  }
  fail_internal("division reached symbolic expression construction");
}

struct Frame {
  const IrFunction* fn = nullptr;
  std::vector<SymValue> temps;
  size_t ip = 0;
  int ret_temp = -1;  // caller temp receiving the return value; -1 discards
  SrcLoc callsite;
  std::map<std::string, int> meta_vars;  // base -> var id of this activation
};

struct State {
  int id = 0;
  std::vector<AtomicConstraint> pc;
  std::set<std::string> pc_keys;
  std::map<std::pair<std::string, long long>, SymValue> memory;
  std::vector<Frame> frames;
  std::map<std::string, const IrInstruction*> sm;  // store-key -> latest store
  std::map<size_t, std::set<CallSequence>> t;      // length -> sequences
  std::vector<DepPair> pairs;
  std::vector<SymVarInfo> vars;
  std::map<std::string, int> instance_count;
  std::map<std::string, long long> pinned;  // concretized div/mod operands
  bool over_approx = false;
};

// Expression evaluation outcome: a value, a request to concretize a symbolic
// division operand (the instruction is re-executed after pinning), or a
// fault that terminates the path.
struct Ev {
  enum class K { Ok, Fork, Fault } k = K::Ok;
  SymValue v;
  SymValue fork_on;
  std::string fault;
};

Ev ev_ok(SymValue v) { return {Ev::K::Ok, std::move(v), {}, {}}; }
Ev ev_fork(SymValue on) { return {Ev::K::Fork, {}, std::move(on), {}}; }
Ev ev_fault(std::string msg) { return {Ev::K::Fault, {}, {}, std::move(msg)}; }

CallSequence snapshot(const State& s) {
  CallSequence seq;
  seq.reserve(s.frames.size());
  for (const auto& f : s.frames) seq.push_back({f.fn->name, f.callsite});
  return seq;
}

class Executor {
 public:
  Executor(const IrProgram& p, const EngineConfig& cfg) : p_(p), cfg_(cfg) {
    for (const MemoryObjectDecl* d : p.all_objects()) objects_[d->id] = d;
  }

  ExtractResult run() {
    start_ = std::chrono::steady_clock::now();
    const IrFunction& entry = p_.fn(p_.entry);
    State init;
    init.id = next_id_++;
    for (const auto& [id, d] : objects_) {
      long long v0 = d->has_init ? d->init : 0;
      for (long long off = 0; off < d->count; ++off)
        init.memory[{id, off}] = SymValue::concrete(v0);
    }
    Frame f;
    f.fn = &entry;
    f.temps.assign(static_cast<size_t>(entry.n_temps), SymValue::concrete(0));
    f.callsite = entry.loc;
    init.frames.push_back(std::move(f));
    init.t[1].insert({CallSequence{{entry.name, entry.loc}}});
    work_.push_back(std::move(init));

    while (!work_.empty()) {
      if (res_.paths_terminated >= cfg_.max_paths) {
        res_.truncated = true;
        break;
      }
      if (elapsed() > cfg_.timeout_secs) {
        res_.truncated = true;
        break;
      }
      State s = pop();
      step(std::move(s));
    }
    res_.wall_secs = elapsed();
    if (res_.paths_terminated == 0) {
      if (res_.truncated)
        throw Error(Errc::truncated, "no path terminated within the time/path budget");
      fail_input("program has no feasible paths");
    }
    sort_pairs(res_.ss);
    sort_pairs(res_.sl);
    return std::move(res_);
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  State pop() {
    State s = cfg_.search == EngineConfig::Search::DFS ? std::move(work_.back())
                                                       : std::move(work_.front());
    if (cfg_.search == EngineConfig::Search::DFS)
      work_.pop_back();
    else
      work_.pop_front();
    return s;
  }

  void schedule(State s) { work_.push_back(std::move(s)); }

  // Children created in source order; DFS pushes them reversed so the first
  // child is explored next.
  void schedule_children(std::vector<State> cs) {
    if (cfg_.search == EngineConfig::Search::DFS) {
      for (auto it = cs.rbegin(); it != cs.rend(); ++it) schedule(std::move(*it));
    } else {
      for (auto& c : cs) schedule(std::move(c));
    }
  }

  // Appends atoms (pc is an ordered, deduplicated set) and re-checks
  // feasibility when the pc grew. False = provably unsat, drop the state.
  bool keep_after(State& s, const std::vector<AtomicConstraint>& atoms) {
    bool grew = false;
    for (const auto& a : atoms) {
      if (s.pc_keys.insert(a.key()).second) {
        s.pc.push_back(a);
        grew = true;
      }
    }
    if (!grew) return true;
    Feas f = check_feasibility(s.pc, s.vars, cfg_.feasibility_budget);
    if (f == Feas::Unsat) return false;
    if (f == Feas::Unknown) s.over_approx = true;
    return true;
  }

  void terminate(State s, PathStatus status, std::string spec_id, std::string diag,
                 CallSequence fail_stack = {}) {
    res_.paths_terminated++;
    if (status == PathStatus::BoundExhausted) {
      res_.bound_exhausted++;
      PathResult r;
      r.id = s.id;
      r.status = status;
      r.pc = std::move(s.pc);
      r.vars = std::move(s.vars);
      r.over_approx = s.over_approx;
      res_.exhausted.push_back(std::move(r));
      return;
    }
    for (const auto& pr : s.pairs) {
      auto& seen = pr.kind == DepPair::Kind::SS ? seen_ss_ : seen_sl_;
      std::ostringstream key;
      key << pr.src->loc.file << ":" << pr.src->loc.line << "|" << pr.dst->loc.file
          << ":" << pr.dst->loc.line << "|" << pr.object;
      if (!seen.insert(key.str()).second) continue;
      (pr.kind == DepPair::Kind::SS ? res_.ss : res_.sl).push_back(pr);
    }
    PathResult r;
    r.id = s.id;
    r.status = status;
    r.spec_id = std::move(spec_id);
    r.diagnostic = std::move(diag);
    r.pc = std::move(s.pc);
    r.vars = std::move(s.vars);
    r.over_approx = s.over_approx;
    if (status == PathStatus::Normal) {
      std::set<CallSequence> all;
      for (const auto& [len, seqs] : s.t) all.insert(seqs.begin(), seqs.end());
      r.sequences = choose_longest(all, cfg_.L);
      res_.normal.push_back(std::move(r));
    } else {
      r.sequences = {std::move(fail_stack)};
      res_.fail.push_back(std::move(r));
    }
  }

  void fail_path(State s, std::string spec_id, std::string diag) {
    CallSequence stack = snapshot(s);
    terminate(std::move(s), PathStatus::Failure, std::move(spec_id), std::move(diag),
              std::move(stack));
  }

  Ev eval(State& s, const IrExpr& e) {
    switch (e.k) {
      case IrExpr::K::Const:
        return ev_ok(SymValue::concrete(e.cval));
      case IrExpr::K::Temp:
        return ev_ok(s.frames.back().temps.at(static_cast<size_t>(e.temp)));
      case IrExpr::K::Meta: {
        const auto& mv = s.frames.back().meta_vars;
        auto it = mv.find(e.meta);
        if (it == mv.end())
          fail_internal("metadata variable used before creation: " + e.meta);
        return ev_ok(SymValue::var(it->second));
      }
      case IrExpr::K::Op:
        break;
    }
    std::vector<SymValue> kids;
    kids.reserve(e.kids.size());
    for (const auto& k : e.kids) {
      Ev r = eval(s, k);
      if (r.k != Ev::K::Ok) return r;
      kids.push_back(std::move(r.v));
    }
    if (e.op == IrOp::Div || e.op == IrOp::Mod) {
      SymValue a = kids[0], b = kids[1];
      if (!b.is_concrete()) {
        auto it = s.pinned.find(b.key());
        if (it != s.pinned.end()) b = SymValue::concrete(it->second);
      }
      if (!a.is_concrete()) {
        auto it = s.pinned.find(a.key());
        if (it != s.pinned.end()) a = SymValue::concrete(it->second);
      }
      if (!b.is_concrete()) return ev_fork(b);
      if (b.cval() == 0) return ev_fault("division by zero");
      if (!a.is_concrete()) return ev_fork(a);
      long long q = e.op == IrOp::Div ? a.cval() / b.cval() : a.cval() % b.cval();
      return ev_ok(SymValue::concrete(q));
    }
    return ev_ok(SymValue::op(map_op(e.op), std::move(kids)));
  }

  // Pins a symbolic division operand to each value in its interval; every
  // feasible pin re-executes the current instruction.
  void concretize(State s, const SymValue& on) {
    auto [lo, hi] = value_interval(on, s.vars);
    if (hi - lo + 1 > cfg_.feasibility_budget) {
      fail_path(std::move(s), {},
                "symbolic division operand spans too many values to concretize");
      return;
    }
    std::vector<State> children;
    bool first = true;
    for (long long v = lo; v <= hi; ++v) {
      State c = s;
      c.pinned[on.key()] = v;
      if (!keep_after(c, {{Rel::Eq, on, SymValue::concrete(v)}})) continue;
      c.id = first ? s.id : next_id_++;
      first = false;
      children.push_back(std::move(c));
    }
    schedule_children(std::move(children));
  }

  void record_access(State& s, const IrInstruction& in, bool is_store, long long off) {
    std::string key = in.object;
    if (cfg_.store_key == EngineConfig::StoreKey::ObjectOffset)
      key += ":" + std::to_string(off);
    auto it = s.sm.find(key);
    if (it != s.sm.end() && it->second != &in) {
      s.pairs.push_back({is_store ? DepPair::Kind::SS : DepPair::Kind::SL, it->second,
                         &in, in.object});
    }
    if (is_store) s.sm[key] = &in;
  }

  void complete_load(State& s, const IrInstruction& in, long long off) {
    record_access(s, in, false, off);
    s.frames.back().temps.at(static_cast<size_t>(in.dst)) = s.memory.at({in.object, off});
    s.frames.back().ip++;
  }

  void complete_store(State& s, const IrInstruction& in, long long off, SymValue v) {
    record_access(s, in, true, off);
    const MemoryObjectDecl* d = objects_.at(in.object);
    if (v.is_concrete()) v = SymValue::concrete(wrap_width(v.cval(), d->width));
    s.memory[{in.object, off}] = std::move(v);
    s.frames.back().ip++;
  }

  // Shared addressing logic for loads and stores: concrete offsets are
  // bounds-checked; symbolic offsets fork one child per in-bounds offset
  // plus feasible out-of-bounds failures.
  template <class Complete>
  void access(State s, const IrInstruction& in, const SymValue& idx, Complete complete) {
    const MemoryObjectDecl* d = objects_.at(in.object);
    if (idx.is_concrete()) {
      long long off = idx.cval();
      if (off < 0 || off >= d->count) {
        std::ostringstream os;
        os << "out-of-bounds access to " << d->display << " at " << in.loc.file << ":"
           << in.loc.line << " (offset " << off << ", size " << d->count << ")";
        fail_path(std::move(s), {}, os.str());
        return;
      }
      complete(s, off);
      schedule(std::move(s));
      return;
    }
    std::vector<State> children;
    bool first = true;
    for (long long off = 0; off < d->count; ++off) {
      State c = s;
      if (!keep_after(c, {{Rel::Eq, idx, SymValue::concrete(off)}})) continue;
      c.id = first ? s.id : next_id_++;
      first = false;
      complete(c, off);
      children.push_back(std::move(c));
    }
    {
      State c = s;
      if (keep_after(c, {{Rel::Lt, idx, SymValue::concrete(0)}})) {
        c.id = first ? s.id : next_id_++;
        first = false;
        std::ostringstream os;
        os << "out-of-bounds access to " << d->display << " at " << in.loc.file << ":"
           << in.loc.line << " (negative symbolic offset)";
        fail_path(std::move(c), {}, os.str());
      }
    }
    {
      State c = std::move(s);
      if (keep_after(c, {{Rel::Ge, idx, SymValue::concrete(d->count)}})) {
        c.id = first ? c.id : next_id_++;
        first = false;
        std::ostringstream os;
        os << "out-of-bounds access to " << d->display << " at " << in.loc.file << ":"
           << in.loc.line << " (symbolic offset past the end, size " << d->count << ")";
        fail_path(std::move(c), {}, os.str());
      }
    }
    schedule_children(std::move(children));
  }

  void do_return(State s, bool has_value, SymValue v) {
    Frame popped = std::move(s.frames.back());
    s.frames.pop_back();
    if (s.frames.empty()) {
      terminate(std::move(s), PathStatus::Normal, {}, {});
      return;
    }
    if (popped.ret_temp >= 0) {
      if (!has_value) fail_internal("missing return value for a value-expecting call");
      if (v.is_concrete())
        v = SymValue::concrete(wrap_width(v.cval(), popped.fn->ret_width));
      s.frames.back().temps.at(static_cast<size_t>(popped.ret_temp)) = std::move(v);
    }
    schedule(std::move(s));
  }

  void step(State s) {
    Frame& f = s.frames.back();
    if (f.ip >= f.fn->body.size()) {
      do_return(std::move(s), false, SymValue{});  // fell off a void body
      return;
    }
    const IrInstruction& in = f.fn->body[f.ip];
    switch (in.k) {
      case IrInstruction::K::Load: {
        Ev r = eval(s, in.index);
        if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
        if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
        access(std::move(s), in, r.v,
               [this, &in](State& c, long long off) { complete_load(c, in, off); });
        return;
      }
      case IrInstruction::K::Store: {
        Ev rv = eval(s, in.value);
        if (rv.k == Ev::K::Fault) return fail_path(std::move(s), {}, rv.fault);
        if (rv.k == Ev::K::Fork) return concretize(std::move(s), rv.fork_on);
        Ev ri = eval(s, in.index);
        if (ri.k == Ev::K::Fault) return fail_path(std::move(s), {}, ri.fault);
        if (ri.k == Ev::K::Fork) return concretize(std::move(s), ri.fork_on);
        SymValue v = std::move(rv.v);
        access(std::move(s), in, ri.v, [this, &in, &v](State& c, long long off) {
          complete_store(c, in, off, v);
        });
        return;
      }
      case IrInstruction::K::Assign: {
        Ev r = eval(s, in.value);
        if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
        if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
        f.temps.at(static_cast<size_t>(in.dst)) = std::move(r.v);
        f.ip++;
        schedule(std::move(s));
        return;
      }
      case IrInstruction::K::Branch: {
        Ev r = eval(s, in.value);
        if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
        if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
        if (r.v.is_concrete()) {
          f.ip = static_cast<size_t>(r.v.cval() != 0 ? in.t1 : in.t2);
          schedule(std::move(s));
          return;
        }
        std::vector<State> children;
        State st = s;
        if (keep_after(st, split_condition(r.v, true))) {
          st.frames.back().ip = static_cast<size_t>(in.t1);
          children.push_back(std::move(st));
        }
        State sf = std::move(s);
        if (keep_after(sf, split_condition(r.v, false))) {
          sf.id = children.empty() ? sf.id : next_id_++;
          sf.frames.back().ip = static_cast<size_t>(in.t2);
          children.push_back(std::move(sf));
        }
        schedule_children(std::move(children));
        return;
      }
      case IrInstruction::K::Jump:
        f.ip = static_cast<size_t>(in.t1);
        schedule(std::move(s));
        return;
      case IrInstruction::K::Call: {
        std::vector<SymValue> args;
        args.reserve(in.args.size());
        for (const auto& a : in.args) {
          Ev r = eval(s, a);
          if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
          if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
          args.push_back(std::move(r.v));
        }
        const IrFunction& callee = p_.fn(in.callee);
        f.ip++;  // resume point
        Frame nf;
        nf.fn = &callee;
        nf.temps.assign(static_cast<size_t>(callee.n_temps), SymValue::concrete(0));
        for (size_t i = 0; i < args.size(); ++i) {
          SymValue v = std::move(args[i]);
          if (v.is_concrete())
            v = SymValue::concrete(wrap_width(v.cval(), callee.params[i].width));
          nf.temps[i] = std::move(v);
        }
        nf.ret_temp = in.dst;
        nf.callsite = in.loc;
        s.frames.push_back(std::move(nf));
        CallSequence seq = snapshot(s);
        s.t[seq.size()].insert(std::move(seq));
        schedule(std::move(s));
        return;
      }
      case IrInstruction::K::Ret: {
        SymValue v;
        bool has_v = false;
        if (in.has_value) {
          Ev r = eval(s, in.value);
          if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
          if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
          v = std::move(r.v);
          has_v = true;
        }
        do_return(std::move(s), has_v, std::move(v));
        return;
      }
      case IrInstruction::K::MakeSym: {
        int id = static_cast<int>(s.vars.size());
        int instance = ++s.instance_count[in.sym_base];
        s.vars.push_back({in.sym_base, instance, in.sym_width, in.lo, in.hi, in.is_meta});
        if (in.is_meta)
          f.meta_vars[in.sym_base] = id;
        else
          s.memory[{in.object, 0}] = SymValue::var(id);
        f.ip++;
        schedule(std::move(s));
        return;
      }
      case IrInstruction::K::Assume: {
        Ev r = eval(s, in.value);
        if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
        if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
        if (r.v.is_concrete()) {
          if (r.v.cval() == 0) return;  // assumption concretely false: drop
          f.ip++;
          schedule(std::move(s));
          return;
        }
        if (!keep_after(s, split_condition(r.v, true))) return;  // unsat: drop
        f.ip++;
        schedule(std::move(s));
        return;
      }
      case IrInstruction::K::Assert: {
        Ev r = eval(s, in.value);
        if (r.k == Ev::K::Fault) return fail_path(std::move(s), {}, r.fault);
        if (r.k == Ev::K::Fork) return concretize(std::move(s), r.fork_on);
        std::ostringstream os;
        os << "assertion violated at " << in.loc.file << ":" << in.loc.line;
        if (r.v.is_concrete()) {
          if (r.v.cval() != 0) {
            f.ip++;
            schedule(std::move(s));
          } else {
            fail_path(std::move(s), {}, os.str());
          }
          return;
        }
        std::vector<State> children;
        State sp = s;
        if (keep_after(sp, split_condition(r.v, true))) {
          sp.frames.back().ip++;
          children.push_back(std::move(sp));
        }
        State sv = std::move(s);
        if (keep_after(sv, split_condition(r.v, false))) {
          sv.id = children.empty() ? sv.id : next_id_++;
          fail_path(std::move(sv), {}, os.str());
        }
        schedule_children(std::move(children));
        return;
      }
      case IrInstruction::K::Fail:
        fail_path(std::move(s), in.spec_id,
                  "fail() at " + in.loc.file + ":" + std::to_string(in.loc.line));
        return;
      case IrInstruction::K::Halt:
        terminate(std::move(s), PathStatus::BoundExhausted, {}, {});
        return;
    }
    fail_internal("unhandled instruction");
  }

  static void sort_pairs(std::vector<DepPair>& ps) {
    std::stable_sort(ps.begin(), ps.end(), [](const DepPair& a, const DepPair& b) {
      auto ka = std::tie(a.src->loc.file, a.src->loc.line, a.dst->loc.file,
                         a.dst->loc.line, a.object);
      auto kb = std::tie(b.src->loc.file, b.src->loc.line, b.dst->loc.file,
                         b.dst->loc.line, b.object);
      return ka < kb;
    });
  }

  const IrProgram& p_;
  EngineConfig cfg_;
  std::map<std::string, const MemoryObjectDecl*> objects_;
  std::deque<State> work_;
  ExtractResult res_;
  std::set<std::string> seen_ss_, seen_sl_;
  int next_id_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string serialize_sequence(const CallSequence& seq) {
  std::ostringstream os;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (i) os << ">";
    os << seq[i].fn << "@" << seq[i].callsite.file << ":" << seq[i].callsite.line;
  }
  return os.str();
}

std::vector<CallSequence> choose_longest(const std::set<CallSequence>& seqs, int l) {
  std::vector<std::pair<std::string, const CallSequence*>> keyed;
  keyed.reserve(seqs.size());
  for (const auto& s : seqs) keyed.emplace_back(serialize_sequence(s), &s);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.second->size() != b.second->size()) return a.second->size() > b.second->size();
    return a.first < b.first;
  });
  std::vector<CallSequence> out;
  for (const auto& [key, seq] : keyed) {
    if (static_cast<int>(out.size()) >= l) break;
    out.push_back(*seq);
  }
  return out;
}

ExtractResult extract_feature_models(const flc::IrProgram& p, const EngineConfig& cfg) {
  if (cfg.timeout_secs <= 0) fail_usage("timeout must be positive");
  if (cfg.max_paths < 1) fail_usage("max-paths must be at least 1");
  if (cfg.L < 1) fail_usage("call-sequence budget L must be at least 1");
  Executor ex(p, cfg);
  return ex.run();
}

}  // namespace flint::symex
