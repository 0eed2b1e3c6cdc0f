#include "flint/ir.hpp"

#include <sstream>

#include "flint/error.hpp"

namespace flint::flc {

IrExpr IrExpr::constant(long long v, int width) {
  IrExpr e;
  e.k = K::Const;
  e.width = width;
  e.cval = wrap_width(v, width);
  return e;
}

IrExpr IrExpr::temp_ref(int t, int width) {
  IrExpr e;
  e.k = K::Temp;
  e.temp = t;
  e.width = width;
  return e;
}

IrExpr IrExpr::meta_ref(std::string base) {
  IrExpr e;
  e.k = K::Meta;
  e.meta = std::move(base);
  e.width = 32;
  return e;
}

IrExpr IrExpr::make_op(IrOp op, std::vector<IrExpr> kids, int width) {
  IrExpr e;
  e.k = K::Op;
  e.op = op;
  e.kids = std::move(kids);
  e.width = width;
  return e;
}

long long wrap_width(long long v, int width) {
  const unsigned long long mask = width >= 64 ? ~0ull : ((1ull << width) - 1);
  unsigned long long u = static_cast<unsigned long long>(v) & mask;
  const unsigned long long sign = 1ull << (width - 1);
  if (u & sign) return static_cast<long long>(u | ~mask);
  return static_cast<long long>(u);
}

long long width_min(int width) { return -(1ll << (width - 1)); }
long long width_max(int width) { return (1ll << (width - 1)) - 1; }

const IrFunction& IrProgram::fn(const std::string& name) const {
  auto it = fn_index.find(name);
  if (it == fn_index.end()) fail_internal("no such function in program: " + name);
  return functions[it->second];
}

std::vector<const MemoryObjectDecl*> IrProgram::all_objects() const {
  std::vector<const MemoryObjectDecl*> out;
  for (const auto& g : globals) out.push_back(&g);
  for (const auto& f : functions)
    for (const auto& l : f.locals) out.push_back(&l);
  return out;
}

namespace {

const char* op_name(IrOp op) {
  switch (op) {
    case IrOp::Add: return "add"; case IrOp::Sub: return "sub";
    case IrOp::Mul: return "mul"; case IrOp::Div: return "div";
    case IrOp::Mod: return "mod"; case IrOp::Eq: return "eq";
    case IrOp::Ne: return "ne"; case IrOp::Lt: return "lt";
    case IrOp::Le: return "le"; case IrOp::Gt: return "gt";
    case IrOp::Ge: return "ge"; case IrOp::And: return "and";
    case IrOp::Or: return "or"; case IrOp::Not: return "not";
    case IrOp::Select: return "select";
  }
  return "?";
}

void dump_expr(const IrExpr& e, std::ostream& os) {
  switch (e.k) {
    case IrExpr::K::Const: os << e.cval; break;
    case IrExpr::K::Temp: os << "t" << e.temp; break;
    case IrExpr::K::Meta: os << "@" << e.meta; break;
    case IrExpr::K::Op:
      os << "(" << op_name(e.op);
      for (const auto& k : e.kids) {
        os << " ";
        dump_expr(k, os);
      }
      os << ")";
      break;
  }
}

}  // namespace

std::string ir_to_string(const IrProgram& p, bool include_presence) {
  std::ostringstream os;
  for (const auto& g : p.globals) {
    os << "global " << g.id << " x" << g.count << " w" << g.width;
    if (g.has_init) os << " = " << g.init;
    os << "\n";
  }
  for (const auto& f : p.functions) {
    os << "fn " << f.name << "(" << f.params.size() << ") temps=" << f.n_temps << "\n";
    for (const auto& l : f.locals)
      os << "  local " << l.id << " x" << l.count << " w" << l.width << "\n";
    for (size_t i = 0; i < f.body.size(); ++i) {
      const auto& in = f.body[i];
      os << "  " << i << ": ";
      switch (in.k) {
        case IrInstruction::K::Load:
          os << "t" << in.dst << " = load " << in.object << "[";
          dump_expr(in.index, os);
          os << "]";
          break;
        case IrInstruction::K::Store:
          os << "store " << in.object << "[";
          dump_expr(in.index, os);
          os << "] = ";
          dump_expr(in.value, os);
          break;
        case IrInstruction::K::Assign:
          os << "t" << in.dst << " = ";
          dump_expr(in.value, os);
          break;
        case IrInstruction::K::Branch:
          os << "br ";
          dump_expr(in.value, os);
          os << " ? " << in.t1 << " : " << in.t2;
          break;
        case IrInstruction::K::Jump: os << "jmp " << in.t1; break;
        case IrInstruction::K::Call:
          if (in.dst >= 0) os << "t" << in.dst << " = ";
          os << "call " << in.callee << "(";
          for (size_t a = 0; a < in.args.size(); ++a) {
            if (a) os << ", ";
            dump_expr(in.args[a], os);
          }
          os << ")";
          break;
        case IrInstruction::K::Ret:
          os << "ret";
          if (in.has_value) {
            os << " ";
            dump_expr(in.value, os);
          }
          break;
        case IrInstruction::K::MakeSym:
          os << "make_symbolic " << (in.is_meta ? "@" : "") << in.sym_base << " ["
             << in.lo << "," << in.hi << "] w" << in.sym_width;
          break;
        case IrInstruction::K::Assume:
          os << "assume ";
          dump_expr(in.value, os);
          break;
        case IrInstruction::K::Assert:
          os << "assert ";
          dump_expr(in.value, os);
          break;
        case IrInstruction::K::Fail:
          os << "fail";
          if (!in.spec_id.empty()) os << " @" << in.spec_id;
          break;
        case IrInstruction::K::Halt: os << "halt"; break;
      }
      os << "  ; " << in.loc.file << ":" << in.loc.line;
      if (include_presence) os << " [" << in.presence.to_string() << "]";
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace flint::flc
