#include "flint/bench.hpp"

#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "flint/annotate.hpp"
#include "flint/error.hpp"
#include "flint/parser.hpp"
#include "flint/records.hpp"
#include "flint/resolve.hpp"

namespace flint::bench {

namespace {

flc::ProductDef product(std::string name, std::vector<std::string> feats) {
  flc::ProductDef p;
  p.name = std::move(name);
  p.enabled.insert(feats.begin(), feats.end());
  return p;
}

SeededInteraction guarded(std::string id, std::string a, std::string b) {
  return SeededInteraction{std::move(id), std::move(a), std::move(b), true};
}

SeededInteraction unguarded(std::string a, std::string b) {
  return SeededInteraction{"", std::move(a), std::move(b), false};
}

// A mail pipeline over two small symbolic inputs: d (draft id, 0..3) and
// k (key slot, 0..1). Feature stages live inside directive blocks, exchange
// data through dedicated globals, and report clashes through spec_check_*
// wrappers that funnel into the shared report_breach() dispatcher, which
// logs twice and fails with the clash's identifier.
const char* kMailkitSrc = R"FLC(features Encrypt, Decrypt, Sign, Verify, Forward, Respond, Book, Audit;

int32 msg_body;
int32 msg_sig;
int32 msg_cipher;
int32 msg_envelope;
int32 msg_plain;
int32 msg_verdict;
int32 peer_key;
int32 audit_buf;
int32 reply_body;
int32 delivered;
int32 sink;
int32 v_sig;
int32 v_env;
int32 f_body;
int32 f_env;
int32 f_plain;
int32 f_verdict;
int32 r_env;
int32 r_plain;

int32 log_violation() {
  return 1;
}

void report_breach(int32 which) {
  log_violation();
  log_violation();
  if (which == 0) {
    fail() @spec(spec0);
  }
  if (which == 1) {
    fail() @spec(spec1);
  }
  if (which == 3) {
    fail() @spec(spec3);
  }
  if (which == 4) {
    fail() @spec(spec4);
  }
  if (which == 6) {
    fail() @spec(spec6);
  }
  if (which == 7) {
    fail() @spec(spec7);
  }
  if (which == 8) {
    fail() @spec(spec8);
  }
  if (which == 9) {
    fail() @spec(spec9);
  }
  if (which == 11) {
    fail() @spec(spec11);
  }
  if (which == 27) {
    fail() @spec(spec27);
  }
}

void spec_check_0(int32 d, int32 k) {
  if (d >= 2) {
    report_breach(0);
  }
}

void spec_check_1(int32 d, int32 k) {
  if (d == 3) {
    report_breach(1);
  }
}

void spec_check_3(int32 d, int32 k) {
  if (d > 2 && k == 1) {
    report_breach(3);
  }
}

void spec_check_4(int32 d, int32 k) {
  if (k == 1 && d < 2) {
    report_breach(4);
  }
}

void spec_check_6(int32 d, int32 k) {
  if (d == 1) {
    report_breach(6);
  }
}

void spec_check_7(int32 d, int32 k) {
  if (d + k >= 3) {
    report_breach(7);
  }
}

void spec_check_8(int32 d, int32 k) {
  if (k == 0 && d > 1) {
    report_breach(8);
  }
}

void spec_check_9(int32 d, int32 k) {
  if (d == 2) {
    report_breach(9);
  }
}

void spec_check_11(int32 d, int32 k) {
  if (d == 0) {
    report_breach(11);
  }
}

void spec_check_27(int32 d, int32 k) {
  if (k == 1) {
    report_breach(27);
  }
}

int32 compose(int32 d) {
  msg_body = d + 1;
  return d + 1;
}

#if Book
int32 book(int32 d, int32 k) {
  peer_key = k * 5 + 3;
  return k * 5 + 3;
}
#endif

#if Encrypt
int32 encrypt(int32 d, int32 k) {
  msg_cipher = d * 3 + k;
  msg_envelope = d * 2 + k + 1;
#if Book
  peer_key = k * 7 + 2;
  spec_check_27(d, k);
#endif
  return d * 3 + k;
}
#endif

#if Decrypt
int32 decrypt(int32 d, int32 k) {
#if Encrypt
  msg_cipher = d * 3 + k + 2;
  spec_check_3(d, k);
#endif
  msg_plain = d + k * 4 + 2;
  return d + k * 4 + 2;
}
#endif

#if Sign
int32 sign(int32 d) {
  msg_sig = d + 11;
  msg_sig = d + 12;
  return d + 12;
}
#endif

#if Verify
int32 verify(int32 d, int32 k) {
  msg_verdict = d * 2 + 3;
#if Sign
  v_sig = msg_sig + d;
  spec_check_0(d, k);
#endif
#if Encrypt
  v_env = msg_envelope + k;
  spec_check_4(d, k);
#endif
  return d + 9;
}
#endif

#if Forward
void forward(int32 d, int32 k) {
  f_body = msg_body + 1;
#if Sign
  msg_sig = 0;
  spec_check_1(d, k);
#endif
#if Encrypt
  f_env = msg_envelope + 3;
  spec_check_7(d, k);
#endif
#if Decrypt
  f_plain = msg_plain + 4;
  spec_check_6(d, k);
#endif
#if Verify
  f_verdict = msg_verdict + 5;
  spec_check_11(d, k);
#endif
}
#endif

#if Respond
void respond(int32 d, int32 k) {
  reply_body = d * 5 + 1;
#if Encrypt
  r_env = msg_envelope + d;
  spec_check_8(d, k);
#endif
#if Decrypt
  r_plain = msg_plain + k;
  spec_check_9(d, k);
#endif
}
#endif

#if Audit
void audit(int32 d) {
  audit_buf = d * 6 + 1;
}
#endif

void deliver() {
  delivered = msg_body + 2;
}

void flush_state() {
  sink = audit_buf + reply_body;
}

void main() {
  int32 d;
  int32 k;
  make_symbolic(d, 0, 3);
  make_symbolic(k, 0, 1);
  compose(d);
#if Book
  book(d, k);
#endif
#if Encrypt
  encrypt(d, k);
#endif
#if Decrypt
  decrypt(d, k);
#endif
#if Sign
  sign(d);
#endif
#if Verify
  verify(d, k);
#endif
#if Forward
  forward(d, k);
#endif
#if Respond
  respond(d, k);
#endif
#if Audit
  audit(d);
#endif
  deliver();
  flush_state();
}
)FLC";

// An elevator controller with bounded while loops: w (cab weight units,
// 0..3) and n (target floor, 0..4) stay below the loop budget for every
// input, so no path exhausts the unroll bound.
const char* kLiftkitSrc = R"FLC(features Weight, Overload, Priority, Park, Doors, Express;

int32 cab_pos;
int32 cycles_done;
int32 load_sum;
int32 lock_flag;
int32 queue_head;
int32 door_state;
int32 trip_len;
int32 x_scr;
int32 o_load;
int32 d_lock;
int32 p_door;
int32 x_load;
int32 x_queue;

int32 log_violation() {
  return 1;
}

void report_breach(int32 which) {
  log_violation();
  log_violation();
  if (which == 0) {
    fail() @spec(lift0);
  }
  if (which == 1) {
    fail() @spec(lift1);
  }
  if (which == 2) {
    fail() @spec(lift2);
  }
  if (which == 3) {
    fail() @spec(lift3);
  }
  if (which == 4) {
    fail() @spec(lift4);
  }
}

void spec_check_lift0(int32 w, int32 n) {
  if (w >= 2) {
    report_breach(0);
  }
}

void spec_check_lift1(int32 w, int32 n) {
  if (w == 1 && n > 2) {
    report_breach(1);
  }
}

void spec_check_lift2(int32 w, int32 n) {
  if (n == 4) {
    report_breach(2);
  }
}

void spec_check_lift3(int32 w, int32 n) {
  if (w + n >= 6) {
    report_breach(3);
  }
}

void spec_check_lift4(int32 w, int32 n) {
  if (w == 0 && n == 1) {
    report_breach(4);
  }
}

int32 ride_setup(int32 w, int32 n) {
  cab_pos = n + 1;
  return w + n;
}

void run_cycles(int32 n) {
  int32 i;
  i = 0;
  while (i < n) {
    cycles_done = cycles_done + 1;
    i = i + 1;
  }
}

#if Weight
void weight_stage(int32 w, int32 n) {
  load_sum = w * 4 + 1;
}
#endif

#if Overload
void overload_stage(int32 w, int32 n) {
  lock_flag = w + 2;
#if Weight
  o_load = load_sum + 1;
  spec_check_lift0(w, n);
#endif
}
#endif

#if Priority
void priority_stage(int32 w, int32 n) {
  queue_head = n * 2 + 1;
}
#endif

#if Doors
void doors_stage(int32 w, int32 n) {
  door_state = n + 3;
#if Overload
  d_lock = lock_flag * 2;
  spec_check_lift4(w, n);
#endif
}
#endif

#if Park
void park_stage(int32 w, int32 n) {
  trip_len = n + 6;
#if Doors
  p_door = door_state + n;
  spec_check_lift2(w, n);
#endif
}
#endif

#if Express
void express_stage(int32 w, int32 n) {
  int32 j;
  j = 0;
  while (j < w) {
    x_scr = x_scr + 2;
    j = j + 1;
  }
#if Weight
  x_load = load_sum + n;
  spec_check_lift1(w, n);
#endif
#if Priority
  x_queue = queue_head + w;
  spec_check_lift3(w, n);
#endif
}
#endif

void main() {
  int32 w;
  int32 n;
  make_symbolic(w, 0, 3);
  make_symbolic(n, 0, 4);
  ride_setup(w, n);
  run_cycles(n);
#if Weight
  weight_stage(w, n);
#endif
#if Overload
  overload_stage(w, n);
#endif
#if Priority
  priority_stage(w, n);
#endif
#if Doors
  doors_stage(w, n);
#endif
#if Park
  park_stage(w, n);
#endif
#if Express
  express_stage(w, n);
#endif
}
)FLC";

// A water-pump controller. Pump is enabled in every product; the other six
// features vary over all 64 subsets. The Gauge/Alarm data exchange is
// deliberately not covered by any spec check.
const char* kPumpkitSrc = R"FLC(features Pump, Gauge, Alarm, Drain, Valve, Filter, Backup;

int32 reservoir;
int32 flow_rate;
int32 level_reading;
int32 panel;
int32 drain_q;
int32 w_out;
int32 filt_state;
int32 standby;
int32 gauge_seen;
int32 g_flow;
int32 a_level;
int32 v_drain;
int32 b_filt;

int32 log_violation() {
  return 1;
}

void report_breach(int32 which) {
  log_violation();
  log_violation();
  if (which == 0) {
    fail() @spec(p0);
  }
  if (which == 2) {
    fail() @spec(p2);
  }
  if (which == 3) {
    fail() @spec(p3);
  }
}

void spec_check_p0(int32 d, int32 k) {
  if (d >= 2) {
    report_breach(0);
  }
}

void spec_check_p2(int32 d, int32 k) {
  if (d == 1 && k == 1) {
    report_breach(2);
  }
}

void spec_check_p3(int32 d, int32 k) {
  if (d + k >= 4) {
    report_breach(3);
  }
}

int32 intake(int32 d, int32 k) {
  reservoir = d * 2 + k;
  return d * 2 + k;
}

#if Pump
void pump_stage(int32 d, int32 k) {
  flow_rate = d * 3 + k + 1;
}
#endif

#if Gauge
void gauge_stage(int32 d, int32 k) {
  level_reading = d + k * 5;
#if Pump
  g_flow = flow_rate + d;
  spec_check_p0(d, k);
#endif
}
#endif

#if Alarm
void alarm_stage(int32 d, int32 k) {
  panel = d + 7;
#if Gauge
  a_level = level_reading * 2;
#endif
}
#endif

#if Drain
void drain_stage(int32 d, int32 k) {
  drain_q = d * 4 + k;
}
#endif

#if Valve
void valve_stage(int32 d, int32 k) {
  w_out = d + 1;
#if Drain
  v_drain = drain_q + k;
  spec_check_p2(d, k);
#endif
}
#endif

#if Filter
void filter_stage(int32 d, int32 k) {
  filt_state = d + k + 2;
}
#endif

#if Backup
void backup_stage(int32 d, int32 k) {
  standby = k + 1;
#if Filter
  b_filt = filt_state * 3;
  spec_check_p3(d, k);
#endif
}
#endif

void monitor() {
  gauge_seen = reservoir + 1;
}

void main() {
  int32 d;
  int32 k;
  make_symbolic(d, 0, 3);
  make_symbolic(k, 0, 1);
  intake(d, k);
#if Pump
  pump_stage(d, k);
#endif
#if Gauge
  gauge_stage(d, k);
#endif
#if Alarm
  alarm_stage(d, k);
#endif
#if Drain
  drain_stage(d, k);
#endif
#if Valve
  valve_stage(d, k);
#endif
#if Filter
  filter_stage(d, k);
#endif
#if Backup
  backup_stage(d, k);
#endif
  monitor();
}
)FLC";

}  // namespace

BenchmarkSuite make_mailkit() {
  BenchmarkSuite s;
  s.name = "mailkit";
  s.unit_filename = "mailkit.flc";
  s.unit_text = kMailkitSrc;
  s.interactions = {
      guarded("spec0", "Sign", "Verify"),
      guarded("spec1", "Sign", "Forward"),
      guarded("spec3", "Encrypt", "Decrypt"),
      guarded("spec4", "Encrypt", "Verify"),
      guarded("spec6", "Decrypt", "Forward"),
      guarded("spec7", "Encrypt", "Forward"),
      guarded("spec8", "Encrypt", "Respond"),
      guarded("spec9", "Decrypt", "Respond"),
      guarded("spec11", "Verify", "Forward"),
      guarded("spec27", "Book", "Encrypt"),
  };
  s.products = {
      product("base", {}),
      product("enc", {"Encrypt"}),
      product("dec", {"Decrypt"}),
      product("sig", {"Sign"}),
      product("ver", {"Verify"}),
      product("fwd", {"Forward"}),
      product("rsp", {"Respond"}),
      product("book", {"Book"}),
      product("aud", {"Audit"}),
      product("sig_ver", {"Sign", "Verify"}),
      product("sig_fwd", {"Sign", "Forward"}),
      product("enc_dec", {"Encrypt", "Decrypt"}),
      product("enc_ver", {"Encrypt", "Verify"}),
      product("dec_fwd", {"Decrypt", "Forward"}),
      product("enc_fwd", {"Encrypt", "Forward"}),
      product("enc_rsp", {"Encrypt", "Respond"}),
      product("dec_rsp", {"Decrypt", "Respond"}),
      product("ver_fwd", {"Verify", "Forward"}),
      product("book_enc", {"Book", "Encrypt"}),
      product("c01", {"Sign", "Verify", "Forward"}),
      product("c02", {"Encrypt", "Decrypt", "Forward"}),
      product("c03", {"Encrypt", "Decrypt", "Respond"}),
      product("c04", {"Encrypt", "Verify", "Forward"}),
      product("c05", {"Sign", "Encrypt", "Verify"}),
      product("c06", {"Book", "Encrypt", "Decrypt"}),
      product("c07", {"Sign", "Audit"}),
      product("c08", {"Respond", "Audit"}),
      product("c09", {"Encrypt", "Audit"}),
      product("c10", {"Sign", "Verify", "Audit"}),
      product("c11", {"Forward", "Respond"}),
      product("c12", {"Book", "Sign"}),
      product("c13", {"Decrypt", "Verify"}),
      product("c14", {"Encrypt", "Decrypt", "Verify", "Forward"}),
      product("c15", {"Sign", "Verify", "Forward", "Respond", "Audit"}),
      product("c16", {"Book", "Encrypt", "Verify", "Forward"}),
      product("c17", {"Encrypt", "Decrypt", "Sign", "Verify", "Forward",
                      "Respond", "Book", "Audit"}),
  };
  return s;
}

BenchmarkSuite make_liftkit() {
  BenchmarkSuite s;
  s.name = "liftkit";
  s.unit_filename = "liftkit.flc";
  s.unit_text = kLiftkitSrc;
  s.interactions = {
      guarded("lift0", "Weight", "Overload"),
      guarded("lift1", "Weight", "Express"),
      guarded("lift2", "Doors", "Park"),
      guarded("lift3", "Priority", "Express"),
      guarded("lift4", "Overload", "Doors"),
  };
  s.products = {
      product("base", {}),
      product("w", {"Weight"}),
      product("o", {"Overload"}),
      product("pr", {"Priority"}),
      product("pk", {"Park"}),
      product("dr", {"Doors"}),
      product("x", {"Express"}),
      product("w_o", {"Weight", "Overload"}),
      product("w_x", {"Weight", "Express"}),
      product("dr_pk", {"Doors", "Park"}),
      product("pr_x", {"Priority", "Express"}),
      product("o_dr", {"Overload", "Doors"}),
      product("c01", {"Weight", "Overload", "Doors"}),
      product("c02", {"Weight", "Priority", "Express"}),
      product("c03", {"Doors", "Park", "Overload"}),
      product("c04", {"Weight", "Overload", "Priority", "Express"}),
      product("c05", {"Doors", "Park", "Priority"}),
      product("c06", {"Weight", "Doors", "Express"}),
      product("c07", {"Weight", "Overload", "Park", "Doors"}),
      product("c08", {"Weight", "Overload", "Priority", "Park", "Doors",
                      "Express"}),
  };
  return s;
}

BenchmarkSuite make_pumpkit() {
  BenchmarkSuite s;
  s.name = "pumpkit";
  s.unit_filename = "pumpkit.flc";
  s.unit_text = kPumpkitSrc;
  s.interactions = {
      guarded("p0", "Pump", "Gauge"),
      unguarded("Gauge", "Alarm"),
      guarded("p2", "Drain", "Valve"),
      guarded("p3", "Filter", "Backup"),
  };
  const std::vector<std::string> vary = {"Gauge",  "Alarm",  "Drain",
                                         "Valve",  "Filter", "Backup"};
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<std::string> feats = {"Pump"};
    for (size_t b = 0; b < vary.size(); ++b)
      if (mask & (1 << b)) feats.push_back(vary[b]);
    std::ostringstream name;
    name << "v" << (mask < 10 ? "0" : "") << mask;
    s.products.push_back(product(name.str(), feats));
  }
  return s;
}

BenchmarkSuite make_megakit(unsigned seed) {
  const int n_feat = 120;
  const int helper_lines = 52;
  const std::vector<int> cross_sites = {11, 41, 71, 101};

  auto fname = [](int i) {
    std::ostringstream o;
    o << "F" << (i < 100 ? "0" : "") << (i < 10 ? "0" : "") << i;
    return o.str();
  };
  auto pad3 = [](int i) {
    std::ostringstream o;
    o << (i < 100 ? "0" : "") << (i < 10 ? "0" : "") << i;
    return o.str();
  };

  std::ostringstream src;
  src << "features ";
  for (int i = 0; i < n_feat; ++i) src << (i ? ", " : "") << fname(i);
  src << ";\n\nint32 tick;\n";
  for (int i = 0; i < n_feat; ++i) {
    src << "int32 m" << pad3(i) << ";\n";
    src << "int32 b" << pad3(i) << ";\n";
    src << "int32 s" << pad3(i) << "a[" << helper_lines << "];\n";
    src << "int32 s" << pad3(i) << "b[" << helper_lines << "];\n";
  }
  for (int i : cross_sites) src << "int32 xl" << pad3(i) << ";\n";

  src << "\nint32 calib(int32 x, int32 y) {\n"
      << "  tick = x + y;\n"
      << "  return x + y;\n"
      << "}\n";

  for (int i = 0; i < n_feat; ++i) {
    const std::string id = pad3(i);
    src << "\n#if " << fname(i) << "\n";
    for (char h : {'a', 'b'}) {
      src << "void feed_" << id << "_" << h << "(int32 x, int32 y) {\n";
      for (int j = 0; j < helper_lines; ++j) {
        int c1 = (i + j) % 5 + 1, c2 = (i * 3 + j) % 4 + 1,
            c3 = (i * 7 + j * 11 + (h == 'b' ? 13 : 0)) % 23;
        src << "  s" << id << h << "[" << j << "] = x * " << c1 << " + y * "
            << c2 << " + " << c3 << ";\n";
      }
      src << "}\n";
    }
    src << "int32 stage_" << id << "(int32 x, int32 y) {\n"
        << "  m" << id << " = x * " << (i % 6 + 1) << " + y * "
        << (i % 4 + 1) << " + " << (i % 17) << ";\n"
        << "  feed_" << id << "_a(x, y);\n"
        << "  feed_" << id << "_b(x, y);\n";
    if (i % 15 == 0) {
      src << "  if (x > 4) {\n"
          << "    b" << id << " = y + " << (i % 9) << ";\n"
          << "  } else {\n"
          << "    b" << id << " = x + " << (i % 7 + 1) << ";\n"
          << "  }\n";
    }
    for (int c : cross_sites) {
      if (c != i) continue;
      src << "#if " << fname(i - 1) << "\n"
          << "  xl" << id << " = m" << pad3(i - 1) << " + 2;\n"
          << "#endif\n";
    }
    src << "  return x * 2 + " << (i % 13) << ";\n}\n#endif\n";
  }

  src << "\nvoid main() {\n"
      << "  int32 x;\n  int32 y;\n"
      << "  make_symbolic(x, 0, 9);\n  make_symbolic(y, 0, 9);\n"
      << "  calib(x, y);\n";
  for (int i = 0; i < n_feat; ++i) {
    src << "#if " << fname(i) << "\n"
        << "  stage_" << pad3(i) << "(x, y);\n"
        << "#endif\n";
  }
  src << "}\n";

  BenchmarkSuite s;
  s.name = "megakit";
  s.unit_filename = "megakit.flc";
  s.unit_text = src.str();
  for (int c : cross_sites) s.interactions.push_back(unguarded(fname(c - 1), fname(c)));

  std::mt19937 gen(seed);
  for (int p = 0; p < 40; ++p) {
    std::vector<std::string> feats;
    if (p == 0) {
      for (int i = 0; i < n_feat; ++i) feats.push_back(fname(i));
    } else {
      std::set<std::string> chosen;
      for (int i = 0; i < n_feat; ++i)
        if (gen() % 2 == 0) chosen.insert(fname(i));
      if (p >= 1 && p <= 4) {
        int c = cross_sites[p - 1];
        chosen.insert(fname(c - 1));
        chosen.insert(fname(c));
      }
      feats.assign(chosen.begin(), chosen.end());
    }
    std::ostringstream name;
    name << "mega" << (p < 10 ? "0" : "") << p;
    s.products.push_back(product(name.str(), feats));
  }
  return s;
}

std::string products_text(const BenchmarkSuite& s) {
  std::ostringstream out;
  out << "# " << s.name << " products\n";
  for (const auto& p : s.products) {
    out << p.name << ":";
    bool first = true;
    for (const auto& f : p.enabled) {
      out << (first ? " " : ", ") << f;
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

std::string interactions_csv(const BenchmarkSuite& s) {
  std::ostringstream out;
  out << "spec_id,feature_a,feature_b,guarded\n";
  for (const auto& it : s.interactions)
    out << it.spec_id << "," << it.feature_a << "," << it.feature_b << ","
        << (it.guarded ? 1 : 0) << "\n";
  return out.str();
}

void write_suite(const BenchmarkSuite& s, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path root = fs::path(dir) / s.name;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail_input("cannot create directory " + root.string() + ": " + ec.message());
  modelx::write_text_atomic((root / s.unit_filename).string(), s.unit_text);
  modelx::write_text_atomic((root / "products.txt").string(), products_text(s));
  modelx::write_text_atomic((root / "interactions.csv").string(), interactions_csv(s));
}

std::string validate_suite(const BenchmarkSuite& s, const symex::EngineConfig& cfg) {
  auto unit = flc::parse_unit_text(s.unit_filename, s.unit_text);
  auto annotated = modelx::annotate_metadata_vars(unit);
  flc::ResolveOptions ropt;
  ropt.loop_bound = cfg.loop_bound;

  std::set<std::string> known_ids;
  for (const auto& it : s.interactions)
    if (it.guarded) known_ids.insert(it.spec_id);

  std::map<std::string, int> fails_by_spec;
  std::vector<std::pair<std::set<std::string>, std::set<std::string>>> dep_atoms;
  for (const auto& p : s.products) {
    auto prog = flc::resolve_product(annotated, p, ropt);
    auto res = symex::extract_feature_models(prog, cfg);
    if (res.truncated)
      fail_internal("benchmark " + s.name + ": extraction truncated for product " + p.name);
    if (res.bound_exhausted > 0)
      fail_internal("benchmark " + s.name + ": loop bound exhausted in product " + p.name);
    for (const auto& f : res.fail) {
      if (f.spec_id.empty() || !known_ids.count(f.spec_id))
        fail_internal("benchmark " + s.name + ": stray failure '" + f.diagnostic +
                      "' (spec '" + f.spec_id + "') in product " + p.name);
      fails_by_spec[f.spec_id]++;
    }
    for (const auto* vec : {&res.ss, &res.sl})
      for (const auto& dp : *vec) {
        std::set<std::string> sa, da;
        dp.src->presence.collect_atoms(sa);
        dp.dst->presence.collect_atoms(da);
        dep_atoms.emplace_back(std::move(sa), std::move(da));
      }
  }

  std::ostringstream out;
  for (const auto& it : s.interactions) {
    if (it.guarded) {
      int n = fails_by_spec.count(it.spec_id) ? fails_by_spec.at(it.spec_id) : 0;
      if (n == 0)
        fail_internal("benchmark " + s.name + ": guarded interaction " + it.spec_id +
                      " (" + it.feature_a + ", " + it.feature_b + ") never fails");
      out << s.name << " " << it.spec_id << " (" << it.feature_a << ", "
          << it.feature_b << "): " << n << " failure paths\n";
    } else {
      bool found = false;
      for (const auto& [sa, da] : dep_atoms)
        if ((sa.count(it.feature_a) && da.count(it.feature_b)) ||
            (sa.count(it.feature_b) && da.count(it.feature_a))) {
          found = true;
          break;
        }
      if (!found)
        fail_internal("benchmark " + s.name + ": unguarded interaction (" +
                      it.feature_a + ", " + it.feature_b + ") left no dependency");
      out << s.name << " (" << it.feature_a << ", " << it.feature_b
          << "): dependency present, unguarded\n";
    }
  }
  return out.str();
}

}  // namespace flint::bench
