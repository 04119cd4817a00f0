#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperseq/hyperseq.hpp"

namespace {

using namespace hyperseq;

enum Exit { kOk = 0, kParse = 2, kHorizon = 3, kPrecondition = 4, kInternal = 5 };

int exit_code(ErrorFamily f) {
  switch (f) {
    case ErrorFamily::Parse: return kParse;
    case ErrorFamily::Horizon: return kHorizon;
    case ErrorFamily::Precondition: return kPrecondition;
    case ErrorFamily::Internal: return kInternal;
  }
  return kInternal;
}

std::string_view family_name(ErrorFamily f) {
  switch (f) {
    case ErrorFamily::Parse: return "parse";
    case ErrorFamily::Horizon: return "horizon";
    case ErrorFamily::Precondition: return "precondition";
    case ErrorFamily::Internal: return "internal";
  }
  return "?";
}

struct Options {
  std::string verb;
  std::vector<std::string> seqs;
  std::string set_text, family_text;
  Index count = 10, prefix = 0, depth = kDefaultDepth, search_bound = kDefaultSearchBound;
  std::string eps_text = "1e-9";
  std::vector<std::string> forced;
  Index horizon = kDefaultHorizon, witness_quota = 20;
  std::string state_in, state_out, trace_path;
  bool as_json = false;
};

std::string approx(const Rational& q) {
  std::ostringstream os;
  os << std::setprecision(12) << to_double(q);
  return os.str();
}

json values_json(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

json set_json(const IndexSet& s) {
  if (s.is_exact()) return to_json(s);
  return json{{"H", s.horizon()}, {"count", s.count_below(s.horizon())}};
}

class Session {
 public:
  explicit Session(const Options& opt) : opt_(opt) {
    if (!opt.state_in.empty()) {
      std::ifstream in(opt.state_in);
      if (!in) throw Error(Errc::InvalidArgument, "cannot read oracle state '" + opt.state_in + "'");
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, "oracle state '" + opt.state_in + "' is not JSON: " + e.what());
      }
      oracle_ = std::make_unique<Oracle>(oracle_from_json(j));
    } else {
      oracle_ = std::make_unique<Oracle>(OracleConfig{opt.horizon, opt.witness_quota});
    }
    if (!opt.trace_path.empty() && opt.verb != "trace-replay") {
      trace_.open(opt.trace_path);
      if (!trace_) throw Error(Errc::InvalidArgument, "cannot write trace '" + opt.trace_path + "'");
      oracle_->set_trace([this](const Decision& d) {
        json line = to_json(d);
        line["event"] = "decision";
        trace_ << line.dump() << '\n';
      });
    }
    for (const auto& f : opt.forced) {
      auto [m, r] = parse_forced(f);
      oracle_->force_residue(m, r);
      if (trace_.is_open()) trace_ << json{{"event", "force"}, {"m", m}, {"r", r}}.dump() << '\n';
    }
  }

  Oracle& oracle() { return *oracle_; }

  void finish(json result, const std::string& text) {
    if (!opt_.state_out.empty()) {
      std::ofstream out(opt_.state_out);
      if (!out) throw Error(Errc::InvalidArgument, "cannot write oracle state '" + opt_.state_out + "'");
      out << to_json(*oracle_).dump() << '\n';
    }
    if (opt_.as_json) {
      result["command"] = opt_.verb;
      result["oracle"] = json{{"tower", to_json(*oracle_)["tower"]}, {"ledger_digest", ledger_digest(*oracle_)},
                              {"decisions", oracle_->ledger().size()}};
      std::cout << result.dump(2) << '\n';
    } else {
      std::cout << text;
      std::cout << "oracle: " << oracle_->ledger().size() << " decisions, digest " << ledger_digest(*oracle_) << '\n';
    }
  }

  static std::pair<Index, Index> parse_forced(const std::string& f) {
    auto colon = f.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(f);
      std::size_t used = 0;
      Index m = std::stoull(f.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument(f);
      std::string rest = f.substr(colon + 1);
      Index r = std::stoull(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(f);
      return {m, r};
    } catch (const std::logic_error&) {
      throw SyntaxError(0, "--force-residue expects m:r, got '" + f + "'");
    }
  }

 private:
  const Options& opt_;
  std::unique_ptr<Oracle> oracle_;
  std::ofstream trace_;
};

Rational parse_eps(const std::string& text) {
  auto q = parse_sequence(text).as_constant();
  if (!q || *q <= 0) throw SyntaxError(0, "--eps must be a positive constant");
  return *q;
}

const std::string& one_seq(const Options& opt) {
  if (opt.seqs.size() != 1) throw Error(Errc::InvalidArgument, opt.verb + " takes exactly one --seq");
  return opt.seqs.front();
}

void extraction_out(const Extraction& e, json& j, std::ostringstream& text) {
  j["direction"] = std::string(direction_name(e.direction));
  j["indices"] = e.indices;
  j["values"] = values_json(e.values);
  text << "direction: " << direction_name(e.direction) << '\n';
  text << "  index  value\n";
  for (std::size_t i = 0; i < e.indices.size(); ++i) {
    text << "  " << std::setw(5) << e.indices[i] << "  " << to_string(e.values[i]);
    if (e.values[i].get_den() != 1) text << "  (~" << approx(e.values[i]) << ")";
    text << '\n';
  }
}

int run(const Options& opt) {
  Session s(opt);
  Oracle& o = s.oracle();
  json j;
  std::ostringstream text;
  const std::string& v = opt.verb;

  if (v == "classify" || v == "extract") {
    auto seq = parse_sequence(one_seq(opt));
    auto tri = classify(seq, o);
    j["case"] = std::string(case_name(tri.which));
    j["verdicts"] = json{{"A", tri.mu_a}, {"B", tri.mu_b}, {"C", tri.mu_c}};
    text << "u = " << tri.u.str() << "\ncase: " << case_name(tri.which) << '\n';
    if (v == "classify") {
      j["sets"] = json{{"A", set_json(tri.A)}, {"B", set_json(tri.B)}, {"C", set_json(tri.C)}};
      text << "A = " << tri.A.str() << "  measure " << tri.mu_a << '\n';
      text << "B = " << tri.B.str() << "  measure " << tri.mu_b << '\n';
      text << "C = " << tri.C.str() << "  measure " << tri.mu_c << '\n';
    } else {
      extraction_out(extract(tri, opt.count, opt.search_bound), j, text);
    }
  } else if (v == "peaks") {
    extraction_out(peaks(parse_sequence(one_seq(opt)), opt.prefix), j, text);
  } else if (v == "prop-decreasing") {
    auto seq = parse_sequence(one_seq(opt));
    auto e = extract_decreasing_above_st(seq, o, opt.count, opt.search_bound);
    Rational u0 = st(Hyper(seq, o)).value;
    j["standard_part"] = to_string(u0);
    text << "st(u) = " << to_string(u0) << '\n';
    extraction_out(e, j, text);
  } else if (v == "compare") {
    if (opt.seqs.size() != 2) throw Error(Errc::InvalidArgument, "compare takes exactly two --seq");
    Hyper a(parse_sequence(opt.seqs[0]), o), b(parse_sequence(opt.seqs[1]), o);
    Cmp c = compare(a, b);
    j["result"] = std::string(cmp_name(c));
    text << a.str() << ' ' << (c == Cmp::LT ? "<" : c == Cmp::EQ ? "=" : ">") << ' ' << b.str() << '\n';
  } else if (v == "st") {
    Hyper u(parse_sequence(one_seq(opt)), o);
    auto p = st(u, parse_eps(opt.eps_text));
    j["value"] = to_string(p.value);
    j["exact"] = p.exact;
    text << "st" << u.str() << " = " << to_string(p.value) << (p.exact ? " (exact)" : " (within eps)") << '\n';
  } else if (v == "measure") {
    IndexSet set = parse_set(opt.set_text, o.config().horizon);
    int mu = o.measure(set);
    j["verdict"] = mu;
    j["set"] = set_json(set);
    text << "measure " << set.str() << " = " << mu << '\n';
  } else if (v == "cantor" || v == "saturate") {
    auto fam = NestedFamily::from_expr(parse_family(opt.family_text), opt.depth);
    if (v == "cantor") {
      auto p = cantor_intersection(fam, o, parse_eps(opt.eps_text));
      j["point"] = to_string(p.value);
      j["exact"] = p.exact;
      j["depth"] = opt.depth;
      text << "common point " << to_string(p.value) << (p.exact ? " (exact)" : " (within eps)")
           << ", in all " << opt.depth << " levels\n";
    } else {
      auto w = saturation_witness(fam, o);
      j["witness"] = w.c.str();
      json levels = json::array();
      text << "witness c = " << w.c.str() << '\n';
      for (Index m = 0; m < w.membership.size(); ++m) {
        levels.push_back(json{{"level", m}, {"tail_from", m}, {"measure", w.measures[m]}});
        text << "  level " << m << ": {n : c_n in A_" << m << "} contains tail(" << m << "), measure "
             << w.measures[m] << '\n';
      }
      j["levels"] = levels;
    }
  } else if (v == "trace-replay") {
    std::ifstream in(opt.trace_path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot read trace '" + opt.trace_path + "'");
    std::string line;
    Index replayed = 0, lineno = 0;
    json mismatches = json::array();
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json ev;
      try {
        ev = json::parse(line);
      } catch (const json::exception& e) {
        throw SyntaxError(0, "trace line " + std::to_string(lineno) + " is not JSON");
      }
      std::string kind = ev.value("event", "decision");
      if (kind == "force") {
        o.force_residue(ev.at("m").get<Index>(), ev.at("r").get<Index>());
      } else {
        int want = ev.at("verdict").get<int>();
        int got = o.measure(index_set_from_json(ev.at("set")));
        if (got != want) mismatches.push_back(json{{"line", lineno}, {"recorded", want}, {"replayed", got}});
      }
      ++replayed;
    }
    j["replayed"] = replayed;
    j["mismatches"] = mismatches;
    text << "replayed " << replayed << " events, " << mismatches.size() << " mismatches\n";
    if (!mismatches.empty()) {
      s.finish(j, text.str());
      throw Error(Errc::VerificationFailed, "replayed verdicts differ from the trace");
    }
  }
  s.finish(j, text.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Ultrapower sequence classes over a lazily built ultrafilter"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--force-residue", opt.forced, "commit r_m = r before running (m:r, repeatable)")->allow_extra_args(false);
  app.add_option("--horizon", opt.horizon, "sampling horizon H for a fresh oracle")->check(CLI::PositiveNumber);
  app.add_option("--witness-quota", opt.witness_quota, "witness quota W for a fresh oracle")->check(CLI::PositiveNumber);
  app.add_option("--oracle-state", opt.state_in, "load oracle state from this JSON file");
  app.add_option("--save-oracle", opt.state_out, "write the oracle state here afterwards");
  app.add_option("--trace", opt.trace_path, "write one JSON line per decision (trace-replay: read it)");
  app.add_flag("--json", opt.as_json, "print a single JSON document");

  auto seq_cmd = [&](const char* name, const char* about) {
    auto* c = app.add_subcommand(name, about);
    c->add_option("--seq", opt.seqs, "sequence expression in n")->required()->allow_extra_args(false);
    return c;
  };
  seq_cmd("classify", "which of A, B, C has measure 1");
  auto* extract_cmd = seq_cmd("extract", "monotone subsequence from the trichotomy");
  extract_cmd->add_option("--count", opt.count)->check(CLI::PositiveNumber);
  extract_cmd->add_option("--search-bound", opt.search_bound)->check(CLI::PositiveNumber);
  seq_cmd("peaks", "peak-based monotone subsequence of a finite prefix")->add_option("--prefix", opt.prefix)->required();
  auto* prop_cmd = seq_cmd("prop-decreasing", "decreasing terms above the standard part");
  prop_cmd->add_option("--count", opt.count)->check(CLI::PositiveNumber);
  prop_cmd->add_option("--search-bound", opt.search_bound)->check(CLI::PositiveNumber);
  seq_cmd("compare", "order of two classes (give --seq twice)");
  seq_cmd("st", "standard part")->add_option("--eps", opt.eps_text);
  app.add_subcommand("measure", "measure of an index set")->add_option("--set", opt.set_text)->required();
  auto* cantor_cmd = app.add_subcommand("cantor", "common point of a nested compact family");
  cantor_cmd->add_option("--family", opt.family_text)->required();
  cantor_cmd->add_option("--depth", opt.depth)->check(CLI::PositiveNumber);
  cantor_cmd->add_option("--eps", opt.eps_text);
  auto* sat_cmd = app.add_subcommand("saturate", "diagonal witness of a nested family");
  sat_cmd->add_option("--family", opt.family_text)->required();
  sat_cmd->add_option("--depth", opt.depth)->check(CLI::PositiveNumber);
  app.add_subcommand("trace-replay", "re-run a recorded trace against the oracle state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }
  opt.verb = app.get_subcommands().front()->get_name();
  if (opt.verb == "trace-replay" && opt.trace_path.empty()) {
    std::cerr << "error: trace-replay needs --trace <file>\n";
    return kParse;
  }

  try {
    return run(opt);
  } catch (const SyntaxError& e) {
    if (opt.as_json) {
      std::cout << json{{"error", {{"code", std::string(errc_name(e.code()))}, {"family", "parse"},
                                   {"offset", e.offset()}, {"message", e.what()}}}}.dump(2) << '\n';
    }
    std::cerr << "error at offset " << e.offset() << ": " << e.what() << '\n';
    return kParse;
  } catch (const Error& e) {
    if (opt.as_json) {
      std::cout << json{{"error", {{"code", std::string(errc_name(e.code()))},
                                   {"family", std::string(family_name(e.family()))}, {"message", e.what()}}}}
                       .dump(2)
                << '\n';
    }
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.family());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
