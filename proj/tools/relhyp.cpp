// relhyp: word problem, classification and conjugacy for relatively hyperbolic
// groups given by a presentation file.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <relhyp/conjugacy.hpp>

using namespace relhyp;

namespace {

  struct command_error : std::runtime_error {
    command_error(std::string k, std::string const& what) : std::runtime_error(what), kind(std::move(k)) {}
    std::string kind;
  };

  //! one output record: ordered key=value lines, or a JSON object
  class Record {
   public:
    Record& put(std::string k, std::string v) {
      _rows.emplace_back(std::move(k), std::move(v));
      return *this;
    }
    Record& put(std::string k, long long v) {
      return put(std::move(k), std::to_string(v));
    }
    Record& put(std::string k, bool v) {
      return put(std::move(k), std::string(v ? "true" : "false"));
    }
    Record& put(std::string k, char const* v) {
      return put(std::move(k), std::string(v));
    }

    void print(std::ostream& o, bool json) const {
      if (json) {
        nlohmann::ordered_json j;
        for (auto const& [k, v] : _rows) {
          j[k] = v;
        }
        o << j.dump() << '\n';
        return;
      }
      for (auto const& [k, v] : _rows) {
        o << k << '=' << v << '\n';
      }
    }

   private:
    std::vector<std::pair<std::string, std::string>> _rows;
  };

  std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  std::string slurp(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw command_error("io", "cannot read '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  //! key=value tokens separated by whitespace, '#' comments
  std::vector<std::pair<std::string, long long>> read_profile(std::string const& path) {
    std::vector<std::pair<std::string, long long>> kv;
    std::istringstream                             in(slurp(path));
    std::string                                    line;
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) {
        line.erase(h);
      }
      std::istringstream ls(line);
      std::string        tok;
      while (ls >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw command_error("profile", "malformed profile entry '" + tok + "'");
        }
        try {
          kv.emplace_back(tok.substr(0, eq), std::stoll(tok.substr(eq + 1)));
        } catch (std::logic_error const&) {
          throw command_error("profile", "malformed profile entry '" + tok + "'");
        }
      }
    }
    return kv;
  }

  struct Options {
    std::string pres;
    std::string profile;
    std::string cache;
    bool        json = false;
    bool        timing = false;
    std::uint64_t seed = 1;
  };

  //! everything a command needs, built in order: group, profile, engine
  struct Session {
    explicit Session(Options const& o) : G(parse(o.pres)) {
      profile = ConstantsProfile::from(G.presentation());
      if (!o.profile.empty()) {
        profile = ConstantsProfile::from(read_profile(o.profile), profile);
      }
      if (!o.cache.empty()) {
        auto phash = presentation_hash(G.presentation());
        if (auto T = load_tables(o.cache, phash, profile)) {
          cache_hit = true;
          E         = std::make_unique<Engine>(G, profile, std::move(*T));
          return;
        }
        E = std::make_unique<Engine>(G, profile);
        save_tables(E->tables(), o.cache);
        return;
      }
      E = std::make_unique<Engine>(G, profile);
    }

    static RelativePresentation parse(std::string const& path) {
      return parse_presentation(slurp(path));
    }

    Group                   G;
    ConstantsProfile        profile;
    std::unique_ptr<Engine> E;
    bool                    cache_hit = false;
  };

  void check_word(Group const& G, std::string const& w) {
    try {
      G.check(w);
    } catch (presentation_error const& e) {
      throw command_error("word", e.what());
    }
  }

  Record cmd_wp(Options const& o, std::string const& w) {
    Session s(o);
    check_word(s.G, w);
    auto   out = s.E->shortener().shorten(w).output;
    Record r;
    r.put("status", "ok").put("command", "wp").put("word", w);
    r.put("trivial", s.E->word_problem(w)).put("shortened", out);
    return r;
  }

  Record cmd_classify(Options const& o, std::string const& w) {
    Session s(o);
    check_word(s.G, w);
    auto   c = s.E->classify(w);
    Record r;
    r.put("status", "ok").put("command", "classify").put("word", w);
    r.put("verdict", std::string(verdict_name(c.verdict)));
    if (c.parabolic()) {
      r.put("index", static_cast<long long>(c.index));
    }
    r.put("representative", c.representative).put("conjugator", c.conjugator);
    return r;
  }

  Record certificate(Record r, ConjugacyCertificate const& c) {
    r.put("answer", c.conjugate ? "conjugate" : "not_conjugate");
    r.put("witness", c.witness);
    r.put("reason", std::string(reason_name(c.reason)));
    r.put("regime", std::string(regime_name(c.regime)));
    r.put("lbar", static_cast<long long>(c.lbar)).put("L", static_cast<long long>(c.L));
    r.put("profile", hex(c.profile_hash));
    r.put("verified", c.verified);
    return r;
  }

  Record cmd_conj(Options const& o, std::string const& u, std::string const& v, bool search) {
    Session s(o);
    check_word(s.G, u);
    check_word(s.G, v);
    auto c = s.E->decide(u, v);
    if (search && !c.conjugate) {
      throw command_error("not_conjugate", "'" + u + "' and '" + v + "' are not conjugate ("
                                               + std::string(reason_name(c.reason)) + ")");
    }
    Record r;
    r.put("status", "ok").put("command", search ? "search" : "conj").put("u", u).put("v", v);
    return certificate(std::move(r), c);
  }

  Record cmd_bounded(Options const& o, std::string const& u, int n) {
    Session s(o);
    check_word(s.G, u);
    auto   cls = s.E->bounded_class(u, n);
    Record r;
    r.put("status", "ok").put("command", "bounded").put("u", u).put("radius", static_cast<long long>(n));
    r.put("count", static_cast<long long>(cls.size()));
    for (size_t i = 0; i < cls.size(); ++i) {
      r.put("member." + std::to_string(i), cls[i].first + " " + cls[i].second);
    }
    return r;
  }

  Record cmd_precompute(Options o, std::string const& cache) {
    if (!cache.empty()) {
      o.cache = cache;
    }
    Session     s(o);
    auto const& T  = s.E->tables();
    auto const& nf = s.E->normal_form();
    Record      r;
    r.put("status", "ok").put("command", "precompute");
    r.put("profile", s.profile.serialize()).put("profile_hash", hex(s.profile.hash()));
    r.put("presentation_hash", hex(presentation_hash(s.G.presentation())));
    auto sz = [](auto const& x) { return static_cast<long long>(x.size()); };
    r.put("L1", sz(T.l1)).put("L2", sz(T.l2)).put("L3", sz(T.l3));
    r.put("L4", sz(T.l4)).put("L5", sz(T.l5));
    r.put("L6", T.l6_skipped ? std::string("skipped") : std::to_string(T.l6.size()));
    r.put("L8", sz(T.l8)).put("L9", sz(T.l9));
    r.put("L10", static_cast<long long>(T.l10_size()));
    r.put("L11", static_cast<long long>(T.l11_size(nf)));
    r.put("L88", static_cast<long long>(T.l88_size()));
    r.put("classes", sz(T.class_root)).put("BCC", sz(T.bcc));
    std::string ki;
    for (auto k : T.k_i) {
      ki += (ki.empty() ? "" : ",") + std::to_string(k);
    }
    r.put("K_i", ki).put("K_hyp_4delta", T.k_hyp_4delta).put("K_4delta", T.k_4delta);
    if (!o.cache.empty()) {
      r.put("cache", o.cache).put("cache_hit", s.cache_hit);
    }
    return r;
  }

  Record cmd_crosscheck(Options const& o, int n) {
    Session     s(o);
    auto const& G  = s.G;
    auto const& nf = s.E->normal_form();
    std::vector<Word> words{Word()};
    for (size_t i = 0; i < words.size(); ++i) {
      if (static_cast<int>(words[i].size()) == n) {
        continue;
      }
      for (char c : G.alphabet()) {
        if (!words[i].empty() && words[i].back() == inverse_letter(c)) {
          continue;
        }
        words.push_back(words[i] + c);
        if (words.size() > s.E->metric().budget()) {
          throw budget_error("crosscheck corpus of length " + std::to_string(n) + " exceeds budget");
        }
      }
    }
    BruteClassIndex I(nf, words, n, s.E->metric().budget());
    // agreement matrix: rows decide, columns brute force
    long long tt = 0, tf = 0, ft = 0, ff = 0, unverified = 0;
    std::string counterexample;
    for (size_t u = 0; u < words.size(); ++u) {
      auto row = I.conjugators_from(u);
      for (size_t v = 0; v < words.size(); ++v) {
        auto c = s.E->decide(words[u], words[v]);
        bool b = row[v].has_value();
        (c.conjugate ? (b ? tt : tf) : (b ? ft : ff))++;
        unverified += c.verified ? 0 : 1;
        if (c.conjugate != b && counterexample.empty()) {
          counterexample = words[u] + " " + words[v];
        }
      }
    }
    long long total = tt + tf + ft + ff;
    Record    r;
    r.put("status", "ok").put("command", "crosscheck").put("max_length", static_cast<long long>(n));
    r.put("words", static_cast<long long>(words.size())).put("pairs", total);
    r.put("decide_yes_brute_yes", tt).put("decide_yes_brute_no", tf);
    r.put("decide_no_brute_yes", ft).put("decide_no_brute_no", ff);
    r.put("unverified", unverified);
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.4f", total ? 100.0 * static_cast<double>(tt + ff) / static_cast<double>(total) : 100.0);
    r.put("agreement_percent", std::string(pct));
    r.put("counterexample", counterexample.empty() ? std::string("none") : counterexample);
    return r;
  }

  //! random words: word problem against the canonical form, and search
  //! witnesses on planted conjugate pairs
  Record cmd_selftest(Options const& o, int count) {
    Session         s(o);
    auto const&     G = s.G;
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<size_t> pick(0, G.alphabet().size() - 1);
    std::uniform_int_distribution<int>    len(0, 10);
    auto rand_word = [&](int n) {
      Word w;
      for (int i = 0; i < n; ++i) {
        w += G.alphabet()[pick(rng)];
      }
      return w;
    };
    long long wp_fail = 0, search_fail = 0;
    for (int i = 0; i < count; ++i) {
      Word w = rand_word(len(rng));
      if (s.E->word_problem(w) != s.E->normal_form()(w).empty()) {
        ++wp_fail;
      }
      Word u = rand_word(len(rng));
      Word g = rand_word(len(rng) % 7);
      Word v = g + u + inverse(g);
      auto c = s.E->decide(u, v);
      if (!c.conjugate || !c.verified) {
        ++search_fail;
      }
    }
    Record r;
    r.put("status", "ok").put("command", "selftest").put("seed", static_cast<long long>(o.seed));
    r.put("count", static_cast<long long>(count)).put("wp_failures", wp_fail).put("search_failures", search_fail);
    return r;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relhyp: algorithms for relatively hyperbolic groups"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("presentation", o.pres, "presentation file")->required();
    sub->add_option("--profile", o.profile, "constants override file (key=value tokens)");
    sub->add_option("--cache", o.cache, "table cache; reused when hashes match, else rebuilt");
    sub->add_flag("--json", o.json, "print the record as one JSON object");
    sub->add_flag("--timing", o.timing, "append wall-clock seconds (off by default so output is reproducible)");
  };

  std::string u, v;
  int         n     = 0;
  bool        srch  = false;
  std::string cpath;

  auto* wp = app.add_subcommand("wp", "decide whether a word is trivial");
  common(wp);
  wp->add_option("word", u, "word over the generators, uppercase = inverse")->required();

  auto* cl = app.add_subcommand("classify", "hyperbolic or parabolic");
  common(cl);
  cl->add_option("word", u)->required();

  auto* cj = app.add_subcommand("conj", "decide conjugacy of two words");
  common(cj);
  cj->add_option("u", u)->required();
  cj->add_option("v", v)->required();
  cj->add_flag("--search", srch, "fail unless a verified conjugator is found");

  auto* bc = app.add_subcommand("bounded", "conjugates of u in the ball of radius N");
  common(bc);
  bc->add_option("u", u)->required();
  bc->add_option("N", n)->required()->check(CLI::NonNegativeNumber);

  auto* pc = app.add_subcommand("precompute", "build the tables, print sizes, write the cache");
  common(pc);
  pc->add_option("cache-path", cpath, "where to write the cache");

  auto* cc = app.add_subcommand("crosscheck", "decide against brute force on all short words");
  common(cc);
  cc->add_option("max-length", n)->required()->check(CLI::NonNegativeNumber);

  int  count = 200;
  auto* st   = app.add_subcommand("selftest", "randomized checks of wp and search");
  common(st);
  st->add_option("--seed", o.seed, "random seed (default 1)");
  st->add_option("--count", count, "number of samples (default 200)");

  CLI11_PARSE(app, argc, argv);

  Record r;
  int    code = 0;
  auto   t0   = std::chrono::steady_clock::now();
  try {
    if (*wp) {
      r = cmd_wp(o, u);
    } else if (*cl) {
      r = cmd_classify(o, u);
    } else if (*cj) {
      r = cmd_conj(o, u, v, srch);
    } else if (*bc) {
      r = cmd_bounded(o, u, n);
    } else if (*pc) {
      r = cmd_precompute(o, cpath);
    } else if (*cc) {
      r = cmd_crosscheck(o, n);
    } else if (*st) {
      r = cmd_selftest(o, count);
    }
  } catch (command_error const& e) {
    r = Record().put("status", "error").put("kind", e.kind).put("message", e.what());
    code = 1;
  } catch (presentation_error const& e) {
    r = Record().put("status", "error").put("kind", "parse").put("message", e.what());
    code = 1;
  } catch (budget_error const& e) {
    r = Record().put("status", "error").put("kind", "budget").put("message", e.what());
    code = 1;
  } catch (profile_error const& e) {
    r = Record().put("status", "error").put("kind", "profile").put("message", e.what());
    code = 1;
  } catch (std::exception const& e) {
    r = Record().put("status", "error").put("kind", "internal").put("message", e.what());
    code = 1;
  }
  if (o.timing) {
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", dt.count());
    r.put("seconds", std::string(buf));
  }
  r.print(std::cout, o.json);
  return code;
}
