// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <relhyp/conjugacy.hpp>

using namespace relhyp;
using Clock = std::chrono::steady_clock;

namespace {

  // pinned limits
  constexpr double oracle_seconds   = 300.0;  // criteria 1 and 2
  constexpr double witness_seconds  = 120.0;  // criterion 3
  constexpr int    random_samples   = 1000;   // criteria 3, 4, 5
  constexpr int    max_conjugator   = 6;      // |g| in criterion 3
  constexpr int    max_corpus_len   = 12;     // criteria 4 and 5
  constexpr double max_slope        = 2.0;    // criterion 8
  constexpr std::uint64_t seed      = 20240611;

  // frozen from an independent cyclic-normal-form count of the same corpora
  constexpr long long f2_conjugate_pairs = 2701;
  constexpr long long g2_conjugate_pairs = 8065;

  double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  }

  std::string slurp(std::string const& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::vector<Word> reduced_words(Group const& G, int n) {
    std::vector<Word> out{Word()};
    for (size_t i = 0; i < out.size(); ++i) {
      if (static_cast<int>(out[i].size()) == n) {
        continue;
      }
      for (char c : G.alphabet()) {
        if (!out[i].empty() && out[i].back() == inverse_letter(c)) {
          continue;
        }
        out.push_back(out[i] + c);
      }
    }
    return out;
  }

  Word random_word(Group const& G, std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<size_t> pick(0, G.alphabet().size() - 1);
    Word                                  w;
    for (int i = 0; i < len; ++i) {
      w += G.alphabet()[pick(rng)];
    }
    return w;
  }

  Word random_reduced(Group const& G, std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<size_t> pick(0, G.alphabet().size() - 1);
    Word                                  w;
    while (static_cast<int>(w.size()) < len) {
      char c = G.alphabet()[pick(rng)];
      if (w.empty() || w.back() != inverse_letter(c)) {
        w += c;
      }
    }
    return w;
  }

  struct Setup {
    explicit Setup(std::string const& name)
        : G(parse_presentation(slurp(std::string(RELHYP_PRESENTATIONS) + "/" + name + ".pres"))),
          E(G, ConstantsProfile::from(G.presentation())) {}
    Group  G;
    Engine E;
  };

  struct Pair {
    size_t u, v;
    Word   shortest;
  };

  struct OracleRun {
    bool              pass = false;
    long long         pairs = 0, agree = 0, conjugate = 0, unverified = 0;
    double            seconds = 0;
    std::vector<Word> words;
    std::vector<Pair> conjugate_pairs;  // with the brute-force shortest witness
    std::string       first_mismatch;
  };

  OracleRun oracle_equivalence(Setup& S, int len) {
    OracleRun r;
    auto      t0 = Clock::now();
    r.words      = reduced_words(S.G, len);
    BruteClassIndex I(S.E.normal_form(), r.words, len);
    for (size_t u = 0; u < r.words.size(); ++u) {
      auto row = I.conjugators_from(u);
      for (size_t v = 0; v < r.words.size(); ++v) {
        auto c = S.E.decide(r.words[u], r.words[v]);
        ++r.pairs;
        if (c.conjugate == row[v].has_value()) {
          ++r.agree;
        } else if (r.first_mismatch.empty()) {
          r.first_mismatch = r.words[u] + "," + r.words[v];
        }
        if (c.conjugate && !c.verified) {
          ++r.unverified;
        }
        if (row[v]) {
          r.conjugate_pairs.push_back({u, v, *row[v]});
        }
        r.conjugate += c.conjugate ? 1 : 0;
      }
    }
    r.seconds = seconds_since(t0);
    return r;
  }

  bool report(int n, bool pass, std::string const& detail) {
    std::printf("criterion %d: %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    return pass;
  }

  std::string fmt(char const* f, ...) __attribute__((format(printf, 1, 2)));
  std::string fmt(char const* f, ...) {
    char    buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
  }

  //! every window of at most k syllables is a relative geodesic
  bool windows_ok(MetricOracle& M, Group const& G, Word const& w, int k) {
    auto syl = scan(G, w).syllables;
    for (size_t i = 0; i < syl.size(); ++i) {
      Word win;
      for (size_t j = i; j < syl.size() && static_cast<int>(j - i) < k; ++j) {
        win += syl[j].subword;
        if (!M.is_relative_geodesic(win)) {
          return false;
        }
      }
    }
    return true;
  }

}  // namespace

int main() {
  bool all = true;
  auto t_start = Clock::now();

  Setup F2("free2");
  Setup G2("g2");
  std::vector<Setup*> groups{&F2, &G2};

  // 1. free group, all pairs of reduced words of length <= 5
  auto c1 = oracle_equivalence(F2, 5);
  c1.pass = c1.agree == c1.pairs && c1.unverified == 0 && c1.conjugate == f2_conjugate_pairs
            && c1.seconds < oracle_seconds;
  all &= report(1, c1.pass,
                fmt("F2 words<=5: %zu words, %lld/%lld pairs agree, %lld conjugate (expect %lld), "
                    "%lld unverified, %.1fs%s%s",
                    c1.words.size(), c1.agree, c1.pairs, c1.conjugate, f2_conjugate_pairs, c1.unverified,
                    c1.seconds, c1.first_mismatch.empty() ? "" : ", first mismatch ",
                    c1.first_mismatch.c_str()));

  // 2. Z * Z^2, all pairs of reduced words of length <= 4
  auto c2 = oracle_equivalence(G2, 4);
  c2.pass = c2.agree == c2.pairs && c2.unverified == 0 && c2.conjugate == g2_conjugate_pairs
            && c2.seconds < oracle_seconds;
  all &= report(2, c2.pass,
                fmt("G2 words<=4: %zu words, %lld/%lld pairs agree, %lld conjugate (expect %lld), "
                    "%lld unverified, %.1fs%s%s",
                    c2.words.size(), c2.agree, c2.pairs, c2.conjugate, g2_conjugate_pairs, c2.unverified,
                    c2.seconds, c2.first_mismatch.empty() ? "" : ", first mismatch ",
                    c2.first_mismatch.c_str()));

  // 3. search on planted conjugate pairs
  {
    auto            t0 = Clock::now();
    std::mt19937_64 rng(seed);
    long long       ok = 0, total = 0;
    std::string     bad;
    for (auto* S : groups) {
      std::uniform_int_distribution<int> ulen(1, max_corpus_len), glen(0, max_conjugator);
      for (int i = 0; i < random_samples; ++i) {
        Word u = random_word(S->G, rng, ulen(rng));
        Word g = random_reduced(S->G, rng, glen(rng));
        Word v = g + u + inverse(g);
        ++total;
        try {
          Word h = S->E.search(u, v);
          bool wp = S->E.word_problem(h + u + inverse(h) + inverse(v));
          bool nf = S->E.normal_form().equal(h + u + inverse(h), v);
          if (wp && nf) {
            ++ok;
          } else if (bad.empty()) {
            bad = u + "," + v;
          }
        } catch (std::exception const&) {
          if (bad.empty()) {
            bad = u + "," + v;
          }
        }
      }
    }
    double secs = seconds_since(t0);
    all &= report(3, ok == total && secs < witness_seconds,
                  fmt("%lld/%lld planted pairs (F2, G2) searched and verified, %.1fs%s%s", ok, total, secs,
                      bad.empty() ? "" : ", first failure ", bad.c_str()));
  }

  // shared random corpus for criteria 4 and 5
  std::vector<std::pair<Setup*, Word>> corpus;
  {
    std::mt19937_64                    rng(seed + 4);
    std::uniform_int_distribution<int> len(1, max_corpus_len);
    for (auto* S : groups) {
      for (int i = 0; i < random_samples; ++i) {
        corpus.emplace_back(S, random_word(S->G, rng, len(rng)));
      }
    }
  }

  // 4. shorten gives k-local relative geodesics, with the length bound
  {
    long long ok = 0;
    std::string bad;
    for (auto& [S, w] : corpus) {
      auto&  sh  = S->E.shortener();
      Word   out = sh.shorten(w).output;
      bool   win = windows_ok(S->E.metric(), S->G, out, sh.k());
      bool   len = out.size() < static_cast<size_t>(S->E.profile().c2) * w.size();
      bool   el  = S->E.normal_form().equal(out, w);
      if (win && len && el) {
        ++ok;
      } else if (bad.empty()) {
        bad = w;
      }
    }
    all &= report(4, ok == static_cast<long long>(corpus.size()),
                  fmt("%lld/%zu words: all windows of <= k syllables geodesic, |out| < C2*|in|%s%s", ok,
                      corpus.size(), bad.empty() ? "" : ", first failure ", bad.c_str()));
  }

  // 5. cyclic shortening contract
  {
    long long   ok = 0;
    int         worst_iter = 0;
    double      worst_ratio = 0;
    std::string bad;
    for (auto& [S, w] : corpus) {
      auto&       sh    = S->E.shortener();
      auto const& c     = S->E.profile();
      auto        r     = sh.cyclic_shorten(w);
      int         lbar  = static_cast<int>(w.size());
      bool        lab   = S->E.normal_form().equal(r.output, inverse(r.conjugator) + w + r.conjugator);
      bool        dbl   = r.output.empty() || windows_ok(S->E.metric(), S->G, r.output + r.output, sh.k());
      bool        iters = r.iterations <= lbar;
      long long   alen  = static_cast<long long>(S->E.normal_form()(r.conjugator).size());
      long long   bound = static_cast<long long>(std::max(c.c2, 8 * c.delta * c.c2)) * lbar + lbar;
      worst_iter        = std::max(worst_iter, r.iterations);
      worst_ratio       = std::max(worst_ratio, static_cast<double>(alen) / static_cast<double>(bound));
      if (lab && dbl && iters && alen <= bound) {
        ++ok;
      } else if (bad.empty()) {
        bad = w;
      }
    }
    all &= report(5, ok == static_cast<long long>(corpus.size()),
                  fmt("%lld/%zu words: lab(alpha) = a^-1 u a, doubled windows geodesic, max iterations %d, "
                      "max |a|/bound %.2f%s%s",
                      ok, corpus.size(), worst_iter, worst_ratio, bad.empty() ? "" : ", first failure ",
                      bad.c_str()));
  }

  // 6. short relative conjugators for every conjugate pair of criterion 2
  {
    auto&       M     = G2.E.metric();
    int         delta = G2.E.profile().delta;
    long long   ok = 0, via_witness = 0, via_small = 0, via_search = 0;
    std::string bad;
    BallIndex   extra(G2.E.normal_form(), 8);
    for (auto const& p : c2.conjugate_pairs) {
      Word const& u     = c2.words[p.u];
      Word const& v     = c2.words[p.v];
      int         bound = M.relative_length(u) + M.relative_length(v) + 4 * delta + 2;
      auto        dec   = G2.E.decide(u, v);
      if (M.relative_length(p.shortest) <= bound || M.relative_length(dec.witness) <= bound) {
        ++ok;
        ++via_witness;
        continue;
      }
      if (M.relative_length(u) <= 4 * delta && M.relative_length(v) <= 4 * delta) {
        ++ok;
        ++via_small;
        continue;
      }
      bool found = false;
      for (auto const& e : extra.entries()) {
        if (G2.E.normal_form().equal(e.word + u + inverse(e.word), v) && M.relative_length(e.word) <= bound) {
          found = true;
          break;
        }
      }
      if (found) {
        ++ok;
        ++via_search;
      } else if (bad.empty()) {
        bad = u + "," + v;
      }
    }
    all &= report(6, ok == static_cast<long long>(c2.conjugate_pairs.size()),
                  fmt("%lld/%zu conjugate pairs (witness %lld, small elements %lld, ball search %lld)%s%s", ok,
                      c2.conjugate_pairs.size(), via_witness, via_small, via_search,
                      bad.empty() ? "" : ", first failure ", bad.c_str()));
  }

  // 7. abelian parabolic: K_i = 0, M = 0, linear conjugator bound
  {
    auto const& T      = G2.E.tables();
    bool        k_zero = std::all_of(T.k_i.begin(), T.k_i.end(), [](int k) { return k == 0; }) && !T.k_i.empty();
    long long   m_max  = 0, par_words = 0;
    for (auto const& w : reduced_words(G2.G, 4)) {
      if (w.empty() || G2.G.parabolic_index(w) == 0) {
        continue;
      }
      ++par_words;
      m_max = std::max(m_max, G2.E.M_of(w));
    }
    int       nlin = G2.E.profile().nlin, mlin = G2.E.profile().mlin;
    long long over = 0;
    // fit: least n with max |g| / (|u|+|v|) <= n, then least m for that n
    long long fit_n = 0, fit_m = 0;
    for (auto const& p : c2.conjugate_pairs) {
      long long g = static_cast<long long>(p.shortest.size());
      long long s = static_cast<long long>(c2.words[p.u].size() + c2.words[p.v].size());
      if (g > nlin * s + mlin) {
        ++over;
      }
      if (s > 0) {
        fit_n = std::max(fit_n, (g + s - 1) / s);
      }
    }
    for (auto const& p : c2.conjugate_pairs) {
      long long g = static_cast<long long>(p.shortest.size());
      long long s = static_cast<long long>(c2.words[p.u].size() + c2.words[p.v].size());
      fit_m       = std::max(fit_m, g - fit_n * s);
    }
    bool pass = k_zero && m_max == 0 && over == 0 && fit_n == nlin && fit_m == mlin;
    all &= report(7, pass,
                  fmt("K_i=0 %s, max M over %lld parabolic words = %lld, |g| <= %d(|u|+|v|)+%d fails on %lld of "
                      "%zu pairs, fitted (n,m)=(%lld,%lld)",
                      k_zero ? "yes" : "no", par_words, m_max, nlin, mlin, over, c2.conjugate_pairs.size(), fit_n,
                      fit_m));
  }

  // 8. word problem time on trivial words of length 2^8 .. 2^14
  {
    std::mt19937_64   rng(seed + 8);
    std::vector<double> xs, ys;
    bool              sound = true;
    std::string       table;
    for (int e = 8; e <= 14; ++e) {
      int  n = 1 << e;
      Word w = random_reduced(G2.G, rng, n / 2);
      // inverse with every parabolic run reversed: the same element in Z^2,
      // but not a literal mirror image
      Word back = inverse(w);
      auto syl  = scan(G2.G, back).syllables;
      Word tail;
      for (auto const& s : syl) {
        Word piece = s.subword;
        if (s.parabolic()) {
          std::shuffle(piece.begin(), piece.end(), rng);
        }
        tail += piece;
      }
      Word   trivial = w + tail;
      double best    = 1e9;
      for (int rep = 0; rep < 3; ++rep) {
        Shortener fresh(G2.E.metric(), G2.E.profile().delta, &G2.E.tables().replacements);
        auto      t0 = Clock::now();
        sound &= fresh.word_problem(trivial);
        best = std::min(best, seconds_since(t0));
      }
      xs.push_back(std::log(static_cast<double>(trivial.size())));
      ys.push_back(std::log(std::max(best, 1e-7)));
      table += fmt(" n=%zu:%.2gs", trivial.size(), best);
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    double slope = sxy / sxx;
    all &= report(8, sound && slope < max_slope,
                  fmt("log-log slope %.2f (limit %.1f), all trivial: %s;%s", slope, max_slope, sound ? "yes" : "no",
                      table.c_str()));
  }

  std::printf("acceptance: %s (%.1fs)\n", all ? "PASS" : "FAIL", seconds_since(t_start));
  return all ? 0 : 1;
}
