// Curve shortening: relative k-local geodesics, the word problem, and cyclic
// shortening with a tracked conjugator.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metric_oracle.hpp"
#include "words.hpp"

namespace relhyp {

  class shortening_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  enum class Justification { parabolic_normalization, table_replacement, oracle_replacement };

  struct RewriteStep {
    size_t        offset = 0;  // letter offset in the word before the step
    Word          replaced;
    Word          replacement;
    Justification why = Justification::oracle_replacement;
  };

  struct ShorteningResult {
    Word                     output;
    std::vector<RewriteStep> certificate;
  };

  //! lab(output) = conjugator^-1 . u . conjugator
  struct CyclicShorteningResult {
    Word output;
    Word conjugator;
    int  iterations = 0;
  };

  //! Source of geodesic replacements for short windows, keyed by the
  //! canonical form of the window. Filled from a precomputed list.
  struct ReplacementTable {
    std::unordered_map<Word, Word> geodesic;  // canonical form -> geodesic word
  };

  //! Windows are runs of consecutive syllables; a window is bad when the path
  //! it spells is not a relative geodesic.
  class Shortener {
   public:
    Shortener(MetricOracle& M, int delta, ReplacementTable const* table = nullptr,
              bool fallback = true)
        : _M(M), _delta(delta), _table(table), _fallback(fallback) {}

    int k() const noexcept {
      return std::max(8 * _delta + 1, 2);
    }
    int delta() const noexcept {
      return _delta;
    }
    MetricOracle& metric() const noexcept {
      return _M;
    }
    Group const& group() const noexcept {
      return _M.group();
    }
    void set_trivial_loops(std::vector<Word> const* loops) {
      _loops = loops;
    }

    bool window_ok(std::string_view w) {
      auto it = _window_memo.find(Word(w));
      if (it != _window_memo.end()) {
        return it->second;
      }
      bool ok = _M.is_relative_geodesic(w);
      _window_memo.emplace(Word(w), ok);
      return ok;
    }

    //! [first, last) syllable range of the shortest, then leftmost, bad window
    //! starting at or after syllable `from`
    std::optional<std::pair<size_t, size_t>> first_bad_window(std::vector<Syllable> const& syl,
                                                              size_t from = 0) {
      size_t n = syl.size();
      for (size_t len = 1; len <= static_cast<size_t>(k()) && len <= n; ++len) {
        for (size_t i = from; i + len <= n; ++i) {
          Word w;
          for (size_t j = i; j < i + len; ++j) {
            w += syl[j].subword;
          }
          if (!window_ok(w)) {
            return std::make_pair(i, i + len);
          }
        }
      }
      return std::nullopt;
    }

    bool is_local_geodesic(std::string_view w) {
      return !first_bad_window(scan(group(), w).syllables).has_value();
    }

    bool is_cyclic_local_geodesic(std::string_view w) {
      return w.empty() || is_local_geodesic(Word(w) + Word(w));
    }

    ShorteningResult shorten(std::string_view w) {
      auto const&      G = group();
      ShorteningResult res;
      auto             dec = decompose(G, w);
      Word             cur = dec.word();
      if (cur != free_reduce(w)) {
        res.certificate.push_back({0, Word(w), cur, Justification::parabolic_normalization});
      }
      size_t resume = 0;
      while (true) {
        auto& syl = dec.syllables;
        auto  bad = first_bad_window(syl, resume);
        if (!bad) {
          if (resume == 0) {
            break;
          }
          resume = 0;  // a final full pass
          continue;
        }
        auto [i, j] = *bad;
        size_t off  = syl[i].start;
        Word   win;
        for (size_t t = i; t < j; ++t) {
          win += syl[t].subword;
        }
        auto [rep, why] = replacement(win);
        Word next       = cur.substr(0, off) + rep + cur.substr(off + win.size());
        res.certificate.push_back({off, win, rep, why});
        dec    = decompose(G, next);
        cur    = dec.word();
        resume = i > static_cast<size_t>(k()) ? i - static_cast<size_t>(k()) : 0;
      }
      res.output = std::move(cur);
      return res;
    }

    bool word_problem(std::string_view w) {
      auto out = shorten(w).output;
      if (out.empty()) {
        return true;
      }
      if (scan(group(), out).relative_length > 2 * _delta) {
        return false;
      }
      if (_loops != nullptr) {
        for (auto const& l : *_loops) {
          if (l == out) {
            return true;
          }
        }
        return false;
      }
      return _M.normal_form()(out).empty();
    }

    CyclicShorteningResult cyclic_shorten(std::string_view w) {
      auto const&            G = group();
      CyclicShorteningResult res;
      auto                   cr    = cyclic_reduce(w);
      Word                   conj  = cr.conjugator;
      Word                   rho   = shorten(cr.core).output;
      int                    bound = static_cast<int>(w.size());
      // a single syllable can only get shorter by vanishing, and its square
      // may merge into one shorter syllable, so nothing is checked there
      while (scan(G, rho).relative_length > 1) {
        Word doubled = rho + rho;
        auto sc      = scan(G, doubled);
        auto bad     = first_bad_window(sc.syllables);
        if (!bad) {
          break;
        }
        if (++res.iterations > bound + 1) {
          throw shortening_error("cyclic shortening did not settle within " + std::to_string(bound + 1)
                                 + " iterations; the constants profile looks inconsistent");
        }
        auto [i, j] = *bad;
        size_t end  = sc.syllables[j - 1].start + sc.syllables[j - 1].subword.size();
        if (end <= rho.size()) {
          throw shortening_error("shortened word is not a local geodesic");
        }
        // the head eta of rho closes the window; rotate it to the back
        Word eta = rho.substr(0, end - rho.size());
        if (eta.size() >= rho.size()) {
          eta = rho;
        }
        Word rot = rho.substr(eta.size()) + eta;
        conj += eta;
        rho = shorten(rot).output;
      }
      // among rotations that are still cyclic local geodesics prefer the
      // smallest relative length, then shortlex
      if (scan(G, rho).relative_length > 1) {
        Word best  = rho;
        int  bestl = scan(G, rho).relative_length;
        Word pref;
        for (size_t j = 1; j < rho.size(); ++j) {
          Word s  = shorten(rho.substr(j) + rho.substr(0, j)).output;
          int  sl = scan(G, s).relative_length;
          if ((sl < bestl || (sl == bestl && G.shortlex_less(s, best)))
              && is_cyclic_local_geodesic(s)) {
            best  = s;
            bestl = sl;
            pref  = rho.substr(0, j);
          }
        }
        rho = best;
        conj += pref;
      }
      res.output     = rho;
      res.conjugator = shorten(conj).output;
      return res;
    }

   private:
    std::pair<Word, Justification> replacement(Word const& win) {
      if (_table != nullptr) {
        auto it = _table->geodesic.find(_M.normal_form()(win));
        if (it != _table->geodesic.end()
            && scan(group(), it->second).relative_length < scan(group(), win).relative_length) {
          return {it->second, Justification::table_replacement};
        }
      }
      if (!_fallback) {
        throw shortening_error("no replacement for window '" + win
                               + "' in the tables and the fallback is disabled");
      }
      return {_M.relative_geodesic(win).word, Justification::oracle_replacement};
    }

    MetricOracle&                  _M;
    int                            _delta;
    ReplacementTable const*        _table;
    bool                           _fallback;
    std::vector<Word> const*       _loops = nullptr;
    std::unordered_map<Word, bool> _window_memo;
  };

}  // namespace relhyp
