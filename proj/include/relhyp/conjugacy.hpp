// Classification of elements and the conjugacy decision / search engine.
//
// Internally every step records conjugators as result = c^-1 . input . c.
// Certificates use the public orientation v = g . u . g^-1.

#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metric_oracle.hpp"
#include "shortening.hpp"
#include "tables.hpp"

namespace relhyp {

  class not_conjugate_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  struct Classification {
    enum class Verdict { identity, hyperbolic, parabolic };
    Verdict verdict = Verdict::identity;
    int     index   = 0;  // parabolic subgroup, when parabolic
    Word    representative;  // q, or alpha for hyperbolic elements
    Word    conjugator;      // q = conjugator^-1 . w . conjugator

    bool parabolic() const noexcept {
      return verdict == Verdict::parabolic;
    }
    bool hyperbolic() const noexcept {
      return verdict == Verdict::hyperbolic;
    }
  };

  inline std::string_view verdict_name(Classification::Verdict v) {
    switch (v) {
      case Classification::Verdict::identity: return "identity";
      case Classification::Verdict::hyperbolic: return "hyperbolic";
      case Classification::Verdict::parabolic: return "parabolic";
    }
    return "?";
  }

  enum class Regime { identity, long_, short_hyperbolic, parabolic, mismatch };
  enum class Reason { none, class_mismatch, long_search_exhausted, short_table_miss, parabolic_tables_miss };

  inline std::string_view regime_name(Regime r) {
    switch (r) {
      case Regime::identity: return "identity";
      case Regime::long_: return "long";
      case Regime::short_hyperbolic: return "short-hyperbolic";
      case Regime::parabolic: return "parabolic";
      case Regime::mismatch: return "mismatch";
    }
    return "?";
  }

  inline std::string_view reason_name(Reason r) {
    switch (r) {
      case Reason::none: return "none";
      case Reason::class_mismatch: return "class-mismatch";
      case Reason::long_search_exhausted: return "long-search-exhausted";
      case Reason::short_table_miss: return "short-table-miss";
      case Reason::parabolic_tables_miss: return "parabolic-tables-miss";
    }
    return "?";
  }

  struct ConjugacyCertificate {
    bool          conjugate = false;
    Word          witness;  // v = witness . u . witness^-1
    Reason        reason = Reason::none;
    Regime        regime = Regime::identity;
    int           lbar   = 0;
    int           L      = 0;
    std::uint64_t profile_hash = 0;
    bool          verified     = false;

    std::string record() const {
      std::ostringstream o;
      char               hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(profile_hash));
      o << "answer=" << (conjugate ? "conjugate" : "not_conjugate") << '\n'
        << "witness=" << witness << '\n'
        << "reason=" << reason_name(reason) << '\n'
        << "regime=" << regime_name(regime) << '\n'
        << "lbar=" << lbar << '\n'
        << "L=" << L << '\n'
        << "profile=" << hex << '\n'
        << "verified=" << (verified ? 1 : 0) << '\n';
      return o.str();
    }
  };

  //! Owns the canonical form, metric oracle, shortener and tables for one
  //! group and profile. Results are memoized per word.
  class Engine {
   public:
    Engine(Group const& G, ConstantsProfile c)
        : _G(G), _c(c), _nf(G), _M(_nf, static_cast<size_t>(std::max<long long>(c.budget, 0))) {
      _T = precompute(_M, _c);
      init();
    }

    Engine(Group const& G, ConstantsProfile c, PrecomputedTables tables)
        : _G(G), _c(c), _nf(G), _M(_nf, static_cast<size_t>(std::max<long long>(c.budget, 0))),
          _T(std::move(tables)) {
      init();
    }

    Engine(Engine const&)            = delete;
    Engine& operator=(Engine const&) = delete;

    Group const& group() const noexcept {
      return _G;
    }
    ConstantsProfile const& profile() const noexcept {
      return _c;
    }
    PrecomputedTables const& tables() const noexcept {
      return _T;
    }
    NormalForm const& normal_form() const noexcept {
      return _nf;
    }
    MetricOracle& metric() noexcept {
      return _M;
    }
    Shortener& shortener() noexcept {
      return *_S;
    }

    bool word_problem(std::string_view w) {
      return _S->word_problem(w);
    }

    CyclicShorteningResult const& cyclic(std::string_view w) {
      Word key(w);
      auto it = _cyc.find(key);
      if (it == _cyc.end()) {
        it = _cyc.emplace(key, _S->cyclic_shorten(w)).first;
      }
      return it->second;
    }

    Classification classify(std::string_view w) {
      Word key(w);
      if (auto it = _cls.find(key); it != _cls.end()) {
        return it->second;
      }
      auto const&    cs = cyclic(w);
      Classification c;
      Word const&    alpha = cs.output;
      if (alpha.empty()) {
        c.verdict = Classification::Verdict::identity;
      } else if (int i = _G.parabolic_index(alpha); i > 0) {
        c = {Classification::Verdict::parabolic, i, alpha, cs.conjugator};
      } else if (scan(_G, alpha).relative_length > _c.threshold()) {
        c = {Classification::Verdict::hyperbolic, 0, alpha, cs.conjugator};
      } else if (auto hit = _T.l10(_nf(alpha))) {
        // q = d^-1 alpha d and alpha = a^-1 w a
        auto [q, d] = *hit;
        c = {Classification::Verdict::parabolic, _G.parabolic_index(q), q,
             free_reduce(cs.conjugator + d)};
        if (c.index == 0) {
          c.verdict = Classification::Verdict::identity;
        }
      } else {
        c = {Classification::Verdict::hyperbolic, 0, alpha, cs.conjugator};
      }
      _cls.emplace(key, c);
      return c;
    }

    //! rotations of w as (rotated word, prefix p) with rotated = p^-1 w p
    static std::vector<std::pair<Word, Word>> rotations(Word const& w) {
      std::vector<std::pair<Word, Word>> out;
      for (size_t j = 0; j < std::max<size_t>(w.size(), 1); ++j) {
        out.emplace_back(w.substr(j) + w.substr(0, j), w.substr(0, j));
      }
      return out;
    }

    //! Tries every x in the candidate list against all rotation pairs; the
    //! shortest (then shortlex) h with beta = h alpha h^-1 among the hits.
    std::optional<Word> rotation_search(Word const& alpha, Word const& beta,
                                        std::vector<Word> const& candidates) {
      auto ra = rotations(alpha);
      auto rb = rotations(beta);
      std::vector<Word> bs;
      for (auto const& [b, q] : rb) {
        bs.push_back(_S->shorten(b).output);
      }
      std::optional<Word> best;
      for (auto const& x : candidates) {
        for (auto const& [a, p] : ra) {
          Word xa = _S->shorten(x + a + inverse(x)).output;
          for (size_t k = 0; k < rb.size(); ++k) {
            if (xa.size() != bs[k].size() && _G.m() == 0) {
              continue;  // free reduction alone decides in a free group
            }
            if (_S->word_problem(xa + inverse(bs[k]))) {
              Word h = _S->shorten(rb[k].second + x + inverse(p)).output;
              if (!best || h.size() < best->size()
                  || (h.size() == best->size() && _G.shortlex_less(h, *best))) {
                best = std::move(h);
              }
            }
          }
        }
      }
      return best;
    }

    ConjugacyCertificate conjugate_long(Word const& alpha, Word const& beta) {
      ConjugacyCertificate cert;
      cert.regime = Regime::long_;
      auto key    = alpha + '|' + beta + "|L";
      auto h      = memo_search(key, [&] { return rotation_search(alpha, beta, _T.l4.members); });
      fill(cert, h, Reason::long_search_exhausted);
      return cert;
    }

    ConjugacyCertificate conjugate_short_hyperbolic(Word const& alpha, Word const& beta) {
      ConjugacyCertificate cert;
      cert.regime = Regime::short_hyperbolic;
      auto key    = alpha + '|' + beta + "|S";
      auto h      = memo_search(key, [&]() -> std::optional<Word> {
        if (auto h = rotation_search(alpha, beta, _T.l2)) {
          return h;
        }
        Word ku = _nf(_M.relative_geodesic(alpha).word);
        Word kv = _nf(_M.relative_geodesic(beta).word);
        if (!_T.in_l8(ku) || !_T.in_l8(kv)) {
          return std::nullopt;
        }
        return _T.l88(ku, kv);
      });
      fill(cert, h, Reason::short_table_miss);
      return cert;
    }

    //! witness relates the original words: v = g u g^-1
    ConjugacyCertificate conjugate_parabolic(Classification const& cu, Classification const& cv) {
      ConjugacyCertificate cert;
      cert.regime = Regime::parabolic;
      if (!cu.parabolic() || !cv.parabolic()) {
        throw std::invalid_argument("conjugate_parabolic needs two parabolic classifications");
      }
      if (cu.index == cv.index) {
        if (auto t = _G.oracle(cu.index).conjugate(cu.representative, cv.representative)) {
          cert.conjugate = true;
          cert.witness   = free_reduce(cv.conjugator + *t + inverse(cu.conjugator));
          return cert;
        }
      }
      auto into_b = [&](Classification const& c) -> std::optional<std::pair<Word, Word>> {
        auto const& o = _G.oracle(c.index);
        for (auto const& p : _T.l3) {
          if (_G.parabolic_index(p) != c.index) {
            continue;
          }
          if (auto s = o.conjugate(c.representative, p)) {
            return std::make_pair(p, *s);  // p = s q s^-1
          }
        }
        return std::nullopt;
      };
      auto pu = into_b(cu), pv = into_b(cv);
      if (!pu || !pv) {
        cert.reason = Reason::parabolic_tables_miss;
        return cert;
      }
      auto h = _T.l88(_nf(pu->first), _nf(pv->first));
      if (!h) {
        cert.reason = Reason::parabolic_tables_miss;
        return cert;
      }
      cert.conjugate = true;
      cert.witness   = free_reduce(cv.conjugator + inverse(pv->second) + *h + pu->second
                                   + inverse(cu.conjugator));
      return cert;
    }

    ConjugacyCertificate decide(std::string_view u, std::string_view v) {
      _G.check(u);
      _G.check(v);
      ConjugacyCertificate cert;
      cert.profile_hash = _c.hash();
      cert.lbar         = static_cast<int>(std::max(u.size(), v.size()));
      auto cu           = classify(u);
      auto cv           = classify(v);
      auto const& au    = cyclic(u);
      auto const& av    = cyclic(v);
      cert.L            = std::max(scan(_G, au.output).relative_length,
                                   scan(_G, av.output).relative_length);
      using V = Classification::Verdict;
      if (cu.verdict == V::identity && cv.verdict == V::identity) {
        cert.regime    = Regime::identity;
        cert.conjugate = true;
      } else if (cu.verdict != cv.verdict) {
        cert.regime = Regime::mismatch;
        cert.reason = Reason::class_mismatch;
      } else if (cu.parabolic()) {
        auto r         = conjugate_parabolic(cu, cv);
        cert.regime    = r.regime;
        cert.conjugate = r.conjugate;
        cert.reason    = r.reason;
        cert.witness   = r.witness;
      } else {
        auto r = cert.L > _c.threshold() ? conjugate_long(au.output, av.output)
                                         : conjugate_short_hyperbolic(au.output, av.output);
        cert.regime    = r.regime;
        cert.conjugate = r.conjugate;
        cert.reason    = r.reason;
        if (r.conjugate) {
          // alpha_u = a_u^-1 u a_u, alpha_v = a_v^-1 v a_v, alpha_v = h alpha_u h^-1
          cert.witness = free_reduce(av.conjugator + r.witness + inverse(au.conjugator));
        }
      }
      if (cert.conjugate) {
        cert.witness  = _S->shorten(cert.witness).output;
        cert.verified = _S->word_problem(cert.witness + Word(u) + inverse(cert.witness) + inverse(v));
      } else {
        cert.verified = true;
      }
      return cert;
    }

    Word search(std::string_view u, std::string_view v) {
      auto cert = decide(u, v);
      if (!cert.conjugate) {
        throw not_conjugate_error("'" + std::string(u) + "' and '" + std::string(v)
                                  + "' are not conjugate (" + std::string(reason_name(cert.reason)) + ")");
      }
      return cert.witness;
    }

    //! every x in the Cayley ball of radius N conjugate to u, with g x... such
    //! that x = g u g^-1
    std::vector<std::pair<Word, Word>> bounded_class(std::string_view u, int N) {
      BallIndex                          B(_nf, N, _M.budget());
      std::vector<std::pair<Word, Word>> out;
      for (auto const& e : B.entries()) {
        auto c = decide(u, e.word);
        if (c.conjugate) {
          out.emplace_back(e.word, c.witness);
        }
      }
      return out;
    }

    long long M_of(std::string_view u) const {
      return compute_M(_G, _T, u);
    }

   private:
    void init() {
      _S = std::make_unique<Shortener>(_M, _c.delta, &_T.replacements, _c.fallback);
      if (_c.delta > 0) {
        _S->set_trivial_loops(&_T.trivial_loops);
      }
    }

    template <typename F>
    std::optional<Word> memo_search(std::string const& key, F&& f) {
      if (auto it = _core.find(key); it != _core.end()) {
        return it->second;
      }
      auto r = f();
      _core.emplace(key, r);
      return r;
    }

    static void fill(ConjugacyCertificate& cert, std::optional<Word> const& h, Reason miss) {
      if (h) {
        cert.conjugate = true;
        cert.witness   = *h;
      } else {
        cert.reason = miss;
      }
    }

    Group const&                                         _G;
    ConstantsProfile                                     _c;
    NormalForm                                           _nf;
    MetricOracle                                         _M;
    PrecomputedTables                                    _T;
    std::unique_ptr<Shortener>                           _S;
    std::unordered_map<Word, CyclicShorteningResult>     _cyc;
    std::unordered_map<Word, Classification>             _cls;
    std::unordered_map<std::string, std::optional<Word>> _core;
  };

}  // namespace relhyp
