// Ground truth at desk scale: canonical forms of group elements, balls in the
// Cayley graph and in the coned-off graph, exact relative lengths, a
// brute-force conjugacy search, and empirical estimators for delta and BCP.

#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "parabolic.hpp"
#include "words.hpp"

namespace relhyp {

  class budget_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  inline constexpr size_t default_budget = 1'000'000;

  //! Shortlex rewriting system over the full alphabet, completed by
  //! Knuth-Bendix. Used as the canonical form when relators are present.
  class RewritingSystem {
   public:
    explicit RewritingSystem(Group const& G) : _G(G) {}

    void add_equation(Word a, Word b) {
      _pending.emplace_back(std::move(a), std::move(b));
    }

    // the free-product structure: cancellation plus each parabolic's table
    void add_structure() {
      for (char c : _G.alphabet()) {
        add_equation(Word{c, inverse_letter(c)}, Word());
      }
      for (int i = 1; i <= _G.m(); ++i) {
        auto const& o = _G.oracle(i);
        std::string L;
        for (char c : o.descriptor().letters) {
          L += c;
          L += inverse_letter(c);
        }
        for (char c : L) {
          add_equation(Word(1, c), o.geodesic_form(Word(1, c)));
          for (char d : L) {
            add_equation(Word{c, d}, o.geodesic_form(Word{c, d}));
          }
        }
      }
      for (auto const& r : _G.presentation().relators) {
        add_equation(r, Word());
      }
    }

    Word reduce(std::string_view w) const {
      Word              out;
      std::vector<char> todo(w.rbegin(), w.rend());
      while (!todo.empty()) {
        out.push_back(todo.back());
        todo.pop_back();
        auto it = _by_last.find(out.back());
        if (it == _by_last.end()) {
          continue;
        }
        for (size_t ri : it->second) {
          auto const& [l, r] = _rules[ri];
          if (l.size() <= out.size()
              && out.compare(out.size() - l.size(), l.size(), l) == 0) {
            out.resize(out.size() - l.size());
            todo.insert(todo.end(), r.rbegin(), r.rend());
            break;
          }
        }
      }
      return out;
    }

    //! false when the rule budget runs out before confluence
    bool complete(size_t max_rules = 4000) {
      while (true) {
        if (!absorb(max_rules)) {
          return false;
        }
        // critical pairs from overlaps
        size_t n = _rules.size();
        for (size_t i = 0; i < n; ++i) {
          for (size_t j = 0; j < n; ++j) {
            if (!_alive[i] || !_alive[j]) {
              continue;
            }
            auto const& [l1, r1] = _rules[i];
            auto const& [l2, r2] = _rules[j];
            for (size_t k = 1; k < l1.size() && k < l2.size() + 0; ++k) {
              // suffix of l1 of length k equals prefix of l2
              if (l1.compare(l1.size() - k, k, l2, 0, k) != 0) {
                continue;
              }
              Word a = r1 + l2.substr(k);
              Word b = l1.substr(0, l1.size() - k) + r2;
              Word ra = reduce(a), rb = reduce(b);
              if (ra != rb) {
                _pending.emplace_back(ra, rb);
              }
            }
          }
        }
        if (_pending.empty()) {
          compact();
          return true;
        }
      }
    }

    size_t size() const {
      return _rules.size();
    }
    std::vector<std::pair<Word, Word>> const& rules() const {
      return _rules;
    }

   private:
    bool absorb(size_t max_rules) {
      while (!_pending.empty()) {
        auto [a, b] = std::move(_pending.front());
        _pending.pop_front();
        a = reduce(a);
        b = reduce(b);
        if (a == b) {
          continue;
        }
        if (_G.shortlex_less(a, b)) {
          std::swap(a, b);
        }
        // a -> b; retire rules whose left side now reduces
        size_t idx = _rules.size();
        _rules.emplace_back(a, b);
        _alive.push_back(true);
        _by_last[a.back()].push_back(idx);
        for (size_t i = 0; i < idx; ++i) {
          if (!_alive[i]) {
            continue;
          }
          auto const& l = _rules[i].first;
          if (l.find(a) != std::string::npos) {
            _alive[i] = false;
            unindex(i);
            _pending.emplace_back(_rules[i].first, _rules[i].second);
          } else {
            _rules[i].second = reduce(_rules[i].second);
          }
        }
        if (live() > max_rules) {
          return false;
        }
      }
      return true;
    }

    size_t live() const {
      return static_cast<size_t>(std::count(_alive.begin(), _alive.end(), true));
    }

    void unindex(size_t i) {
      auto& v = _by_last[_rules[i].first.back()];
      v.erase(std::remove(v.begin(), v.end(), i), v.end());
    }

    void compact() {
      std::vector<std::pair<Word, Word>> keep;
      for (size_t i = 0; i < _rules.size(); ++i) {
        if (_alive[i]) {
          keep.push_back(_rules[i]);
        }
      }
      _rules = std::move(keep);
      _alive.assign(_rules.size(), true);
      _by_last.clear();
      for (size_t i = 0; i < _rules.size(); ++i) {
        _by_last[_rules[i].first.back()].push_back(i);
      }
    }

    Group const&                              _G;
    std::vector<std::pair<Word, Word>>        _rules;
    std::vector<bool>                         _alive;
    std::unordered_map<char, std::vector<size_t>> _by_last;
    std::deque<std::pair<Word, Word>>         _pending;
  };

  //! Canonical representative of a group element.
  //! Without relators G is the free product F(S_0) * P_1 * ... * P_m, and the
  //! syllable normal form is exact. With relators a completed rewriting
  //! system is required.
  class NormalForm {
   public:
    enum class Method { automatic, syllables, rewriting };

    explicit NormalForm(Group const& G, Method m = Method::automatic) : _G(G) {
      if (m == Method::rewriting || (m == Method::automatic && G.has_relators())) {
        _rws = std::make_unique<RewritingSystem>(G);
        _rws->add_structure();
        if (!_rws->complete()) {
          throw budget_error("rewriting system did not become confluent within the rule budget");
        }
      }
    }

    Word operator()(std::string_view w) const {
      _G.check(w);
      return _rws ? _rws->reduce(w) : normalize(_G, w);
    }

    bool equal(std::string_view a, std::string_view b) const {
      return (*this)(Word(a) + inverse(b)).empty();
    }

    bool uses_rewriting() const noexcept {
      return static_cast<bool>(_rws);
    }
    RewritingSystem const* rewriting() const noexcept {
      return _rws.get();
    }
    Group const& group() const noexcept {
      return _G;
    }

   private:
    Group const&                     _G;
    std::unique_ptr<RewritingSystem> _rws;
  };

  //! Ball of radius r in the Cayley graph, one shortlex-least word per element.
  class BallIndex {
   public:
    struct Entry {
      Word canon;
      Word word;
      int  length;
    };

    BallIndex(NormalForm const& nf, int r, size_t budget = default_budget) : _radius(r) {
      auto const& G = nf.group();
      _entries.push_back({Word(), Word(), 0});
      _index.emplace(Word(), 0);
      size_t begin = 0;
      for (int len = 1; len <= r; ++len) {
        size_t end = _entries.size();
        for (size_t i = begin; i < end; ++i) {
          for (char c : G.alphabet()) {
            auto const& w = _entries[i].word;
            if (!w.empty() && w.back() == inverse_letter(c)) {
              continue;
            }
            Word nw = w + c;
            Word k  = nf(nw);
            if (_index.count(k)) {
              continue;
            }
            if (_entries.size() >= budget) {
              throw budget_error("ball of radius " + std::to_string(r) + " exceeds budget "
                                 + std::to_string(budget));
            }
            _index.emplace(k, _entries.size());
            _entries.push_back({std::move(k), std::move(nw), len});
          }
        }
        begin = end;
      }
    }

    int radius() const noexcept {
      return _radius;
    }
    size_t size() const noexcept {
      return _entries.size();
    }
    std::vector<Entry> const& entries() const noexcept {
      return _entries;
    }
    Entry const* find(Word const& canon) const {
      auto it = _index.find(canon);
      return it == _index.end() ? nullptr : &_entries[it->second];
    }

   private:
    int                                   _radius;
    std::vector<Entry>                    _entries;
    std::unordered_map<Word, size_t>      _index;
  };

  inline BallIndex ball(NormalForm const& nf, int r, size_t budget = default_budget) {
    return BallIndex(nf, r, budget);
  }

  //! Ball in the coned-off graph: one step is a hyperbolic letter or a
  //! nontrivial parabolic element of Gamma-length <= cap. Consecutive steps in
  //! the same parabolic subgroup are not allowed, so the number of steps of a
  //! stored word equals its syllable count.
  class RelativeBall {
   public:
    struct Entry {
      Word word;
      int  dist;
    };

    RelativeBall(NormalForm const& nf, int cap, size_t budget = default_budget)
        : _nf(nf), _cap(cap), _budget(budget) {
      auto const& G = nf.group();
      for (char c : G.presentation().hyperbolic) {
        _moves.push_back({Word(1, c), 0});
        _moves.push_back({Word(1, inverse_letter(c)), 0});
      }
      for (int i = 1; i <= G.m(); ++i) {
        for (auto& p : G.oracle(i).ball(cap)) {
          if (!p.empty()) {
            _moves.push_back({p, i});
          }
        }
      }
      _elements.emplace(Word(), Entry{Word(), 0});
      _frontier.push_back({Word(), Word(), -1});
      _seen.insert(state_key(Word(), -1));
    }

    int cap() const noexcept {
      return _cap;
    }
    int radius() const noexcept {
      return _radius;
    }

    void grow_to(int r) {
      auto const& G = _nf.group();
      while (_radius < r) {
        std::vector<State> next;
        for (auto const& s : _frontier) {
          for (auto const& [m, idx] : _moves) {
            if (idx > 0 && idx == s.last) {
              continue;
            }
            if (idx == 0 && !s.word.empty() && s.last == 0
                && s.word.back() == inverse_letter(m[0])) {
              continue;
            }
            Word w = s.word + m;
            Word k = _nf(w);
            if (!_seen.insert(state_key(k, idx)).second) {
              continue;
            }
            if (_seen.size() > _budget) {
              throw budget_error("relative ball of radius " + std::to_string(r) + " (cap "
                                 + std::to_string(_cap) + ") exceeds budget "
                                 + std::to_string(_budget));
            }
            auto it = _elements.find(k);
            if (it == _elements.end()) {
              _elements.emplace(k, Entry{w, _radius + 1});
            } else if (it->second.dist == _radius + 1 && better(G, w, it->second.word)) {
              it->second.word = w;
            }
            next.push_back({std::move(k), std::move(w), idx});
          }
        }
        _frontier = std::move(next);
        ++_radius;
      }
    }

    Entry const* find(Word const& canon) const {
      auto it = _elements.find(canon);
      return it == _elements.end() ? nullptr : &it->second;
    }

    std::unordered_map<Word, Entry> const& elements() const noexcept {
      return _elements;
    }

    static bool better(Group const& G, Word const& a, Word const& b) {
      return G.shortlex_less(a, b);
    }

   private:
    struct State {
      Word canon;
      Word word;
      int  last;
    };
    static Word state_key(Word const& k, int last) {
      return k + static_cast<char>('0' + last + 1);
    }

    NormalForm const&                       _nf;
    int                                     _cap;
    size_t                                  _budget;
    int                                     _radius = 0;
    std::vector<std::pair<Word, int>>       _moves;
    std::unordered_map<Word, Entry>         _elements;
    std::vector<State>                      _frontier;
    std::unordered_set<Word>                _seen;
  };

  //! Exact relative distances computed by meet-in-the-middle over RelativeBall.
  class MetricOracle {
   public:
    explicit MetricOracle(NormalForm const& nf, size_t budget = default_budget)
        : _nf(nf), _budget(budget) {}

    NormalForm const& normal_form() const noexcept {
      return _nf;
    }
    Group const& group() const noexcept {
      return _nf.group();
    }
    size_t budget() const noexcept {
      return _budget;
    }

    RelativeBall& relative_ball(int cap, int radius) {
      auto it = _balls.find(cap);
      if (it == _balls.end()) {
        it = _balls.emplace(cap, std::make_unique<RelativeBall>(_nf, cap, _budget)).first;
      }
      it->second->grow_to(radius);
      return *it->second;
    }

    struct Geodesic {
      int  length;
      Word word;  // a relative geodesic for the element
    };

    //! d(1, w) in the coned-off graph, with a geodesic word
    Geodesic relative_geodesic(std::string_view w) {
      auto const& G   = group();
      Word        key = _nf(w);
      if (key.empty()) {
        return {0, Word()};
      }
      auto dec = decompose(G, w);
      int  cap = 1;
      for (auto const& s : dec.syllables) {
        if (s.parabolic()) {
          cap = std::max<int>(cap, static_cast<int>(s.subword.size()));
        }
      }
      for (auto const& s : scan(G, key).syllables) {
        if (s.parabolic()) {
          cap = std::max<int>(cap, static_cast<int>(s.subword.size()));
        }
      }
      Word memo_key = key + '#' + std::to_string(cap);
      if (auto it = _memo.find(memo_key); it != _memo.end()) {
        return it->second;
      }
      Geodesic result{dec.relative_length, dec.word()};
      for (int d = 1; d < dec.relative_length; ++d) {
        int   a = (d + 1) / 2, b = d / 2;
        auto& B = relative_ball(cap, a);
        std::optional<Word> best;
        for (auto const& [hk, he] : B.elements()) {
          if (he.dist > a) {
            continue;
          }
          Word rest = _nf(inverse(he.word) + key);
          auto e    = B.find(rest);
          if (e == nullptr || e->dist > b) {
            continue;
          }
          Word cand = normalize(G, he.word + e->word);
          if (!best || G.shortlex_less(cand, *best)) {
            best = std::move(cand);
          }
        }
        if (best) {
          result = {d, *best};
          break;
        }
      }
      _memo.emplace(std::move(memo_key), result);
      return result;
    }

    int relative_length(std::string_view w) {
      return relative_geodesic(w).length;
    }

    //! The path spelled by w is geodesic in the coned-off graph: its syllable
    //! count equals the distance and every parabolic component is geodesic in
    //! its own subgroup.
    bool is_relative_geodesic(std::string_view w) {
      auto const& G  = group();
      auto        sc = scan(G, w);
      for (auto const& s : sc.syllables) {
        if (s.parabolic()
            && G.oracle(s.index).geodesic_form(s.subword).size() != s.subword.size()) {
          return false;
        }
      }
      if (!is_freely_reduced(w)) {
        return false;
      }
      return sc.relative_length == relative_length(w);
    }

    //! membership of the element in P_i, read off the canonical form
    bool in_parabolic(int i, std::string_view w) const {
      Word k = _nf(w);
      return k.empty() || group().parabolic_index(k) == i;
    }

   private:
    NormalForm const&                                 _nf;
    size_t                                            _budget;
    std::map<int, std::unique_ptr<RelativeBall>>      _balls;
    std::unordered_map<Word, Geodesic>                _memo;
  };

  //! Brute-force conjugacy: every g in the Cayley ball, in shortlex order.
  class BruteConjugacy {
   public:
    BruteConjugacy(NormalForm const& nf, int max_len, size_t budget = default_budget)
        : _nf(nf), _ball(nf, max_len, budget) {}

    BallIndex const& ball() const noexcept {
      return _ball;
    }

    //! canonical form of g u g^-1 -> shortest such g (first hit wins)
    std::unordered_map<Word, Word> const& conjugates_of(std::string_view u) {
      Word key = _nf(u);
      auto it  = _cache.find(key);
      if (it != _cache.end()) {
        return it->second;
      }
      std::unordered_map<Word, Word> m;
      for (auto const& e : _ball.entries()) {
        m.try_emplace(_nf(e.word + key + inverse(e.word)), e.word);
      }
      return _cache.emplace(key, std::move(m)).first->second;
    }

    std::optional<Word> conjugate(std::string_view u, std::string_view v) {
      auto const& m  = conjugates_of(u);
      auto        it = m.find(_nf(v));
      if (it == m.end()) {
        return std::nullopt;
      }
      return it->second;
    }

    void clear() {
      _cache.clear();
    }

   private:
    NormalForm const&                                           _nf;
    BallIndex                                                   _ball;
    std::unordered_map<Word, std::unordered_map<Word, Word>>    _cache;
  };

  //! shortest g with |g| <= max_len and g u g^-1 = v; shortlex tie-break
  inline std::optional<Word> brute_conjugate(NormalForm const& nf, std::string_view u,
                                             std::string_view v, int max_len,
                                             size_t budget = default_budget) {
    BallIndex B(nf, max_len, budget);
    Word      kv = nf(v);
    for (auto const& e : B.entries()) {
      if (nf(e.word + Word(u) + inverse(e.word)) == kv) {
        return e.word;
      }
    }
    return std::nullopt;
  }

  //! Exhaustive conjugator search for a fixed list of words, meeting in the
  //! middle: v = g1 g2 u g2^-1 g1^-1 iff g2 u g2^-1 = g1^-1 v g1, with both
  //! halves drawn from the ball of radius `half`. Finds the shortest
  //! conjugator of length <= 2 * half.
  class BruteClassIndex {
   public:
    BruteClassIndex(NormalForm const& nf, std::vector<Word> const& words, int half,
                    size_t budget = default_budget)
        : _nf(nf), _ball(nf, half, budget), _n(words.size()) {
      for (size_t w = 0; w < words.size(); ++w) {
        Word key = nf(words[w]);
        for (size_t e = 0; e < _ball.entries().size(); ++e) {
          auto const& g = _ball.entries()[e];
          auto [it, fresh] = _slot.try_emplace(nf(g.word + key + inverse(g.word)), _hits.size());
          if (fresh) {
            _hits.emplace_back();
          }
          auto& h = _hits[it->second];
          if (h.empty() || h.back().first != w) {
            h.emplace_back(w, e);  // entries come in shortlex order, so the first is shortest
          }
        }
      }
      // per word: which hit lists it appears in
      _of.resize(_n);
      for (size_t s = 0; s < _hits.size(); ++s) {
        for (auto const& [w, e] : _hits[s]) {
          _of[w].emplace_back(s, e);
        }
      }
    }

    size_t size() const noexcept {
      return _n;
    }

    //! shortest g with v = g u g^-1 (indices into the word list), for every v
    //! reachable within the radius; nullopt where none exists
    std::vector<std::optional<Word>> conjugators_from(size_t u) const {
      auto const&                      E = _ball.entries();
      std::vector<int>                 best(_n, -1);
      std::vector<std::pair<size_t, size_t>> how(_n);
      for (auto const& [s, eu] : _of[u]) {
        for (auto const& [v, ev] : _hits[s]) {
          int len = E[eu].length + E[ev].length;
          if (best[v] < 0 || len < best[v]) {
            best[v] = len;
            how[v]  = {eu, ev};
          }
        }
      }
      std::vector<std::optional<Word>> out(_n);
      for (size_t v = 0; v < _n; ++v) {
        if (best[v] >= 0) {
          // g2 = E[eu], g1^-1 = E[ev]
          out[v] = _nf(inverse(E[how[v].second].word) + E[how[v].first].word);
        }
      }
      return out;
    }

   private:
    NormalForm const&                                    _nf;
    BallIndex                                            _ball;
    size_t                                               _n;
    std::unordered_map<Word, size_t>                     _slot;
    std::vector<std::vector<std::pair<size_t, size_t>>>  _hits;  // (word, ball entry)
    std::vector<std::vector<std::pair<size_t, size_t>>>  _of;    // (slot, ball entry)
  };

  namespace detail {
    // vertices visited by the path spelled by w, one per syllable boundary
    inline std::vector<Word> path_vertices(Group const& G, Word const& base, Word const& w) {
      std::vector<Word> out{base};
      Word              cur = base;
      for (auto const& s : scan(G, w).syllables) {
        cur += s.subword;
        out.push_back(cur);
      }
      return out;
    }
  }  // namespace detail

  //! Smallest integer d such that every geodesic triangle with a vertex at 1
  //! and the others in the relative ball of radius r (components capped at r)
  //! is d-thin, using the stored geodesics. A lower bound on delta.
  inline int estimate_delta(MetricOracle& M, int r) {
    if (r <= 0) {
      return 0;
    }
    auto const&       G   = M.group();
    auto const&       nf  = M.normal_form();
    int               cap = std::max(1, r);
    auto&             B   = M.relative_ball(cap, r);
    std::vector<Word> pts;
    for (auto const& [k, e] : B.elements()) {
      pts.push_back(e.word);
    }
    std::sort(pts.begin(), pts.end(), [&](Word const& a, Word const& b) { return G.shortlex_less(a, b); });

    std::unordered_map<Word, int> dist_memo;
    auto dist = [&](Word const& p, Word const& q) {
      Word k = nf(inverse(p) + q);
      auto it = dist_memo.find(k);
      if (it != dist_memo.end()) {
        return it->second;
      }
      int d = M.relative_length(k);
      dist_memo.emplace(k, d);
      return d;
    };
    auto side = [&](Word const& from, Word const& to) {
      auto g = M.relative_geodesic(inverse(from) + to);
      return detail::path_vertices(G, from, g.word);
    };
    int delta = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      for (size_t j = i + 1; j < pts.size(); ++j) {
        auto s0 = side(Word(), pts[i]);
        auto s1 = side(pts[i], pts[j]);
        auto s2 = side(pts[j], Word());
        std::vector<std::vector<Word>> sides{s0, s1, s2};
        for (int a = 0; a < 3; ++a) {
          for (auto const& p : sides[a]) {
            int best = 1 << 20;
            for (int b = 0; b < 3; ++b) {
              if (b == a) {
                continue;
              }
              for (auto const& q : sides[b]) {
                best = std::min(best, dist(p, q));
              }
            }
            delta = std::max(delta, best);
          }
        }
      }
    }
    return delta;
  }

  struct QuasiGeodesicParams {
    double lambda  = 1.0;
    double epsilon = 0.0;
  };

  //! Largest Gamma-length of an isolated parabolic component seen over pairs
  //! of (lambda, epsilon)-quasi-geodesics without backtracking that share
  //! endpoints, among step sequences of length <= r with components capped at
  //! r. A lower bound on the BCP constant.
  inline int estimate_bcp(MetricOracle& M, QuasiGeodesicParams q, int r) {
    if (r <= 0) {
      return 0;
    }
    auto const& G  = M.group();
    auto const& nf = M.normal_form();
    if (G.m() == 0) {
      return 0;
    }
    std::vector<std::pair<Word, int>> moves;
    for (char c : G.presentation().hyperbolic) {
      moves.push_back({Word(1, c), 0});
      moves.push_back({Word(1, inverse_letter(c)), 0});
    }
    for (int i = 1; i <= G.m(); ++i) {
      for (auto& p : G.oracle(i).ball(r)) {
        if (!p.empty()) {
          moves.push_back({p, i});
        }
      }
    }
    struct Path {
      std::vector<int>  steps;
      std::vector<Word> verts;  // verts[j] after j steps
    };
    std::map<Word, std::vector<Path>> by_end;

    auto is_quasi = [&](Path const& p) {
      int n = static_cast<int>(p.steps.size());
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
          int d = M.relative_length(inverse(p.verts[i]) + p.verts[j]);
          if (j - i > q.lambda * d + q.epsilon + 1e-9) {
            return false;
          }
        }
      }
      return true;
    };
    auto no_backtrack = [&](Path const& p) {
      int n = static_cast<int>(p.steps.size());
      for (int i = 0; i < n; ++i) {
        int a = moves[p.steps[i]].second;
        if (a == 0) {
          continue;
        }
        for (int j = i + 1; j < n; ++j) {
          if (moves[p.steps[j]].second == a
              && M.in_parabolic(a, inverse(p.verts[i]) + p.verts[j])) {
            return false;
          }
        }
      }
      return true;
    };

    std::vector<Path> layer{Path{{}, {Word()}}};
    for (int len = 1; len <= r; ++len) {
      std::vector<Path> next;
      for (auto const& p : layer) {
        for (int mi = 0; mi < static_cast<int>(moves.size()); ++mi) {
          auto const& [m, idx] = moves[mi];
          if (!p.steps.empty()) {
            auto const& [pm, pidx] = moves[p.steps.back()];
            if (idx > 0 && idx == pidx) {
              continue;
            }
            if (idx == 0 && pidx == 0 && pm[0] == inverse_letter(m[0])) {
              continue;
            }
          }
          Path np = p;
          np.steps.push_back(mi);
          np.verts.push_back(p.verts.back() + m);
          if (!is_quasi(np) || !no_backtrack(np)) {
            continue;
          }
          next.push_back(np);
        }
      }
      for (auto const& p : next) {
        by_end[nf(p.verts.back())].push_back(p);
      }
      layer = std::move(next);
    }
    by_end[Word()].push_back(Path{{}, {Word()}});

    int best = 0;
    for (auto const& [end, paths] : by_end) {
      for (auto const& p : paths) {
        for (auto const& o : paths) {
          for (size_t i = 0; i < p.steps.size(); ++i) {
            int a = moves[p.steps[i]].second;
            if (a == 0) {
              continue;
            }
            bool connected = false;
            for (size_t j = 0; j < o.steps.size() && !connected; ++j) {
              if (moves[o.steps[j]].second == a
                  && M.in_parabolic(a, inverse(p.verts[i]) + o.verts[j])) {
                connected = true;
              }
            }
            if (!connected) {
              best = std::max<int>(best, static_cast<int>(moves[p.steps[i]].first.size()));
            }
          }
        }
      }
    }
    return best;
  }

}  // namespace relhyp
