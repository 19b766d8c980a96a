// Per-subgroup solvers for the parabolic subgroups P_i, and the Group object
// that bundles a presentation with its oracles and letter order.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "presentation.hpp"

namespace relhyp {

  class oracle_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  //! Interface for a parabolic subgroup solver. Words handed in must use only
  //! the descriptor's letters (either case).
  class ParabolicOracle {
   public:
    explicit ParabolicOracle(ParabolicDescriptor d) : _d(std::move(d)) {
      _rank.fill(-1);
      for (size_t i = 0; i < _d.letters.size(); ++i) {
        _rank[static_cast<unsigned char>(_d.letters[i])]                 = 2 * static_cast<int>(i);
        _rank[static_cast<unsigned char>(inverse_letter(_d.letters[i]))] = 2 * static_cast<int>(i) + 1;
      }
    }
    virtual ~ParabolicOracle() = default;

    ParabolicDescriptor const& descriptor() const noexcept {
      return _d;
    }

    bool owns(char c) const noexcept {
      return _rank[static_cast<unsigned char>(c)] >= 0;
    }

    virtual bool trivial(std::string_view w) const {
      return geodesic_form(w).empty();
    }
    virtual Word                geodesic_form(std::string_view w) const            = 0;
    //! t with t p t^-1 = q in P_i
    virtual std::optional<Word> conjugate(std::string_view p, std::string_view q) const = 0;
    //! geodesic shortlex representatives of all elements of length <= r
    virtual std::vector<Word>   ball(int r) const                                  = 0;
    virtual bool                abelian() const                                    = 0;

    bool shortlex_less(std::string_view a, std::string_view b) const {
      if (a.size() != b.size()) {
        return a.size() < b.size();
      }
      for (size_t i = 0; i < a.size(); ++i) {
        int x = rank(a[i]), y = rank(b[i]);
        if (x != y) {
          return x < y;
        }
      }
      return false;
    }

   protected:
    int rank(char c) const {
      int r = _rank[static_cast<unsigned char>(c)];
      if (r < 0) {
        throw oracle_error(std::string("letter '") + c + "' is foreign to parabolic "
                           + std::to_string(_d.index));
      }
      return r;
    }
    void check(std::string_view w) const {
      for (char c : w) {
        rank(c);
      }
    }
    void sort_shortlex(std::vector<Word>& v) const {
      std::sort(v.begin(), v.end(),
                [this](Word const& a, Word const& b) { return shortlex_less(a, b); });
    }

    ParabolicDescriptor     _d;
    std::array<int, 128>    _rank;
  };

  // Z^n; normal form is the exponent vector written in letter order
  class FreeAbelianOracle final : public ParabolicOracle {
   public:
    using ParabolicOracle::ParabolicOracle;

    std::vector<long> exponents(std::string_view w) const {
      std::vector<long> e(_d.letters.size(), 0);
      for (char c : w) {
        int r = rank(c);
        e[r / 2] += (r % 2) ? -1 : 1;
      }
      return e;
    }

    Word from_exponents(std::vector<long> const& e) const {
      Word out;
      for (size_t i = 0; i < e.size(); ++i) {
        char c = e[i] >= 0 ? _d.letters[i] : inverse_letter(_d.letters[i]);
        out.append(static_cast<size_t>(std::abs(e[i])), c);
      }
      return out;
    }

    Word geodesic_form(std::string_view w) const override {
      return from_exponents(exponents(w));
    }

    std::optional<Word> conjugate(std::string_view p, std::string_view q) const override {
      if (exponents(p) == exponents(q)) {
        return Word();
      }
      return std::nullopt;
    }

    std::vector<Word> ball(int r) const override {
      std::vector<Word> out;
      std::vector<long> e(_d.letters.size(), 0);
      // enumerate vectors with |e|_1 <= r
      auto rec = [&](auto&& self, size_t i, long budget) -> void {
        if (i == e.size()) {
          out.push_back(from_exponents(e));
          return;
        }
        for (long x = -budget; x <= budget; ++x) {
          e[i] = x;
          self(self, i + 1, budget - std::abs(x));
        }
        e[i] = 0;
      };
      rec(rec, 0, r);
      sort_shortlex(out);
      return out;
    }

    bool abelian() const override {
      return true;
    }
  };

  // free group on the descriptor letters
  class FreeOracle final : public ParabolicOracle {
   public:
    using ParabolicOracle::ParabolicOracle;

    Word geodesic_form(std::string_view w) const override {
      check(w);
      Word out;
      for (char c : w) {
        if (!out.empty() && out.back() == inverse_letter(c)) {
          out.pop_back();
        } else {
          out.push_back(c);
        }
      }
      return out;
    }

    std::optional<Word> conjugate(std::string_view p, std::string_view q) const override {
      auto [pc, pa] = cyclic_core(geodesic_form(p));
      auto [qc, qa] = cyclic_core(geodesic_form(q));
      if (pc.size() != qc.size()) {
        return std::nullopt;
      }
      // p = pa pc pa^-1, q = qa qc qa^-1 and qc = r^-1 pc r for a prefix r
      std::optional<Word> best;
      size_t              n = std::max<size_t>(pc.size(), 1);
      for (size_t j = 0; j < n; ++j) {
        Word rot = pc.substr(j) + pc.substr(0, j);
        if (rot != qc) {
          continue;
        }
        // pc = u v and v u = u^-1 pc u = v pc v^-1, so both u^-1 and v work
        for (Word t : {geodesic_form(qa + inverse(pc.substr(0, j)) + inverse(pa)),
                       geodesic_form(qa + pc.substr(j) + inverse(pa))}) {
          if (!best || shortlex_less(t, *best)) {
            best = t;
          }
        }
      }
      return best;
    }

    std::vector<Word> ball(int r) const override {
      std::vector<Word> out{Word()};
      std::vector<Word> layer{Word()};
      std::string       all;
      for (char c : _d.letters) {
        all += c;
        all += inverse_letter(c);
      }
      for (int len = 1; len <= r; ++len) {
        std::vector<Word> next;
        for (auto const& w : layer) {
          for (char c : all) {
            if (!w.empty() && w.back() == inverse_letter(c)) {
              continue;
            }
            next.push_back(w + c);
          }
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
      }
      sort_shortlex(out);
      return out;
    }

    bool abelian() const override {
      return _d.letters.size() == 1;
    }

   private:
    static std::pair<Word, Word> cyclic_core(Word w) {
      size_t i = 0, j = w.size();
      while (j > i + 1 && w[j - 1] == inverse_letter(w[i])) {
        ++i;
        --j;
      }
      return {w.substr(i, j - i), w.substr(0, i)};
    }
  };

  // finite group given by its multiplication table; letter i names element i+1
  class FiniteOracle final : public ParabolicOracle {
   public:
    explicit FiniteOracle(ParabolicDescriptor d) : ParabolicOracle(std::move(d)) {
      int n = _d.rank;
      _inv.assign(n, 0);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          if (_d.table[a][b] == 0) {
            _inv[a] = b;
          }
        }
      }
      _nf.assign(n, Word());
      for (int e = 1; e < n; ++e) {
        Word direct(1, _d.letters[e - 1]);
        Word via(1, inverse_letter(_d.letters[_inv[e] - 1]));
        _nf[e] = shortlex_less(via, direct) ? via : direct;
      }
    }

    int element(std::string_view w) const {
      int x = 0;
      for (char c : w) {
        int r = rank(c);
        int e = r / 2 + 1;
        x     = _d.table[x][(r % 2) ? _inv[e] : e];
      }
      return x;
    }

    Word const& form_of(int e) const {
      return _nf[e];
    }

    Word geodesic_form(std::string_view w) const override {
      return _nf[element(w)];
    }

    std::optional<Word> conjugate(std::string_view p, std::string_view q) const override {
      int                 a = element(p), b = element(q);
      std::optional<Word> best;
      for (int t = 0; t < _d.rank; ++t) {
        if (_d.table[_d.table[t][a]][_inv[t]] == b) {
          if (!best || shortlex_less(_nf[t], *best)) {
            best = _nf[t];
          }
        }
      }
      return best;
    }

    std::vector<Word> ball(int r) const override {
      std::vector<Word> out{Word()};
      if (r >= 1) {
        out.insert(out.end(), _nf.begin() + 1, _nf.end());
      }
      sort_shortlex(out);
      return out;
    }

    bool abelian() const override {
      for (int a = 0; a < _d.rank; ++a) {
        for (int b = 0; b < _d.rank; ++b) {
          if (_d.table[a][b] != _d.table[b][a]) {
            return false;
          }
        }
      }
      return true;
    }

   private:
    std::vector<int>  _inv;
    std::vector<Word> _nf;
  };

  inline std::unique_ptr<ParabolicOracle> make_oracle(ParabolicDescriptor const& d) {
    switch (d.kind) {
      case ParabolicKind::free_abelian: return std::make_unique<FreeAbelianOracle>(d);
      case ParabolicKind::finite: return std::make_unique<FiniteOracle>(d);
      case ParabolicKind::free: return std::make_unique<FreeOracle>(d);
    }
    throw oracle_error("unknown parabolic kind");
  }

  // thin wrappers matching the operation names
  inline bool par_trivial(ParabolicOracle const& o, std::string_view w) {
    return o.trivial(w);
  }
  inline Word par_geodesic_form(ParabolicOracle const& o, std::string_view w) {
    return o.geodesic_form(w);
  }
  inline std::optional<Word> par_conjugate(ParabolicOracle const& o, std::string_view p,
                                           std::string_view q) {
    return o.conjugate(p, q);
  }
  inline std::vector<Word> par_ball(ParabolicOracle const& o, int r) {
    return o.ball(r);
  }

  //! A presentation together with its oracles and the global letter order
  //! (declaration order, each generator before its inverse).
  class Group {
   public:
    explicit Group(RelativePresentation p) : _p(std::move(p)) {
      _class.fill(-1);
      _rank.fill(-1);
      int r = 0;
      for (char c : _p.hyperbolic) {
        _class[static_cast<unsigned char>(c)] = _class[static_cast<unsigned char>(inverse_letter(c))] = 0;
      }
      for (auto const& d : _p.parabolics) {
        for (char c : d.letters) {
          _class[static_cast<unsigned char>(c)] = _class[static_cast<unsigned char>(inverse_letter(c))] = d.index;
        }
        _oracles.push_back(make_oracle(d));
      }
      for (char c : _p.generators()) {
        _rank[static_cast<unsigned char>(c)]                 = r++;
        _rank[static_cast<unsigned char>(inverse_letter(c))] = r++;
        _alphabet += c;
        _alphabet += inverse_letter(c);
      }
    }

    Group(Group const&)            = delete;
    Group& operator=(Group const&) = delete;

    RelativePresentation const& presentation() const noexcept {
      return _p;
    }
    //! all letters in order: a A b B ...
    std::string const& alphabet() const noexcept {
      return _alphabet;
    }
    int m() const noexcept {
      return static_cast<int>(_oracles.size());
    }
    ParabolicOracle const& oracle(int i) const {
      return *_oracles.at(static_cast<size_t>(i - 1));
    }
    bool has_relators() const noexcept {
      return !_p.relators.empty();
    }

    //! -1 for unknown letters
    int letter_class(char c) const noexcept {
      return _class[static_cast<unsigned char>(c)];
    }
    bool knows(std::string_view w) const noexcept {
      for (char c : w) {
        if (letter_class(c) < 0) {
          return false;
        }
      }
      return true;
    }
    void check(std::string_view w) const {
      for (char c : w) {
        if (letter_class(c) < 0) {
          throw presentation_error(0, std::string("unknown letter '") + c + "'");
        }
      }
    }
    int rank(char c) const noexcept {
      return _rank[static_cast<unsigned char>(c)];
    }
    bool shortlex_less(std::string_view a, std::string_view b) const noexcept {
      if (a.size() != b.size()) {
        return a.size() < b.size();
      }
      for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
          return rank(a[i]) < rank(b[i]);
        }
      }
      return false;
    }
    //! index of the parabolic subgroup containing every letter of w, else 0
    int parabolic_index(std::string_view w) const noexcept {
      if (w.empty()) {
        return 0;
      }
      int i = letter_class(w[0]);
      for (char c : w) {
        if (letter_class(c) != i) {
          return 0;
        }
      }
      return i > 0 ? i : 0;
    }

   private:
    RelativePresentation                          _p;
    std::vector<std::unique_ptr<ParabolicOracle>> _oracles;
    std::array<int, 128>                          _class;
    std::array<int, 128>                          _rank;
    std::string                                   _alphabet;
  };

}  // namespace relhyp
