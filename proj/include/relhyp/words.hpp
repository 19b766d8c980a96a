// Word algebra over S: reduction, rotations, syllable decomposition.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parabolic.hpp"

namespace relhyp {

  inline Word free_reduce(std::string_view raw) {
    Word out;
    out.reserve(raw.size());
    for (char c : raw) {
      if (!out.empty() && out.back() == inverse_letter(c)) {
        out.pop_back();
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  inline bool is_freely_reduced(std::string_view w) {
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i + 1] == inverse_letter(w[i])) {
        return false;
      }
    }
    return true;
  }

  inline bool is_cyclically_reduced(std::string_view w) {
    return is_freely_reduced(w) && (w.size() < 2 || w.back() != inverse_letter(w.front()));
  }

  //! w = conjugator . core . conjugator^-1 after free reduction
  struct CyclicReduction {
    Word core;
    Word conjugator;
  };

  // Outer inverse pairs are peeled before reducing the middle, so "abBA"
  // reports conjugator "ab" rather than the empty word.
  inline CyclicReduction cyclic_reduce(std::string_view w) {
    Word conj;
    Word r(w);
    while (true) {
      size_t i = 0, j = r.size();
      while (j >= i + 2 && r[j - 1] == inverse_letter(r[i])) {
        ++i;
        --j;
      }
      conj += r.substr(0, i);
      Word mid = free_reduce(r.substr(i, j - i));
      if (mid.size() == j - i) {
        return {mid, free_reduce(conj)};
      }
      r = std::move(mid);
    }
  }

  class word_error : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
  };

  //! Rotation j is w[j..] w[..j], which equals (w[..j])^-1 w w[..j].
  inline std::vector<Word> cyclic_permutations(std::string_view w) {
    if (!is_cyclically_reduced(w)) {
      throw word_error("cyclic_permutations: word '" + std::string(w) + "' is not cyclically reduced");
    }
    std::vector<Word> out;
    for (size_t j = 0; j < std::max<size_t>(w.size(), 1); ++j) {
      out.push_back(std::string(w.substr(j)) + std::string(w.substr(0, j)));
    }
    return out;
  }

  struct Syllable {
    int    index = 0;  // 0 hyperbolic, else parabolic index
    Word   subword;
    size_t start = 0;

    bool parabolic() const noexcept {
      return index > 0;
    }
    bool operator==(Syllable const&) const = default;
  };

  struct SyllableDecomposition {
    std::vector<Syllable> syllables;
    int                   relative_length = 0;

    Word word() const {
      Word w;
      for (auto const& s : syllables) {
        w += s.subword;
      }
      return w;
    }
  };

  //! Splits w into hyperbolic letters and maximal parabolic runs, verbatim.
  inline SyllableDecomposition scan(Group const& G, std::string_view w) {
    SyllableDecomposition d;
    size_t                i = 0;
    while (i < w.size()) {
      int c = G.letter_class(w[i]);
      if (c < 0) {
        G.check(w.substr(i, 1));
      }
      size_t j = i + 1;
      if (c > 0) {
        while (j < w.size() && G.letter_class(w[j]) == c) {
          ++j;
        }
      }
      d.syllables.push_back({c, Word(w.substr(i, j - i)), i});
      i = j;
    }
    d.relative_length = static_cast<int>(d.syllables.size());
    return d;
  }

  //! Free reduction plus geodesic normalization of every parabolic syllable.
  //! A syllable that normalizes to the empty word is dropped, which can bring
  //! two same-index syllables or a pair x x^-1 together; both are handled as
  //! the scan proceeds, so the result is stable under another pass.
  inline SyllableDecomposition decompose(Group const& G, std::string_view w) {
    G.check(w);
    std::vector<Syllable> st;
    bool                  open = false;  // top syllable still accepting letters

    auto close = [&] {
      if (!open) {
        return;
      }
      open    = false;
      auto& t = st.back();
      t.subword = G.oracle(t.index).geodesic_form(t.subword);
      if (t.subword.empty()) {
        st.pop_back();
      }
    };

    for (char c : w) {
      int k = G.letter_class(c);
      if (k == 0) {
        close();
        if (!st.empty() && st.back().index == 0 && st.back().subword[0] == inverse_letter(c)) {
          st.pop_back();
        } else {
          st.push_back({0, Word(1, c), 0});
        }
      } else {
        if (!st.empty() && st.back().index == k) {
          st.back().subword += c;
          open = true;
        } else {
          close();
          if (!st.empty() && st.back().index == k) {
            st.back().subword += c;
          } else {
            st.push_back({k, Word(1, c), 0});
          }
          open = true;
        }
      }
    }
    close();
    SyllableDecomposition d;
    size_t                pos = 0;
    for (auto& s : st) {
      s.start = pos;
      pos += s.subword.size();
    }
    d.syllables       = std::move(st);
    d.relative_length = static_cast<int>(d.syllables.size());
    return d;
  }

  //! the word of decompose(G, w)
  inline Word normalize(Group const& G, std::string_view w) {
    return decompose(G, w).word();
  }

  inline int relative_length_of_word(Group const& G, std::string_view w) {
    return scan(G, w).relative_length;
  }

}  // namespace relhyp
