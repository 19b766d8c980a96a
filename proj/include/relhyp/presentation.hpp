// Relative presentations: alphabet partition, parabolic descriptors, relators.
//
// Letters are single ASCII characters. A lowercase letter is a generator and
// the matching uppercase letter is its inverse.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relhyp {

  using Word = std::string;

  inline char inverse_letter(char c) noexcept {
    return std::islower(static_cast<unsigned char>(c))
               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
               : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }

  inline bool is_inverse_letter(char c) noexcept {
    return std::isupper(static_cast<unsigned char>(c));
  }

  inline char generator_of(char c) noexcept {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }

  inline Word inverse(std::string_view w) {
    Word out(w.rbegin(), w.rend());
    for (char& c : out) {
      c = inverse_letter(c);
    }
    return out;
  }

  enum class ParabolicKind { free_abelian, finite, free };

  inline std::string_view kind_name(ParabolicKind k) {
    switch (k) {
      case ParabolicKind::free_abelian: return "free_abelian";
      case ParabolicKind::finite: return "finite";
      case ParabolicKind::free: return "free";
    }
    return "?";
  }

  struct ParabolicDescriptor {
    int                           index = 0;  // 1..m
    ParabolicKind                 kind  = ParabolicKind::free_abelian;
    int                           rank  = 0;  // order of the group for finite
    std::vector<std::vector<int>> table;      // finite only
    std::string                   letters;    // S_i, lowercase

    bool operator==(ParabolicDescriptor const&) const = default;
  };

  struct RelativePresentation {
    std::string                      label;
    std::string                      hyperbolic;  // S_0, lowercase
    std::vector<ParabolicDescriptor> parabolics;
    std::vector<Word>                relators;
    //! raw key=value pairs of the "constants" line, in file order
    std::vector<std::pair<std::string, long long>> constants;

    bool operator==(RelativePresentation const&) const = default;

    std::string generators() const {
      std::string all = hyperbolic;
      for (auto const& d : parabolics) {
        all += d.letters;
      }
      return all;
    }
  };

  class presentation_error : public std::runtime_error {
   public:
    presentation_error(int line, std::string const& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                      : what),
          _line(line) {}
    int line() const noexcept {
      return _line;
    }

   private:
    int _line;
  };

  // index 0 is S_0, otherwise the parabolic index
  struct LetterClass {
    int  index = 0;
    bool hyperbolic() const noexcept {
      return index == 0;
    }
    bool operator==(LetterClass const&) const = default;
  };

  inline LetterClass classify_letter(RelativePresentation const& p, char g) {
    char lo = generator_of(g);
    if (p.hyperbolic.find(lo) != std::string::npos) {
      return {0};
    }
    for (auto const& d : p.parabolics) {
      if (d.letters.find(lo) != std::string::npos) {
        return {d.index};
      }
    }
    throw presentation_error(0, std::string("unknown letter '") + g + "'");
  }

  namespace detail {

    inline std::vector<std::string> split_ws(std::string_view s) {
      std::vector<std::string> out;
      std::istringstream       in{std::string(s)};
      std::string              tok;
      while (in >> tok) {
        out.push_back(tok);
      }
      return out;
    }

    inline long long to_int(std::string const& s, int line) {
      try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) {
          throw std::invalid_argument(s);
        }
        return v;
      } catch (std::exception const&) {
        throw presentation_error(line, "expected an integer, got '" + s + "'");
      }
    }

    // checks the table is a group table with 0 as identity
    inline void check_group_table(std::vector<std::vector<int>> const& t, int line) {
      int n = static_cast<int>(t.size());
      for (auto const& row : t) {
        if (static_cast<int>(row.size()) != n) {
          throw presentation_error(line, "finite table is not square");
        }
        for (int x : row) {
          if (x < 0 || x >= n) {
            throw presentation_error(line, "finite table entry out of range");
          }
        }
      }
      for (int i = 0; i < n; ++i) {
        if (t[0][i] != i || t[i][0] != i) {
          throw presentation_error(line, "element 0 of a finite table must be the identity");
        }
        std::vector<char> seen(n, 0);
        for (int j = 0; j < n; ++j) {
          if (seen[t[i][j]]++) {
            throw presentation_error(line, "finite table row is not a permutation");
          }
        }
      }
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < n; ++c) {
            if (t[t[a][b]][c] != t[a][t[b][c]]) {
              throw presentation_error(line, "finite table is not associative");
            }
          }
        }
      }
    }
  }  // namespace detail

  //! Parses the section-based presentation format; '#' starts a comment.
  inline RelativePresentation parse_presentation(std::string_view text) {
    RelativePresentation p;
    std::set<char>       used;
    bool                 have_group = false, have_hyp = false;
    int                  pending_table_rows = 0;
    int                  pending_letters_line = 0;
    int                  lineno = 0;

    auto add_letters = [&](std::vector<std::string> const& toks, size_t from, int line) {
      std::string out;
      for (size_t i = from; i < toks.size(); ++i) {
        auto const& t = toks[i];
        if (t.size() != 1 || !std::islower(static_cast<unsigned char>(t[0]))) {
          throw presentation_error(line, "generator '" + t + "' is not a single lowercase letter");
        }
        if (!used.insert(t[0]).second) {
          throw presentation_error(line, "duplicate generator '" + t + "'");
        }
        out += t[0];
      }
      return out;
    };

    std::istringstream in{std::string(text)};
    std::string        raw;
    while (std::getline(in, raw)) {
      ++lineno;
      if (auto h = raw.find('#'); h != std::string::npos) {
        raw.erase(h);
      }
      auto toks = detail::split_ws(raw);
      if (toks.empty()) {
        continue;
      }
      auto const& key = toks[0];
      if (pending_table_rows > 0 && key != "table") {
        throw presentation_error(lineno, "finite descriptor is missing table rows");
      }
      if (pending_letters_line != 0 && key != "letters") {
        throw presentation_error(lineno, "parabolic descriptor must be followed by a letters line");
      }
      if (key == "group") {
        if (have_group) {
          throw presentation_error(lineno, "repeated group line");
        }
        have_group = true;
        for (size_t i = 1; i < toks.size(); ++i) {
          p.label += (i > 1 ? " " : "") + toks[i];
        }
      } else if (key == "hyperbolic") {
        if (have_hyp) {
          throw presentation_error(lineno, "repeated hyperbolic line");
        }
        have_hyp     = true;
        p.hyperbolic = add_letters(toks, 1, lineno);
      } else if (key == "parabolic") {
        if (toks.size() != 3) {
          throw presentation_error(lineno, "expected: parabolic <kind> <param>");
        }
        ParabolicDescriptor d;
        d.index = static_cast<int>(p.parabolics.size()) + 1;
        if (toks[1] == "free_abelian") {
          d.kind = ParabolicKind::free_abelian;
        } else if (toks[1] == "finite") {
          d.kind = ParabolicKind::finite;
        } else if (toks[1] == "free") {
          d.kind = ParabolicKind::free;
        } else {
          throw presentation_error(lineno, "unknown parabolic kind '" + toks[1] + "'");
        }
        auto v = detail::to_int(toks[2], lineno);
        if (v < (d.kind == ParabolicKind::finite ? 2 : 1) || v > 26) {
          throw presentation_error(lineno, "parabolic parameter out of range");
        }
        d.rank = static_cast<int>(v);
        p.parabolics.push_back(d);
        pending_letters_line = lineno;
      } else if (key == "letters") {
        if (pending_letters_line == 0) {
          throw presentation_error(lineno, "letters line without a parabolic descriptor");
        }
        auto& d   = p.parabolics.back();
        d.letters = add_letters(toks, 1, lineno);
        int want  = d.kind == ParabolicKind::finite ? d.rank - 1 : d.rank;
        if (static_cast<int>(d.letters.size()) != want) {
          throw presentation_error(lineno, "descriptor expects " + std::to_string(want)
                                               + " letters, got "
                                               + std::to_string(d.letters.size()));
        }
        pending_letters_line = 0;
        if (d.kind == ParabolicKind::finite) {
          pending_table_rows = d.rank;
        }
      } else if (key == "table") {
        if (pending_table_rows == 0) {
          throw presentation_error(lineno, "table row without a finite descriptor");
        }
        auto&            d = p.parabolics.back();
        std::vector<int> row;
        for (size_t i = 1; i < toks.size(); ++i) {
          row.push_back(static_cast<int>(detail::to_int(toks[i], lineno)));
        }
        d.table.push_back(std::move(row));
        if (--pending_table_rows == 0) {
          detail::check_group_table(d.table, lineno);
        }
      } else if (key == "relator") {
        if (toks.size() != 2) {
          throw presentation_error(lineno, "expected: relator <word>");
        }
        for (char c : toks[1]) {
          if (!std::isalpha(static_cast<unsigned char>(c)) || !used.count(generator_of(c))) {
            throw presentation_error(lineno, std::string("relator uses unknown letter '") + c + "'");
          }
        }
        p.relators.push_back(toks[1]);
      } else if (key == "constants") {
        for (size_t i = 1; i < toks.size(); ++i) {
          auto eq = toks[i].find('=');
          if (eq == std::string::npos || eq == 0) {
            throw presentation_error(lineno, "malformed constant '" + toks[i] + "'");
          }
          p.constants.emplace_back(toks[i].substr(0, eq),
                                   detail::to_int(toks[i].substr(eq + 1), lineno));
        }
      } else {
        throw presentation_error(lineno, "unknown directive '" + key + "'");
      }
    }
    if (pending_letters_line != 0) {
      throw presentation_error(pending_letters_line, "parabolic descriptor without letters");
    }
    if (pending_table_rows > 0) {
      throw presentation_error(lineno, "finite descriptor is missing table rows");
    }
    if (!have_group) {
      throw presentation_error(0, "missing group line");
    }
    // relators must be freely reduced and nonempty
    for (auto const& r : p.relators) {
      if (r.empty()) {
        throw presentation_error(0, "empty relator");
      }
      for (size_t i = 0; i + 1 < r.size(); ++i) {
        if (r[i + 1] == inverse_letter(r[i])) {
          throw presentation_error(0, "relator '" + r + "' is not freely reduced");
        }
      }
    }
    return p;
  }

  inline std::string serialize(RelativePresentation const& p) {
    std::ostringstream out;
    auto               letters = [&](std::string const& s) {
      for (char c : s) {
        out << ' ' << c;
      }
    };
    out << "group " << p.label << '\n';
    out << "hyperbolic";
    letters(p.hyperbolic);
    out << '\n';
    for (auto const& d : p.parabolics) {
      out << "parabolic " << kind_name(d.kind) << ' ' << d.rank << '\n';
      out << "letters";
      letters(d.letters);
      out << '\n';
      for (auto const& row : d.table) {
        out << "table";
        for (int x : row) {
          out << ' ' << x;
        }
        out << '\n';
      }
    }
    for (auto const& r : p.relators) {
      out << "relator " << r << '\n';
    }
    if (!p.constants.empty()) {
      out << "constants";
      for (auto const& [k, v] : p.constants) {
        out << ' ' << k << '=' << v;
      }
      out << '\n';
    }
    return out.str();
  }

  inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

  // hash of the group itself; the constants line is excluded
  inline std::uint64_t presentation_hash(RelativePresentation const& p) {
    auto q = p;
    q.constants.clear();
    return fnv1a(serialize(q));
  }

}  // namespace relhyp
