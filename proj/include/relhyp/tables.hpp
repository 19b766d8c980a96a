// Constants profile, the precomputed lists, and their on-disk cache.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "metric_oracle.hpp"
#include "shortening.hpp"

namespace relhyp {

  class profile_error : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
  };

  using ConstantPairs = std::vector<std::pair<std::string, long long>>;

  struct ConstantsProfile {
    int       delta  = 0;
    int       c2     = 2;
    int       c3     = 2;
    int       c7     = 2;
    long long budget = static_cast<long long>(default_budget);
    int       nlin   = 1;
    int       mlin   = 0;
    // overrides of formula-derived values; -1 keeps the formula
    int threshold_override = -1;
    int l4_override        = -1;
    int l6_override        = -1;
    int l8_override        = -1;
    // radius of single conjugation steps when closing conjugacy classes
    int  conj_radius = 2;
    bool fallback    = true;

    int k() const noexcept {
      return std::max(8 * delta + 1, 2);
    }
    int threshold() const noexcept {
      return threshold_override >= 0 ? threshold_override : 86 * delta + 3;
    }
    int l4_radius() const noexcept {
      return l4_override >= 0 ? l4_override : 7 * delta + 1;
    }
    int l5_radius() const noexcept {
      return 16 * delta + 1;
    }
    int l6_radius() const noexcept {
      return l6_override >= 0 ? l6_override : 2 * (274 * delta + 9);
    }
    int l8_radius() const noexcept {
      return l8_override >= 0 ? l8_override : 86 * delta + 3;
    }
    int l9_length() const noexcept {
      return 4 * delta * c3;
    }
    int bcc_radius() const noexcept {
      return 4 * delta;
    }

    void set(std::string const& key, long long v) {
      auto nonneg = [&](long long x) {
        if (x < 0) {
          throw profile_error("constant '" + key + "' must be nonnegative");
        }
        return static_cast<int>(x);
      };
      if (key == "delta") {
        delta = nonneg(v);
      } else if (key == "c2") {
        c2 = nonneg(v);
      } else if (key == "c3") {
        c3 = nonneg(v);
      } else if (key == "c7") {
        c7 = nonneg(v);
      } else if (key == "budget") {
        nonneg(v);
        budget = v;
      } else if (key == "nlin") {
        nlin = nonneg(v);
      } else if (key == "mlin") {
        mlin = nonneg(v);
      } else if (key == "threshold") {
        threshold_override = nonneg(v);
      } else if (key == "l4") {
        l4_override = nonneg(v);
      } else if (key == "l6") {
        l6_override = nonneg(v);
      } else if (key == "l8") {
        l8_override = nonneg(v);
      } else if (key == "conjr") {
        conj_radius = nonneg(v);
      } else if (key == "fallback") {
        fallback = v != 0;
      } else {
        throw profile_error("unknown constant '" + key + "'");
      }
    }

    static ConstantsProfile from(ConstantPairs const& kv,
                                 ConstantsProfile base) {
      for (auto const& [k, v] : kv) {
        base.set(k, v);
      }
      if (base.c2 > base.c3) {
        throw profile_error("profile needs c2 <= c3");
      }
      return base;
    }

    static ConstantsProfile from(ConstantPairs const& kv) {
      return from(kv, ConstantsProfile());
    }

    static ConstantsProfile from(RelativePresentation const& p) {
      return from(p.constants);
    }

    std::string serialize() const {
      std::ostringstream o;
      o << "delta=" << delta << " c2=" << c2 << " c3=" << c3 << " c7=" << c7
        << " budget=" << budget << " nlin=" << nlin << " mlin=" << mlin;
      if (threshold_override >= 0) o << " threshold=" << threshold_override;
      if (l4_override >= 0) o << " l4=" << l4_override;
      if (l6_override >= 0) o << " l6=" << l6_override;
      if (l8_override >= 0) o << " l8=" << l8_override;
      o << " conjr=" << conj_radius << " fallback=" << (fallback ? 1 : 0);
      return o.str();
    }

    std::uint64_t hash() const {
      return fnv1a(serialize());
    }
  };

  struct FilteredBall {
    int                           rel_radius = 0;
    int                           comp_bound = 0;
    std::vector<Word>             members;  // geodesic words, shortlex order
    std::unordered_map<Word, size_t> index;  // canonical form -> member

    bool contains(Word const& canon) const {
      return index.count(canon) != 0;
    }
    size_t size() const {
      return members.size();
    }
  };

  inline FilteredBall enumerate_filtered_ball(MetricOracle& M, int r1, int r2) {
    auto const& G = M.group();
    if (M.budget() == 0) {
      throw budget_error("element budget is zero");
    }
    RelativeBall B(M.normal_form(), r2, M.budget());
    B.grow_to(r1);
    FilteredBall F;
    F.rel_radius = r1;
    F.comp_bound = r2;
    std::vector<std::pair<Word, Word>> rows;
    for (auto const& [k, e] : B.elements()) {
      rows.emplace_back(e.word, k);
    }
    std::sort(rows.begin(), rows.end(),
              [&](auto const& a, auto const& b) { return G.shortlex_less(a.first, b.first); });
    for (auto& [w, k] : rows) {
      F.index.emplace(k, F.members.size());
      F.members.push_back(w);
    }
    return F;
  }

  //! One member of L8 with its conjugacy class:
  //! to_root . word . to_root^-1 is the root of the class.
  struct ClassEntry {
    Word word;
    int  cls = -1;
    Word to_root;
  };

  struct PrecomputedTables {
    std::uint64_t    presentation_hash = 0;
    std::uint64_t    profile_hash      = 0;
    ConstantsProfile profile;

    std::vector<Word> l1, l2, l3;
    FilteredBall      l4, l5, l6;
    bool              l6_skipped = false;
    std::vector<Word> l8, l9;

    // conjugacy classes inside L8; the pair lists L88, L11, L10 and their
    // conjugators L12, L7 are read off these rather than stored pairwise
    std::unordered_map<Word, ClassEntry> classes;  // canonical form -> entry
    std::vector<Word>                    class_root;
    std::vector<Word>                    class_parabolic;  // canonical key of an L3 member
    std::vector<char>                    class_has_parabolic;

    std::vector<std::vector<Word>> bcc;
    std::vector<int>               k_i;
    long long                      k_hyp_4delta = 0;
    long long                      k_4delta     = 0;
    std::vector<Word>              trivial_loops;

    ReplacementTable replacements;  // geodesic words of L5

    bool in_l8(Word const& canon) const {
      return classes.count(canon) != 0;
    }

    //! g with g w1 g^-1 = w2 when (w1, w2) is in L88
    std::optional<Word> l88(Word const& c1, Word const& c2) const {
      auto a = classes.find(c1), b = classes.find(c2);
      if (a == classes.end() || b == classes.end() || a->second.cls != b->second.cls) {
        return std::nullopt;
      }
      return free_reduce(inverse(b->second.to_root) + a->second.to_root);
    }

    //! (q, c) with q in L3 and q = c^-1 w c, when w is in L10
    std::optional<std::pair<Word, Word>> l10(Word const& canon) const {
      auto a = classes.find(canon);
      if (a == classes.end() || !class_has_parabolic[a->second.cls]) {
        return std::nullopt;
      }
      auto const& q = classes.at(class_parabolic[a->second.cls]);
      return std::make_pair(q.word, free_reduce(inverse(a->second.to_root) + q.to_root));
    }

    size_t l10_size() const {
      size_t n = 0;
      for (auto const& [k, e] : classes) {
        n += class_has_parabolic[e.cls] ? 1 : 0;
      }
      return n;
    }

    //! pairs of L11 (both in L3), counted
    size_t l11_size(NormalForm const& nf) const {
      std::map<int, size_t> per;
      for (auto const& w : l3) {
        per[classes.at(nf(w)).cls]++;
      }
      size_t n = 0;
      for (auto const& [c, k] : per) {
        n += k * k;
      }
      return n;
    }

    size_t l88_size() const {
      std::map<int, size_t> per;
      for (auto const& [k, e] : classes) {
        per[e.cls]++;
      }
      size_t n = 0;
      for (auto const& [c, k] : per) {
        n += k * k;
      }
      return n;
    }
  };

  namespace detail {
    inline std::vector<Word> sorted_union(Group const& G, std::vector<std::vector<Word>> parts) {
      std::vector<Word> out;
      for (auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
      }
      std::sort(out.begin(), out.end(), [&](Word const& a, Word const& b) { return G.shortlex_less(a, b); });
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }

    inline std::vector<Word> parabolic_list(Group const& G, int r) {
      std::vector<std::vector<Word>> parts{{Word()}};
      for (int i = 1; i <= G.m(); ++i) {
        parts.push_back(G.oracle(i).ball(r));
      }
      return sorted_union(G, std::move(parts));
    }

    inline long long ipow(long long b, int e) {
      long long r = 1;
      while (e-- > 0) {
        r *= b;
      }
      return r;
    }
  }  // namespace detail

  //! K_i of each parabolic: the longest shortest conjugator needed between
  //! P_i-conjugate elements of length <= C(3)
  inline std::vector<int> compute_k_i(Group const& G, int c3) {
    std::vector<int> out;
    for (int i = 1; i <= G.m(); ++i) {
      auto const& o  = G.oracle(i);
      auto        Bi = o.ball(c3);
      int         k  = 0;
      for (auto const& t1 : Bi) {
        for (auto const& t2 : Bi) {
          if (auto t = o.conjugate(t2, t1)) {
            k = std::max<int>(k, static_cast<int>(t->size()));
          }
        }
      }
      out.push_back(k);
    }
    return out;
  }

  //! Closes L8 under conjugation by short elements and by rotations.
  inline void close_classes(MetricOracle& M, PrecomputedTables& T) {
    auto const& nf = M.normal_form();
    BallIndex   steps(nf, T.profile.conj_radius, M.budget());
    std::unordered_map<Word, Word> node;  // canon -> word
    for (auto const& w : T.l8) {
      node.emplace(nf(w), w);
    }
    for (auto const& w : T.l8) {
      Word k0 = nf(w);
      if (T.classes.count(k0)) {
        continue;
      }
      int id = static_cast<int>(T.class_root.size());
      T.class_root.push_back(w);
      T.classes.emplace(k0, ClassEntry{w, id, Word()});
      std::deque<Word> queue{k0};
      while (!queue.empty()) {
        Word kz = queue.front();
        queue.pop_front();
        ClassEntry const z = T.classes.at(kz);
        std::vector<Word> conj;
        for (auto const& e : steps.entries()) {
          if (!e.word.empty()) {
            conj.push_back(e.word);
          }
        }
        for (size_t j = 1; j < z.word.size(); ++j) {
          conj.push_back(inverse(z.word.substr(0, j)));
        }
        for (auto const& s : conj) {
          Word k = nf(s + z.word + inverse(s));
          auto it = node.find(k);
          if (it == node.end() || T.classes.count(k)) {
            continue;
          }
          T.classes.emplace(k, ClassEntry{it->second, id, free_reduce(z.to_root + inverse(s))});
          queue.push_back(k);
        }
      }
    }
    size_t n = T.class_root.size();
    T.class_parabolic.assign(n, Word());
    T.class_has_parabolic.assign(n, 0);
    for (auto const& w : T.l3) {
      Word k  = nf(w);
      int  id = T.classes.at(k).cls;
      if (!T.class_has_parabolic[id]) {
        T.class_has_parabolic[id] = 1;
        T.class_parabolic[id]     = k;
      }
    }
  }

  inline std::vector<Word> find_trivial_loops(Shortener& S, int max_rel, int cap) {
    std::vector<Word> out;
    if (max_rel <= 0) {
      return out;
    }
    auto const&                       G  = S.group();
    auto const&                       nf = S.metric().normal_form();
    std::vector<std::pair<Word, int>> moves;
    for (char c : G.presentation().hyperbolic) {
      moves.push_back({Word(1, c), 0});
      moves.push_back({Word(1, inverse_letter(c)), 0});
    }
    for (int i = 1; i <= G.m(); ++i) {
      for (auto& p : G.oracle(i).ball(cap)) {
        if (!p.empty()) {
          moves.push_back({p, i});
        }
      }
    }
    auto rec = [&](auto&& self, Word const& w, int last, int depth) -> void {
      if (!w.empty() && nf(w).empty() && S.is_local_geodesic(w)) {
        out.push_back(w);
      }
      if (depth == max_rel) {
        return;
      }
      for (auto const& [m, idx] : moves) {
        if ((idx > 0 && idx == last)
            || (idx == 0 && last == 0 && w.back() == inverse_letter(m[0]))) {
          continue;
        }
        self(self, w + m, idx, depth + 1);
      }
    };
    rec(rec, Word(), -1, 0);
    return out;
  }

  //! Builds every list for the profile. Budget overflow in a list on the
  //! decision path is an error naming the list; L6 is skipped instead.
  inline PrecomputedTables precompute(MetricOracle& M, ConstantsProfile const& c) {
    auto const&       G  = M.group();
    auto const&       nf = M.normal_form();
    PrecomputedTables T;
    T.presentation_hash = presentation_hash(G.presentation());
    T.profile_hash      = c.hash();
    T.profile           = c;
    if (c.budget <= 0) {
      throw budget_error("element budget is zero");
    }
    auto named = [](char const* name, auto&& f) {
      try {
        return f();
      } catch (budget_error const& e) {
        throw budget_error(std::string(name) + ": " + e.what());
      }
    };
    T.l1 = detail::parabolic_list(G, c.c2);
    T.l2 = detail::parabolic_list(G, c.c7);
    T.l3 = detail::parabolic_list(G, c.c3);
    T.l4 = named("L4", [&] { return enumerate_filtered_ball(M, c.l4_radius(), c.c7); });
    T.l5 = named("L5", [&] { return enumerate_filtered_ball(M, c.l5_radius(), c.c2); });
    try {
      T.l6 = enumerate_filtered_ball(M, c.l6_radius(), c.c7);
    } catch (budget_error const&) {
      T.l6_skipped = true;
    }
    auto b8 = named("L8", [&] { return enumerate_filtered_ball(M, c.l8_radius(), 2 * c.c3); });
    for (auto const& w : b8.members) {
      if (M.is_relative_geodesic(w)) {
        T.l8.push_back(w);
      }
    }
    T.l9 = named("L9", [&] {
      std::vector<Word> out;
      for (auto const& e : BallIndex(nf, c.l9_length(), M.budget()).entries()) {
        out.push_back(e.word);
      }
      return out;
    });
    named("L88", [&] {
      close_classes(M, T);
      return 0;
    });

    auto bccball = named("BCC", [&] { return enumerate_filtered_ball(M, c.bcc_radius(), c.c3); });
    std::map<int, std::vector<Word>> groups;
    for (auto const& w : bccball.members) {
      auto it = T.classes.find(nf(w));
      int  id = it == T.classes.end() ? -1 - static_cast<int>(groups.size()) : it->second.cls;
      groups[id].push_back(w);
    }
    for (auto& [id, ws] : groups) {
      T.bcc.push_back(std::move(ws));
    }

    T.k_i = compute_k_i(G, c.c3);
    auto b42 = named("B(4delta,2C3)", [&] { return enumerate_filtered_ball(M, 4 * c.delta, 2 * c.c3); });
    T.k_hyp_4delta = static_cast<long long>(b42.size()) * (16 * c.delta + 2);
    T.k_4delta     = T.k_hyp_4delta;
    for (int i = 1; i <= G.m(); ++i) {
      T.k_4delta += detail::ipow(static_cast<long long>(G.oracle(i).descriptor().letters.size()), c.c3);
    }

    for (auto const& [k, idx] : T.l5.index) {
      T.replacements.geodesic.emplace(k, T.l5.members[idx]);
    }
    Shortener S(M, c.delta, nullptr, true);
    T.trivial_loops = find_trivial_loops(S, 2 * c.delta, c.c2);
    return T;
  }

  //! M_u: shortest y in P_i with u = y t y^-1 for some t in B_i; 0 when u is
  //! not a parabolic word, already lies in B_i, or has no such t
  inline long long compute_M(Group const& G, PrecomputedTables const& T, std::string_view u) {
    Word w = free_reduce(u);
    int  i = G.parabolic_index(w);
    if (i == 0) {
      return 0;
    }
    auto const& o = G.oracle(i);
    Word        g = o.geodesic_form(w);
    if (static_cast<int>(g.size()) <= T.profile.c3) {
      return 0;
    }
    std::optional<long long> best;
    for (auto const& t : T.l3) {
      if (G.parabolic_index(t) != i && !t.empty()) {
        continue;
      }
      if (auto y = o.conjugate(t, w)) {
        long long len = static_cast<long long>(y->size());
        best          = best ? std::min(*best, len) : len;
      }
    }
    return best.value_or(0);
  }

  namespace detail {
    inline void put_u64(std::ostream& o, std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        o.put(static_cast<char>((v >> (8 * i)) & 0xff));
      }
    }
    inline std::uint64_t get_u64(std::istream& in) {
      std::uint64_t v = 0;
      for (int i = 0; i < 8; ++i) {
        int c = in.get();
        if (c == EOF) {
          throw std::runtime_error("truncated cache");
        }
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
      }
      return v;
    }
    inline void put_str(std::ostream& o, std::string const& s) {
      put_u64(o, s.size());
      o.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    inline std::string get_str(std::istream& in) {
      auto n = get_u64(in);
      if (n > (1u << 30)) {
        throw std::runtime_error("corrupt cache");
      }
      std::string s(n, '\0');
      in.read(s.data(), static_cast<std::streamsize>(n));
      if (!in) {
        throw std::runtime_error("truncated cache");
      }
      return s;
    }
    inline void put_words(std::ostream& o, std::vector<Word> const& v) {
      put_u64(o, v.size());
      for (auto const& w : v) {
        put_str(o, w);
      }
    }
    inline std::vector<Word> get_words(std::istream& in) {
      auto              n = get_u64(in);
      std::vector<Word> v;
      for (std::uint64_t i = 0; i < n; ++i) {
        v.push_back(get_str(in));
      }
      return v;
    }
    inline void put_ball(std::ostream& o, FilteredBall const& b) {
      put_u64(o, static_cast<std::uint64_t>(b.rel_radius));
      put_u64(o, static_cast<std::uint64_t>(b.comp_bound));
      put_u64(o, b.members.size());
      std::vector<Word> keys(b.members.size());
      for (auto const& [k, i] : b.index) {
        keys[i] = k;
      }
      for (size_t i = 0; i < b.members.size(); ++i) {
        put_str(o, keys[i]);
        put_str(o, b.members[i]);
      }
    }
    inline FilteredBall get_ball(std::istream& in) {
      FilteredBall b;
      b.rel_radius = static_cast<int>(get_u64(in));
      b.comp_bound = static_cast<int>(get_u64(in));
      auto n       = get_u64(in);
      for (std::uint64_t i = 0; i < n; ++i) {
        auto k = get_str(in);
        b.index.emplace(k, b.members.size());
        b.members.push_back(get_str(in));
      }
      return b;
    }
  }  // namespace detail

  inline constexpr char          cache_magic[]  = "RELHYPTB";
  inline constexpr std::uint64_t cache_version  = 1;

  inline void save_tables(PrecomputedTables const& T, std::string const& path) {
    std::ofstream o(path, std::ios::binary);
    if (!o) {
      throw std::runtime_error("cannot write cache '" + path + "'");
    }
    using namespace detail;
    o.write(cache_magic, 8);
    put_u64(o, cache_version);
    put_u64(o, T.presentation_hash);
    put_u64(o, T.profile_hash);
    put_str(o, T.profile.serialize());
    put_words(o, T.l1);
    put_words(o, T.l2);
    put_words(o, T.l3);
    put_ball(o, T.l4);
    put_ball(o, T.l5);
    put_u64(o, T.l6_skipped ? 1 : 0);
    put_ball(o, T.l6);
    put_words(o, T.l8);
    put_words(o, T.l9);
    put_u64(o, T.classes.size());
    std::vector<std::pair<Word, ClassEntry>> rows(T.classes.begin(), T.classes.end());
    std::sort(rows.begin(), rows.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    for (auto const& [k, e] : rows) {
      put_str(o, k);
      put_str(o, e.word);
      put_u64(o, static_cast<std::uint64_t>(e.cls));
      put_str(o, e.to_root);
    }
    put_words(o, T.class_root);
    put_words(o, T.class_parabolic);
    put_u64(o, T.class_has_parabolic.size());
    for (char f : T.class_has_parabolic) {
      put_u64(o, static_cast<std::uint64_t>(f));
    }
    put_u64(o, T.bcc.size());
    for (auto const& cls : T.bcc) {
      put_words(o, cls);
    }
    put_u64(o, T.k_i.size());
    for (int k : T.k_i) {
      put_u64(o, static_cast<std::uint64_t>(k));
    }
    put_u64(o, static_cast<std::uint64_t>(T.k_hyp_4delta));
    put_u64(o, static_cast<std::uint64_t>(T.k_4delta));
    put_words(o, T.trivial_loops);
  }

  //! nullopt when the file is missing, stale, or from another version
  inline std::optional<PrecomputedTables> load_tables(std::string const& path,
                                                      std::uint64_t      presentation,
                                                      ConstantsProfile const& c) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      return std::nullopt;
    }
    using namespace detail;
    try {
      char magic[8];
      in.read(magic, 8);
      if (!in || std::string(magic, 8) != std::string(cache_magic, 8)) {
        return std::nullopt;
      }
      if (get_u64(in) != cache_version || get_u64(in) != presentation
          || get_u64(in) != c.hash()) {
        return std::nullopt;
      }
      PrecomputedTables T;
      T.presentation_hash = presentation;
      T.profile_hash      = c.hash();
      T.profile           = c;
      (void) get_str(in);
      T.l1         = get_words(in);
      T.l2         = get_words(in);
      T.l3         = get_words(in);
      T.l4         = get_ball(in);
      T.l5         = get_ball(in);
      T.l6_skipped = get_u64(in) != 0;
      T.l6         = get_ball(in);
      T.l8         = get_words(in);
      T.l9         = get_words(in);
      auto n       = get_u64(in);
      for (std::uint64_t i = 0; i < n; ++i) {
        auto       k = get_str(in);
        ClassEntry e;
        e.word    = get_str(in);
        e.cls     = static_cast<int>(get_u64(in));
        e.to_root = get_str(in);
        T.classes.emplace(k, e);
      }
      T.class_root      = get_words(in);
      T.class_parabolic = get_words(in);
      n                 = get_u64(in);
      for (std::uint64_t i = 0; i < n; ++i) {
        T.class_has_parabolic.push_back(static_cast<char>(get_u64(in)));
      }
      n = get_u64(in);
      for (std::uint64_t i = 0; i < n; ++i) {
        T.bcc.push_back(get_words(in));
      }
      n = get_u64(in);
      for (std::uint64_t i = 0; i < n; ++i) {
        T.k_i.push_back(static_cast<int>(get_u64(in)));
      }
      T.k_hyp_4delta  = static_cast<long long>(get_u64(in));
      T.k_4delta      = static_cast<long long>(get_u64(in));
      T.trivial_loops = get_words(in);
      for (auto const& [k, idx] : T.l5.index) {
        T.replacements.geodesic.emplace(k, T.l5.members[idx]);
      }
      return T;
    } catch (std::exception const&) {
      return std::nullopt;
    }
  }

}  // namespace relhyp
