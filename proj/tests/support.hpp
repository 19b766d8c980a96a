// Shared fixtures: example presentations and engines built once per process.

#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <relhyp/conjugacy.hpp>

namespace fixtures {

  inline std::string read_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  inline std::string pres_path(std::string const& name) {
    return std::string(RELHYP_PRESENTATIONS) + "/" + name + ".pres";
  }

  inline relhyp::RelativePresentation load(std::string const& name) {
    return relhyp::parse_presentation(read_file(pres_path(name)));
  }

  //! groups live for the whole run; engines hold references to them
  inline relhyp::Group const& group(std::string const& name) {
    static std::map<std::string, std::unique_ptr<relhyp::Group>> cache;
    auto& g = cache[name];
    if (!g) {
      g = std::make_unique<relhyp::Group>(load(name));
    }
    return *g;
  }

  inline relhyp::Engine& engine(std::string const& name) {
    static std::map<std::string, std::unique_ptr<relhyp::Engine>> cache;
    auto& e = cache[name];
    if (!e) {
      auto const& G = group(name);
      e = std::make_unique<relhyp::Engine>(G, relhyp::ConstantsProfile::from(G.presentation()));
    }
    return *e;
  }

  //! all freely reduced words of length <= n, shortest first
  inline std::vector<relhyp::Word> reduced_words(relhyp::Group const& G, int n) {
    std::vector<relhyp::Word> out{relhyp::Word()};
    for (size_t i = 0; i < out.size(); ++i) {
      if (static_cast<int>(out[i].size()) == n) {
        continue;
      }
      for (char c : G.alphabet()) {
        if (!out[i].empty() && out[i].back() == relhyp::inverse_letter(c)) {
          continue;
        }
        out.push_back(out[i] + c);
      }
    }
    return out;
  }

  //! uniformly random letters, not reduced
  inline relhyp::Word random_word(relhyp::Group const& G, std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<size_t> pick(0, G.alphabet().size() - 1);
    relhyp::Word                          w;
    for (int i = 0; i < len; ++i) {
      w += G.alphabet()[pick(rng)];
    }
    return w;
  }

  inline relhyp::Word random_reduced(relhyp::Group const& G, std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<size_t> pick(0, G.alphabet().size() - 1);
    relhyp::Word                          w;
    while (static_cast<int>(w.size()) < len) {
      char c = G.alphabet()[pick(rng)];
      if (w.empty() || w.back() != relhyp::inverse_letter(c)) {
        w += c;
      }
    }
    return w;
  }

}  // namespace fixtures
