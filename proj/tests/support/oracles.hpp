#pragma once

// Brute-force reference implementations used to cross-check the library.
// They share no code with it beyond the data types.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "laf/engine.hpp"
#include "laf/mask.hpp"
#include "laf/proof/formula.hpp"
#include "laf/proof/script.hpp"

namespace oracle {

inline laf::BinaryMask random_mask(std::mt19937_64& gen, std::uint32_t w, std::uint32_t h, double density) {
  std::bernoulli_distribution bit(density);
  laf::BinaryMask m(w, h);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) m.set(x, y, bit(gen));
  }
  return m;
}

inline std::uint64_t count_pixels(const laf::BinaryMask& a, bool va, const laf::BinaryMask& b, bool vb) {
  std::uint64_t n = 0;
  for (std::uint32_t y = 0; y < a.height(); ++y) {
    for (std::uint32_t x = 0; x < a.width(); ++x) n += (a.get(x, y) == va && b.get(x, y) == vb) ? 1 : 0;
  }
  return n;
}

struct Counts {
  std::uint64_t ltp = 0, lfp = 0, lfn = 0;
};

// Logical counts by enumerating every pixel once.
inline Counts logical_counts(const laf::BinaryMask& pred, const laf::BinaryMask& hr, const laf::BinaryMask& hp) {
  Counts c;
  for (std::uint32_t y = 0; y < pred.height(); ++y) {
    for (std::uint32_t x = 0; x < pred.width(); ++x) {
      const bool p = pred.get(x, y);
      if (p && !hr.get(x, y)) ++c.lfp;
      if (p && hp.get(x, y)) ++c.ltp;
      if (!p && hp.get(x, y)) ++c.lfn;
    }
  }
  return c;
}

inline laf::LamReport report_from_counts(const Counts& c) {
  laf::LamReport r{{c.ltp}, {c.lfp}, {c.lfn}};
  const double tp = static_cast<double>(c.ltp);
  auto frac = [&](std::uint64_t den) {
    if (den == 0) {
      r.degenerate = true;
      return 0.0;
    }
    return tp / static_cast<double>(den);
  };
  r.lprecision = frac(c.ltp + c.lfp);
  r.lrecall = frac(c.ltp + c.lfn);
  r.lfiou = frac(c.ltp + c.lfp + c.lfn);
  const double s = r.lprecision + r.lrecall;
  if (s > 0.0) {
    r.lf1 = 2.0 * r.lprecision * r.lrecall / s;
  } else {
    r.degenerate = true;
  }
  return r;
}

// Disc dilation by direct neighbourhood search.
inline laf::BinaryMask dilate(const laf::BinaryMask& m, int r) {
  laf::BinaryMask out(m.width(), m.height());
  const int w = static_cast<int>(m.width());
  const int h = static_cast<int>(m.height());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -r; dy <= r && !hit; ++dy) {
        for (int dx = -r; dx <= r && !hit; ++dx) {
          const int sx = x + dx, sy = y + dy;
          hit = dx * dx + dy * dy <= r * r && sx >= 0 && sy >= 0 && sx < w && sy < h &&
                m.get(static_cast<std::uint32_t>(sx), static_cast<std::uint32_t>(sy));
        }
      }
      out.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), hit);
    }
  }
  return out;
}

// Erosion keeps a pixel when every in-canvas disc neighbour is positive.
inline laf::BinaryMask erode(const laf::BinaryMask& m, int r) {
  laf::BinaryMask out(m.width(), m.height());
  const int w = static_cast<int>(m.width());
  const int h = static_cast<int>(m.height());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool keep = true;
      for (int dy = -r; dy <= r && keep; ++dy) {
        for (int dx = -r; dx <= r && keep; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (dx * dx + dy * dy > r * r || sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
          keep = m.get(static_cast<std::uint32_t>(sx), static_cast<std::uint32_t>(sy));
        }
      }
      out.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), keep);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Propositional semantics.

inline bool eval(const laf::proof::Formula& f, const std::map<std::string, bool>& v) {
  using K = laf::proof::Formula::Kind;
  switch (f.kind()) {
    case K::Atom: return v.at(f.name());
    case K::Conjunction:
      for (const auto& c : f.conjuncts()) {
        if (!eval(c, v)) return false;
      }
      return true;
    case K::Implication: return !eval(f.antecedent(), v) || eval(f.consequent(), v);
  }
  return false;
}

// True when every assignment satisfying all of `given` satisfies `goal`.
inline bool entails(const std::vector<const laf::proof::Formula*>& given, const laf::proof::Formula& goal) {
  std::set<std::string> names;
  goal.collect_atoms(names);
  for (const auto* g : given) g->collect_atoms(names);
  const std::vector<std::string> atoms(names.begin(), names.end());
  std::map<std::string, bool> v;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << atoms.size()); ++bits) {
    for (std::size_t i = 0; i < atoms.size(); ++i) v[atoms[i]] = ((bits >> i) & 1) != 0;
    bool all = true;
    for (const auto* g : given) all = all && eval(*g, v);
    if (all && !eval(goal, v)) return false;
  }
  return true;
}

struct SoundnessResult {
  std::size_t lines_checked = 0;
  std::size_t max_atoms = 0;
  std::vector<std::size_t> failures;
};

// Checks each step against the premises plus the hypotheses open at that
// step. A condproof line closes the innermost open hypothesis first.
inline SoundnessResult check_soundness(const laf::proof::ProofScript& s) {
  SoundnessResult res;
  std::set<std::string> all_atoms;
  for (const auto& p : s.premises) p.formula.collect_atoms(all_atoms);
  std::vector<const laf::proof::Formula*> open;
  for (const auto& step : s.steps) {
    step.formula.collect_atoms(all_atoms);
    if (step.by.rule == laf::proof::Rule::ConditionalProof && !open.empty()) open.pop_back();
    if (step.by.rule == laf::proof::Rule::Hypothesis) open.push_back(&step.formula);
    std::vector<const laf::proof::Formula*> given;
    for (const auto& p : s.premises) given.push_back(&p.formula);
    given.insert(given.end(), open.begin(), open.end());
    ++res.lines_checked;
    if (!entails(given, step.formula)) res.failures.push_back(step.index);
  }
  res.max_atoms = all_atoms.size();
  return res;
}

}  // namespace oracle
