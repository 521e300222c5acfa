// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "spatialift/stemmer.hpp"

#include <functional>
#include <vector>

namespace spatialift {

namespace {

bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// 'y' is a consonant at the start of a word or after a vowel.
std::vector<bool> consonant_flags(std::string_view w) {
  std::vector<bool> f(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel_letter(w[i])) f[i] = false;
    else if (w[i] == 'y') f[i] = i == 0 ? true : !f[i - 1];
    else f[i] = true;
  }
  return f;
}

// m in [C](VC){m}[V].
int measure(std::string_view stem) {
  const auto f = consonant_flags(stem);
  int m = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (!f[i - 1] && f[i]) ++m;
  }
  return m;
}

bool contains_vowel(std::string_view stem) {
  for (bool c : consonant_flags(stem)) {
    if (!c) return true;
  }
  return false;
}

bool ends_double_consonant(std::string_view w) {
  return w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && consonant_flags(w).back();
}

// *o: ends consonant-vowel-consonant, last not w, x or y.
bool ends_cvc(std::string_view w) {
  if (w.size() < 3) return false;
  const auto f = consonant_flags(w);
  const auto n = w.size();
  const char last = w[n - 1];
  return f[n - 3] && !f[n - 2] && f[n - 1] && last != 'w' && last != 'x' && last != 'y';
}

using Condition = std::function<bool(std::string_view)>;

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  Condition condition;  // empty = unconditional
};

bool m_positive(std::string_view s) { return measure(s) > 0; }
bool m_above_one(std::string_view s) { return measure(s) > 1; }

// The first rule whose suffix matches decides; a failed condition stops the
// step without trying later rules.
std::string apply_rules(const std::string& word, const std::vector<Rule>& rules) {
  for (const auto& r : rules) {
    if (!std::string_view(word).ends_with(r.suffix)) continue;
    const std::string stem = word.substr(0, word.size() - r.suffix.size());
    if (!r.condition || r.condition(stem)) return stem + std::string(r.replacement);
    return word;
  }
  return word;
}

std::string step1a(const std::string& w) {
  return apply_rules(w, {{"sses", "ss", {}}, {"ies", "i", {}}, {"ss", "ss", {}}, {"s", "", {}}});
}

std::string step1b(const std::string& w) {
  if (std::string_view(w).ends_with("eed")) {
    const std::string stem = w.substr(0, w.size() - 3);
    return measure(stem) > 0 ? stem + "ee" : w;
  }
  std::string stem;
  bool stripped = false;
  for (std::string_view suf : {std::string_view("ed"), std::string_view("ing")}) {
    if (std::string_view(w).ends_with(suf)) {
      stem = w.substr(0, w.size() - suf.size());
      if (contains_vowel(stem)) {
        stripped = true;
        break;
      }
    }
  }
  if (!stripped) return w;
  for (auto [suf, rep] : {std::pair<std::string_view, std::string_view>{"at", "ate"},
                          {"bl", "ble"},
                          {"iz", "ize"}}) {
    if (std::string_view(stem).ends_with(suf)) return stem.substr(0, stem.size() - suf.size()) + std::string(rep);
  }
  if (ends_double_consonant(stem)) {
    const char last = stem.back();
    if (last == 'l' || last == 's' || last == 'z') return stem;
    return stem.substr(0, stem.size() - 1);
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

std::string step1c(const std::string& w) {
  return apply_rules(w, {{"y", "i", contains_vowel}});
}

std::string step2(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"ational", "ate", m_positive}, {"tional", "tion", m_positive},
      {"enci", "ence", m_positive},   {"anci", "ance", m_positive},
      {"izer", "ize", m_positive},    {"abli", "able", m_positive},
      {"alli", "al", m_positive},     {"entli", "ent", m_positive},
      {"eli", "e", m_positive},       {"ousli", "ous", m_positive},
      {"ization", "ize", m_positive}, {"ation", "ate", m_positive},
      {"ator", "ate", m_positive},    {"alism", "al", m_positive},
      {"iveness", "ive", m_positive}, {"fulness", "ful", m_positive},
      {"ousness", "ous", m_positive}, {"aliti", "al", m_positive},
      {"iviti", "ive", m_positive},   {"biliti", "ble", m_positive},
  };
  return apply_rules(w, rules);
}

std::string step3(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"icate", "ic", m_positive}, {"ative", "", m_positive}, {"alize", "al", m_positive},
      {"iciti", "ic", m_positive}, {"ical", "ic", m_positive}, {"ful", "", m_positive},
      {"ness", "", m_positive},
  };
  return apply_rules(w, rules);
}

std::string step4(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"al", "", m_above_one},    {"ance", "", m_above_one}, {"ence", "", m_above_one},
      {"er", "", m_above_one},    {"ic", "", m_above_one},   {"able", "", m_above_one},
      {"ible", "", m_above_one},  {"ant", "", m_above_one},  {"ement", "", m_above_one},
      {"ment", "", m_above_one},  {"ent", "", m_above_one},
      {"ion", "", [](std::string_view s) { return measure(s) > 1 && (s.ends_with('s') || s.ends_with('t')); }},
      {"ou", "", m_above_one},    {"ism", "", m_above_one},  {"ate", "", m_above_one},
      {"iti", "", m_above_one},   {"ous", "", m_above_one},  {"ive", "", m_above_one},
      {"ize", "", m_above_one},
  };
  return apply_rules(w, rules);
}

std::string step5a(const std::string& w) {
  if (!w.ends_with('e')) return w;
  const std::string stem = w.substr(0, w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) return stem;
  return w;
}

std::string step5b(const std::string& w) {
  if (w.ends_with("ll") && measure(std::string_view(w).substr(0, w.size() - 1)) > 1) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  if (w.empty()) return w;
  w = step1a(w);
  w = step1b(w);
  w = step1c(w);
  w = step2(w);
  w = step3(w);
  w = step4(w);
  w = step5a(w);
  w = step5b(w);
  return w;
}

}  // namespace spatialift
