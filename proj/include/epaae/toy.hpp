#pragma once

#include <string>
#include <vector>

#include "epaae/corpus.hpp"

namespace epaae {

// Synthetic review corpus: every sentence is
//   "the <identity> said the <subject> is <decision>"
// and the label packs the three sub-class bits as
//   identity*4 + subject*2 + decision.
struct ToySpec {
  std::vector<std::string> male;      // identity bit 0
  std::vector<std::string> female;    // identity bit 1
  std::vector<std::string> food;      // subject bit 0
  std::vector<std::string> others;    // subject bit 1
  std::vector<std::string> positive;  // decision bit 0
  std::vector<std::string> negative;  // decision bit 1

  static ToySpec standard();
  void validate() const;
};

// Full Cartesian product, identity-major then subject then decision;
// within each class the bit-0 list precedes the bit-1 list.
Corpus generate_toy(const ToySpec& spec);

// Which part of a packed toy label (or a raw label) defines "style".
enum class StyleAttr { kLabel, kIdentity, kSubject, kDecision };

int style_value(int label, StyleAttr attr);
StyleAttr parse_style_attr(const std::string& name);
std::string style_attr_name(StyleAttr attr);

}  // namespace epaae
