#include "epaae/toy.hpp"

namespace epaae {

ToySpec ToySpec::standard() {
  ToySpec s;
  s.male = {"boy", "man", "husband", "boyfriend", "waiter"};
  s.female = {"girl", "woman", "wife", "girlfriend", "waitress"};
  s.food = {"food", "meal", "dinner", "breakfast", "lunch", "pasta", "chicken"};
  s.others = {"service", "staff", "experience", "atmosphere", "location",
              "place"};
  s.positive = {"good",    "great",     "excellent", "decent",
                "amazing", "wonderful", "reasonable"};
  s.negative = {"bad",       "worst",     "horrible",   "spicy",
                "bland",     "expensive", "disgusting", "mediocre"};
  return s;
}

void ToySpec::validate() const {
  for (const auto* list :
       {&male, &female, &food, &others, &positive, &negative}) {
    if (list->empty()) throw UsageError("toy spec: empty token list");
  }
}

Corpus generate_toy(const ToySpec& spec) {
  spec.validate();
  Corpus corpus;
  struct BitList {
    const std::vector<std::string>* tokens;
    int bit;
  };
  std::vector<BitList> identities{{&spec.male, 0}, {&spec.female, 1}};
  std::vector<BitList> subjects{{&spec.food, 0}, {&spec.others, 1}};
  std::vector<BitList> decisions{{&spec.positive, 0}, {&spec.negative, 1}};
  for (const auto& [id_list, id_bit] : identities)
    for (const auto& identity : *id_list)
      for (const auto& [sub_list, sub_bit] : subjects)
        for (const auto& subject : *sub_list)
          for (const auto& [dec_list, dec_bit] : decisions)
            for (const auto& decision : *dec_list) {
              LabeledSentence s;
              s.tokens = {"the", identity, "said", "the",
                          subject, "is", decision};
              s.label = id_bit * 4 + sub_bit * 2 + dec_bit;
              corpus.sentences.push_back(std::move(s));
            }
  return corpus;
}

int style_value(int label, StyleAttr attr) {
  switch (attr) {
    case StyleAttr::kLabel:
      return label;
    case StyleAttr::kIdentity:
      return (label >> 2) & 1;
    case StyleAttr::kSubject:
      return (label >> 1) & 1;
    case StyleAttr::kDecision:
      return label & 1;
  }
  throw std::runtime_error("style_value: bad attr");
}

StyleAttr parse_style_attr(const std::string& name) {
  if (name == "label") return StyleAttr::kLabel;
  if (name == "identity") return StyleAttr::kIdentity;
  if (name == "subject") return StyleAttr::kSubject;
  if (name == "decision") return StyleAttr::kDecision;
  throw UsageError("unknown style_attr '" + name +
                   "' (expected label|identity|subject|decision)");
}

std::string style_attr_name(StyleAttr attr) {
  switch (attr) {
    case StyleAttr::kLabel: return "label";
    case StyleAttr::kIdentity: return "identity";
    case StyleAttr::kSubject: return "subject";
    case StyleAttr::kDecision: return "decision";
  }
  return "?";
}

}  // namespace epaae
