#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "epaae/corpus.hpp"
#include "epaae/toy.hpp"

using namespace epaae;

namespace {

Corpus from_lines(const std::vector<std::string>& lines) {
  Corpus c;
  for (const auto& l : lines) {
    LabeledSentence s;
    s.tokens = clean_tokenize(l);
    c.sentences.push_back(std::move(s));
  }
  return c;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("epaae_test_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("toy corpus has the full cartesian product") {
  Corpus toy = generate_toy(ToySpec::standard());
  CHECK(toy.size() == 1950);

  std::set<int> labels;
  std::map<int, int> counts;
  for (const auto& s : toy.sentences) {
    labels.insert(s.label);
    counts[s.label]++;
    REQUIRE(s.tokens.size() == 7);
    CHECK(s.tokens[0] == "the");
    CHECK(s.tokens[2] == "said");
    CHECK(s.tokens[3] == "the");
    CHECK(s.tokens[5] == "is");
  }
  CHECK(labels.size() == 8);

  // analytic per-label counts: identity {5,5}, subject {7,6}, decision {7,8}
  const int id_n[2] = {5, 5}, sub_n[2] = {7, 6}, dec_n[2] = {7, 8};
  for (int l = 0; l < 8; ++l) {
    int expect = id_n[(l >> 2) & 1] * sub_n[(l >> 1) & 1] * dec_n[l & 1];
    CHECK(counts[l] == expect);
  }
  CHECK(counts[0] == 245);  // male, food, positive
}

TEST_CASE("toy label bits follow the identity/subject/decision packing") {
  Corpus toy = generate_toy(ToySpec::standard());
  bool found = false;
  for (const auto& s : toy.sentences) {
    if (s.tokens[1] == "girl" && s.tokens[4] == "food" && s.tokens[6] == "bad") {
      CHECK(s.label == 5);  // bits 101: female, food, negative
      found = true;
    }
  }
  CHECK(found);

  // every label-5 sentence is (female, food, negative)
  ToySpec spec = ToySpec::standard();
  std::set<std::string> female(spec.female.begin(), spec.female.end());
  std::set<std::string> food(spec.food.begin(), spec.food.end());
  std::set<std::string> negative(spec.negative.begin(), spec.negative.end());
  for (const auto& s : toy.sentences) {
    if (s.label != 5) continue;
    CHECK(female.count(s.tokens[1]) == 1);
    CHECK(food.count(s.tokens[4]) == 1);
    CHECK(negative.count(s.tokens[6]) == 1);
  }
}

TEST_CASE("toy generation is deterministic") {
  Corpus a = generate_toy(ToySpec::standard());
  Corpus b = generate_toy(ToySpec::standard());
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.sentences[i].tokens == b.sentences[i].tokens);
    CHECK(a.sentences[i].label == b.sentences[i].label);
  }
}

TEST_CASE("vocab ranks by frequency then first occurrence") {
  Corpus c = from_lines({"a b", "b c"});
  Vocab v = Vocab::build(c);
  CHECK(v.size() == 4 + 3);
  CHECK(v.token(4) == "b");
  CHECK(v.token(5) == "a");
  CHECK(v.token(6) == "c");
}

TEST_CASE("vocab capped at reserved size maps everything to unk") {
  Corpus c = from_lines({"a b", "b c"});
  Vocab v = Vocab::build(c, 4);
  CHECK(v.size() == 4);
  for (const auto& t : {"a", "b", "c"})
    CHECK(v.encode_token(t) == Vocab::kUnk);
}

TEST_CASE("toy vocab counts distinct tokens") {
  Corpus toy = generate_toy(ToySpec::standard());
  Vocab v = Vocab::build(toy);
  // 38 class tokens (5+5+7+6+7+8) plus the/said/is plus 4 reserved
  CHECK(v.size() == 38 + 3 + 4);
}

TEST_CASE("encode/decode round-trips in-vocab sentences") {
  Corpus toy = generate_toy(ToySpec::standard());
  Vocab v = Vocab::build(toy);
  const auto& s = toy.sentences[123];
  auto ids = v.encode(s.tokens);
  CHECK(v.decode(ids) == s.tokens);
  CHECK(v.decode_string(ids) ==
        s.tokens[0] + " " + s.tokens[1] + " " + s.tokens[2] + " " +
            s.tokens[3] + " " + s.tokens[4] + " " + s.tokens[5] + " " +
            s.tokens[6]);

  std::vector<std::string> oov{"zzz"};
  auto oov_ids = v.encode(oov);
  CHECK(oov_ids[0] == Vocab::kUnk);
  CHECK(v.decode(oov_ids)[0] == "unk");
}

TEST_CASE("clean_tokenize strips specials and lowercases") {
  CHECK(clean_tokenize("Good Food!") ==
        std::vector<std::string>{"good", "food"});
  CHECK(clean_tokenize("It's GREAT, really...") ==
        std::vector<std::string>{"it's", "great", "really"});
  CHECK(clean_tokenize("...!!!").empty());
  CHECK(clean_tokenize("a1 b2\tc3") ==
        std::vector<std::string>{"a1", "b2", "c3"});
}

TEST_CASE("load_corpus reads aligned labels and rejects mismatches") {
  TempDir dir;
  {
    std::ofstream t(dir.file("s.txt"));
    t << "Good Food!\nnice place\nawful service\n";
    std::ofstream l(dir.file("l.txt"));
    l << "1\n1\n0\n";
  }
  Corpus c = load_corpus(dir.file("s.txt"), dir.file("l.txt"));
  REQUIRE(c.size() == 3);
  CHECK(c.sentences[0].tokens == std::vector<std::string>{"good", "food"});
  CHECK(c.sentences[0].label == 1);
  CHECK(c.sentences[2].label == 0);

  {
    std::ofstream l(dir.file("short.txt"));
    l << "1\n0\n";
  }
  CHECK_THROWS_AS(load_corpus(dir.file("s.txt"), dir.file("short.txt")),
                  UsageError);
  CHECK_THROWS_AS(load_corpus(dir.file("missing.txt")), UsageError);
}

TEST_CASE("load_corpus skips empty lines together with their labels") {
  TempDir dir;
  {
    std::ofstream t(dir.file("s.txt"));
    t << "one two\n\n!!!\nthree\n";
    std::ofstream l(dir.file("l.txt"));
    l << "0\n1\n2\n3\n";
  }
  Corpus c = load_corpus(dir.file("s.txt"), dir.file("l.txt"));
  REQUIRE(c.size() == 2);
  CHECK(c.sentences[0].label == 0);
  CHECK(c.sentences[1].label == 3);
}

TEST_CASE("corpus save/load round-trip") {
  TempDir dir;
  Corpus toy = generate_toy(ToySpec::standard());
  save_corpus(toy, dir.file("s.txt"), dir.file("l.txt"));
  Corpus back = load_corpus(dir.file("s.txt"), dir.file("l.txt"));
  REQUIRE(back.size() == toy.size());
  for (size_t i = 0; i < toy.size(); ++i) {
    CHECK(back.sentences[i].tokens == toy.sentences[i].tokens);
    CHECK(back.sentences[i].label == toy.sentences[i].label);
  }
}

TEST_CASE("splits are 80/10/10 and deterministic") {
  Corpus toy = generate_toy(ToySpec::standard());
  Splits a = split_corpus(toy, 13);
  CHECK(a.train.size() == 1560);
  CHECK(a.dev.size() == 195);
  CHECK(a.test.size() == 195);
  Splits b = split_corpus(toy, 13);
  CHECK(a.train.sentences[0].tokens == b.train.sentences[0].tokens);
  Splits c = split_corpus(toy, 14);
  bool same_first = a.train.sentences[0].tokens == c.train.sentences[0].tokens;
  CHECK_FALSE(same_first);
}

TEST_CASE("batches pad to max, record lengths, keep seed order") {
  Corpus c = from_lines({"a b c d e f g h", "a b", "a b c"});
  Vocab v = Vocab::build(c);

  SUBCASE("single sentence of 8 tokens gives a row of length 10") {
    std::vector<size_t> order{0};
    Batch b = pack_batch(c, v, order);
    CHECK(b.rows == 1);
    CHECK(b.cols == 10);
    CHECK(b.lengths[0] == 10);
    CHECK(b.at(0, 0) == Vocab::kBos);
    CHECK(b.at(0, 9) == Vocab::kEos);
  }
  SUBCASE("mixed lengths pad to batch max") {
    std::vector<size_t> order{1, 2};
    Batch b = pack_batch(c, v, order);
    CHECK(b.cols == 5);
    CHECK(b.lengths == std::vector<int32_t>{4, 5});
    CHECK(b.at(0, 4) == Vocab::kPad);
    CHECK(b.at(1, 4) == Vocab::kEos);
  }
  SUBCASE("same seed gives the same batch order") {
    Rng r1(5), r2(5), r3(6);
    auto b1 = make_batches(c, v, 2, r1);
    auto b2 = make_batches(c, v, 2, r2);
    auto b3 = make_batches(c, v, 2, r3);
    REQUIRE(b1.size() == b2.size());
    CHECK(b1[0].corpus_index == b2[0].corpus_index);
    bool any_diff = b1[0].corpus_index != b3[0].corpus_index ||
                    b1[1].corpus_index != b3[1].corpus_index;
    CHECK(any_diff);
  }
}

}  // TEST_SUITE
