#include <hiporank/corpus.hpp>

#include "../support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

using namespace hiporank;
using testing_support::TempFile;

namespace {

Document parse_line(const std::string& line, std::vector<std::string>* warnings = nullptr) {
    WarningSink sink;
    if (warnings) sink = [warnings](const std::string& m) { warnings->push_back(m); };
    return document_from_json(nlohmann::json::parse(line), sink);
}

}  // namespace

TEST(Corpus, MapsFieldsOfOneLine) {
    const auto d = parse_line(
        R"({"article_id":"x1","abstract_text":["a b ."],"sections":[["s one .","s two ."]],"section_names":["intro"]})");
    EXPECT_EQ(d.article_id, "x1");
    ASSERT_EQ(d.section_count(), 1u);
    ASSERT_EQ(d.sentence_count(), 2u);
    EXPECT_EQ(d.sections[0].name, "intro");
    EXPECT_EQ(d.sections[0].sentences[1].text, "s two .");
    EXPECT_EQ(d.sections[0].sentences[1].token_count, 3u);
    EXPECT_EQ(d.sections[0].sentences[1].sentence_index, 1u);
    EXPECT_EQ(d.reference_summary, std::vector<std::string>{"a b ."});
}

TEST(Corpus, DropsEmptySectionAndRenumbers) {
    std::vector<std::string> warnings;
    const auto d = parse_line(R"({"article_id":"x","sections":[[],["only ."]],"section_names":["a","b"]})", &warnings);
    ASSERT_EQ(d.section_count(), 1u);
    EXPECT_EQ(d.sections[0].name, "b");
    EXPECT_EQ(d.sections[0].section_index, 0u);
    EXPECT_EQ(d.sections[0].sentences[0].section_index, 0u);
    EXPECT_FALSE(warnings.empty());
}

TEST(Corpus, DropsBlankSentences) {
    const auto d = parse_line(R"({"article_id":"x","sections":[["  ","one .","","two ."]]})");
    ASSERT_EQ(d.sentence_count(), 2u);
    EXPECT_EQ(d.sections[0].sentences[1].sentence_index, 1u);
    EXPECT_EQ(d.sections[0].sentences[1].text, "two .");
}

TEST(Corpus, SectionNameMismatchTruncatesOrFills) {
    std::vector<std::string> warnings;
    auto d = parse_line(R"({"article_id":"x","sections":[["a ."],["b ."]],"section_names":["one"]})", &warnings);
    EXPECT_EQ(d.sections[0].name, "one");
    EXPECT_EQ(d.sections[1].name, "");
    EXPECT_EQ(warnings.size(), 1u);

    d = parse_line(R"({"article_id":"x","sections":[["a ."]],"section_names":["one","two","three"]})");
    ASSERT_EQ(d.section_count(), 1u);
    EXPECT_EQ(d.sections[0].name, "one");
}

TEST(Corpus, StripsTagsFromAbstract) {
    const auto d = parse_line(R"({"article_id":"x","sections":[["a ."]],"abstract_text":["<S> first . </S>","<S></S>"]})");
    EXPECT_EQ(d.reference_summary, std::vector<std::string>{"first ."});
    EXPECT_EQ(strip_tags("<S> keep a < b here </S>"), "keep a < b here");
}

TEST(Corpus, RejectsDocumentWithoutSentences) {
    EXPECT_THROW(parse_line(R"({"article_id":"x","sections":[[],[" "]]})"), FormatError);
    EXPECT_THROW(parse_line(R"({"article_id":"x"})"), FormatError);
    EXPECT_THROW(parse_line(R"({"sections":[["a"]]})"), FormatError);
}

TEST(Corpus, TokenCountIsWhitespaceSplit) {
    EXPECT_EQ(count_whitespace_tokens(""), 0u);
    EXPECT_EQ(count_whitespace_tokens("   "), 0u);
    EXPECT_EQ(count_whitespace_tokens(" a\tb\n c  "), 3u);
    EXPECT_EQ(make_sentence("x y z", 0, 0).token_count, 3u);
}

TEST(Corpus, LenientReaderSkipsAndCounts) {
    TempFile f("corpus.jsonl");
    f.write(R"({"article_id":"a","sections":[["one ."]]})"
            "\n"
            "not json\n"
            "\n"
            R"({"article_id":"b","sections":[[]]})"
            "\n"
            R"({"article_id":"c","sections":[["two ."]]})"
            "\n");
    std::vector<std::string> warnings;
    ParseOptions opt;
    opt.on_warning = [&](const std::string& m) { warnings.push_back(m); };
    ParseReport report;
    const auto docs = parse_corpus(f.str(), opt, &report);
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].article_id, "a");
    EXPECT_EQ(docs[1].article_id, "c");
    EXPECT_EQ(report.skipped, 2u);
    EXPECT_EQ(report.documents, 2u);
    EXPECT_GE(warnings.size(), 2u);
}

TEST(Corpus, StrictReaderThrows) {
    TempFile f("corpus.jsonl");
    f.write(R"({"article_id":"a","sections":[["one ."]]})"
            "\n{broken\n");
    ParseOptions opt;
    opt.strict = true;
    EXPECT_THROW(parse_corpus(f.str(), opt), FormatError);
}

TEST(Corpus, LimitStopsEarly) {
    TempFile f("corpus.jsonl");
    std::string text;
    for (int k = 0; k < 5; ++k) text += R"({"article_id":")" + std::to_string(k) + R"(","sections":[["x ."]]})" "\n";
    f.write(text);
    ParseOptions opt;
    opt.limit = 3;
    EXPECT_EQ(parse_corpus(f.str(), opt).size(), 3u);
}

TEST(Corpus, UnreadableFileIsFatal) { EXPECT_THROW(parse_corpus("/nonexistent/corpus.jsonl"), Error); }

TEST(Corpus, RoundTripProperty) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> small(0, 4);
    const std::vector<std::string> words{"alpha", "beta", "", "  ", "gamma delta", "x"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::vector<std::string>> sections(small(rng) + 1);
        for (auto& sec : sections) {
            const int n = small(rng);
            for (int k = 0; k < n; ++k) sec.push_back(words[rng() % words.size()] + (k % 2 ? " ." : ""));
        }
        sections.back().push_back("anchor sentence .");
        std::vector<std::string> names;
        for (std::size_t k = 0; k < sections.size() + small(rng) - 2 && k < 8; ++k) names.push_back("n" + std::to_string(k));
        const auto doc = make_document("id" + std::to_string(trial), sections, names, {"abs one .", "abs two ."});
        const auto again = document_from_json(nlohmann::json::parse(document_to_json(doc).dump()));
        ASSERT_EQ(doc, again);

        // Positions are a total order that follows input order.
        const auto pos = doc.positions();
        for (std::size_t k = 1; k < pos.size(); ++k) ASSERT_LT(pos[k - 1], pos[k]);
        for (const auto& sec : doc.sections)
            for (std::size_t i = 0; i < sec.size(); ++i) {
                ASSERT_EQ(sec.sentences[i].sentence_index, i);
                ASSERT_FALSE(trim(sec.sentences[i].text).empty());
            }
    }
}

TEST(CorpusStats, SingleDocument) {
    const auto d = make_document("x", {{"a b c d e f g h i j"}}, {}, {"p q r s"});
    const auto s = document_stats({d});
    EXPECT_EQ(s.documents, 1u);
    EXPECT_DOUBLE_EQ(s.mean_document_tokens, 10.0);
    EXPECT_DOUBLE_EQ(s.mean_summary_tokens, 4.0);
}

TEST(CorpusStats, TwoDocumentMean) {
    const auto a = make_document("a", {{"1 2 3 4 5 6 7 8 9 10"}}, {}, {});
    const auto b = make_document("b", {{"1 2 3 4 5 6 7 8 9 10", "1 2 3 4 5 6 7 8 9 10"}}, {}, {});
    EXPECT_DOUBLE_EQ(document_stats({a, b}).mean_document_tokens, 15.0);
}

TEST(CorpusStats, EmptyStreamIsError) { EXPECT_THROW(document_stats({}), Error); }
