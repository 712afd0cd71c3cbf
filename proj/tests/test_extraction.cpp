#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fontstat/extraction.hpp"
#include "fontstat/synthkit.hpp"
#include "support.hpp"

using namespace fontstat;
using namespace testing_support;

namespace {

SynthSpec spec_for(const std::string& title, const std::string& font, std::uint64_t seed = 1)
{
    const FontAtlas& atlas = shipped_atlas();
    SynthSpec s;
    s.id = "t";
    s.title = title;
    s.font = font;
    s.style = *atlas.style_of_font(font);
    s.text_color = rgb_to_lab({20, 20, 20});
    s.background = rgb_to_lab({245, 240, 230});
    s.genre = "g";
    s.seed = seed;
    s.author = "ANNA LEE";
    return s;
}

std::vector<TextRegion> regions_of(std::initializer_list<const char*> words)
{
    std::vector<TextRegion> out;
    int x = 0;
    for (const char* w : words) {
        out.push_back({{x, 0, 10, 10}, w, 1.0});
        x += 20;
    }
    return out;
}

const TextRegion* best_overlap(const std::vector<TextRegion>& regions, const Box& truth, double* score)
{
    const TextRegion* best = nullptr;
    *score = 0.0;
    for (const TextRegion& r : regions) {
        const double v = iou(r.bbox, truth);
        if (v > *score) {
            *score = v;
            best = &r;
        }
    }
    return best;
}

/// Searches every injective token -> region map over pairs within the
/// threshold: maximum matched count, then minimum total distance.
std::vector<std::pair<std::size_t, std::size_t>> exhaustive_assignment(const std::vector<TextRegion>& regions,
                                                                      const std::vector<std::string>& tokens)
{
    std::vector<std::pair<std::size_t, std::size_t>> best, cur;
    double best_cost = 0.0;
    std::vector<bool> used(regions.size());
    std::function<void(std::size_t, double)> rec = [&](std::size_t t, double cost) {
        if (t == tokens.size()) {
            if (cur.size() > best.size() || (cur.size() == best.size() && cost < best_cost)) {
                best = cur;
                best_cost = cost;
            }
            return;
        }
        rec(t + 1, cost);
        for (std::size_t r = 0; r < regions.size(); ++r) {
            if (used[r]) continue;
            const double d = normalized_edit_distance(tokens[t], regions[r].word);
            if (d > kTitleMatchThreshold) continue;
            used[r] = true;
            cur.push_back({t, r});
            rec(t + 1, cost + d);
            cur.pop_back();
            used[r] = false;
        }
    };
    rec(0, 0.0);
    return best;
}

} // namespace

TEST(EditDistance, Examples)
{
    EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
    EXPECT_EQ(edit_distance("title", "title"), 0u);
    EXPECT_EQ(edit_distance("", "abc"), 3u);
    EXPECT_EQ(edit_distance("abc", ""), 3u);
    EXPECT_EQ(edit_distance("flaw", "lawn"), 2u);
}

TEST(EditDistance, MatchesDpOracleAndMetricAxioms)
{
    std::mt19937_64 rng(31);
    auto random_string = [&] {
        std::string s(rng() % 9, 'a');
        for (char& c : s) c = static_cast<char>('a' + rng() % 4);
        return s;
    };
    for (int i = 0; i < 500; ++i) {
        const std::string a = random_string(), b = random_string(), c = random_string();
        const std::size_t ab = edit_distance(a, b);
        EXPECT_EQ(ab, levenshtein_oracle(a, b)) << a << " / " << b;
        EXPECT_EQ(ab, edit_distance(b, a));
        EXPECT_EQ(edit_distance(a, a), 0u);
        EXPECT_EQ(ab == 0, a == b);
        EXPECT_LE(edit_distance(a, c), ab + edit_distance(b, c));
    }
}

TEST(EditDistance, NormalizedIsCaseInsensitive)
{
    EXPECT_DOUBLE_EQ(normalized_edit_distance("Personality", "PERSONALITY"), 0.0);
    EXPECT_DOUBLE_EQ(normalized_edit_distance("Personality", "PERS0NALITY"), 1.0 / 11.0);
    EXPECT_DOUBLE_EQ(normalized_edit_distance("", ""), 0.0);
}

TEST(Tokenize, SplitsOnWhitespace)
{
    EXPECT_EQ(tokenize("  The   Great\tGatsby "), (std::vector<std::string>{"The", "Great", "Gatsby"}));
    EXPECT_TRUE(tokenize("   ").empty());
}

TEST(MatchTitle, Examples)
{
    const auto regions = regions_of({"PERSONALITY", "JOHN", "DOE"});
    const auto m = match_title(regions, "Personality");
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].word, "PERSONALITY");
    EXPECT_EQ(m[0].bbox, regions[0].bbox);
    const auto oracle = exhaustive_assignment(regions, {"Personality"});
    ASSERT_EQ(oracle.size(), 1u);
    EXPECT_EQ(oracle[0].second, 0u);

    EXPECT_EQ(match_title(regions_of({"PERS0NALITY"}), "Personality").size(), 1u);
    EXPECT_TRUE(match_title(regions_of({"FOREWORD"}), "Personality").empty());
    EXPECT_THROW(match_title(regions, ""), Error);
}

TEST(MatchTitle, TokenOrderAndInjective)
{
    const auto regions = regions_of({"GATSBY", "THE", "GREAT", "THE"});
    const auto tokens = tokenize("The Great Gatsby");
    const auto m = assign_title_tokens(regions, tokens);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].region, 1u);
    EXPECT_EQ(m[1].region, 2u);
    EXPECT_EQ(m[2].region, 0u);
    const auto words = match_title(regions, "The Great Gatsby");
    ASSERT_EQ(words.size(), 3u);
    EXPECT_EQ(words[0].word, "THE");
    EXPECT_EQ(words[2].word, "GATSBY");
}

TEST(MatchTitle, RandomCasesAgreeWithRescanGreedy)
{
    std::mt19937_64 rng(37);
    const std::vector<std::string> vocab = {"night", "nights", "light", "north", "river", "rivers", "stone",
                                            "stones", "atlas", "at", "a", "sea"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<TextRegion> regions;
        const std::size_t nr = rng() % 5;
        for (std::size_t i = 0; i < nr; ++i) regions.push_back({{0, 0, 1, 1}, vocab[rng() % vocab.size()], 1.0});
        std::vector<std::string> tokens;
        const std::size_t nt = 1 + rng() % 3;
        for (std::size_t i = 0; i < nt; ++i) tokens.push_back(vocab[rng() % vocab.size()]);

        const auto got = assign_title_tokens(regions, tokens);

        // re-scan greedy: repeatedly take the globally cheapest free pair
        std::vector<std::pair<std::size_t, std::size_t>> greedy;
        std::vector<bool> tu(tokens.size()), ru(regions.size());
        for (;;) {
            double best = 2.0;
            std::size_t bt = 0, br = 0;
            for (std::size_t t = 0; t < tokens.size(); ++t)
                for (std::size_t r = 0; r < regions.size(); ++r) {
                    if (tu[t] || ru[r]) continue;
                    const double d = normalized_edit_distance(tokens[t], regions[r].word);
                    if (d <= kTitleMatchThreshold && d < best) {
                        best = d;
                        bt = t;
                        br = r;
                    }
                }
            if (best > 1.0) break;
            tu[bt] = ru[br] = true;
            greedy.push_back({bt, br});
        }
        std::sort(greedy.begin(), greedy.end());
        ASSERT_EQ(got.size(), greedy.size()) << "trial " << trial;
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].token, greedy[i].first);
            EXPECT_EQ(got[i].region, greedy[i].second);
        }
        // a greedy maximal matching holds at least half of the maximum one
        EXPECT_GE(2 * got.size(), exhaustive_assignment(regions, tokens).size());

        std::vector<bool> seen(regions.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_FALSE(seen[got[i].region]);
            seen[got[i].region] = true;
            EXPECT_LE(got[i].distance, kTitleMatchThreshold);
            if (i) {
                EXPECT_LT(got[i - 1].token, got[i].token);
            }
        }
    }
}

TEST(Overlap, RelativeToNarrowerBox)
{
    EXPECT_DOUBLE_EQ(horizontal_overlap({0, 0, 10, 5}, {5, 20, 4, 5}), 1.0);
    EXPECT_DOUBLE_EQ(horizontal_overlap({0, 0, 10, 5}, {8, 0, 4, 5}), 0.5);
    EXPECT_DOUBLE_EQ(horizontal_overlap({0, 0, 10, 5}, {10, 0, 4, 5}), 0.0);
    EXPECT_DOUBLE_EQ(vertical_overlap({0, 0, 5, 10}, {0, 5, 5, 10}), 0.5);
}

TEST(DetectWords, BlankImageHasNoRegions)
{
    EXPECT_TRUE(find_word_boxes(RasterImage(50, 40, {200, 200, 200})).empty());
    const BaselineDetector detector(shipped_atlas());
    EXPECT_TRUE(detect_words(RasterImage(50, 40, {200, 200, 200}), detector).empty());
}

TEST(DetectWords, SingleWordCoversAllGlyphs)
{
    const SynthCover cover = render_cover(spec_for("HELLO", "DejaVuSans"), shipped_atlas());
    const BaselineDetector detector(shipped_atlas());
    const auto regions = detect_words(cover.image, detector);
    ASSERT_EQ(cover.title_words.size(), 1u);
    double score = 0.0;
    const TextRegion* r = best_overlap(regions, cover.title_words[0].bbox, &score);
    ASSERT_NE(r, nullptr);
    EXPECT_GE(score, 0.8);
    for (const CharBox& c : cover.char_boxes) EXPECT_EQ(intersection(c.bbox, r->bbox), c.bbox);
    EXPECT_EQ(r->word, "HELLO");
    EXPECT_GT(r->confidence, 0.0);
    EXPECT_LE(r->confidence, 1.0);
}

TEST(DetectWords, TwoWordsGiveTwoRegions)
{
    const SynthCover cover = render_cover(spec_for("RED SKY", "DejaVuSerif"), shipped_atlas());
    const BaselineDetector detector(shipped_atlas());
    const auto regions = detect_words(cover.image, detector);
    ASSERT_EQ(cover.title_words.size(), 2u);
    for (const WordLabel& w : cover.title_words) {
        double score = 0.0;
        ASSERT_NE(best_overlap(regions, w.bbox, &score), nullptr);
        EXPECT_GE(score, 0.8) << w.word;
    }
    // title words plus the two author words
    EXPECT_EQ(regions.size(), 4u);
}

TEST(DetectWords, ExternalBoxesAreClippedAndFiltered)
{
    std::map<std::string, std::vector<TextRegion>> boxes;
    boxes["b1"] = {{{-5, -5, 20, 20}, "A", 1.0}, {{100, 100, 5, 5}, "B", 1.0}, {{1, 1, 2, 2}, "", 1.0}};
    const ExternalBoxDetector detector(boxes);
    const auto r = detect_words(RasterImage(30, 30), detector, "b1");
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].bbox, (Box{0, 0, 15, 15}));
    EXPECT_TRUE(detect_words(RasterImage(30, 30), detector, "other").empty());
}

TEST(RecognizeWord, RoundTripsAtlasRenders)
{
    const FontAtlas& atlas = shipped_atlas();
    for (const char* font : {"DejaVuSans", "DejaVuSerif", "ComputerModernRoman"}) {
        for (const char* word : {"CAT", "A"}) {
            const SynthCover cover = render_cover(spec_for(word, font), atlas);
            const Box b = cover.title_words[0].bbox;
            const RasterImage crop = fontstat::crop(cover.image, padded(b, crop_margin(b), cover.image.bounds()));
            EXPECT_EQ(recognize_word(crop, atlas), word) << font;
        }
    }
    EXPECT_THROW(recognize_word(RasterImage(10, 10, {255, 255, 255}), atlas), Error);
}

TEST(SegmentCharacters, PersonalityGivesElevenComponentsInOrder)
{
    const SynthCover cover = render_cover(spec_for("Personality", "DejaVuSans"), shipped_atlas());
    const Box b = cover.title_words[0].bbox;
    const RasterImage crop = fontstat::crop(cover.image, padded(b, crop_margin(b), cover.image.bounds()));
    const auto comps = segment_characters(crop, "Personality");
    ASSERT_EQ(comps.size(), 11u);
    std::string labels;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        labels += comps[i].label();
        EXPECT_EQ(comps[i].order, i);
        if (i) {
            EXPECT_LT(comps[i - 1].bbox.x, comps[i].bbox.x);
        }
        EXPECT_EQ(comps[i].glyph.size(), kGlyphSize);
    }
    EXPECT_EQ(labels, "Personality");
}

TEST(SegmentCharacters, DottedIMergesIntoOneComponent)
{
    const SynthCover cover = render_cover(spec_for("it", "DejaVuSerif"), shipped_atlas());
    const Box b = cover.title_words[0].bbox;
    const RasterImage crop = fontstat::crop(cover.image, padded(b, crop_margin(b), cover.image.bounds()));
    const Binarization bin = otsu_binarize(to_grayscale(crop));
    EXPECT_EQ(connected_components(bin.mask).size(), 3u);
    const auto comps = segment_characters(crop, "it");
    ASSERT_EQ(comps.size(), 2u);
    EXPECT_EQ(comps[0].label(), 'i');
    EXPECT_EQ(comps[1].label(), 't');
}

TEST(SegmentCharacters, LigatureKeepsOneLabelAndDropsTheOther)
{
    // "fi" fused into one blob followed by a separate "x"
    RasterImage crop(60, 30, {255, 255, 255});
    for (int y = 5; y < 25; ++y)
        for (int x = 5; x < 30; ++x) crop.at(x, y) = {0, 0, 0};
    for (int y = 5; y < 25; ++y)
        for (int x = 40; x < 52; ++x) crop.at(x, y) = {0, 0, 0};
    const auto comps = segment_characters(crop, "fix");
    ASSERT_EQ(comps.size(), 2u);
    const std::string word = "fix";
    std::size_t pos = 0;
    for (const auto& c : comps) {
        pos = word.find(c.label(), pos);
        ASSERT_NE(pos, std::string::npos) << "labels must be a subsequence";
        ++pos;
    }
    EXPECT_EQ(comps[1].label(), 'x');
}

TEST(SegmentCharacters, LabelsAlwaysSubsequenceOfWord)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        RasterImage crop(120, 30, {255, 255, 255});
        const int blobs = 1 + rng() % 7;
        for (int b = 0; b < blobs; ++b) {
            const int x0 = 4 + b * 16, w = 4 + rng() % 9;
            for (int y = 6; y < 24; ++y)
                for (int x = x0; x < x0 + w; ++x) crop.at(x, y) = {0, 0, 0};
        }
        std::string word(1 + rng() % 7, 'a');
        for (std::size_t i = 0; i < word.size(); ++i) word[i] = static_cast<char>('a' + i);
        const auto comps = segment_characters(crop, word);
        EXPECT_LE(comps.size(), std::min<std::size_t>(blobs, word.size()));
        std::size_t pos = 0;
        for (const auto& c : comps) {
            pos = word.find(c.label(), pos);
            ASSERT_NE(pos, std::string::npos);
            ++pos;
        }
    }
    EXPECT_THROW(segment_characters(RasterImage(10, 10, {0, 0, 0}), "a"), Error);
}

TEST(RoundTrip, TitleRegionRecoveredOnNoiseFreeCovers)
{
    const FontAtlas& atlas = shipped_atlas();
    CorpusProfile profile;
    for (std::size_t s = 0; s < 6; ++s) {
        GenreProfile g;
        g.name = atlas.taxonomy().name(s);
        g.styles.assign(6, 0.0);
        g.styles[s] = 1.0;
        g.text_colors = {{rgb_to_lab({30, 30, 30}), 1.0}, {rgb_to_lab({240, 220, 30}), 1.0}};
        g.backgrounds = default_backgrounds();
        profile.genres.push_back(g);
    }
    const auto specs = corpus_specs(profile, atlas, 10, 99);
    const BaselineDetector detector(atlas);
    std::size_t ok = 0;
    for (const SynthSpec& s : specs) {
        const SynthCover cover = render_cover(s, atlas);
        const auto regions = detect_words(cover.image, detector);
        const auto matched = assign_title_tokens(regions, tokenize(cover.record.title));
        bool all = matched.size() == cover.title_words.size();
        for (const auto& m : matched) all = all && iou(regions[m.region].bbox, cover.title_words[m.token].bbox) >= 0.8;
        ok += all;
    }
    EXPECT_GE(static_cast<double>(ok) / specs.size(), 0.95) << ok << "/" << specs.size();
}

TEST(Jsonl, BookRecordsAndDetections)
{
    TempDir dir("jsonl");
    spit(dir / "meta.jsonl",
         "{\"id\":\"b1\",\"title\":\"Night Sea\",\"genre\":\"Poetry\",\"image\":\"images/b1.png\"}\n\n"
         "{\"id\":\"b2\",\"title\":\"Stone\",\"genre\":\"History\",\"image\":\"images/b2.png\"}\n");
    const auto records = read_book_records(dir / "meta.jsonl");
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].title, "Night Sea");
    EXPECT_EQ(records[1].image, "images/b2.png");
    EXPECT_EQ(parse_book_record(to_json(records[0])).genre, "Poetry");

    spit(dir / "bad.jsonl", "{\"id\":\"b1\",\"title\":\"\",\"genre\":\"x\",\"image\":\"a.png\"}\n");
    EXPECT_THROW(read_book_records(dir / "bad.jsonl"), Error);
    spit(dir / "broken.jsonl", "{not json\n");
    EXPECT_THROW(read_book_records(dir / "broken.jsonl"), Error);
    EXPECT_THROW(read_book_records(dir / "absent.jsonl"), Error);

    spit(dir / "boxes.jsonl", "{\"id\":\"b1\",\"boxes\":[{\"x\":1,\"y\":2,\"w\":3,\"h\":4,\"word\":\"NIGHT\"}]}\n");
    const auto det = read_detections(dir / "boxes.jsonl");
    ASSERT_EQ(det.count("b1"), 1u);
    EXPECT_EQ(det.at("b1")[0].bbox, (Box{1, 2, 3, 4}));
    EXPECT_EQ(det.at("b1")[0].word, "NIGHT");
}
