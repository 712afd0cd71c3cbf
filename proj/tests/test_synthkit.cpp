#include <fstream>
#include <iostream>

#include <gtest/gtest.h>

#include "fontstat/image_io.hpp"
#include "fontstat/pipeline.hpp"
#include "fontstat/synthkit.hpp"
#include "support.hpp"

using namespace fontstat;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

SynthSpec base_spec(const std::string& title = "AB")
{
    const FontAtlas& atlas = shipped_atlas();
    SynthSpec s;
    s.id = "t";
    s.title = title;
    s.font = "DejaVuSerif";
    s.style = *atlas.style_of_font(s.font);
    s.text_color = rgb_to_lab({0, 0, 0});
    s.background = rgb_to_lab({255, 255, 255});
    s.genre = "g";
    s.seed = 7;
    return s;
}

CorpusProfile load_profile(const std::string& name)
{
    std::ifstream in(source_dir() / "data" / "profiles" / name);
    return parse_profile(nlohmann::json::parse(in));
}

std::size_t count_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += !line.empty();
    return n;
}

} // namespace

TEST(RenderCover, TwoLetterTitleStructure)
{
    const SynthCover c = render_cover(base_spec(), shipped_atlas());
    ASSERT_EQ(c.char_boxes.size(), 2u);
    EXPECT_EQ(c.char_boxes[0].character, 'A');
    EXPECT_EQ(c.char_boxes[1].character, 'B');
    ASSERT_EQ(c.title_words.size(), 1u);
    EXPECT_EQ(c.title_words[0].word, "AB");
    const Box w = c.title_words[0].bbox;
    for (const CharBox& cb : c.char_boxes) {
        EXPECT_GE(cb.bbox.x, w.x);
        EXPECT_GE(cb.bbox.y, w.y);
        EXPECT_LE(cb.bbox.x + cb.bbox.w, w.x + w.w);
        EXPECT_LE(cb.bbox.y + cb.bbox.h, w.y + w.h);
    }
    EXPECT_LT(c.char_boxes[0].bbox.x + c.char_boxes[0].bbox.w, c.char_boxes[1].bbox.x);
    EXPECT_FALSE(c.other_words.empty());
    EXPECT_EQ(c.record.title, "AB");
    EXPECT_EQ(c.text_rgb, (Rgb{0, 0, 0}));
    // ink appears inside the title box
    bool ink = false;
    for (int y = w.y; y < w.y + w.h; ++y)
        for (int x = w.x; x < w.x + w.w; ++x) ink = ink || c.image.at(x, y) == Rgb{0, 0, 0};
    EXPECT_TRUE(ink);
}

TEST(RenderCover, Deterministic)
{
    const SynthCover a = render_cover(base_spec("Quiet Harbor"), shipped_atlas());
    const SynthCover b = render_cover(base_spec("Quiet Harbor"), shipped_atlas());
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.title_words.size(), 2u);
    SynthSpec other = base_spec("Quiet Harbor");
    other.seed = 8;
    EXPECT_EQ(render_cover(other, shipped_atlas()).char_boxes.size(), a.char_boxes.size());
}

TEST(RenderCover, Errors)
{
    SynthSpec low = base_spec();
    low.text_color = rgb_to_lab({120, 120, 120});
    low.background = rgb_to_lab({130, 130, 130});
    EXPECT_THROW(render_cover(low, shipped_atlas()), Error);

    SynthSpec wrong = base_spec();
    wrong.style = *shipped_atlas().taxonomy().find("Fancy");
    EXPECT_THROW(render_cover(wrong, shipped_atlas()), Error);

    SynthSpec unknown = base_spec();
    unknown.font = "NoSuchFont";
    EXPECT_THROW(render_cover(unknown, shipped_atlas()), Error);

    EXPECT_THROW(render_cover(base_spec("A@B"), shipped_atlas()), Error);
    EXPECT_THROW(render_cover(base_spec("  "), shipped_atlas()), Error);
}

TEST(RenderCover, ScaleChangesGlyphSize)
{
    SynthSpec big = base_spec();
    big.scale = 1.5;
    const SynthCover a = render_cover(base_spec(), shipped_atlas());
    const SynthCover b = render_cover(big, shipped_atlas());
    EXPECT_GT(b.char_boxes[0].bbox.h, a.char_boxes[0].bbox.h);
}

TEST(Profile, ParsingAndErrors)
{
    const CorpusProfile three = load_profile("three_genres.json");
    ASSERT_EQ(three.genres.size(), 3u);
    EXPECT_EQ(three.scale_min, 1.0);
    EXPECT_EQ(three.scale_max, 1.0);
    const CorpusProfile nine = load_profile("nine_genres.json");
    EXPECT_EQ(nine.genres.size(), 9u);
    EXPECT_LT(nine.scale_min, nine.scale_max);

    auto bad = [](const char* text) { EXPECT_THROW(parse_profile(nlohmann::json::parse(text)), Error) << text; };
    bad(R"({"genres":[]})");
    bad(R"({})");
    bad(R"({"genres":[{"name":"g","styles":{"Gothic":1}}]})");
    bad(R"({"genres":[{"name":"g","styles":{"Serif":0}}]})");
    bad(R"({"genres":[{"name":"g","styles":{"Serif":-1,"Fancy":2}}]})");
    bad(R"({"genres":[{"name":"g","styles":{"Serif":1}}],"scale":[2,1]})");
    bad(R"({"genres":[{"styles":{"Serif":1}}]})");
}

TEST(Corpus, SingleStyleGenreUsesOnlyThatStyle)
{
    const CorpusProfile p = parse_profile(nlohmann::json::parse(R"({"genres":[{"name":"g","styles":{"SansSerif":1}}]})"));
    const FontAtlas& atlas = shipped_atlas();
    const std::size_t sans = *atlas.taxonomy().find("SansSerif");
    for (const SynthSpec& s : corpus_specs(p, atlas, 200, 3)) {
        EXPECT_EQ(s.style, sans);
        EXPECT_EQ(atlas.style_of_font(s.font), sans);
        EXPECT_TRUE(detail::font_covers(atlas, s.font, s.title));
        EXPECT_GE(delta_e76(s.text_color, s.background), kMinLegibleDeltaE);
    }
}

TEST(Corpus, SpecsIndependentOfOrder)
{
    const CorpusProfile p = load_profile("three_genres.json");
    const auto specs = corpus_specs(p, shipped_atlas(), 20, 11);
    ASSERT_EQ(specs.size(), 60u);
    for (std::size_t i : {0u, 17u, 33u, 59u}) {
        const SynthSpec s = sample_spec(p, p.genres[i / 20], shipped_atlas(), 11, i);
        EXPECT_EQ(s.id, specs[i].id);
        EXPECT_EQ(s.title, specs[i].title);
        EXPECT_EQ(s.font, specs[i].font);
        EXPECT_EQ(s.seed, specs[i].seed);
    }
    const auto other = corpus_specs(p, shipped_atlas(), 20, 12);
    std::size_t same = 0;
    for (std::size_t i = 0; i < 60; ++i) same += other[i].title == specs[i].title && other[i].font == specs[i].font;
    EXPECT_LT(same, 30u);
}

TEST(Corpus, StyleFrequenciesFollowProfile)
{
    const CorpusProfile p = load_profile("nine_genres.json");
    const auto specs = corpus_specs(p, shipped_atlas(), 400, 5);
    for (std::size_t g = 0; g < p.genres.size(); ++g) {
        std::vector<double> freq(6, 0.0);
        for (std::size_t i = 0; i < 400; ++i) freq[specs[g * 400 + i].style] += 1.0 / 400;
        double total = 0;
        for (double w : p.genres[g].styles) total += w;
        for (std::size_t s = 0; s < 6; ++s) EXPECT_NEAR(freq[s], p.genres[g].styles[s] / total, 0.08);
    }
}

TEST(Corpus, GeneratesFilesIndependentOfWorkers)
{
    const CorpusProfile p = load_profile("three_genres.json");
    TempDir a("synth1"), b("synth4");
    EXPECT_EQ(generate_corpus(p, shipped_atlas(), 100, 21, a.path(), 1), 300u);
    EXPECT_EQ(generate_corpus(p, shipped_atlas(), 100, 21, b.path(), 4), 300u);
    EXPECT_EQ(count_lines(a / "metadata.jsonl"), 300u);
    EXPECT_EQ(count_lines(a / "ground_truth.jsonl"), 300u);
    std::size_t images = 0;
    for (const auto& e : fs::directory_iterator(a / "images")) images += e.path().extension() == ".png";
    EXPECT_EQ(images, 300u);
    EXPECT_EQ(slurp(a / "metadata.jsonl"), slurp(b / "metadata.jsonl"));
    EXPECT_EQ(slurp(a / "ground_truth.jsonl"), slurp(b / "ground_truth.jsonl"));
    for (const char* img : {"images/book00000.png", "images/book00150.png", "images/book00299.png"})
        EXPECT_EQ(slurp(a / img), slurp(b / img)) << img;

    std::ifstream meta(a / "metadata.jsonl");
    std::string line;
    std::getline(meta, line);
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("id"), "book00000");
    EXPECT_TRUE(fs::exists(a / j.at("image").get<std::string>()));
}

TEST(Corpus, ScaleJitterKeepsArgmaxAccuracy)
{
    CorpusProfile p = load_profile("three_genres.json");
    p.scale_min = 0.85;
    p.scale_max = 1.15;
    const FontAtlas& atlas = shipped_atlas();
    const BaselineDetector detector(atlas);
    const auto specs = corpus_specs(p, atlas, 20, 31);
    std::size_t matched = 0, correct = 0, agree = 0;
    for (const SynthSpec& s : specs) {
        const SynthCover cover = render_cover(s, atlas);
        const BookOutcome o = analyze_cover(cover.record, cover.image, detector, atlas, 3);
        if (o.status != BookStatus::Matched) continue;
        ++matched;
        correct += o.style.argmax() == s.style;
        agree += analyze_cover(cover.record, cover.image, detector, atlas, 1).style.argmax() == o.style.argmax();
    }
    EXPECT_GE(matched, specs.size() * 95 / 100);
    EXPECT_GE(correct, matched * 9 / 10);
    EXPECT_GE(agree, matched * 9 / 10);
    std::cout << "jittered: " << matched << " matched, " << correct << " correct, " << agree << " K=1/K=3 agree\n";
}
