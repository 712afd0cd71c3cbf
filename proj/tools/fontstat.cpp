// fontstat: font style and color statistics for book covers and ad designs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fontstat/pipeline.hpp"
#include "fontstat/synthkit.hpp"

#ifndef FONTSTAT_DEFAULT_ATLAS
#define FONTSTAT_DEFAULT_ATLAS "data/atlas"
#endif

namespace fs = std::filesystem;
using namespace fontstat;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct BooksArgs {
    std::string corpus, atlas = FONTSTAT_DEFAULT_ATLAS, boxes, out;
    int k = 3;
    std::size_t palette_size = 16;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

struct AdsArgs {
    std::string corpus, lookup, out, weight = "size-len";
    std::size_t palette_size = 8;
    std::uint64_t seed = 0;
};

struct MdsArgs {
    std::string table, out;
};

struct SynthArgs {
    std::string profile, atlas = FONTSTAT_DEFAULT_ATLAS, out;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

int run_books_cmd(const BooksArgs& a)
{
    BooksConfig cfg;
    cfg.corpus = a.corpus;
    cfg.k = a.k;
    cfg.palette_size = a.palette_size;
    cfg.seed = a.seed;
    cfg.workers = a.jobs;
    if (!a.boxes.empty()) cfg.boxes = a.boxes;
    const FontAtlas atlas = load_atlas(a.atlas);
    const BooksReport report = run_books(cfg, atlas);
    write_books_outputs(report, a.out);
    for (const BookOutcome& o : report.outcomes)
        if (o.status != BookStatus::Matched)
            std::cerr << fmt::format("{}: {} ({})\n", o.record.id, to_string(o.status), o.message);
    for (const std::string& n : report.notes) std::cerr << n << '\n';
    std::cout << report.summary() << '\n';
    return 0;
}

int run_ads_cmd(const AdsArgs& a)
{
    AdsConfig cfg;
    cfg.corpus = a.corpus;
    cfg.lookup = a.lookup;
    cfg.palette_size = a.palette_size;
    cfg.seed = a.seed;
    cfg.weighting = a.weight == "size" ? WeightMode::Size : WeightMode::SizeTimesLength;
    const AdsReport report = run_ads(cfg);
    write_ads_outputs(report, a.out);
    for (const std::string& n : report.notes) std::cerr << n << '\n';
    std::cout << ads_summary(report.stats) << '\n';
    return 0;
}

int run_mds_cmd(const MdsArgs& a)
{
    const Embedding2D e = run_mds(a.table, a.out);
    std::cout << fmt::format("{} genres embedded, stress {:.6g}\n", e.genres.size(), e.stress);
    return 0;
}

int run_synth_cmd(const SynthArgs& a)
{
    std::ifstream in(a.profile);
    if (!in) throw Error("cannot open profile " + a.profile);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("profile {}: {}", a.profile, e.what()));
    }
    const CorpusProfile profile = parse_profile(j);
    const FontAtlas atlas = load_atlas(a.atlas);
    const std::size_t n = generate_corpus(profile, atlas, a.n, a.seed, a.out, a.jobs);
    std::cout << fmt::format("{} covers written to {}\n", n, a.out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Font style and color statistics for book covers and ad designs"};
    app.require_subcommand(1);

    BooksArgs books;
    auto* b = app.add_subcommand("books", "Analyze a book cover corpus");
    b->add_option("--corpus", books.corpus, "Directory with metadata.jsonl and images")->required();
    b->add_option("--atlas", books.atlas, "Glyph atlas directory")->capture_default_str();
    b->add_option("--k", books.k, "Nearest glyphs per style")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--palette-size", books.palette_size, "Colors in the palette")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    b->add_option("--seed", books.seed, "Palette seed")->capture_default_str();
    b->add_option("--boxes", books.boxes, "JSONL word boxes from an external detector");
    b->add_option("--jobs", books.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--out", books.out, "Output directory")->required();

    AdsArgs ads;
    auto* d = app.add_subcommand("ads", "Analyze an advertisement corpus");
    d->add_option("--corpus", ads.corpus, "JSONL design records")->required();
    d->add_option("--lookup", ads.lookup, "CSV font_name,style")->required();
    d->add_option("--palette-size", ads.palette_size, "Colors in the palette")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    d->add_option("--seed", ads.seed, "Palette seed")->capture_default_str();
    d->add_option("--weight", ads.weight, "Record weight")
        ->capture_default_str()
        ->check(CLI::IsMember({"size", "size-len"}));
    d->add_option("--out", ads.out, "Output directory")->required();

    MdsArgs mds;
    auto* m = app.add_subcommand("mds", "Embed the genres of a frequency table in 2-D");
    m->add_option("--table", mds.table, "CSV table written by books or ads")->required();
    m->add_option("--out", mds.out, "Output directory")->required();

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a labelled synthetic cover corpus");
    s->add_option("--profile", synth.profile, "JSON corpus profile")->required();
    s->add_option("--n", synth.n, "Number of covers")->required()->check(CLI::PositiveNumber);
    s->add_option("--seed", synth.seed, "Corpus seed")->required();
    s->add_option("--atlas", synth.atlas, "Glyph atlas directory")->capture_default_str();
    s->add_option("--jobs", synth.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--out", synth.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*b) return run_books_cmd(books);
        if (*d) return run_ads_cmd(ads);
        if (*m) return run_mds_cmd(mds);
        if (*s) return run_synth_cmd(synth);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
