#include "chartforge/semantics.hpp"

#include "chartforge/error.hpp"
#include "chartforge/png_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

namespace chartforge::semantics {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <class T> std::optional<T> parse(std::string_view s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

constexpr std::array<std::string_view, 128> kStopwords = {
    "a",       "about",  "above",   "after",  "again",   "against", "all",     "am",     "an",      "and",
    "any",     "are",    "as",      "at",     "be",      "because", "been",    "before", "being",   "below",
    "between", "both",   "but",     "by",     "can",     "could",   "did",     "do",     "does",    "doing",
    "down",    "during", "each",    "few",    "for",     "from",    "further", "had",    "has",     "have",
    "having",  "he",     "her",     "here",   "hers",    "him",     "his",     "how",    "i",       "if",
    "in",      "into",   "is",      "it",     "its",     "itself",  "just",    "me",     "more",    "most",
    "my",      "no",     "nor",     "not",    "now",     "of",      "off",     "on",     "once",    "only",
    "or",      "other",  "our",     "ours",   "out",     "over",    "own",     "per",    "same",    "she",
    "should",  "so",     "some",    "such",   "than",    "that",    "the",     "their",  "theirs",  "them",
    "then",    "there",  "these",   "they",   "this",    "those",   "through", "to",     "too",     "under",
    "until",   "up",     "very",    "vs",     "was",     "we",      "were",    "what",   "when",    "where",
    "which",   "while",  "who",     "whom",   "why",     "will",    "with",    "would",  "you",     "your",
    "yours",   "via",    "versus",  "among",  "within",  "without", "across",  "along",
};

} // namespace

bool EmbeddingTable::add(std::string word, std::span<const float> vector, std::uint64_t frequency) {
    if (words_.empty() && dimension_ == 0) dimension_ = vector.size();
    if (vector.size() != dimension_)
        throw Error(ErrorCode::DimensionMismatch, "\"" + word + "\" has " + std::to_string(vector.size()) +
                                                      " components, expected " + std::to_string(dimension_));
    if (index_.contains(word)) return false;
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    vectors_.insert(vectors_.end(), vector.begin(), vector.end());
    frequencies_.push_back(frequency);
    total_frequency_ += frequency;
    return true;
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
    if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
    return std::nullopt;
}

EmbeddingTable load_embeddings(std::string_view bytes, const LoadOptions& options) {
    EmbeddingTable table(options.expected_dimension.value_or(0));
    std::vector<float> vec;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first_content_line = true;
    while (pos < bytes.size()) {
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) end = bytes.size();
        const std::string_view line = bytes.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto tok = split_ws(line);
        if (tok.empty()) continue;

        if (first_content_line) {
            first_content_line = false;
            if (tok.size() == 2 && parse<std::uint64_t>(tok[0]) && parse<std::uint64_t>(tok[1])) {
                const std::size_t dim = *parse<std::uint64_t>(tok[1]);
                if (options.expected_dimension && dim != *options.expected_dimension)
                    throw Error(ErrorCode::DimensionMismatch, "header declares dimension " + std::to_string(dim) +
                                                                  ", expected " +
                                                                  std::to_string(*options.expected_dimension));
                if (!options.expected_dimension) table = EmbeddingTable(dim);
                continue;
            }
        }
        if (tok.size() < 3)
            throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": need word, vector and frequency");
        const auto freq = parse<std::uint64_t>(tok.back());
        if (!freq)
            throw Error(ErrorCode::MalformedLine,
                        "line " + std::to_string(line_no) + ": frequency \"" + std::string(tok.back()) + "\" is not a non-negative integer");
        vec.clear();
        for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
            const auto v = parse<float>(tok[i]);
            if (!v || !std::isfinite(*v))
                throw Error(ErrorCode::MalformedLine,
                            "line " + std::to_string(line_no) + ": component \"" + std::string(tok[i]) + "\" is not a number");
            vec.push_back(*v);
        }
        if (table.dimension() != 0 && vec.size() != table.dimension())
            throw Error(ErrorCode::DimensionMismatch, "line " + std::to_string(line_no) + ": " +
                                                          std::to_string(vec.size()) + " components, expected " +
                                                          std::to_string(table.dimension()));
        table.add(std::string(tok.front()), vec, *freq);
    }
    return table;
}

EmbeddingTable load_embeddings_file(const std::filesystem::path& path, const LoadOptions& options) {
    const auto bytes = read_file(path);
    return load_embeddings(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), options);
}

std::optional<double> cosine_similarity(std::span<const float> a, std::span<const float> b) {
    double dot = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        aa += static_cast<double>(a[i]) * a[i];
        bb += static_cast<double>(b[i]) * b[i];
    }
    if (aa == 0 || bb == 0) return std::nullopt;
    return std::clamp(dot / std::sqrt(aa * bb), -1.0, 1.0);
}

bool KeywordSet::contains(std::string_view term) const {
    return std::any_of(keywords.begin(), keywords.end(), [&](const Keyword& k) { return k.term == term; });
}

bool is_stopword(std::string_view w) {
    return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
}

std::vector<Keyword> RarityKeywordProvider::score_terms(std::string_view title) const {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        const bool numeric = !cur.empty() && std::all_of(cur.begin(), cur.end(), [](unsigned char c) { return std::isdigit(c); });
        if (cur.size() >= 2 && !numeric && !is_stopword(cur) &&
            std::find(words.begin(), words.end(), cur) == words.end())
            words.push_back(cur);
        cur.clear();
    };
    for (char c : title) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else
            flush();
    }
    flush();

    std::vector<Keyword> out;
    if (!corpus_ || corpus_->empty()) {
        for (auto& w : words) out.push_back({w, 1.0});
        return out;
    }
    const double total = static_cast<double>(corpus_->total_frequency());
    std::vector<double> rarity;
    for (const auto& w : words) {
        const auto idx = corpus_->find(w);
        const double f = idx ? static_cast<double>(corpus_->frequency(*idx)) : 0.0;
        rarity.push_back(std::log((total + 1.0) / (f + 1.0)));
    }
    const double top = rarity.empty() ? 0.0 : *std::max_element(rarity.begin(), rarity.end());
    for (std::size_t i = 0; i < words.size(); ++i) out.push_back({words[i], top > 0 ? rarity[i] / top : 1.0});
    return out;
}

KeywordSet extract_keywords(std::string_view title, const KeywordProvider& provider) {
    KeywordSet set;
    for (auto& k : provider.score_terms(title)) {
        if (k.term.empty()) continue;
        const double score = std::isfinite(k.score) ? std::clamp(k.score, 0.0, 1.0) : 0.0;
        auto it = std::find_if(set.keywords.begin(), set.keywords.end(), [&](const Keyword& e) { return e.term == k.term; });
        if (it == set.keywords.end())
            set.keywords.push_back({std::move(k.term), score});
        else
            it->score = std::max(it->score, score);
    }
    std::stable_sort(set.keywords.begin(), set.keywords.end(),
                     [](const Keyword& a, const Keyword& b) { return a.score > b.score; });
    return set;
}

std::vector<RelatedTerm> related_terms(std::string_view keyword, const EmbeddingTable& table, std::size_t k) {
    auto self = table.find(keyword);
    if (!self) self = table.find(lower(keyword));
    if (!self) throw Error(ErrorCode::UnknownWord, "\"" + std::string(keyword) + "\" is not in the embedding table");
    if (k == 0) return {};

    struct Candidate {
        std::size_t index;
        double similarity;
    };
    std::vector<Candidate> pool;
    const auto query = table.vector(*self);
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (i == *self) continue;
        if (auto s = cosine_similarity(query, table.vector(i))) pool.push_back({i, *s});
    }
    auto by_similarity = [&](const Candidate& a, const Candidate& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return table.word(a.index) < table.word(b.index);
    };
    const std::size_t keep = std::min(pool.size(), kCandidatePoolFactor * k);
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(), by_similarity);
    pool.resize(keep);

    std::sort(pool.begin(), pool.end(), [&](const Candidate& a, const Candidate& b) {
        if (table.frequency(a.index) != table.frequency(b.index))
            return table.frequency(a.index) > table.frequency(b.index);
        return by_similarity(a, b);
    });

    std::vector<RelatedTerm> out;
    for (std::size_t i = 0; i < std::min(k, pool.size()); ++i)
        out.push_back({table.word(pool[i].index), pool[i].similarity, table.frequency(pool[i].index), i + 1});
    return out;
}

} // namespace chartforge::semantics
