#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chartforge::semantics {

/// Word vectors plus corpus frequencies. Immutable once loaded.
class EmbeddingTable {
  public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }
    std::size_t dimension() const { return dimension_; }

    /// Adds a word; throws DimensionMismatch on a vector of the wrong length.
    /// Returns false (and keeps the first entry) for a repeated word.
    bool add(std::string word, std::span<const float> vector, std::uint64_t frequency);

    std::optional<std::size_t> find(std::string_view word) const;
    const std::string& word(std::size_t i) const { return words_[i]; }
    std::span<const float> vector(std::size_t i) const {
        return {vectors_.data() + i * dimension_, dimension_};
    }
    std::uint64_t frequency(std::size_t i) const { return frequencies_[i]; }
    std::uint64_t total_frequency() const { return total_frequency_; }

  private:
    std::size_t dimension_ = 0;
    std::vector<std::string> words_;
    std::vector<float> vectors_;
    std::vector<std::uint64_t> frequencies_;
    std::unordered_map<std::string, std::size_t> index_;
    std::uint64_t total_frequency_ = 0;
};

/// Vector length of the bundled corpus format.
inline constexpr std::size_t kCorpusDimension = 300;

struct LoadOptions {
    /// Required vector length; std::nullopt accepts whatever the first line uses.
    std::optional<std::size_t> expected_dimension = kCorpusDimension;
};

/// One word per line: the word, `dimension` decimal components, then an
/// integer frequency, whitespace separated. A leading "<count> <dimension>"
/// header line (word2vec text style) is accepted. Empty input gives an empty
/// table.
EmbeddingTable load_embeddings(std::string_view bytes, const LoadOptions& options = {});
EmbeddingTable load_embeddings_file(const std::filesystem::path& path, const LoadOptions& options = {});

/// Cosine similarity in double precision; std::nullopt if either vector is zero.
std::optional<double> cosine_similarity(std::span<const float> a, std::span<const float> b);

struct Keyword {
    std::string term;
    double score = 0; // in [0, 1]
    friend bool operator==(const Keyword&, const Keyword&) = default;
};

/// Scores are non-increasing and terms are distinct.
struct KeywordSet {
    std::vector<Keyword> keywords;
    bool empty() const { return keywords.empty(); }
    bool contains(std::string_view term) const;
};

class KeywordProvider {
  public:
    virtual ~KeywordProvider() = default;
    /// Raw scored terms; extract_keywords normalizes them.
    virtual std::vector<Keyword> score_terms(std::string_view title) const = 0;
};

/// Built-in provider: lower-cased content words with stopwords and numbers
/// removed, scored by corpus rarity log((F + 1) / (f + 1)) normalized by the
/// largest score in the title. Without a corpus every word scores 1.
class RarityKeywordProvider final : public KeywordProvider {
  public:
    explicit RarityKeywordProvider(const EmbeddingTable* corpus = nullptr) : corpus_(corpus) {}
    std::vector<Keyword> score_terms(std::string_view title) const override;

  private:
    const EmbeddingTable* corpus_;
};

/// Runs the provider and enforces KeywordSet invariants: scores clamped to
/// [0, 1], duplicates merged (highest score wins), stable sort by score.
KeywordSet extract_keywords(std::string_view title, const KeywordProvider& provider);

bool is_stopword(std::string_view lower_word);

struct RelatedTerm {
    std::string term;
    double similarity = 0;
    std::uint64_t frequency = 0;
    std::size_t rank = 0; // 1-based
    friend bool operator==(const RelatedTerm&, const RelatedTerm&) = default;
};

/// Candidate pool size relative to k before the frequency re-rank.
inline constexpr std::size_t kCandidatePoolFactor = 3;

/// Takes the 3k most cosine-similar words (ties: word order), re-ranks that
/// pool by descending corpus frequency (ties: similarity, then word) and
/// returns the first k. The keyword itself and zero vectors are skipped.
/// Throws UnknownWord if the keyword (or its lower-case form) is absent.
std::vector<RelatedTerm> related_terms(std::string_view keyword, const EmbeddingTable& table, std::size_t k);

} // namespace chartforge::semantics
