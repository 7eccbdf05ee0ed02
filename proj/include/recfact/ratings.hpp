#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recfact/linalg.hpp"

namespace recfact {

enum class FeedbackKind { kExplicit, kImplicit };

struct RatingScale {
    double lo = 1.0;
    double hi = 5.0;

    bool operator==(const RatingScale&) const = default;
};

enum class DuplicatePolicy { kKeepLast, kKeepFirst, kError };

// Bijection between opaque tokens and dense indices 0..size-1, in first-seen order.
class IndexMap {
public:
    IndexMap() = default;
    static IndexMap from_tokens(std::vector<std::string> tokens);

    std::size_t intern(std::string_view token);
    std::optional<std::size_t> find(std::string_view token) const;
    const std::string& token(std::size_t index) const { return tokens_.at(index); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }

    bool operator==(const IndexMap& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

struct Rating {
    std::size_t user = 0;
    std::size_t item = 0;
    double value = 0.0;
    std::string timestamp; // carried through untouched; empty when absent
};

class RatingDataset {
public:
    // Validates every invariant: indices in range, values on scale (or {0,1}
    // for implicit data), and no repeated (user, item) pair.
    RatingDataset(IndexMap users, IndexMap items, std::vector<Rating> ratings,
                  FeedbackKind kind = FeedbackKind::kExplicit, RatingScale scale = {});

    // Same index maps, rows picked by position; rows may repeat. Bootstrap
    // resamples are the only datasets that carry repeated pairs.
    static RatingDataset resample(const RatingDataset& source, std::span<const std::size_t> rows);

    // New dataset sharing this one's index maps, kind and scale.
    RatingDataset with_ratings(std::vector<Rating> ratings) const;

    const IndexMap& users() const noexcept { return users_; }
    const IndexMap& items() const noexcept { return items_; }
    std::span<const Rating> ratings() const noexcept { return ratings_; }
    FeedbackKind kind() const noexcept { return kind_; }
    RatingScale scale() const noexcept { return scale_; }

    std::size_t num_users() const noexcept { return users_.size(); }
    std::size_t num_items() const noexcept { return items_.size(); }
    std::size_t size() const noexcept { return ratings_.size(); }
    bool empty() const noexcept { return ratings_.empty(); }

    double mean_rating() const;
    // Sorted item indices per user.
    std::vector<std::vector<std::size_t>> items_by_user() const;
    // Sorted user indices per item.
    std::vector<std::vector<std::size_t>> users_by_item() const;

private:
    struct Unchecked {};
    RatingDataset(Unchecked, IndexMap users, IndexMap items, std::vector<Rating> ratings, FeedbackKind kind,
                  RatingScale scale);

    IndexMap users_;
    IndexMap items_;
    std::vector<Rating> ratings_;
    FeedbackKind kind_;
    RatingScale scale_;
};

// Accumulates token triples, applying the duplicate policy and scale checks.
class DatasetBuilder {
public:
    DatasetBuilder(FeedbackKind kind = FeedbackKind::kExplicit, RatingScale scale = {},
                   DuplicatePolicy duplicates = DuplicatePolicy::kKeepLast);

    void add(std::string_view user, std::string_view item, double value, std::string timestamp = {});
    std::size_t size() const noexcept { return ratings_.size(); }
    RatingDataset build() &&;

private:
    FeedbackKind kind_;
    RatingScale scale_;
    DuplicatePolicy duplicates_;
    IndexMap users_;
    IndexMap items_;
    std::vector<Rating> ratings_;
    std::unordered_map<std::uint64_t, std::size_t> position_;
};

void validate_rating(double value, FeedbackKind kind, RatingScale scale);

struct CsvSchema {
    bool header = false;
    FeedbackKind kind = FeedbackKind::kExplicit;
    RatingScale scale;
    DuplicatePolicy duplicates = DuplicatePolicy::kKeepLast;
};

// Lines are "user,item,rating[,timestamp]". Blank lines and lines starting
// with '#' are skipped. Errors carry the 1-based line number.
RatingDataset parse_csv(std::istream& in, const CsvSchema& schema = {});
RatingDataset parse_csv(std::string_view text, const CsvSchema& schema = {});
void write_csv(std::ostream& out, const RatingDataset& ds);

struct DenseRatings {
    DenseMatrix values; // NaN where unobserved
    DenseMatrix mask;   // 1 where observed, else 0
};

inline constexpr std::size_t kDefaultDenseCap = 100'000'000;

DenseRatings to_dense(const RatingDataset& ds, std::size_t cell_cap = kDefaultDenseCap);

enum class ImputeStrategy { kGlobal, kUser, kItem };

// Observed cells (mask == 1) are copied; the rest are filled per strategy.
// A user (item) row without observations falls back to the global mean.
DenseMatrix impute(const DenseMatrix& values, const DenseMatrix& mask, ImputeStrategy strategy);

struct NegativeSampleResult {
    RatingDataset dataset;
    std::size_t skipped_users = 0; // no unseen items at all
    std::size_t short_users = 0;   // fewer unseen items than the quota
};

// Adds round(ratio * positives(u)) zero-rated items per user, drawn without
// replacement with probability proportional to item popularity (positive count).
NegativeSampleResult negative_sample(const RatingDataset& ds, double ratio = 3.0, std::uint64_t seed = 42);

struct SplitResult {
    RatingDataset train;
    RatingDataset test;
    std::size_t stratification_warnings = 0; // users left with no training rating
};

SplitResult split(const RatingDataset& ds, double holdout_fraction, std::uint64_t seed = 42);

// Uniform bootstrap: ds.size() rows drawn with replacement.
RatingDataset bootstrap_resample(const RatingDataset& ds, std::uint64_t seed);

} // namespace recfact
