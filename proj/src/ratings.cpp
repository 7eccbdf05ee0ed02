#include "recfact/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "recfact/error.hpp"
#include "recfact/random.hpp"

namespace recfact {

namespace {

std::uint64_t pair_key(std::size_t user, std::size_t item)
{
    return (static_cast<std::uint64_t>(user) << 32) ^ static_cast<std::uint64_t>(item);
}

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string format_real(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace

// ---------------------------------------------------------------- IndexMap

IndexMap IndexMap::from_tokens(std::vector<std::string> tokens)
{
    IndexMap m;
    for (auto& t : tokens) {
        const std::size_t before = m.size();
        m.intern(t);
        require(m.size() == before + 1, ErrorCode::kFormat, "index map has repeated token '" + t + "'");
    }
    return m;
}

std::size_t IndexMap::intern(std::string_view token)
{
    auto [it, inserted] = lookup_.try_emplace(std::string(token), tokens_.size());
    if (inserted)
        tokens_.emplace_back(token);
    return it->second;
}

std::optional<std::size_t> IndexMap::find(std::string_view token) const
{
    auto it = lookup_.find(std::string(token));
    if (it == lookup_.end())
        return std::nullopt;
    return it->second;
}

// ----------------------------------------------------------- RatingDataset

void validate_rating(double value, FeedbackKind kind, RatingScale scale)
{
    require(std::isfinite(value), ErrorCode::kValidation, "rating is not finite");
    if (kind == FeedbackKind::kImplicit) {
        require(value == 0.0 || value == 1.0, ErrorCode::kValidation,
                "implicit rating " + format_real(value) + " is not 0 or 1");
    } else {
        require(value >= scale.lo && value <= scale.hi, ErrorCode::kValidation,
                "rating " + format_real(value) + " outside scale [" + format_real(scale.lo) + ", " +
                    format_real(scale.hi) + "]");
    }
}

RatingDataset::RatingDataset(Unchecked, IndexMap users, IndexMap items, std::vector<Rating> ratings,
                             FeedbackKind kind, RatingScale scale)
    : users_(std::move(users)), items_(std::move(items)), ratings_(std::move(ratings)), kind_(kind), scale_(scale)
{
}

RatingDataset::RatingDataset(IndexMap users, IndexMap items, std::vector<Rating> ratings, FeedbackKind kind,
                             RatingScale scale)
    : RatingDataset(Unchecked{}, std::move(users), std::move(items), std::move(ratings), kind, scale)
{
    require(scale_.lo < scale_.hi, ErrorCode::kValidation, "rating scale must have lo < hi");
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(ratings_.size());
    for (const Rating& r : ratings_) {
        require(r.user < users_.size() && r.item < items_.size(), ErrorCode::kRange,
                "rating refers to an index outside the index maps");
        validate_rating(r.value, kind_, scale_);
        require(seen.insert(pair_key(r.user, r.item)).second, ErrorCode::kDuplicate,
                "duplicate pair (" + users_.token(r.user) + ", " + items_.token(r.item) + ")");
    }
}

RatingDataset RatingDataset::resample(const RatingDataset& source, std::span<const std::size_t> rows)
{
    std::vector<Rating> picked;
    picked.reserve(rows.size());
    for (std::size_t r : rows) {
        require(r < source.size(), ErrorCode::kRange, "resample row out of range");
        picked.push_back(source.ratings_[r]);
    }
    return RatingDataset(Unchecked{}, source.users_, source.items_, std::move(picked), source.kind_, source.scale_);
}

RatingDataset RatingDataset::with_ratings(std::vector<Rating> ratings) const
{
    return RatingDataset(users_, items_, std::move(ratings), kind_, scale_);
}

double RatingDataset::mean_rating() const
{
    require(!ratings_.empty(), ErrorCode::kEmptyData, "mean of an empty dataset");
    double sum = 0.0;
    for (const Rating& r : ratings_)
        sum += r.value;
    return sum / static_cast<double>(ratings_.size());
}

std::vector<std::vector<std::size_t>> RatingDataset::items_by_user() const
{
    std::vector<std::vector<std::size_t>> out(num_users());
    for (const Rating& r : ratings_)
        out[r.user].push_back(r.item);
    for (auto& v : out) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
}

std::vector<std::vector<std::size_t>> RatingDataset::users_by_item() const
{
    std::vector<std::vector<std::size_t>> out(num_items());
    for (const Rating& r : ratings_)
        out[r.item].push_back(r.user);
    for (auto& v : out) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
}

// ---------------------------------------------------------- DatasetBuilder

DatasetBuilder::DatasetBuilder(FeedbackKind kind, RatingScale scale, DuplicatePolicy duplicates)
    : kind_(kind), scale_(scale), duplicates_(duplicates)
{
    require(scale.lo < scale.hi, ErrorCode::kValidation, "rating scale must have lo < hi");
}

void DatasetBuilder::add(std::string_view user, std::string_view item, double value, std::string timestamp)
{
    require(!user.empty() && !item.empty(), ErrorCode::kParse, "empty user or item token");
    validate_rating(value, kind_, scale_);
    const std::size_t u = users_.intern(user);
    const std::size_t i = items_.intern(item);
    auto [it, inserted] = position_.try_emplace(pair_key(u, i), ratings_.size());
    if (inserted) {
        ratings_.push_back(Rating{u, i, value, std::move(timestamp)});
        return;
    }
    switch (duplicates_) {
    case DuplicatePolicy::kKeepLast:
        ratings_[it->second].value = value;
        ratings_[it->second].timestamp = std::move(timestamp);
        break;
    case DuplicatePolicy::kKeepFirst:
        break;
    case DuplicatePolicy::kError:
        fail(ErrorCode::kDuplicate, "duplicate pair (" + std::string(user) + ", " + std::string(item) + ")");
    }
}

RatingDataset DatasetBuilder::build() &&
{
    require(!ratings_.empty(), ErrorCode::kEmptyData, "dataset is empty");
    return RatingDataset(std::move(users_), std::move(items_), std::move(ratings_), kind_, scale_);
}

// --------------------------------------------------------------------- CSV

RatingDataset parse_csv(std::istream& in, const CsvSchema& schema)
{
    DatasetBuilder builder(schema.kind, schema.scale, schema.duplicates);
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = schema.header;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF")
            view = trim(view.substr(3));
        if (view.empty() || view.front() == '#')
            continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            fields.push_back(trim(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (fields.size() < 3 || fields.size() > 4)
            fail(ErrorCode::kParse, where + "expected user,item,rating[,timestamp], got " +
                                        std::to_string(fields.size()) + " fields");

        double value = 0.0;
        const auto rating = fields[2];
        auto [ptr, ec] = std::from_chars(rating.data(), rating.data() + rating.size(), value);
        if (ec != std::errc() || ptr != rating.data() + rating.size() || rating.empty())
            fail(ErrorCode::kParse, where + "rating '" + std::string(rating) + "' is not a decimal number");

        try {
            builder.add(fields[0], fields[1], value, fields.size() == 4 ? std::string(fields[3]) : std::string());
        } catch (const Error& e) {
            fail(e.code(), where + e.what());
        }
    }
    require(builder.size() > 0, ErrorCode::kEmptyData, "no ratings in input");
    return std::move(builder).build();
}

RatingDataset parse_csv(std::string_view text, const CsvSchema& schema)
{
    std::istringstream in{std::string(text)};
    return parse_csv(in, schema);
}

void write_csv(std::ostream& out, const RatingDataset& ds)
{
    for (const Rating& r : ds.ratings()) {
        out << ds.users().token(r.user) << ',' << ds.items().token(r.item) << ',' << format_real(r.value);
        if (!r.timestamp.empty())
            out << ',' << r.timestamp;
        out << '\n';
    }
}

// ------------------------------------------------------------ dense views

DenseRatings to_dense(const RatingDataset& ds, std::size_t cell_cap)
{
    require(!ds.empty(), ErrorCode::kEmptyData, "to_dense: dataset is empty");
    const std::size_t m = ds.num_users();
    const std::size_t n = ds.num_items();
    if (n != 0 && m > cell_cap / n)
        fail(ErrorCode::kCapacity, "to_dense: " + std::to_string(m) + "x" + std::to_string(n) +
                                       " exceeds the dense cell cap of " + std::to_string(cell_cap) +
                                       "; use a factor model (funk, svdpp, fm) instead");
    DenseRatings out{DenseMatrix(m, n, std::numeric_limits<double>::quiet_NaN()), DenseMatrix(m, n, 0.0)};
    for (const Rating& r : ds.ratings()) {
        out.values(r.user, r.item) = r.value;
        out.mask(r.user, r.item) = 1.0;
    }
    return out;
}

DenseMatrix impute(const DenseMatrix& values, const DenseMatrix& mask, ImputeStrategy strategy)
{
    require(values.rows() == mask.rows() && values.cols() == mask.cols(), ErrorCode::kShape,
            "impute: values and mask differ in shape");
    const std::size_t m = values.rows();
    const std::size_t n = values.cols();

    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> row_sum(m, 0.0), col_sum(n, 0.0);
    std::vector<std::size_t> row_count(m, 0), col_count(n, 0);
    for (std::size_t u = 0; u < m; ++u)
        for (std::size_t i = 0; i < n; ++i) {
            const double flag = mask(u, i);
            require(flag == 0.0 || flag == 1.0, ErrorCode::kInput, "impute: mask entries must be 0 or 1");
            if (flag == 0.0)
                continue;
            const double v = values(u, i);
            require(std::isfinite(v), ErrorCode::kInput, "impute: observed entry is not finite");
            total += v;
            ++count;
            row_sum[u] += v;
            ++row_count[u];
            col_sum[i] += v;
            ++col_count[i];
        }
    require(count > 0, ErrorCode::kEmptyData, "impute: mask has no observed entries");
    const double global = total / static_cast<double>(count);

    DenseMatrix out(m, n);
    for (std::size_t u = 0; u < m; ++u)
        for (std::size_t i = 0; i < n; ++i) {
            if (mask(u, i) == 1.0) {
                out(u, i) = values(u, i);
                continue;
            }
            double fill = global;
            if (strategy == ImputeStrategy::kUser && row_count[u] > 0)
                fill = row_sum[u] / static_cast<double>(row_count[u]);
            else if (strategy == ImputeStrategy::kItem && col_count[i] > 0)
                fill = col_sum[i] / static_cast<double>(col_count[i]);
            out(u, i) = fill;
        }
    return out;
}

// ------------------------------------------------------ negative sampling

NegativeSampleResult negative_sample(const RatingDataset& ds, double ratio, std::uint64_t seed)
{
    require(ds.kind() == FeedbackKind::kImplicit, ErrorCode::kArgument,
            "negative_sample: dataset must hold implicit feedback");
    require(std::isfinite(ratio) && ratio > 0.0, ErrorCode::kRange, "negative_sample: ratio must be > 0");

    const std::size_t m = ds.num_users();
    const std::size_t n = ds.num_items();
    std::vector<double> popularity(n, 0.0);
    std::vector<std::size_t> positives(m, 0);
    for (const Rating& r : ds.ratings())
        if (r.value == 1.0) {
            popularity[r.item] += 1.0;
            ++positives[r.user];
        }
    const auto seen = ds.items_by_user();

    Rng rng(seed);
    NegativeSampleResult result{ds, 0, 0};
    std::vector<Rating> out(ds.ratings().begin(), ds.ratings().end());
    std::vector<std::size_t> pool;
    std::vector<double> weight;
    for (std::size_t u = 0; u < m; ++u) {
        const auto quota = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(positives[u])));
        if (quota == 0)
            continue;
        pool.clear();
        weight.clear();
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (cursor < seen[u].size() && seen[u][cursor] == i) {
                ++cursor;
                continue;
            }
            pool.push_back(i);
            weight.push_back(popularity[i]);
        }
        if (pool.empty()) {
            ++result.skipped_users;
            continue;
        }
        if (pool.size() < quota)
            ++result.short_users;

        const std::size_t draws = std::min(quota, pool.size());
        for (std::size_t d = 0; d < draws; ++d) {
            const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
            std::size_t pick = 0;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double acc = 0.0;
                pick = pool.size() - 1;
                for (std::size_t c = 0; c < pool.size(); ++c) {
                    acc += weight[c];
                    if (target < acc && weight[c] > 0.0) {
                        pick = c;
                        break;
                    }
                }
                while (weight[pick] == 0.0 && pick > 0)
                    --pick;
            } else {
                pick = static_cast<std::size_t>(rng.below(pool.size()));
            }
            out.push_back(Rating{u, pool[pick], 0.0, {}});
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
        }
    }
    result.dataset = ds.with_ratings(std::move(out));
    return result;
}

// ------------------------------------------------------------ splitting

SplitResult split(const RatingDataset& ds, double fraction, std::uint64_t seed)
{
    require(fraction > 0.0 && fraction < 1.0, ErrorCode::kRange, "split: holdout fraction must be in (0, 1)");
    const std::size_t total = ds.size();
    const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = total; i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);

    std::vector<std::size_t> remaining(ds.num_users(), 0);
    for (const Rating& r : ds.ratings())
        ++remaining[r.user];

    std::vector<bool> held(total, false);
    std::size_t taken = 0;
    // First pass keeps at least one training rating per user.
    for (std::size_t row : order) {
        if (taken == target)
            break;
        const std::size_t u = ds.ratings()[row].user;
        if (remaining[u] > 1) {
            held[row] = true;
            --remaining[u];
            ++taken;
        }
    }
    std::size_t warnings = 0;
    for (std::size_t row : order) {
        if (taken == target)
            break;
        if (held[row])
            continue;
        const std::size_t u = ds.ratings()[row].user;
        held[row] = true;
        if (--remaining[u] == 0)
            ++warnings;
        ++taken;
    }

    std::vector<Rating> train, test;
    for (std::size_t row = 0; row < total; ++row)
        (held[row] ? test : train).push_back(ds.ratings()[row]);
    return SplitResult{ds.with_ratings(std::move(train)), ds.with_ratings(std::move(test)), warnings};
}

RatingDataset bootstrap_resample(const RatingDataset& ds, std::uint64_t seed)
{
    require(!ds.empty(), ErrorCode::kEmptyData, "bootstrap of an empty dataset");
    Rng rng(seed);
    std::vector<std::size_t> rows(ds.size());
    for (auto& r : rows)
        r = static_cast<std::size_t>(rng.below(ds.size()));
    return RatingDataset::resample(ds, rows);
}

} // namespace recfact
