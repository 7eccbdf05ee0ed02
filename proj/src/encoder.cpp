#include <charconv>
#include <cmath>
#include <string>

#include "recfact/error.hpp"
#include "recfact/fm.hpp"

namespace recfact {

FeatureEncoder::FeatureEncoder(std::vector<EncoderColumn> columns) : columns_(std::move(columns))
{
    require(!columns_.empty(), ErrorCode::kArgument, "encoder: needs at least one column");
    lookup_.resize(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        offsets_.push_back(dimension_);
        const EncoderColumn& col = columns_[c];
        if (col.kind == ColumnKind::kNumeric) {
            require(col.categories.empty(), ErrorCode::kArgument,
                    "encoder: numeric column '" + col.name + "' lists categories");
            dimension_ += 1;
            continue;
        }
        for (std::size_t k = 0; k < col.categories.size(); ++k)
            require(lookup_[c].try_emplace(col.categories[k], k).second, ErrorCode::kArgument,
                    "encoder: column '" + col.name + "' repeats category '" + col.categories[k] + "'");
        dimension_ += col.categories.size() + 1;
    }
}

std::size_t FeatureEncoder::unknown_index(std::size_t column) const
{
    const EncoderColumn& col = columns_.at(column);
    require(col.kind == ColumnKind::kCategorical, ErrorCode::kArgument, "encoder: numeric columns have no unknown slot");
    return offsets_[column] + col.categories.size();
}

FeatureVector FeatureEncoder::encode(std::span<const std::string> record) const
{
    require(record.size() == columns_.size(), ErrorCode::kEncoding,
            "encoder: record has " + std::to_string(record.size()) + " fields, expected " +
                std::to_string(columns_.size()));
    std::vector<FeatureEntry> entries;
    entries.reserve(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const std::string& raw = record[c];
        if (columns_[c].kind == ColumnKind::kNumeric) {
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
            require(ec == std::errc() && ptr == raw.data() + raw.size() && !raw.empty() && std::isfinite(value),
                    ErrorCode::kEncoding, "encoder: column '" + columns_[c].name + "' value '" + raw +
                                              "' is not a finite number");
            if (value != 0.0)
                entries.push_back({offsets_[c], value, c});
            continue;
        }
        auto it = lookup_[c].find(raw);
        const std::size_t index = it == lookup_[c].end() ? unknown_index(c) : offsets_[c] + it->second;
        entries.push_back({index, 1.0, c});
    }
    return FeatureVector(dimension_, std::move(entries));
}

FeatureVector FeatureEncoder::encode_positions(std::span<const std::size_t> positions) const
{
    require(positions.size() == columns_.size(), ErrorCode::kEncoding, "encoder: wrong number of positions");
    std::vector<FeatureEntry> entries;
    entries.reserve(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        require(columns_[c].kind == ColumnKind::kCategorical, ErrorCode::kEncoding,
                "encoder: positional encoding needs categorical columns");
        const std::size_t p = positions[c];
        const std::size_t index = p < columns_[c].categories.size() ? offsets_[c] + p : unknown_index(c);
        entries.push_back({index, 1.0, c});
    }
    return FeatureVector(dimension_, std::move(entries));
}

} // namespace recfact
