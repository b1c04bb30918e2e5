#pragma once

#include "zlink/chain.hpp"

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace zlink {

/// Canonical JSON form of one block, as carried by JSONL files and by the
/// verbose-block RPC response. Amount fields are integer zatoshi; decimal
/// coin strings are also accepted on input.
nlohmann::ordered_json block_to_json(const BlockRecord& block);
BlockRecord block_from_json(const nlohmann::json& j, const std::string& where);

/// Reads up to `max_blocks` lines (0 = all). Validates schema, strictly
/// increasing heights and per-block structure; throws ParseError with the
/// offending line number. `line_no` carries the running line count across
/// chunked calls.
IngestBatch read_jsonl(std::istream& in, std::size_t max_blocks = 0, std::size_t* line_no = nullptr);

void write_jsonl(std::ostream& out, const IngestBatch& batch);

} // namespace zlink
