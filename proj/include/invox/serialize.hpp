#pragma once

#include <string>

#include "invox/document.hpp"

namespace invox {

enum class DocFormat { Json, Xml };

inline constexpr int kDocSchemaVersion = 1;

/// Serializes a valid document; round-trips losslessly through
/// deserialize_document. The schema is described in docs/schema.md.
std::string serialize_document(const Document& doc, DocFormat format);

/// Throws SchemaError on malformed input (message names the offending
/// path) and InvariantError on well-formed but invariant-violating input.
Document deserialize_document(const std::string& bytes, DocFormat format);

} // namespace invox
