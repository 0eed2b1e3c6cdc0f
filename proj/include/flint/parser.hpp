#ifndef FLINT_PARSER_HPP
#define FLINT_PARSER_HPP

#include <string>
#include <vector>

#include "flint/ast.hpp"

namespace flint::flc {

// Parses FLC source. All directive branches are kept in the AST; the
// directive structure lands in SourceUnit::scopes. Throws
// Error(Errc::input) with file:line positions on malformed input,
// unbalanced/unterminated directives, duplicate declarations, or use of an
// undeclared feature in a directive.
SourceUnit parse_unit_text(const std::string& path, const std::string& text);
SourceUnit parse_unit_file(const std::string& path);

// Product definitions, one per line: "name: feat1, feat2". Empty enabled
// sets are allowed ("name:"). '#' lines and blank lines are skipped.
// Duplicate product names are an error.
std::vector<ProductDef> parse_products_text(const std::string& path,
                                            const std::string& text);
std::vector<ProductDef> parse_products_file(const std::string& path);

}  // namespace flint::flc

#endif
