#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dfv/lang/ast.hpp"

namespace dfv::lang {

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, std::string found, std::vector<std::string> expected, std::string detail = {});

    [[nodiscard]] SourcePos pos() const { return pos_; }
    [[nodiscard]] const std::string& found() const { return found_; }
    [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }

private:
    SourcePos pos_;
    std::string found_;
    std::vector<std::string> expected_;
};

/// Parses a complete source file.
[[nodiscard]] Program parse(std::string_view text);

/// Parses a single expression (used for contract and observer formulas kept as data).
[[nodiscard]] Expr parse_expression(std::string_view text);

}  // namespace dfv::lang
