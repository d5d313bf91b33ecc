#pragma once

#include <string>

#include "dfv/lang/ast.hpp"

namespace dfv::lang {

/// Renders a program back to source. The output reparses to a structurally equal AST.
[[nodiscard]] std::string pretty(const Program& p);
[[nodiscard]] std::string pretty(const NodeDecl& n);
[[nodiscard]] std::string pretty(const Expr& e);

}  // namespace dfv::lang
