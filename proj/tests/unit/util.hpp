#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dfv/lang/parser.hpp"
#include "dfv/lang/typecheck.hpp"

namespace testutil {

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::filesystem::path> lus_files(const std::string& sub)
{
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(DFV_BENCH_DIR) / sub)) {
        if (e.path().extension() == ".lus") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Benchmark models plus fixtures, optionally with extra source appended.
inline dfv::lang::TypedProgram bench_program(const std::string& extra = {})
{
    dfv::lang::Program p;
    for (const char* sub : {"models", "fixtures"}) {
        for (const auto& f : lus_files(sub)) dfv::lang::merge_into(p, dfv::lang::parse(read_file(f)));
    }
    if (!extra.empty()) dfv::lang::merge_into(p, dfv::lang::parse(extra));
    return dfv::lang::typecheck(std::move(p));
}

inline dfv::lang::TypedProgram program(const std::string& src)
{
    return dfv::lang::typecheck(dfv::lang::parse(src));
}

}  // namespace testutil
