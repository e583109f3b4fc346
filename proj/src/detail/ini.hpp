#pragma once

#include <sstream>
#include <string>
#include <string_view>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "detail/text.hpp"
#include "wordnorms/error.hpp"

namespace wordnorms::detail {

// Boost's reader drops sections without keys. Put them back so that a bare
// "[model:x]" is honoured instead of silently ignored.
inline boost::property_tree::ptree parse_ini(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::ConfigError, e.what());
    }
    std::istringstream lines{std::string(text)};
    for (std::string line; std::getline(lines, line);) {
        const auto t = trim(line);
        if (t.size() < 2 || t.front() != '[' || t.back() != ']') continue;
        const std::string name(trim(t.substr(1, t.size() - 2)));
        if (tree.find(name) == tree.not_found()) tree.push_back({name, pt::ptree()});
    }
    return tree;
}

}  // namespace wordnorms::detail
