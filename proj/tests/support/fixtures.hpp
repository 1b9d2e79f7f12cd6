#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vlb/model.hpp"

#ifndef VLB_FIXTURE_DIR
#error "VLB_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace vlb::testing {

inline std::string read_fixture_text(const std::string& name)
{
    std::ifstream in(std::string(VLB_FIXTURE_DIR) + "/" + name, std::ios::binary);
    if (!in) {
        throw std::runtime_error("missing fixture " + name);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Scenario load_fixture(const std::string& name, Mode mode)
{
    Scenario s = parse_scenario(read_fixture_text(name));
    s.mode = mode;
    return s;
}

}  // namespace vlb::testing
