#pragma once

#include "roadmapper/roadmapper.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fixtures
{

inline roadmapper::RequirementsDatabase from_text( const std::string& text )
{
    auto r = roadmapper::parse( text );
    if ( !r.ok() )
    {
        std::string all;
        for ( const auto& d : r.diagnostics )
            all += d.to_string() + "\n";
        throw std::runtime_error( all );
    }
    return *r.db;
}

inline std::string read_file( const std::filesystem::path& p )
{
    std::ifstream in( p );
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path models_dir() { return ROADMAPPER_MODELS_DIR; }

inline roadmapper::RequirementsDatabase model( const std::string& name ) { return from_text( read_file( models_dir() / name ) ); }

// The configuration realizing all of the given ids.
inline const roadmapper::Configuration* containing( const std::vector< roadmapper::Configuration >& cs, const roadmapper::IdSet& ids )
{
    for ( const auto& c : cs )
        if ( std::includes( c.members.begin(), c.members.end(), ids.begin(), ids.end() ) )
            return &c;
    return nullptr;
}

} // namespace fixtures
