#pragma once

#include "configuration.hpp"
#include "dot.hpp"
#include "operationalization.hpp"
#include "parser.hpp"
#include "roadmap.hpp"
#include "transforms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace roadmapper
{

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int model_error = 1;
inline constexpr int io_error = 2;
inline constexpr int resource_limit = 3;
inline constexpr int semantic_error = 4;
} // namespace exit_code

[[nodiscard]] inline int exit_code_for( errc c ) noexcept
{
    switch ( c )
    {
    case errc::duplicate_id:
    case errc::dangling_reference:
    case errc::ill_formed:
    case errc::implication_cycle:
    case errc::inconsistent_mandatory_set:
    case errc::unresolved_reference:
    case errc::parse_error: return exit_code::model_error;
    case errc::resource_limit:
    case errc::too_large:
    case errc::val_overflow: return exit_code::resource_limit;
    default: return exit_code::semantic_error;
    }
}

namespace detail
{

using ojson = nlohmann::ordered_json;

struct io_failure
{
    std::string message;
};

struct model_failure
{
    std::vector< ParseDiagnostic > diagnostics;
};

[[nodiscard]] inline std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw io_failure{ "cannot read '" + path + "'" };
    std::ostringstream ss;
    ss << in.rdbuf();
    if ( in.bad() )
        throw io_failure{ "error while reading '" + path + "'" };
    return ss.str();
}

[[nodiscard]] inline ojson ids_json( const IdSet& s ) { return ojson( std::vector< std::string >( s.begin(), s.end() ) ); }

[[nodiscard]] inline ojson diagnostic_json( const ParseDiagnostic& d )
{
    return ojson{ { "severity", d.severity == Severity::error ? "error" : "warning" },
                  { "file", d.span.file },
                  { "line", d.span.line },
                  { "column", d.span.column },
                  { "message", d.message } };
}

[[nodiscard]] inline ojson preference_json( const Preference& p )
{
    return ojson{ { "left", p.left }, { "kind", std::string( pref_kind_text( p.kind ) ) }, { "right", p.right } };
}

[[nodiscard]] inline ojson report_json( const PropertyReport& r )
{
    ojson out = ojson::object();
    auto put = [ & ]( const char* name, const PropertyCheck& c ) {
        out[ name ] = ojson{ { "holds", c.holds }, { "witness", ids_json( c.witness ) } };
    };
    put( "consistency", r.consistency );
    put( "qual_threshold", r.qual_threshold );
    put( "quant_threshold", r.quant_threshold );
    put( "conformity", r.conformity );
    put( "dominance", r.dominance );
    put( "minimality", r.minimality );
    out[ "is_configuration" ] = r.is_configuration();
    return out;
}

[[nodiscard]] inline ojson adaptation_json( const AdaptationRequirement& a )
{
    return ojson{ { "trigger", ids_json( a.trigger() ) }, { "add", ids_json( a.add() ) }, { "del", ids_json( a.del() ) } };
}

[[nodiscard]] inline std::string join( const IdSet& s, std::string_view sep = ", " )
{
    std::string out;
    for ( const auto& id : s )
        out += ( out.empty() ? "" : std::string( sep ) ) + id;
    return out;
}

struct Options
{
    std::string file;
    std::string format;
    std::size_t max_atoms = EnumerationLimits{}.max_atoms;
    std::size_t max_results = EnumerationLimits{}.max_results;
    bool explain = false;
    std::string rule = "r1";
    std::string var;
    std::optional< double > floor;
    std::optional< std::size_t > max_diff;
    std::size_t max_len = 2;
    std::string prob_target;
    std::string fuzzy_target;
    double mean = 0.0;
    double variance = 0.0;
    double level = 0.0;
    std::string outer = ">=";
    std::string sat_fn;
};

class Cli
{
    const Options& _o;
    std::ostream& _out;
    std::ostream& _err;

public:
    Cli( const Options& o, std::ostream& out, std::ostream& err ) : _o{ o }, _out{ out }, _err{ err } {}

    // Parses the input; diagnostics go to stderr, errors abort with model_failure.
    RequirementsDatabase load() const
    {
        auto res = parse( read_file( _o.file ), _o.file );
        for ( const auto& d : res.diagnostics )
            _err << d.to_string() << '\n';
        if ( !res.ok() )
            throw model_failure{ res.diagnostics };
        return std::move( *res.db );
    }

    [[nodiscard]] EnumerationLimits limits() const
    {
        EnumerationLimits l;
        l.max_atoms = _o.max_atoms;
        l.max_results = _o.max_results;
        return l;
    }

    void emit( const ojson& j ) const { _out << j.dump( 2 ) << '\n'; }

    [[nodiscard]] bool text() const { return _o.format == "text"; }

    int check() const
    {
        ParseResult res;
        res = parse( read_file( _o.file ), _o.file );
        if ( text() )
        {
            for ( const auto& d : res.diagnostics )
                _out << d.to_string() << '\n';
        }
        else
            for ( const auto& d : res.diagnostics )
                _err << d.to_string() << '\n';

        ojson summary = nullptr;
        if ( res.ok() )
        {
            const auto& db = *res.db;
            ojson by_sort = ojson::object();
            std::size_t implications = 0, conflicts = 0;
            for ( Sort s : { Sort::g, Sort::k, Sort::q, Sort::s, Sort::t } )
                by_sort[ std::string( 1, sort_letter( s ) ) ] = ojson{ { "mandatory", 0 }, { "optional", 0 }, { "plain", 0 } };
            for ( const auto& [ id, r ] : db.requirements() )
            {
                if ( std::holds_alternative< Implication >( r.body ) )
                    ++implications;
                else if ( std::holds_alternative< Conflict >( r.body ) )
                    ++conflicts;
                else
                {
                    auto& cell = by_sort[ std::string( 1, sort_letter( r.sort() ) ) ][ std::string( modality_name( r.modality ) ) ];
                    cell = cell.get< int >() + 1;
                }
            }
            summary = ojson{ { "requirements", db.size() },
                             { "preferences", db.preferences().size() },
                             { "satisfaction_functions", db.sat_fns().size() },
                             { "by_sort", by_sort },
                             { "implications", implications },
                             { "conflicts", conflicts },
                             { "mandatory_goals", ids_json( select( Sort::g, Modality::mandatory, db ) ) } };
            if ( text() )
            {
                _out << _o.file << ": " << db.size() << " requirements, " << db.preferences().size() << " preferences\n";
                for ( auto& [ s, cells ] : by_sort.items() )
                    _out << "  " << s << ": " << cells[ "mandatory" ] << " mandatory, " << cells[ "optional" ] << " optional, "
                         << cells[ "plain" ] << " plain\n";
                _out << "  relations: " << implications << " implications, " << conflicts << " conflicts\n";
                _out << "  mandatory goals: " << join( select( Sort::g, Modality::mandatory, db ) ) << '\n';
            }
        }
        else if ( text() )
            _out << _o.file << ": invalid\n";
        if ( !text() )
        {
            ojson diags = ojson::array();
            for ( const auto& d : res.diagnostics )
                diags.push_back( diagnostic_json( d ) );
            emit( ojson{ { "command", "check" }, { "file", _o.file }, { "ok", res.ok() }, { "diagnostics", diags }, { "summary", summary } } );
        }
        return res.ok() ? exit_code::ok : exit_code::model_error;
    }

    int configs() const
    {
        const auto db = load();
        const auto result = enumerate_configurations( db, limits() );
        ConfigurationChecker ck( result.database );

        // Operationalizations per mandatory target, computed once and matched against each configuration.
        std::map< Id, std::vector< Operationalization > > ops;
        if ( _o.explain )
            for ( const auto& [ id, r ] : result.database.requirements() )
                if ( r.modality == Modality::mandatory && r.is_simple() && !is_kt( r.sort() ) )
                    ops[ id ] = r.quant() ? op_quant( id, result.database ) : op_qual( id, result.database );

        ojson list = ojson::array();
        for ( const auto& c : result.configurations )
        {
            ojson item{ { "id", c.id }, { "members", ids_json( c.members ) }, { "report", report_json( ck.check( c.members ) ) } };
            if ( _o.explain )
            {
                ojson ex = ojson::array();
                for ( const auto& [ target, list_ops ] : ops )
                    for ( const auto& op : list_ops )
                        if ( std::includes( c.members.begin(), c.members.end(), op.support.begin(), op.support.end() ) )
                        {
                            ex.push_back( ojson{ { "target", target },
                                                 { "kind", std::string( op_kind_name( op.kind ) ) },
                                                 { "support", ids_json( op.support ) } } );
                            break;
                        }
                item[ "explanation" ] = ex;
            }
            list.push_back( item );
        }
        if ( text() )
        {
            _out << result.configurations.size() << " configuration(s)" << ( result.truncated ? " (truncated)" : "" ) << '\n';
            for ( const auto& c : result.configurations )
                _out << c.id << ": {" << join( c.members ) << "}\n";
            return exit_code::ok;
        }
        emit( ojson{ { "command", "configs" },
                     { "file", _o.file },
                     { "count", result.configurations.size() },
                     { "truncated", result.truncated },
                     { "configurations", list } } );
        return exit_code::ok;
    }

    int rank() const
    {
        if ( _o.var.empty() )
            throw error( errc::invalid_argument, "--var is required" );
        const auto db = load();
        const auto result = enumerate_configurations( db, limits() );
        ConfigRule rule;
        if ( _o.rule == "r1" )
            rule = R1Max{ _o.var };
        else if ( _o.rule == "r2" )
            rule = R2Min{ _o.var };
        else if ( _o.rule == "r3" )
            rule = R3MaxPlusPrefs{ _o.var };
        else
            throw error( errc::invalid_argument, "unknown rule '" + _o.rule + "' (expected r1, r2 or r3)" );
        const auto ranking = rank_configurations( result.database, result.configurations, rule );
        if ( text() )
        {
            std::size_t pos = 0;
            for ( const auto& rc : ranking )
            {
                _out << ++pos << ". " << rc.config.id << "  " << _o.var << " = " << format_number( rc.value );
                if ( std::holds_alternative< R3MaxPlusPrefs >( rule ) )
                    _out << "  satisfied = " << rc.satisfied_count << ( rc.pareto ? "  pareto" : "" );
                _out << '\n';
            }
            return exit_code::ok;
        }
        ojson list = ojson::array();
        std::size_t pos = 0;
        for ( const auto& rc : ranking )
        {
            ojson prefs = ojson::array();
            for ( const auto& p : rc.satisfied_preferences )
                prefs.push_back( preference_json( p ) );
            list.push_back( ojson{ { "rank", ++pos },
                                   { "id", rc.config.id },
                                   { "members", ids_json( rc.config.members ) },
                                   { "value", rc.value },
                                   { "satisfied_count", rc.satisfied_count },
                                   { "satisfied_optional", ids_json( rc.satisfied_optional ) },
                                   { "satisfied_preferences", prefs },
                                   { "pareto", rc.pareto } } );
        }
        emit( ojson{ { "command", "rank" }, { "file", _o.file }, { "rule", _o.rule }, { "var", _o.var }, { "ranking", list } } );
        return exit_code::ok;
    }

    int roadmaps() const
    {
        if ( _o.var.empty() )
            throw error( errc::invalid_argument, "--var is required" );
        const auto db = load();
        const auto result = enumerate_configurations( db, limits() );
        const auto all = build_roadmaps( result.configurations, _o.max_len );
        const R4Roadmap rule{ _o.var, _o.floor.value_or( -std::numeric_limits< double >::infinity() ),
                              _o.max_diff.value_or( std::numeric_limits< std::size_t >::max() ) };
        const auto ranking = rank_roadmaps( result.database, all, rule );

        auto sequence = []( const Roadmap& rm ) {
            ojson s = ojson::array();
            for ( const auto& c : rm.configs )
                s.push_back( c.id );
            return s;
        };
        auto adaptations = []( const Roadmap& rm ) {
            ojson a = ojson::array();
            for ( const auto& ar : rm.adaptations )
                a.push_back( adaptation_json( ar ) );
            return a;
        };
        if ( text() )
        {
            for ( const auto& sr : ranking.ranked )
            {
                std::string seq;
                for ( const auto& c : sr.roadmap.configs )
                    seq += ( seq.empty() ? "" : " -> " ) + c.id;
                _out << seq << "  score = " << format_number( sr.score ) << '\n';
                for ( const auto& ar : sr.roadmap.adaptations )
                    _out << "    <{" << join( ar.trigger() ) << "}, {" << join( ar.add() ) << "}, {" << join( ar.del() ) << "}>\n";
            }
            _out << ranking.filtered.size() << " roadmap(s) filtered\n";
            return exit_code::ok;
        }
        ojson configs = ojson::array();
        for ( const auto& c : result.configurations )
            configs.push_back( ojson{ { "id", c.id }, { "members", ids_json( c.members ) } } );
        ojson ranked = ojson::array();
        for ( const auto& sr : ranking.ranked )
            ranked.push_back( ojson{ { "sequence", sequence( sr.roadmap ) },
                                     { "score", sr.score },
                                     { "values", sr.values },
                                     { "adaptations", adaptations( sr.roadmap ) } } );
        ojson filtered = ojson::array();
        for ( const auto& fr : ranking.filtered )
            filtered.push_back( ojson{ { "sequence", sequence( fr.roadmap ) },
                                       { "reason", fr.reason },
                                       { "witness_index", fr.witness_index },
                                       { "witness_value", fr.witness_value },
                                       { "adaptations", adaptations( fr.roadmap ) } } );
        emit( ojson{ { "command", "roadmaps" },
                     { "file", _o.file },
                     { "var", _o.var },
                     { "floor", _o.floor ? ojson( *_o.floor ) : ojson( nullptr ) },
                     { "max_diff", _o.max_diff ? ojson( *_o.max_diff ) : ojson( nullptr ) },
                     { "max_len", _o.max_len },
                     { "configurations", configs },
                     { "ranked", ranked },
                     { "filtered", filtered } } );
        return exit_code::ok;
    }

    int dot() const
    {
        const auto db = load();
        if ( _o.format == "json" )
            emit( ojson{ { "command", "dot" }, { "file", _o.file }, { "dot", to_dot( db ) } } );
        else
            _out << to_dot( db );
        return exit_code::ok;
    }

    int relax() const
    {
        const bool prob = !_o.prob_target.empty();
        if ( prob == !_o.fuzzy_target.empty() )
            throw error( errc::invalid_argument, "relax needs exactly one of --prob or --fuzzy" );
        const auto db = load();
        Rewrite rw;
        if ( prob )
        {
            CompareOp outer;
            if ( _o.outer == ">=" )
                outer = CompareOp::ge;
            else if ( _o.outer == ">" )
                outer = CompareOp::gt;
            else if ( _o.outer == "<=" )
                outer = CompareOp::le;
            else if ( _o.outer == "<" )
                outer = CompareOp::lt;
            else if ( _o.outer == "=" )
                outer = CompareOp::eq;
            else
                throw error( errc::invalid_argument, "unknown --outer comparison '" + _o.outer + "'" );
            rw = prob_relax( db, _o.prob_target, DistributionSpec::normal( _o.mean, _o.variance ), _o.level, outer );
        }
        else
        {
            if ( _o.sat_fn.empty() )
                throw error( errc::invalid_argument, "--fuzzy needs --satfn" );
            rw = fuzzy_relax( db, _o.fuzzy_target, parse_sat_fn( _o.sat_fn ) );
        }
        const auto text_db = serialize( rw.db );
        if ( _o.format == "json" )
        {
            ojson added_p = ojson::array(), removed_p = ojson::array();
            for ( const auto& p : rw.report.added_preferences )
                added_p.push_back( preference_json( p ) );
            for ( const auto& p : rw.report.removed_preferences )
                removed_p.push_back( preference_json( p ) );
            emit( ojson{ { "command", "relax" },
                         { "file", _o.file },
                         { "report",
                           ojson{ { "added", ids_json( rw.report.added ) },
                                  { "removed", ids_json( rw.report.removed ) },
                                  { "added_preferences", added_p },
                                  { "removed_preferences", removed_p } } },
                         { "database", text_db } } );
            return exit_code::ok;
        }
        _out << "// relaxed " << ( prob ? _o.prob_target : _o.fuzzy_target ) << '\n';
        _out << "// added: " << join( rw.report.added ) << '\n';
        _out << "// removed: " << join( rw.report.removed ) << '\n';
        _out << text_db;
        return exit_code::ok;
    }
};

[[nodiscard]] inline std::optional< std::size_t > env_limit( const char* name )
{
    const char* v = std::getenv( name );
    if ( v == nullptr || *v == '\0' )
        return std::nullopt;
    std::size_t n = 0;
    auto res = std::from_chars( v, v + std::strlen( v ), n );
    if ( res.ec != std::errc{} || *res.ptr != '\0' || n == 0 )
        throw error( errc::invalid_argument, std::string( name ) + " must be a positive integer" );
    return n;
}

} // namespace detail

// Entry point of the roadmapper executable; returns the process exit code.
inline int run_cli( int argc, const char* const* argv, std::ostream& out, std::ostream& err )
{
    detail::Options o;
    CLI::App app{ "Requirements configurations, adaptations and roadmaps over .req models", "roadmapper" };
    app.require_subcommand( 1 );
    app.set_version_flag( "--version", "roadmapper 1.0.0" );

    auto add_common = [ & ]( CLI::App* sub, std::vector< std::string > formats ) {
        sub->add_option( "file", o.file, "input .req model" )->required();
        sub->add_option( "--format", o.format, "output format" )->check( CLI::IsMember( std::move( formats ) ) );
    };
    auto add_limits = [ & ]( CLI::App* sub ) {
        sub->add_option( "--max-atoms", o.max_atoms, "largest number of non-mandatory k/t requirements searched" )
            ->check( CLI::PositiveNumber );
        sub->add_option( "--max-results", o.max_results, "stop after this many configurations" )->check( CLI::PositiveNumber );
    };

    auto* check = app.add_subcommand( "check", "parse and validate a model" );
    add_common( check, { "json", "text" } );

    auto* configs = app.add_subcommand( "configs", "enumerate requirements configurations" );
    add_common( configs, { "json", "text" } );
    add_limits( configs );
    configs->add_flag( "--explain", o.explain, "attach an operationalization per mandatory requirement" );

    auto* rank = app.add_subcommand( "rank", "rank configurations by a decision rule" );
    add_common( rank, { "json", "text" } );
    add_limits( rank );
    rank->add_option( "--rule", o.rule, "r1 (max), r2 (min) or r3 (max plus preferences)" )
        ->check( CLI::IsMember( { "r1", "r2", "r3" } ) );
    rank->add_option( "--var", o.var, "quantitative variable to rank by" )->required();

    auto* roadmaps = app.add_subcommand( "roadmaps", "rank roadmaps (sequences of configurations)" );
    add_common( roadmaps, { "json", "text" } );
    add_limits( roadmaps );
    roadmaps->add_option( "--var", o.var, "quantitative variable summed along a roadmap" )->required();
    roadmaps->add_option( "--floor", o.floor, "every configuration must reach this value" );
    roadmaps->add_option( "--maxdiff", o.max_diff, "largest change between consecutive configurations" );
    roadmaps->add_option( "--maxlen", o.max_len, "longest roadmap" )->check( CLI::PositiveNumber );

    auto* dot = app.add_subcommand( "dot", "render the requirement graph in Graphviz DOT" );
    add_common( dot, { "dot", "json" } );

    auto* relax = app.add_subcommand( "relax", "relax a quality constraint probabilistically or fuzzily" );
    add_common( relax, { "text", "json" } );
    auto* prob = relax->add_option( "--prob", o.prob_target, "quality constraint to relax probabilistically" );
    auto* fuzzy = relax->add_option( "--fuzzy", o.fuzzy_target, "quality constraint to relax fuzzily" );
    prob->excludes( fuzzy );
    relax->add_option( "--mean", o.mean, "mean of the assumed normal distribution" )->needs( prob );
    relax->add_option( "--variance", o.variance, "variance of the assumed normal distribution" )->needs( prob );
    relax->add_option( "--level", o.level, "required probability" )->needs( prob );
    relax->add_option( "--outer", o.outer, "comparison against the level" )->needs( prob );
    relax->add_option( "--satfn", o.sat_fn, "satisfaction function, e.g. exp(0.5)" )->needs( fuzzy );

    try
    {
        if ( auto n = detail::env_limit( "ROADMAPPER_LIMIT_ATOMS" ) )
            o.max_atoms = *n;
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        const int code = app.exit( e, out, err );
        return code == 0 ? exit_code::ok : exit_code::semantic_error;
    }
    catch ( const error& e )
    {
        err << "roadmapper: " << e.what() << '\n';
        return exit_code::semantic_error;
    }

    detail::Cli cli( o, out, err );
    try
    {
        if ( *check )
            return cli.check();
        if ( *configs )
            return cli.configs();
        if ( *rank )
            return cli.rank();
        if ( *roadmaps )
            return cli.roadmaps();
        if ( *dot )
            return cli.dot();
        return cli.relax();
    }
    catch ( const detail::io_failure& e )
    {
        err << "roadmapper: " << e.message << '\n';
        return exit_code::io_error;
    }
    catch ( const detail::model_failure& )
    {
        return exit_code::model_error;
    }
    catch ( const error& e )
    {
        err << "roadmapper: " << e.what() << '\n';
        return exit_code_for( e.code() );
    }
}

} // namespace roadmapper
