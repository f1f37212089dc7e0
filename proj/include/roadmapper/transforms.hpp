#pragma once

#include "quant_eval.hpp"

#include <optional>
#include <vector>

namespace roadmapper
{

struct RewriteReport
{
    IdSet added;
    std::vector< Preference > added_preferences;
    IdSet removed;
    std::vector< Preference > removed_preferences;
    int iterations = 1;

    [[nodiscard]] bool unchanged() const noexcept
    {
        return added.empty() && added_preferences.empty() && removed.empty() && removed_preferences.empty();
    }

    void merge( const RewriteReport& other )
    {
        for ( const auto& id : other.added )
            if ( !removed.contains( id ) )
                added.insert( id );
            else
                removed.erase( id );
        for ( const auto& id : other.removed )
            if ( added.contains( id ) )
                added.erase( id );
            else
                removed.insert( id );
        added_preferences.insert( added_preferences.end(), other.added_preferences.begin(), other.added_preferences.end() );
        removed_preferences.insert( removed_preferences.end(), other.removed_preferences.begin(), other.removed_preferences.end() );
        iterations += other.iterations;
    }
};

struct Rewrite
{
    RequirementsDatabase db;
    RewriteReport report;
};

// Reserved prefix for synthesized requirement ids.
inline constexpr std::string_view macro_prefix = "@macro/";

namespace detail
{

// Number text usable inside an id: '.' -> 'p', '-' -> 'm', '+' dropped.
[[nodiscard]] inline std::string encode_number( double x )
{
    std::string out;
    for ( char c : format_number( x ) )
    {
        if ( c == '.' )
            out += 'p';
        else if ( c == '-' )
            out += 'm';
        else if ( c != '+' )
            out += c;
    }
    return out;
}

[[nodiscard]] inline std::string macro_id( std::string_view kind, const std::vector< std::string >& parts )
{
    std::string id( macro_prefix );
    id += kind;
    for ( const auto& p : parts )
    {
        id += '/';
        id += p;
    }
    return id;
}

// First id of the form base, base/2, base/3, ... not yet taken.
[[nodiscard]] inline Id fresh_id( const RequirementsDatabase& db, const Id& base )
{
    if ( !db.contains( base ) )
        return base;
    for ( int k = 2;; ++k )
    {
        auto id = base + "/" + std::to_string( k );
        if ( !db.contains( id ) )
            return id;
    }
}

[[nodiscard]] inline NumCondition assignment_condition( const QuantVar& v, double x )
{
    return Compare{ NumExpr::var( v ), CompareOp::eq, NumExpr::constant( x ) };
}

// Existing requirement with the given sort and quantitative condition, if any.
[[nodiscard]] inline const Requirement* find_quant( const RequirementsDatabase& db, Sort sort, const NumCondition& c )
{
    for ( const auto& [ _, r ] : db.requirements() )
        if ( const auto* sq = r.quant(); sq != nullptr && sq->sort == sort && sq->cond == c )
            return &r;
    return nullptr;
}

[[nodiscard]] inline const Requirement* find_conflict( const RequirementsDatabase& db, const IdSet& antecedents,
                                                      std::optional< Modality > modality )
{
    for ( const auto& [ _, r ] : db.requirements() )
        if ( const auto* c = std::get_if< Conflict >( &r.body ); c != nullptr && c->antecedents == antecedents &&
                                                                    ( !modality || r.modality == *modality ) )
            return &r;
    return nullptr;
}

// Returns the id of an equal quantitative requirement, adding one under base_id if absent.
inline Id ensure_quant( RequirementsDatabase& db, RewriteReport& report, Sort sort, const NumCondition& c, const Id& base_id )
{
    if ( const auto* r = find_quant( db, sort, c ) )
        return r->id;
    auto id = fresh_id( db, base_id );
    db = db.with_requirement( make_quant( sort, id, c ) );
    report.added.insert( id );
    return id;
}

inline void ensure_preference( RequirementsDatabase& db, RewriteReport& report, Preference p )
{
    auto& prefs = db.preferences();
    if ( std::find( prefs.begin(), prefs.end(), p ) != prefs.end() )
        return;
    db = db.with_preference( p );
    report.added_preferences.push_back( std::move( p ) );
}

// Every variable mentioned by a quantitative requirement, plus satisfaction-function variables.
[[nodiscard]] inline std::set< QuantVar > mentioned_vars( const RequirementsDatabase& db )
{
    std::set< QuantVar > out;
    for ( const auto& [ _, r ] : db.requirements() )
        if ( const auto* sq = r.quant() )
        {
            auto vs = condition_vars( sq->cond, true );
            out.insert( vs.begin(), vs.end() );
        }
    for ( const auto& [ v, _ ] : db.sat_fns() )
        out.insert( v );
    return out;
}

} // namespace detail

// For every variable with at least two values over the whole database, adds q(v = x) per
// value and a mandatory pairwise conflict, so no configuration realizes two values of one
// variable. Repeated to a fixpoint.
[[nodiscard]] inline Rewrite apply_conflict_macro( const RequirementsDatabase& db )
{
    Rewrite out{ db, {} };
    out.report.iterations = 0;
    while ( true )
    {
        ++out.report.iterations;
        const auto before = out.report.added.size();
        detail::Realizer r( out.db );
        const auto all = r.close( r.bits( out.db.ids() ) );
        std::vector< std::pair< QuantVar, std::vector< double > > > todo;
        for ( const auto& v : detail::mentioned_vars( out.db ) )
        {
            const auto vals = r.values( all.derived, v );
            if ( vals.size() >= 2 )
                todo.emplace_back( v, std::vector< double >( vals.begin(), vals.end() ) );
        }
        for ( const auto& [ v, xs ] : todo )
        {
            std::vector< Id > qs;
            for ( double x : xs )
                qs.push_back( detail::ensure_quant( out.db, out.report, Sort::q, detail::assignment_condition( v, x ),
                                                    detail::macro_id( "q", { v, detail::encode_number( x ) } ) ) );
            for ( std::size_t i = 0; i < xs.size(); ++i )
                for ( std::size_t j = i + 1; j < xs.size(); ++j )
                {
                    const IdSet pair{ qs[ i ], qs[ j ] };
                    if ( detail::find_conflict( out.db, pair, Modality::mandatory ) != nullptr )
                        continue;
                    auto id = detail::fresh_id(
                        out.db, detail::macro_id( "conflict", { v, detail::encode_number( xs[ i ] ), detail::encode_number( xs[ j ] ) } ) );
                    out.db = out.db.with_requirement( make_conflict( id, pair, Modality::mandatory ) );
                    out.report.added.insert( id );
                }
        }
        if ( out.report.added.size() == before )
            break;
    }
    return out;
}

// Def. V.10 over VAL(Δ, v): per value pair, equal satisfaction yields indifference between
// the two assumptions; otherwise the assumptions conflict and the more satisfying one is
// strictly preferred.
[[nodiscard]] inline Rewrite apply_softgoal_macro( const RequirementsDatabase& db, const QuantVar& v )
{
    const auto* f = db.sat_fn( v );
    if ( f == nullptr )
        throw error( errc::no_satisfaction_fn, "no satisfaction function for '" + v + "'" );
    Rewrite out{ db, {} };
    const auto vals = val( db.ids(), v, db );
    const std::vector< double > xs( vals.begin(), vals.end() );
    if ( xs.size() < 2 )
        return out;

    std::vector< Id > ks;
    for ( double x : xs )
        ks.push_back( detail::ensure_quant( out.db, out.report, Sort::k, detail::assignment_condition( v, x ),
                                            detail::macro_id( "k", { v, detail::encode_number( x ) } ) ) );
    for ( std::size_t i = 0; i < xs.size(); ++i )
        for ( std::size_t j = i + 1; j < xs.size(); ++j )
        {
            const double mi = sat_value( *f, xs[ i ] );
            const double mj = sat_value( *f, xs[ j ] );
            if ( approx_equal( mi, mj ) )
            {
                const auto& prefs = out.db.preferences();
                const Preference reversed{ PrefKind::indifferent, ks[ j ], ks[ i ] };
                if ( std::find( prefs.begin(), prefs.end(), reversed ) == prefs.end() )
                    detail::ensure_preference( out.db, out.report, { PrefKind::indifferent, ks[ i ], ks[ j ] } );
                continue;
            }
            const bool i_first = mi > mj;
            const IdSet pair{ ks[ i ], ks[ j ] };
            if ( detail::find_conflict( out.db, pair, std::nullopt ) == nullptr )
            {
                auto id = detail::fresh_id(
                    out.db, detail::macro_id( "sgconflict", { v, detail::encode_number( xs[ i ] ), detail::encode_number( xs[ j ] ) } ) );
                out.db = out.db.with_requirement( make_conflict( id, pair ) );
                out.report.added.insert( id );
            }
            detail::ensure_preference( out.db, out.report,
                                       { PrefKind::strict, i_first ? ks[ i ] : ks[ j ], i_first ? ks[ j ] : ks[ i ] } );
        }
    return out;
}

namespace detail
{

[[nodiscard]] inline CompareOp flip( CompareOp op ) noexcept
{
    switch ( op )
    {
    case CompareOp::gt: return CompareOp::lt;
    case CompareOp::lt: return CompareOp::gt;
    case CompareOp::ge: return CompareOp::le;
    case CompareOp::le: return CompareOp::ge;
    default: return op;
    }
}

// Replaces every reference to from by to in relations and preferences.
inline RequirementsDatabase repoint( const RequirementsDatabase& db, const Id& from, const Id& to )
{
    std::vector< Requirement > reqs;
    for ( auto [ id, r ] : db.requirements() )
    {
        auto swap_in = [ & ]( IdSet& s ) {
            if ( s.erase( from ) > 0 )
                s.insert( to );
        };
        if ( auto* imp = std::get_if< Implication >( &r.body ) )
        {
            swap_in( imp->antecedents );
            if ( imp->consequent == from )
                imp->consequent = to;
        }
        else if ( auto* con = std::get_if< Conflict >( &r.body ) )
            swap_in( con->antecedents );
        reqs.push_back( std::move( r ) );
    }
    std::vector< Preference > prefs;
    for ( auto p : db.preferences() )
    {
        if ( p.left == from )
            p.left = to;
        if ( p.right == from )
            p.right = to;
        prefs.push_back( std::move( p ) );
    }
    return RequirementsDatabase::from_parts( reqs, std::move( prefs ), db.sat_fns() );
}

} // namespace detail

// Turns the hard bound qc: v op bound into P(v op bound) outer level under v ~ dist.
[[nodiscard]] inline Rewrite prob_relax( const RequirementsDatabase& db, const Id& qc, const DistributionSpec& dist,
                                         double level, CompareOp outer = CompareOp::ge )
{
    const auto& r = db.at( qc );
    const auto* sq = r.quant();
    if ( sq == nullptr || sq->sort != Sort::q )
        throw error( errc::wrong_sort, "'" + qc + "' is not a quantitative quality constraint" );
    const auto* cmp = std::get_if< Compare >( &sq->cond );
    if ( cmp == nullptr )
        throw error( errc::not_a_comparison, "'" + qc + "' is already probabilistic or distributional" );
    if ( cmp->op == CompareOp::eq || cmp->op == CompareOp::ne )
        throw error( errc::not_a_comparison, "'" + qc + "' is not an inequality" );
    if ( !( level > 0.0 && level <= 1.0 ) )
        throw error( errc::invalid_argument, "probability level must lie in (0, 1]" );
    if ( outer == CompareOp::ne )
        throw error( errc::invalid_argument, "unsupported outer comparison '!='" );

    QuantVar v;
    CompareOp inner = cmp->op;
    NumExpr bound;
    if ( const auto* name = cmp->lhs.var_name(); name != nullptr && !cmp->rhs.vars().contains( *name ) )
    {
        v = *name;
        bound = cmp->rhs;
    }
    else if ( const auto* rname = cmp->rhs.var_name(); rname != nullptr && !cmp->lhs.vars().contains( *rname ) )
    {
        v = *rname;
        bound = cmp->lhs;
        inner = detail::flip( inner );
    }
    else
        throw error( errc::not_a_comparison, "'" + qc + "' does not compare a single variable with a bound" );

    Rewrite out{ db, {} };
    const NumCondition dcond = Distributed{ v, dist };
    if ( detail::find_quant( db, Sort::k, dcond ) == nullptr )
    {
        auto id = detail::fresh_id( db, detail::macro_id( "dist", { v } ) );
        out.db = out.db.with_requirement( make_quant( Sort::k, id, dcond ) );
        out.report.added.insert( id );
    }
    auto new_id = detail::fresh_id( out.db, detail::macro_id( "prob", { qc } ) );
    Requirement relaxed{ new_id, r.modality,
                         SimpleQuant{ Sort::q, ProbCompare{ v, inner, bound, outer, NumExpr::constant( level ) } },
                         r.description };
    out.db = out.db.with_replaced( std::move( relaxed ) );
    out.db = detail::repoint( out.db, qc, new_id ).without_requirement( qc );
    out.report.added.insert( new_id );
    out.report.removed.insert( qc );
    return out;
}

// Drops the hard constraint qc over a single variable v and registers mu as v's
// satisfaction function. Relations and preferences mentioning qc go with it.
[[nodiscard]] inline Rewrite fuzzy_relax( const RequirementsDatabase& db, const Id& qc, const SatisfactionFn& mu )
{
    const auto& r = db.at( qc );
    const auto* sq = r.quant();
    if ( sq == nullptr || sq->sort != Sort::q )
        throw error( errc::wrong_sort, "'" + qc + "' is not a quantitative quality constraint" );
    const auto vars = condition_vars( sq->cond, true );
    if ( vars.size() != 1 )
        throw error( errc::multi_variable_condition,
                     "'" + qc + "' constrains " + std::to_string( vars.size() ) + " variables, expected one" );

    Rewrite out{ db, {} };
    for ( const auto& [ id, other ] : db.requirements() )
        if ( other.references().contains( qc ) )
        {
            out.db = out.db.without_requirement( id );
            out.report.removed.insert( id );
        }
    for ( const auto& p : db.preferences() )
        if ( p.left == qc || p.right == qc )
        {
            out.db = out.db.without_preference( p );
            out.report.removed_preferences.push_back( p );
        }
    out.db = out.db.without_requirement( qc ).with_sat_fn( *vars.begin(), mu );
    out.report.removed.insert( qc );
    return out;
}

// G(v <_f n): full satisfaction up to n, linear decay to 0 at zero_at, then the softgoal macro.
[[nodiscard]] inline Rewrite translate_fuzzy_goal( const RequirementsDatabase& db, const QuantVar& v, double n,
                                                   std::optional< double > zero_at = std::nullopt )
{
    const double z = zero_at.value_or( n + 0.5 * std::fabs( n ) );
    auto out = Rewrite{ db.with_sat_fn( v, SatisfactionFn::plateau_then_decay( n, z, 1.0 ) ), {} };
    if ( !val( out.db.ids(), v, out.db ).empty() )
    {
        auto macro = apply_softgoal_macro( out.db, v );
        out.db = std::move( macro.db );
        out.report.merge( macro.report );
        out.report.iterations = 1;
    }
    return out;
}

// v3 = mu(v1) * mu(v2), through the auxiliary @mu/ variables.
[[nodiscard]] inline Rewrite fuzzy_conjunction( const RequirementsDatabase& db, const QuantVar& v1, const QuantVar& v2,
                                                const QuantVar& v3 )
{
    for ( const auto* v : { &v1, &v2 } )
        if ( db.sat_fn( *v ) == nullptr )
            throw error( errc::no_satisfaction_fn, "no satisfaction function for '" + *v + "'" );
    const NumCondition c = Compare{ NumExpr::var( v3 ), CompareOp::eq, NumExpr::var( mu_var( v1 ) ) * NumExpr::var( mu_var( v2 ) ) };
    Rewrite out{ db, {} };
    detail::ensure_quant( out.db, out.report, Sort::k, c, detail::macro_id( "fconj", { v3 } ) );
    return out;
}

// Adds k(refining -> sg), making the softgoal operationalizable through refining.
[[nodiscard]] inline Rewrite approximate_softgoal( const RequirementsDatabase& db, const Id& sg, const Id& refining )
{
    const auto& s = db.at( sg );
    if ( !std::holds_alternative< Softgoal >( s.body ) )
        throw error( errc::wrong_sort, "'" + sg + "' is not a softgoal" );
    if ( sg == refining )
        throw error( errc::implication_cycle, "softgoal '" + sg + "' cannot refine itself" );
    const auto& q = db.at( refining );
    const bool ok = ( q.sort() == Sort::q && q.quant() != nullptr ) ||
                     ( q.sort() == Sort::g && std::holds_alternative< SimpleProp >( q.body ) );
    if ( !ok )
        throw error( errc::wrong_sort, "'" + refining + "' is neither a quality constraint nor a goal" );

    Rewrite out{ db, {} };
    for ( const auto& [ _, r ] : db.requirements() )
        if ( const auto* imp = std::get_if< Implication >( &r.body );
             imp != nullptr && imp->consequent == sg && imp->antecedents == IdSet{ refining } )
            return out;
    auto id = detail::fresh_id( db, detail::macro_id( "approx", { sg, refining } ) );
    out.db = db.with_requirement( make_implication( id, { refining }, sg ) );
    out.report.added.insert( id );
    return out;
}

} // namespace roadmapper
