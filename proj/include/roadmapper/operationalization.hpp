#pragma once

#include "detail/bits.hpp"
#include "quant_eval.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

namespace roadmapper
{

enum class OpKind
{
    qualitative,
    quantitative
};

[[nodiscard]] constexpr std::string_view op_kind_name( OpKind k ) noexcept
{
    return k == OpKind::qualitative ? "qualitative" : "quantitative";
}

struct Operationalization
{
    Id target;
    IdSet support; // K/T only; always contains the mandatory K/T set
    OpKind kind = OpKind::qualitative;

    friend bool operator==( const Operationalization&, const Operationalization& ) = default;
};

struct OpLimits
{
    // Candidate sets examined before giving up with ResourceLimit.
    std::size_t max_candidates = std::size_t{ 1 } << 20;
};

// Mandatory K/T requirements. Only these are forced into every candidate set: goals and
// quality constraints are derived, never members.
[[nodiscard]] inline IdSet mandatory_kt( const RequirementsDatabase& db )
{
    IdSet out;
    for ( const auto& [ id, r ] : db.requirements() )
        if ( r.modality == Modality::mandatory && is_kt( r.sort() ) )
            out.insert( id );
    return out;
}

namespace detail
{

// Keeps the inclusion-minimal members of sets, deduplicated.
inline void minimize( std::vector< Bits >& sets )
{
    std::sort( sets.begin(), sets.end(), []( const Bits& a, const Bits& b ) {
        const auto ca = a.count(), cb = b.count();
        return ca != cb ? ca < cb : a < b;
    } );
    sets.erase( std::unique( sets.begin(), sets.end() ), sets.end() );
    std::vector< Bits > kept;
    for ( auto& s : sets )
        if ( std::none_of( kept.begin(), kept.end(), [ & ]( const Bits& k ) { return k.subset_of( s ); } ) )
            kept.push_back( std::move( s ) );
    sets = std::move( kept );
}

// Minimal sets of non-mandatory K/T requirements which, together with the mandatory
// K/T set M, realize a given atom. Memoized per atom and per variable.
class SupportEnumerator
{
public:
    struct VarOption
    {
        Bits support;
        double value;
    };

private:
    const Realizer& _r;
    Bits _m;
    Realizer::State _base;
    std::size_t _cap;
    std::size_t _work = 0;
    std::unordered_map< std::size_t, std::vector< Bits > > _memo;
    std::map< QuantVar, std::vector< VarOption > > _var_memo;
    std::vector< char > _active;
    std::set< QuantVar > _var_active;
    bool _tainted = false;
    std::unordered_map< Bits, bool, BitsHash > _consistent;

public:
    SupportEnumerator( const Realizer& r, const OpLimits& limits = {} )
        : _r{ r }, _m( r.size() ), _cap{ limits.max_candidates }, _active( r.size(), 0 )
    {
        for ( std::size_t i = 0; i < r.size(); ++i )
            if ( r.req( i ).modality == Modality::mandatory && r.is_kt( i ) )
                _m.set( i );
        _base = r.close( _m );
    }

    [[nodiscard]] const Bits& mandatory() const noexcept { return _m; }
    [[nodiscard]] const Realizer::State& base() const noexcept { return _base; }

    [[nodiscard]] bool consistent_with_m( const Bits& o )
    {
        auto s = o | _m;
        if ( auto it = _consistent.find( s ); it != _consistent.end() )
            return it->second;
        charge( 1 );
        const bool ok = _r.consistent( s );
        _consistent.emplace( std::move( s ), ok );
        return ok;
    }

    const std::vector< Bits >& atom( std::size_t a )
    {
        static const std::vector< Bits > empty_support_only = {};
        if ( auto it = _memo.find( a ); it != _memo.end() )
            return it->second;
        if ( _base.derived.test( a ) )
            return _memo.emplace( a, std::vector< Bits >{ Bits( _r.size() ) } ).first->second;
        if ( _active[ a ] )
        {
            _tainted = true;
            return empty_support_only;
        }
        _active[ a ] = 1;
        const bool saved = _tainted;
        _tainted = false;

        std::vector< Bits > out;
        if ( _r.is_kt( a ) )
        {
            Bits self( _r.size() );
            self.set( a );
            out.push_back( std::move( self ) );
        }
        auto via = implication_options( a );
        out.insert( out.end(), std::make_move_iterator( via.begin() ), std::make_move_iterator( via.end() ) );
        if ( _r.req( a ).sort() == Sort::q )
        {
            auto q = quant_options( a );
            out.insert( out.end(), std::make_move_iterator( q.begin() ), std::make_move_iterator( q.end() ) );
        }
        prune( out );

        const bool tainted = _tainted;
        _tainted = saved || tainted;
        _active[ a ] = 0;
        if ( tainted )
        {
            // Results found under an open cycle depend on the entry point and are not cached.
            _scratch = std::move( out );
            return _scratch;
        }
        return _memo.emplace( a, std::move( out ) ).first->second;
    }

    // Options deriving a through some implication whose consequent is a.
    std::vector< Bits > implication_options( std::size_t a )
    {
        std::vector< Bits > out;
        for ( auto k : _r.implications_into( a ) )
        {
            const auto& imp = _r.implications()[ k ];
            std::vector< std::vector< Bits > > lists;
            for ( auto ant : imp.ants )
                lists.push_back( atom( ant ) );
            auto acc = product( lists );
            for ( auto& o : acc )
            {
                if ( !_m.test( imp.req ) )
                    o.set( imp.req );
                out.push_back( std::move( o ) );
            }
        }
        prune( out );
        return out;
    }

    // Options realizing q by satisfying its condition with assigned values.
    std::vector< Bits > quant_options( std::size_t q )
    {
        const auto* sq = _r.req( q ).quant();
        if ( sq == nullptr || std::holds_alternative< Distributed >( sq->cond ) )
            return {};
        const auto vars = condition_vars( sq->cond );
        std::vector< QuantVar > names( vars.begin(), vars.end() );
        std::vector< std::vector< VarOption > > lists;
        for ( const auto& v : names )
        {
            lists.push_back( var_options( v ) );
            if ( lists.back().empty() )
                return {};
        }

        std::vector< Bits > out;
        auto collect = [ & ]( const ProbEnv& env, const Bits& extra ) {
            for_each_var_combination( lists, [ & ]( const std::vector< const VarOption* >& pick ) {
                Assignment a;
                Bits s = extra;
                for ( std::size_t i = 0; i < pick.size(); ++i )
                {
                    a[ names[ i ] ] = pick[ i ]->value;
                    s |= pick[ i ]->support;
                }
                if ( guarded( [ & ] { return eval_condition( sq->cond, a, env ); } ).value_or( false ) )
                    out.push_back( std::move( s ) );
            } );
        };
        if ( auto* p = std::get_if< ProbCompare >( &sq->cond ) )
        {
            for ( const auto& d : _r.distributions( p->var ) )
            {
                auto dist_opts = atom( d.req );
                for ( const auto& o : dist_opts )
                    collect( ProbEnv{ { p->var, *d.dist } }, o );
            }
        }
        else
            collect( ProbEnv{}, Bits( _r.size() ) );
        prune( out );
        return out;
    }

    const std::vector< VarOption >& var_options( const QuantVar& v )
    {
        if ( auto it = _var_memo.find( v ); it != _var_memo.end() )
            return it->second;
        if ( !_var_active.insert( v ).second )
            throw error( errc::refinement_cycle, "quantitative refinements of '" + v + "' are cyclic" );
        const bool saved = _tainted;
        _tainted = false;

        std::vector< VarOption > raw;
        if ( v.starts_with( mu_prefix ) )
        {
            const QuantVar base = v.substr( mu_prefix.size() );
            if ( const auto* f = _r.database().sat_fn( base ) )
                for ( const auto& opt : var_options( base ) )
                    raw.push_back( { opt.support, sat_value( *f, opt.value ) } );
        }
        for ( const auto& src : _r.sources( v ) )
        {
            const auto own = atom( src.req );
            if ( src.direct )
            {
                for ( const auto& o : own )
                    raw.push_back( { o, src.value } );
                continue;
            }
            std::vector< std::vector< VarOption > > lists;
            bool feasible = true;
            for ( const auto& d : src.deps )
            {
                lists.push_back( var_options( d ) );
                feasible = feasible && !lists.back().empty();
            }
            if ( !feasible )
                continue;
            for_each_var_combination( lists, [ & ]( const std::vector< const VarOption* >& pick ) {
                Assignment a;
                Bits s( _r.size() );
                for ( std::size_t i = 0; i < pick.size(); ++i )
                {
                    a[ src.deps[ i ] ] = pick[ i ]->value;
                    s |= pick[ i ]->support;
                }
                if ( auto x = guarded( [ & ] { return eval_expr( *src.expr, a ); } ) )
                    for ( const auto& o : own )
                        raw.push_back( { s | o, *x } );
            } );
        }

        // Group by tolerance-equal value, keep minimal consistent supports per value.
        std::vector< std::pair< double, std::vector< Bits > > > groups;
        for ( auto& opt : raw )
        {
            auto g = std::find_if( groups.begin(), groups.end(),
                                   [ & ]( const auto& e ) { return approx_equal( e.first, opt.value ); } );
            if ( g == groups.end() )
                groups.push_back( { opt.value, { std::move( opt.support ) } } );
            else
                g->second.push_back( std::move( opt.support ) );
        }
        std::sort( groups.begin(), groups.end(), []( const auto& x, const auto& y ) { return x.first < y.first; } );
        std::vector< VarOption > out;
        for ( auto& [ value, sets ] : groups )
        {
            prune( sets );
            for ( auto& s : sets )
                out.push_back( { std::move( s ), value } );
        }
        charge( out.size() );

        const bool tainted = _tainted;
        _tainted = saved || tainted;
        _var_active.erase( v );
        if ( tainted )
        {
            _var_scratch = std::move( out );
            return _var_scratch;
        }
        return _var_memo.emplace( v, std::move( out ) ).first->second;
    }

    // Cross product of option lists, pairwise unions, pruned.
    std::vector< Bits > product( const std::vector< std::vector< Bits > >& lists )
    {
        std::vector< Bits > acc{ Bits( _r.size() ) };
        for ( const auto& l : lists )
        {
            std::vector< Bits > next;
            charge( acc.size() * l.size() );
            for ( const auto& x : acc )
                for ( const auto& y : l )
                    next.push_back( x | y );
            prune( next );
            acc = std::move( next );
            if ( acc.empty() )
                break;
        }
        return acc;
    }

    void prune( std::vector< Bits >& sets )
    {
        std::erase_if( sets, [ & ]( const Bits& s ) { return !consistent_with_m( s ); } );
        minimize( sets );
    }

    void charge( std::size_t n )
    {
        _work += n;
        if ( _work > _cap )
            throw error( errc::resource_limit, "support enumeration exceeded " + std::to_string( _cap ) + " candidate sets" );
    }

private:
    std::vector< Bits > _scratch;
    std::vector< VarOption > _var_scratch;

    template < typename F >
    void for_each_var_combination( const std::vector< std::vector< VarOption > >& lists, F&& f )
    {
        std::size_t total = 1;
        for ( const auto& l : lists )
        {
            if ( l.empty() )
                return;
            total *= l.size();
            if ( total > _cap )
                charge( total );
        }
        charge( total );
        std::vector< std::size_t > pos( lists.size(), 0 );
        std::vector< const VarOption* > pick( lists.size() );
        while ( true )
        {
            for ( std::size_t i = 0; i < lists.size(); ++i )
                pick[ i ] = &lists[ i ][ pos[ i ] ];
            f( pick );
            std::size_t i = 0;
            for ( ; i < lists.size(); ++i )
            {
                if ( ++pos[ i ] < lists[ i ].size() )
                    break;
                pos[ i ] = 0;
            }
            if ( i == lists.size() )
                return;
        }
    }
};

// Turns raw options into final supports M ∪ o: consistent, realizing the target, and
// irreducible (no single non-mandatory member can be dropped; the closure is monotone, so
// single removals suffice).
template < typename Pred >
std::vector< Bits > finalize_supports( SupportEnumerator& en, const std::vector< Bits >& options, Pred&& realizes )
{
    std::vector< Bits > out;
    for ( const auto& o : options )
    {
        if ( !en.consistent_with_m( o ) )
            continue;
        const Bits pi = o | en.mandatory();
        if ( !realizes( pi ) )
            continue;
        bool minimal = true;
        o.for_each( [ & ]( std::size_t rho ) {
            if ( !minimal || en.mandatory().test( rho ) )
                return;
            Bits smaller = pi;
            smaller.reset( rho );
            if ( realizes( smaller ) )
                minimal = false;
        } );
        if ( minimal )
            out.push_back( pi );
    }
    std::sort( out.begin(), out.end() );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    return out;
}

// Minimal supports realizing atom a by any route, as full sets M ∪ o.
inline std::vector< Bits > realizing_supports( SupportEnumerator& en, const Realizer& r, std::size_t a )
{
    const auto opts = en.atom( a );
    return finalize_supports( en, opts, [ & ]( const detail::Bits& pi ) { return r.close( pi ).derived.test( a ); } );
}

inline std::vector< Operationalization > to_operationalizations( const Realizer& r, const Id& target,
                                                                 const std::vector< Bits >& supports, OpKind kind )
{
    std::vector< Operationalization > out;
    for ( const auto& s : supports )
        out.push_back( { target, r.ids( s ), kind } );
    std::sort( out.begin(), out.end(), []( const auto& a, const auto& b ) { return a.support < b.support; } );
    return out;
}

} // namespace detail

// Phi ∈ CON(Δ): consistent and containing every mandatory K/T requirement.
[[nodiscard]] inline bool con_member( const IdSet& phi_set, const RequirementsDatabase& db )
{
    for ( const auto& id : mandatory_kt( db ) )
        if ( !phi_set.contains( id ) )
            return false;
    detail::Realizer r( db );
    return r.consistent( r.bits( phi_set ) );
}

// All minimal consistent K/T supports deriving a goal, quality constraint or softgoal.
[[nodiscard]] inline std::vector< Operationalization > op_qual( const Id& phi, const RequirementsDatabase& db,
                                                                const OpLimits& limits = {} )
{
    const auto& target = db.at( phi );
    const auto s = target.sort();
    if ( s != Sort::g && s != Sort::q && s != Sort::s )
        throw error( errc::wrong_sort, "'" + phi + "' is not a goal, quality constraint or softgoal" );
    detail::Realizer r( db );
    detail::SupportEnumerator en( r, limits );
    const auto a = r.index_of( phi );
    return detail::to_operationalizations( r, phi, detail::realizing_supports( en, r, a ), OpKind::qualitative );
}

// Supports that assign values satisfying a quantitative condition (quantitative kind),
// plus supports deriving it through refinement implications (qualitative kind).
[[nodiscard]] inline std::vector< Operationalization > op_quant( const Id& phi, const RequirementsDatabase& db,
                                                                 const OpLimits& limits = {} )
{
    const auto& target = db.at( phi );
    if ( target.quant() == nullptr )
        throw error( errc::wrong_sort, "'" + phi + "' is not a quantitative requirement" );
    detail::Realizer r( db );
    detail::SupportEnumerator en( r, limits );
    const auto a = r.index_of( phi );

    auto satisfied_by = [ & ]( const detail::Bits& pi ) {
        const auto st = r.close( pi );
        detail::Realizer::Values vals( r, st.derived );
        return r.satisfied( vals, st.derived, a );
    };
    auto derived_by = [ & ]( const detail::Bits& pi ) { return r.close( pi ).derived.test( a ); };

    const auto quant = detail::finalize_supports( en, en.quant_options( a ), satisfied_by );
    auto qual = detail::finalize_supports( en, en.implication_options( a ), derived_by );
    std::erase_if( qual, [ & ]( const detail::Bits& s ) { return std::find( quant.begin(), quant.end(), s ) != quant.end(); } );

    auto out = detail::to_operationalizations( r, phi, quant, OpKind::quantitative );
    auto more = detail::to_operationalizations( r, phi, qual, OpKind::qualitative );
    out.insert( out.end(), more.begin(), more.end() );
    std::sort( out.begin(), out.end(), []( const auto& x, const auto& y ) {
        return x.support != y.support ? x.support < y.support : x.kind < y.kind;
    } );
    return out;
}

} // namespace roadmapper
