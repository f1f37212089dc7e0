#pragma once

#include "detail/bits.hpp"
#include "inference.hpp"
#include "model.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string_view>
#include <vector>

namespace roadmapper
{

using Assignment = std::map< QuantVar, double >;
using ProbEnv = std::map< QuantVar, DistributionSpec >;

// Auxiliary variable whose values are mu_w(x) for x in VAL(w).
inline constexpr std::string_view mu_prefix = "@mu/";

[[nodiscard]] inline QuantVar mu_var( const QuantVar& v ) { return QuantVar( mu_prefix ) + v; }

[[nodiscard]] inline double eval_expr( const NumExpr& e, const Assignment& a )
{
    return std::visit(
        [ & ]( const auto& n ) -> double {
            using T = std::decay_t< decltype( n ) >;
            if constexpr ( std::is_same_v< T, NumExpr::Constant > )
                return n.value;
            else if constexpr ( std::is_same_v< T, NumExpr::Var > )
            {
                auto it = a.find( n.name );
                if ( it == a.end() )
                    throw error( errc::missing_variable, "no value for '" + n.name + "'" );
                return it->second;
            }
            else
            {
                const double l = eval_expr( *n.lhs, a );
                const double r = eval_expr( *n.rhs, a );
                double out = 0.0;
                switch ( n.op )
                {
                case NumExpr::Op::add: out = l + r; break;
                case NumExpr::Op::sub: out = l - r; break;
                case NumExpr::Op::mul: out = l * r; break;
                case NumExpr::Op::div:
                    if ( r == 0.0 )
                        throw error( errc::division_by_zero, "denominator evaluates to 0" );
                    out = l / r;
                    break;
                case NumExpr::Op::pow: out = std::pow( l, r ); break;
                }
                if ( !std::isfinite( out ) )
                    throw error( errc::non_finite_result, "expression evaluates to a non-finite value" );
                return out;
            }
        },
        e.node() );
}

// = and != are tolerance-aware; inequalities are exact.
[[nodiscard]] inline bool compare_values( double lhs, CompareOp op, double rhs ) noexcept
{
    switch ( op )
    {
    case CompareOp::gt: return lhs > rhs;
    case CompareOp::lt: return lhs < rhs;
    case CompareOp::ge: return lhs >= rhs;
    case CompareOp::le: return lhs <= rhs;
    case CompareOp::eq: return approx_equal( lhs, rhs );
    case CompareOp::ne: return !approx_equal( lhs, rhs );
    }
    return false;
}

[[nodiscard]] inline double normal_cdf( double x, double mean, double sd )
{
    if ( !( sd > 0.0 ) )
        throw error( errc::non_positive_sd, "standard deviation must be positive" );
    return 0.5 * std::erfc( -( x - mean ) / ( sd * std::numbers::sqrt2 ) );
}

// P(X inner bound) for X distributed as d.
[[nodiscard]] inline double probability( const DistributionSpec& d, CompareOp inner, double bound )
{
    return std::visit(
        [ & ]( const auto& k ) -> double {
            using T = std::decay_t< decltype( k ) >;
            if constexpr ( std::is_same_v< T, Normal > )
            {
                const double below = normal_cdf( bound, k.mean, std::sqrt( k.variance ) );
                switch ( inner )
                {
                case CompareOp::le:
                case CompareOp::lt: return below;
                case CompareOp::ge:
                case CompareOp::gt: return 1.0 - below;
                default: break;
                }
                throw error( errc::unsupported_distribution, "point probabilities of a continuous law are not supported" );
            }
        },
        d.kind() );
}

[[nodiscard]] inline bool eval_condition( const NumCondition& c, const Assignment& a, const ProbEnv& env )
{
    if ( auto* cmp = std::get_if< Compare >( &c ) )
        return compare_values( eval_expr( cmp->lhs, a ), cmp->op, eval_expr( cmp->rhs, a ) );
    if ( auto* d = std::get_if< Distributed >( &c ) )
    {
        auto it = env.find( d->var );
        return it != env.end() && it->second == d->dist;
    }
    const auto& p = std::get< ProbCompare >( c );
    auto it = env.find( p.var );
    if ( it == env.end() )
        throw error( errc::no_distribution, "no distribution for '" + p.var + "'" );
    if ( a.contains( p.var ) )
        throw error( errc::invalid_argument, "'" + p.var + "' is both assigned and distributed" );
    const double prob = probability( it->second, p.inner, eval_expr( p.bound, a ) );
    return compare_values( prob, p.outer, eval_expr( p.level, a ) );
}

// Always within [0, 1].
[[nodiscard]] inline double sat_value( const SatisfactionFn& f, double x )
{
    return std::visit(
        [ & ]( const auto& k ) -> double {
            using T = std::decay_t< decltype( k ) >;
            if constexpr ( std::is_same_v< T, ExpDecay > )
                return std::clamp( std::exp( -k.rate * x ), 0.0, 1.0 );
            else if constexpr ( std::is_same_v< T, PiecewiseLinear > )
            {
                const auto& pts = k.points;
                if ( x <= pts.front().first )
                    return pts.front().second;
                if ( x >= pts.back().first )
                    return pts.back().second;
                auto hi = std::upper_bound( pts.begin(), pts.end(), x,
                                            []( double v, const auto& p ) { return v < p.first; } );
                auto lo = hi - 1;
                if ( x == lo->first )
                    return lo->second;
                const double t = ( x - lo->first ) / ( hi->first - lo->first );
                return std::clamp( lo->second + t * ( hi->second - lo->second ), 0.0, 1.0 );
            }
            else
            {
                if ( x <= k.plateau_end )
                    return k.level;
                if ( x >= k.zero_at )
                    return 0.0;
                return k.level * ( k.zero_at - x ) / ( k.zero_at - k.plateau_end );
            }
        },
        f.kind() );
}

// Upper bound on |VAL(X, v)| for a single variable.
inline constexpr std::size_t val_cap = 64;

// Inserts x unless a tolerance-equal value is already present.
inline void insert_value( std::set< double >& values, double x )
{
    auto it = values.lower_bound( x );
    if ( it != values.end() && approx_equal( *it, x ) )
        return;
    if ( it != values.begin() && approx_equal( *std::prev( it ), x ) )
        return;
    values.insert( x );
}

namespace detail
{

// Calls f(values) for every combination drawn from lists; stops early when f returns true.
// Returns whether f ever returned true.
template < typename F >
bool any_combination( const std::vector< std::vector< double > >& lists, F&& f )
{
    for ( const auto& l : lists )
        if ( l.empty() )
            return false;
    std::vector< std::size_t > pos( lists.size(), 0 );
    std::vector< double > cur( lists.size() );
    while ( true )
    {
        for ( std::size_t i = 0; i < lists.size(); ++i )
            cur[ i ] = lists[ i ][ pos[ i ] ];
        if ( f( cur ) )
            return true;
        std::size_t i = 0;
        for ( ; i < lists.size(); ++i )
        {
            if ( ++pos[ i ] < lists[ i ].size() )
                break;
            pos[ i ] = 0;
        }
        if ( i == lists.size() )
            return false;
    }
}

// Evaluation is partial: combinations hitting an arithmetic error are treated as not holding.
template < typename F >
auto guarded( F&& f ) -> std::optional< decltype( f() ) >
{
    try
    {
        return f();
    }
    catch ( const error& e )
    {
        switch ( e.code() )
        {
        case errc::division_by_zero:
        case errc::non_finite_result:
        case errc::missing_variable: return std::nullopt;
        default: throw;
        }
    }
}

// Dense index over a database plus the realized closure: the literal consequence
// relation interleaved with quantitative satisfaction, so that a Q-sorted comparison
// becomes derived once the K/T assignments derived so far satisfy it.
class Realizer
{
public:
    struct ValueSource
    {
        std::size_t req;
        bool direct;
        double value;
        const NumExpr* expr;
        std::vector< QuantVar > deps;
    };

    struct DistSource
    {
        std::size_t req;
        const DistributionSpec* dist;
    };

    struct Imp
    {
        std::size_t req;
        std::vector< std::size_t > ants;
        std::size_t cons;
    };

    struct Con
    {
        std::size_t req;
        std::vector< std::size_t > ants;
    };

    struct State
    {
        Bits derived;
        bool bottom = false;
        std::vector< std::size_t > fired;
    };

private:
    const RequirementsDatabase* _db;
    std::vector< const Requirement* > _reqs;
    std::map< Id, std::size_t > _index;
    std::vector< Imp > _imps;
    std::vector< Con > _cons;
    std::vector< std::vector< std::size_t > > _imps_by_consequent;
    std::vector< std::size_t > _quant_targets;
    std::map< QuantVar, std::vector< ValueSource > > _sources;
    std::map< QuantVar, std::vector< DistSource > > _dists;

public:
    explicit Realizer( const RequirementsDatabase& db ) : _db{ &db }
    {
        for ( const auto& [ id, r ] : db.requirements() )
        {
            _index.emplace( id, _reqs.size() );
            _reqs.push_back( &r );
        }
        _imps_by_consequent.resize( _reqs.size() );
        for ( std::size_t i = 0; i < _reqs.size(); ++i )
        {
            const auto& r = *_reqs[ i ];
            if ( auto* imp = std::get_if< Implication >( &r.body ) )
            {
                Imp x{ i, {}, index_of( imp->consequent ) };
                for ( const auto& a : imp->antecedents )
                    x.ants.push_back( index_of( a ) );
                _imps_by_consequent[ x.cons ].push_back( _imps.size() );
                _imps.push_back( std::move( x ) );
            }
            else if ( auto* con = std::get_if< Conflict >( &r.body ) )
            {
                Con x{ i, {} };
                for ( const auto& a : con->antecedents )
                    x.ants.push_back( index_of( a ) );
                _cons.push_back( std::move( x ) );
            }
            else if ( auto* sq = r.quant() )
                register_quant( i, *sq );
        }
    }

    [[nodiscard]] const RequirementsDatabase& database() const noexcept { return *_db; }
    [[nodiscard]] std::size_t size() const noexcept { return _reqs.size(); }
    [[nodiscard]] const Requirement& req( std::size_t i ) const { return *_reqs[ i ]; }
    [[nodiscard]] const std::vector< Imp >& implications() const noexcept { return _imps; }
    [[nodiscard]] const std::vector< Con >& conflicts() const noexcept { return _cons; }
    [[nodiscard]] const std::vector< std::size_t >& implications_into( std::size_t i ) const { return _imps_by_consequent[ i ]; }
    [[nodiscard]] const std::vector< std::size_t >& quant_targets() const noexcept { return _quant_targets; }

    [[nodiscard]] const std::vector< ValueSource >& sources( const QuantVar& v ) const
    {
        static const std::vector< ValueSource > none;
        auto it = _sources.find( v );
        return it == _sources.end() ? none : it->second;
    }

    [[nodiscard]] const std::vector< DistSource >& distributions( const QuantVar& v ) const
    {
        static const std::vector< DistSource > none;
        auto it = _dists.find( v );
        return it == _dists.end() ? none : it->second;
    }

    [[nodiscard]] const std::map< QuantVar, std::vector< ValueSource > >& all_sources() const noexcept { return _sources; }

    [[nodiscard]] std::size_t index_of( const Id& id ) const
    {
        auto it = _index.find( id );
        if ( it == _index.end() )
            throw error( errc::unresolved_reference, "unknown requirement id '" + id + "'" );
        return it->second;
    }

    [[nodiscard]] Bits bits( const IdSet& ids ) const
    {
        Bits b( size() );
        for ( const auto& id : ids )
            b.set( index_of( id ) );
        return b;
    }

    [[nodiscard]] IdSet ids( const Bits& b ) const
    {
        IdSet out;
        b.for_each( [ & ]( std::size_t i ) { out.insert( _reqs[ i ]->id ); } );
        return out;
    }

    [[nodiscard]] bool is_kt( std::size_t i ) const { return roadmapper::is_kt( _reqs[ i ]->sort() ); }

    // VAL over a fixed derived set, memoized per variable.
    class Values
    {
        const Realizer& _r;
        const Bits& _derived;
        std::map< QuantVar, std::set< double > > _done;
        std::set< QuantVar > _active;

    public:
        Values( const Realizer& r, const Bits& derived ) : _r{ r }, _derived{ derived } {}

        const std::set< double >& of( const QuantVar& v )
        {
            if ( auto it = _done.find( v ); it != _done.end() )
                return it->second;
            if ( !_active.insert( v ).second )
                throw error( errc::refinement_cycle, "quantitative refinements of '" + v + "' are cyclic" );
            std::set< double > out;
            if ( v.starts_with( mu_prefix ) )
            {
                const QuantVar base = v.substr( mu_prefix.size() );
                if ( const auto* f = _r.database().sat_fn( base ) )
                    for ( double x : of( base ) )
                        insert_value( out, sat_value( *f, x ) );
            }
            for ( const auto& src : _r.sources( v ) )
            {
                if ( !_derived.test( src.req ) )
                    continue;
                if ( src.direct )
                {
                    insert_value( out, src.value );
                    continue;
                }
                std::vector< std::vector< double > > lists;
                for ( const auto& d : src.deps )
                {
                    const auto& vals = of( d );
                    lists.emplace_back( vals.begin(), vals.end() );
                }
                std::size_t combos = 1;
                for ( const auto& l : lists )
                    combos *= std::max< std::size_t >( l.size(), 1 );
                if ( combos > val_cap * val_cap * val_cap )
                    throw error( errc::val_overflow, "too many value combinations for '" + v + "'" );
                any_combination( lists, [ & ]( const std::vector< double >& xs ) {
                    Assignment a;
                    for ( std::size_t i = 0; i < xs.size(); ++i )
                        a[ src.deps[ i ] ] = xs[ i ];
                    if ( auto x = guarded( [ & ] { return eval_expr( *src.expr, a ); } ) )
                        insert_value( out, *x );
                    return false;
                } );
            }
            if ( out.size() > val_cap )
                throw error( errc::val_overflow, "more than " + std::to_string( val_cap ) + " values for '" + v + "'" );
            _active.erase( v );
            return _done.emplace( v, std::move( out ) ).first->second;
        }
    };

    // Whether some combination of VAL values satisfies the quantitative requirement i.
    [[nodiscard]] bool satisfied( Values& vals, const Bits& derived, std::size_t i ) const
    {
        const auto* sq = _reqs[ i ]->quant();
        if ( sq == nullptr || std::holds_alternative< Distributed >( sq->cond ) )
            return false;
        const auto vars = condition_vars( sq->cond );
        std::vector< QuantVar > names( vars.begin(), vars.end() );
        std::vector< std::vector< double > > lists;
        for ( const auto& v : names )
        {
            const auto& s = vals.of( v );
            lists.emplace_back( s.begin(), s.end() );
        }
        auto holds = [ & ]( const ProbEnv& env ) {
            return any_combination( lists, [ & ]( const std::vector< double >& xs ) {
                Assignment a;
                for ( std::size_t k = 0; k < xs.size(); ++k )
                    a[ names[ k ] ] = xs[ k ];
                return guarded( [ & ] { return eval_condition( sq->cond, a, env ); } ).value_or( false );
            } );
        };
        if ( auto* p = std::get_if< ProbCompare >( &sq->cond ) )
        {
            for ( const auto& d : distributions( p->var ) )
                if ( derived.test( d.req ) && holds( ProbEnv{ { p->var, *d.dist } } ) )
                    return true;
            return false;
        }
        return holds( ProbEnv{} );
    }

    [[nodiscard]] State close( const Bits& start ) const
    {
        State st{ start, false, {} };
        auto& d = st.derived;
        while ( true )
        {
            for ( bool changed = true; changed; )
            {
                changed = false;
                for ( const auto& imp : _imps )
                {
                    if ( !d.test( imp.req ) || d.test( imp.cons ) )
                        continue;
                    if ( std::all_of( imp.ants.begin(), imp.ants.end(), [ & ]( std::size_t a ) { return d.test( a ); } ) )
                    {
                        d.set( imp.cons );
                        changed = true;
                    }
                }
            }
            bool grew = false;
            if ( !_quant_targets.empty() )
            {
                Values vals( *this, d );
                std::vector< std::size_t > add;
                for ( auto q : _quant_targets )
                    if ( !d.test( q ) && satisfied( vals, d, q ) )
                        add.push_back( q );
                for ( auto q : add )
                    d.set( q );
                grew = !add.empty();
            }
            if ( !grew )
                break;
        }
        for ( const auto& con : _cons )
            if ( d.test( con.req ) &&
                 std::all_of( con.ants.begin(), con.ants.end(), [ & ]( std::size_t a ) { return d.test( a ); } ) )
            {
                st.bottom = true;
                st.fired.push_back( con.req );
            }
        return st;
    }

    [[nodiscard]] bool consistent( const Bits& s ) const { return !close( s ).bottom; }

    [[nodiscard]] std::set< double > values( const Bits& derived, const QuantVar& v ) const
    {
        Values vals( *this, derived );
        return vals.of( v );
    }

private:
    void register_quant( std::size_t i, const SimpleQuant& sq )
    {
        if ( sq.sort == Sort::q )
        {
            if ( !std::holds_alternative< Distributed >( sq.cond ) )
                _quant_targets.push_back( i );
            return;
        }
        if ( auto* d = std::get_if< Distributed >( &sq.cond ) )
        {
            _dists[ d->var ].push_back( { i, &d->dist } );
            return;
        }
        const auto* cmp = std::get_if< Compare >( &sq.cond );
        if ( cmp == nullptr || cmp->op != CompareOp::eq )
            return;
        auto add = [ & ]( const NumExpr& lhs, const NumExpr& rhs ) {
            const auto* v = lhs.var_name();
            if ( v == nullptr )
                return false;
            auto deps = rhs.vars();
            if ( deps.contains( *v ) )
                return false;
            if ( deps.empty() )
            {
                auto value = guarded( [ & ] { return eval_expr( rhs, {} ); } );
                if ( !value )
                    return false;
                _sources[ *v ].push_back( { i, true, *value, nullptr, {} } );
            }
            else
                _sources[ *v ].push_back( { i, false, 0.0, &rhs, { deps.begin(), deps.end() } } );
            return true;
        };
        // v = rhs is read left to right first; a closed left side with a variable right side reads the other way.
        if ( !add( cmp->lhs, cmp->rhs ) )
            add( cmp->rhs, cmp->lhs );
    }
};

} // namespace detail

// VAL(X, v): every constant assigned to v by requirements realized from X.
[[nodiscard]] inline std::set< double > val( const IdSet& x_set, const QuantVar& v, const RequirementsDatabase& db )
{
    detail::Realizer r( db );
    const auto st = r.close( r.bits( x_set ) );
    return r.values( st.derived, v );
}

} // namespace roadmapper
