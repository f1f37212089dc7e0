#pragma once

#include "error.hpp"

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <ranges>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

namespace roadmapper
{

using Id = std::string;
using IdSet = std::set< Id >;
using QuantVar = std::string;

enum class Modality
{
    plain,
    optional,
    mandatory
};

enum class Sort
{
    k,
    g,
    q,
    s,
    t
};

[[nodiscard]] constexpr char sort_letter( Sort s ) noexcept
{
    switch ( s )
    {
    case Sort::k: return 'k';
    case Sort::g: return 'g';
    case Sort::q: return 'q';
    case Sort::s: return 's';
    case Sort::t: return 't';
    }
    return '?';
}

[[nodiscard]] constexpr std::string_view modality_name( Modality m ) noexcept
{
    switch ( m )
    {
    case Modality::plain: return "plain";
    case Modality::optional: return "optional";
    case Modality::mandatory: return "mandatory";
    }
    return "?";
}

// Relative tolerance used for every real-valued equality test in the engine.
inline constexpr double equality_rel_tol = 1e-9;
inline constexpr double equality_abs_tol = 1e-12;

[[nodiscard]] inline bool approx_equal( double a, double b ) noexcept
{
    if ( a == b )
        return true;
    const double scale = std::max( std::fabs( a ), std::fabs( b ) );
    return std::fabs( a - b ) <= std::max( equality_rel_tol * scale, equality_abs_tol );
}

// Shortest decimal text that reads back to the same double.
[[nodiscard]] inline std::string format_number( double v )
{
    char buf[ 64 ];
    auto res = std::to_chars( buf, buf + sizeof buf, v );
    return std::string( buf, res.ptr );
}

// ---------------------------------------------------------------------------
// Numeric expressions

class NumExpr
{
public:
    enum class Op
    {
        add,
        sub,
        mul,
        div,
        pow
    };

    struct Constant
    {
        double value;
    };

    struct Var
    {
        QuantVar name;
    };

    struct Binary
    {
        Op op;
        std::shared_ptr< const NumExpr > lhs;
        std::shared_ptr< const NumExpr > rhs;
    };

    using Node = std::variant< Constant, Var, Binary >;

private:
    Node _node;

    explicit NumExpr( Node node ) : _node{ std::move( node ) } {}

public:
    NumExpr() : _node{ Constant{ 0.0 } } {}

    static NumExpr constant( double value ) { return NumExpr{ Constant{ value } }; }

    static NumExpr var( QuantVar name )
    {
        if ( name.empty() )
            throw error( errc::ill_formed, "empty quantitative variable name" );
        return NumExpr{ Var{ std::move( name ) } };
    }

    static NumExpr binary( Op op, NumExpr lhs, NumExpr rhs )
    {
        if ( op == Op::div && rhs.is_constant() && rhs.constant_value() == 0.0 )
            throw error( errc::ill_formed, "division by the constant 0" );
        return NumExpr{ Binary{ op, std::make_shared< const NumExpr >( std::move( lhs ) ),
                                std::make_shared< const NumExpr >( std::move( rhs ) ) } };
    }

    [[nodiscard]] const Node& node() const noexcept { return _node; }

    [[nodiscard]] bool is_constant() const noexcept { return std::holds_alternative< Constant >( _node ); }
    [[nodiscard]] double constant_value() const { return std::get< Constant >( _node ).value; }

    [[nodiscard]] const QuantVar* var_name() const noexcept
    {
        if ( auto* v = std::get_if< Var >( &_node ) )
            return &v->name;
        return nullptr;
    }

    void collect_vars( std::set< QuantVar >& out ) const
    {
        std::visit(
            [ & ]( const auto& n ) {
                using T = std::decay_t< decltype( n ) >;
                if constexpr ( std::is_same_v< T, Var > )
                    out.insert( n.name );
                else if constexpr ( std::is_same_v< T, Binary > )
                {
                    n.lhs->collect_vars( out );
                    n.rhs->collect_vars( out );
                }
            },
            _node );
    }

    [[nodiscard]] std::set< QuantVar > vars() const
    {
        std::set< QuantVar > out;
        collect_vars( out );
        return out;
    }

    [[nodiscard]] bool is_closed() const { return vars().empty(); }

    friend bool operator==( const NumExpr& a, const NumExpr& b )
    {
        if ( a._node.index() != b._node.index() )
            return false;
        if ( auto* c = std::get_if< Constant >( &a._node ) )
            return c->value == std::get< Constant >( b._node ).value;
        if ( auto* v = std::get_if< Var >( &a._node ) )
            return v->name == std::get< Var >( b._node ).name;
        const auto& x = std::get< Binary >( a._node );
        const auto& y = std::get< Binary >( b._node );
        return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
    }
};

inline NumExpr operator+( NumExpr a, NumExpr b ) { return NumExpr::binary( NumExpr::Op::add, std::move( a ), std::move( b ) ); }
inline NumExpr operator-( NumExpr a, NumExpr b ) { return NumExpr::binary( NumExpr::Op::sub, std::move( a ), std::move( b ) ); }
inline NumExpr operator*( NumExpr a, NumExpr b ) { return NumExpr::binary( NumExpr::Op::mul, std::move( a ), std::move( b ) ); }
inline NumExpr operator/( NumExpr a, NumExpr b ) { return NumExpr::binary( NumExpr::Op::div, std::move( a ), std::move( b ) ); }
inline NumExpr pow( NumExpr a, NumExpr b ) { return NumExpr::binary( NumExpr::Op::pow, std::move( a ), std::move( b ) ); }

// ---------------------------------------------------------------------------
// Conditions, distributions, satisfaction functions

enum class CompareOp
{
    gt,
    lt,
    eq,
    ge,
    le,
    ne
};

[[nodiscard]] constexpr std::string_view compare_op_text( CompareOp op ) noexcept
{
    switch ( op )
    {
    case CompareOp::gt: return ">";
    case CompareOp::lt: return "<";
    case CompareOp::eq: return "=";
    case CompareOp::ge: return ">=";
    case CompareOp::le: return "<=";
    case CompareOp::ne: return "!=";
    }
    return "?";
}

struct Normal
{
    double mean;
    double variance;

    friend bool operator==( const Normal&, const Normal& ) = default;
};

class DistributionSpec
{
public:
    using Kind = std::variant< Normal >;

private:
    Kind _kind;

    explicit DistributionSpec( Kind kind ) : _kind{ kind } {}

public:
    static DistributionSpec normal( double mean, double variance )
    {
        if ( !std::isfinite( mean ) || !std::isfinite( variance ) || !( variance > 0.0 ) )
            throw error( errc::ill_formed, "Normal distribution needs a finite mean and a strictly positive variance" );
        return DistributionSpec{ Normal{ mean, variance } };
    }

    [[nodiscard]] const Kind& kind() const noexcept { return _kind; }

    friend bool operator==( const DistributionSpec&, const DistributionSpec& ) = default;
};

struct Compare
{
    NumExpr lhs;
    CompareOp op;
    NumExpr rhs;

    friend bool operator==( const Compare&, const Compare& ) = default;
};

// var ~ dist
struct Distributed
{
    QuantVar var;
    DistributionSpec dist;

    friend bool operator==( const Distributed&, const Distributed& ) = default;
};

// P(var inner bound) outer level
struct ProbCompare
{
    QuantVar var;
    CompareOp inner;
    NumExpr bound;
    CompareOp outer;
    NumExpr level;

    friend bool operator==( const ProbCompare&, const ProbCompare& ) = default;
};

using NumCondition = std::variant< Compare, Distributed, ProbCompare >;

// Free variables of a condition. For ProbCompare the distributed variable is excluded
// unless include_random is set.
[[nodiscard]] inline std::set< QuantVar > condition_vars( const NumCondition& c, bool include_random = false )
{
    std::set< QuantVar > out;
    if ( auto* cmp = std::get_if< Compare >( &c ) )
    {
        cmp->lhs.collect_vars( out );
        cmp->rhs.collect_vars( out );
    }
    else if ( auto* d = std::get_if< Distributed >( &c ) )
    {
        if ( include_random )
            out.insert( d->var );
    }
    else
    {
        const auto& p = std::get< ProbCompare >( c );
        p.bound.collect_vars( out );
        p.level.collect_vars( out );
        if ( include_random )
            out.insert( p.var );
    }
    return out;
}

struct ExpDecay
{
    double rate;

    friend bool operator==( const ExpDecay&, const ExpDecay& ) = default;
};

struct PiecewiseLinear
{
    std::vector< std::pair< double, double > > points;

    friend bool operator==( const PiecewiseLinear&, const PiecewiseLinear& ) = default;
};

// level on (-inf, plateau_end], linear down to 0 at zero_at, 0 beyond. zero_at == plateau_end is a step.
struct PlateauThenDecay
{
    double plateau_end;
    double zero_at;
    double level;

    friend bool operator==( const PlateauThenDecay&, const PlateauThenDecay& ) = default;
};

class SatisfactionFn
{
public:
    using Kind = std::variant< ExpDecay, PiecewiseLinear, PlateauThenDecay >;

private:
    Kind _kind;

    explicit SatisfactionFn( Kind kind ) : _kind{ std::move( kind ) } {}

public:
    static SatisfactionFn exp_decay( double rate )
    {
        if ( !std::isfinite( rate ) || !( rate > 0.0 ) )
            throw error( errc::ill_formed, "exponential decay rate must be positive" );
        return SatisfactionFn{ ExpDecay{ rate } };
    }

    static SatisfactionFn piecewise_linear( std::vector< std::pair< double, double > > points )
    {
        if ( points.empty() )
            throw error( errc::ill_formed, "piecewise-linear function needs at least one point" );
        for ( std::size_t i = 0; i < points.size(); ++i )
        {
            const auto [ x, mu ] = points[ i ];
            if ( !std::isfinite( x ) || !( mu >= 0.0 && mu <= 1.0 ) )
                throw error( errc::ill_formed, "piecewise-linear point out of range" );
            if ( i > 0 && !( x > points[ i - 1 ].first ) )
                throw error( errc::ill_formed, "piecewise-linear x coordinates must be strictly increasing" );
        }
        return SatisfactionFn{ PiecewiseLinear{ std::move( points ) } };
    }

    static SatisfactionFn plateau_then_decay( double plateau_end, double zero_at, double level )
    {
        if ( !std::isfinite( plateau_end ) || !std::isfinite( zero_at ) || zero_at < plateau_end )
            throw error( errc::ill_formed, "plateau-then-decay needs zero_at >= plateau_end" );
        if ( !( level > 0.0 && level <= 1.0 ) )
            throw error( errc::ill_formed, "plateau level must lie in (0, 1]" );
        return SatisfactionFn{ PlateauThenDecay{ plateau_end, zero_at, level } };
    }

    [[nodiscard]] const Kind& kind() const noexcept { return _kind; }

    friend bool operator==( const SatisfactionFn&, const SatisfactionFn& ) = default;
};

// ---------------------------------------------------------------------------
// Requirements

struct SimpleProp
{
    Sort sort; // k, g or t
    std::string var;

    friend bool operator==( const SimpleProp&, const SimpleProp& ) = default;
};

struct SimpleQuant
{
    Sort sort; // k, q or t
    NumCondition cond;

    friend bool operator==( const SimpleQuant&, const SimpleQuant& ) = default;
};

struct Softgoal
{
    std::string content;

    friend bool operator==( const Softgoal&, const Softgoal& ) = default;
};

struct Implication
{
    IdSet antecedents;
    Id consequent;

    friend bool operator==( const Implication&, const Implication& ) = default;
};

// antecedents -> false
struct Conflict
{
    IdSet antecedents;

    friend bool operator==( const Conflict&, const Conflict& ) = default;
};

using Body = std::variant< SimpleProp, SimpleQuant, Softgoal, Implication, Conflict >;

struct Requirement
{
    Id id;
    Modality modality = Modality::plain;
    Body body;
    std::string description;

    [[nodiscard]] Sort sort() const
    {
        return std::visit(
            []( const auto& b ) -> Sort {
                using T = std::decay_t< decltype( b ) >;
                if constexpr ( std::is_same_v< T, SimpleProp > || std::is_same_v< T, SimpleQuant > )
                    return b.sort;
                else if constexpr ( std::is_same_v< T, Softgoal > )
                    return Sort::s;
                else
                    return Sort::k;
            },
            body );
    }

    [[nodiscard]] bool is_simple() const noexcept
    {
        return std::holds_alternative< SimpleProp >( body ) || std::holds_alternative< SimpleQuant >( body ) ||
               std::holds_alternative< Softgoal >( body );
    }

    [[nodiscard]] bool is_relation() const noexcept { return !is_simple(); }

    [[nodiscard]] const SimpleQuant* quant() const noexcept { return std::get_if< SimpleQuant >( &body ); }

    // Ids this requirement refers to (relation antecedents and consequent).
    [[nodiscard]] IdSet references() const
    {
        if ( auto* imp = std::get_if< Implication >( &body ) )
        {
            auto out = imp->antecedents;
            out.insert( imp->consequent );
            return out;
        }
        if ( auto* con = std::get_if< Conflict >( &body ) )
            return con->antecedents;
        return {};
    }

    friend bool operator==( const Requirement&, const Requirement& ) = default;
};

[[nodiscard]] inline bool is_kt( Sort s ) noexcept { return s == Sort::k || s == Sort::t; }

// Convenience constructors.
inline Requirement make_prop( Sort sort, Id id, Modality m = Modality::plain, std::string description = {} )
{
    auto var = id;
    return Requirement{ std::move( id ), m, SimpleProp{ sort, std::move( var ) }, std::move( description ) };
}

inline Requirement make_quant( Sort sort, Id id, NumCondition cond, Modality m = Modality::plain )
{
    return Requirement{ std::move( id ), m, SimpleQuant{ sort, std::move( cond ) }, {} };
}

inline Requirement make_softgoal( Id id, std::string content, Modality m = Modality::plain )
{
    return Requirement{ std::move( id ), m, Softgoal{ std::move( content ) }, {} };
}

inline Requirement make_implication( Id id, IdSet antecedents, Id consequent, Modality m = Modality::plain )
{
    return Requirement{ std::move( id ), m, Implication{ std::move( antecedents ), std::move( consequent ) }, {} };
}

inline Requirement make_conflict( Id id, IdSet antecedents, Modality m = Modality::plain )
{
    return Requirement{ std::move( id ), m, Conflict{ std::move( antecedents ) }, {} };
}

enum class PrefKind
{
    strict,      // >
    weak,        // >=
    indifferent, // ~=
};

[[nodiscard]] constexpr std::string_view pref_kind_text( PrefKind k ) noexcept
{
    switch ( k )
    {
    case PrefKind::strict: return ">";
    case PrefKind::weak: return ">=";
    case PrefKind::indifferent: return "~=";
    }
    return "?";
}

struct Preference
{
    PrefKind kind;
    Id left;
    Id right;

    friend bool operator==( const Preference&, const Preference& ) = default;
    friend auto operator<=>( const Preference& a, const Preference& b )
    {
        return std::tie( a.left, a.right, a.kind ) <=> std::tie( b.left, b.right, b.kind );
    }
};

// ---------------------------------------------------------------------------
// Database

class RequirementsDatabase
{
    std::map< Id, Requirement > _requirements;
    std::vector< Preference > _preferences; // sorted, unique
    std::map< QuantVar, SatisfactionFn > _sat_fns;

public:
    RequirementsDatabase() = default;

    // Builds a database from parts and checks it structurally (ids, references, shapes,
    // implication cycles). Mandatory-set consistency is checked by validate_database().
    static RequirementsDatabase from_parts( const std::vector< Requirement >& requirements,
                                            std::vector< Preference > preferences,
                                            std::map< QuantVar, SatisfactionFn > sat_fns );

    [[nodiscard]] const std::map< Id, Requirement >& requirements() const noexcept { return _requirements; }
    [[nodiscard]] const std::vector< Preference >& preferences() const noexcept { return _preferences; }
    [[nodiscard]] const std::map< QuantVar, SatisfactionFn >& sat_fns() const noexcept { return _sat_fns; }

    [[nodiscard]] std::size_t size() const noexcept { return _requirements.size(); }
    [[nodiscard]] bool empty() const noexcept { return _requirements.empty() && _preferences.empty() && _sat_fns.empty(); }
    [[nodiscard]] bool contains( const Id& id ) const { return _requirements.contains( id ); }

    [[nodiscard]] const Requirement* find( const Id& id ) const
    {
        auto it = _requirements.find( id );
        return it == _requirements.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const Requirement& at( const Id& id ) const
    {
        if ( auto* r = find( id ) )
            return *r;
        throw error( errc::unresolved_reference, "unknown requirement id '" + id + "'" );
    }

    [[nodiscard]] const SatisfactionFn* sat_fn( const QuantVar& v ) const
    {
        auto it = _sat_fns.find( v );
        return it == _sat_fns.end() ? nullptr : &it->second;
    }

    [[nodiscard]] IdSet ids() const
    {
        IdSet out;
        for ( const auto& [ id, _ ] : _requirements )
            out.insert( id );
        return out;
    }

    // Value-producing edits. with_requirement and with_preference check their input
    // against the current database; the others are unchecked.
    [[nodiscard]] RequirementsDatabase with_requirement( Requirement r ) const;
    [[nodiscard]] RequirementsDatabase with_preference( Preference p ) const;
    [[nodiscard]] RequirementsDatabase with_sat_fn( const QuantVar& v, SatisfactionFn f ) const
    {
        auto copy = *this;
        copy._sat_fns.insert_or_assign( v, std::move( f ) );
        return copy;
    }
    [[nodiscard]] RequirementsDatabase without_requirement( const Id& id ) const
    {
        auto copy = *this;
        copy._requirements.erase( id );
        return copy;
    }
    [[nodiscard]] RequirementsDatabase without_preference( const Preference& p ) const
    {
        auto copy = *this;
        std::erase( copy._preferences, p );
        return copy;
    }
    [[nodiscard]] RequirementsDatabase with_replaced( Requirement r ) const
    {
        auto copy = *this;
        copy._requirements.insert_or_assign( r.id, std::move( r ) );
        return copy;
    }

    friend bool operator==( const RequirementsDatabase&, const RequirementsDatabase& ) = default;

private:
    void check_requirement_shape( const Requirement& r ) const;
    void check_references( const Requirement& r ) const;
    void check_preference( const Preference& p ) const;
    void check_acyclic() const;
};

namespace detail
{

inline void check_body_shape( const Requirement& r )
{
    if ( r.id.empty() )
        throw error( errc::ill_formed, "empty requirement id" );
    std::visit(
        [ & ]( const auto& b ) {
            using T = std::decay_t< decltype( b ) >;
            if constexpr ( std::is_same_v< T, SimpleProp > )
            {
                if ( b.sort != Sort::k && b.sort != Sort::g && b.sort != Sort::t )
                    throw error( errc::wrong_sort, "propositional requirement '" + r.id + "' must be k, g or t" );
                if ( b.var.empty() )
                    throw error( errc::ill_formed, "empty propositional variable in '" + r.id + "'" );
            }
            else if constexpr ( std::is_same_v< T, SimpleQuant > )
            {
                if ( b.sort != Sort::k && b.sort != Sort::q && b.sort != Sort::t )
                    throw error( errc::wrong_sort, "quantitative requirement '" + r.id + "' must be k, q or t" );
                if ( std::holds_alternative< Distributed >( b.cond ) && !is_kt( b.sort ) )
                    throw error( errc::wrong_sort, "distribution assumption '" + r.id + "' must be k or t" );
                if ( auto* p = std::get_if< ProbCompare >( &b.cond ) )
                {
                    if ( p->inner == CompareOp::eq || p->inner == CompareOp::ne || p->outer == CompareOp::ne )
                        throw error( errc::ill_formed, "unsupported comparison inside probability bound in '" + r.id + "'" );
                    if ( p->level.is_constant() )
                    {
                        const double lv = p->level.constant_value();
                        if ( !( lv >= 0.0 && lv <= 1.0 ) )
                            throw error( errc::ill_formed, "probability level outside [0,1] in '" + r.id + "'" );
                    }
                }
            }
            else if constexpr ( std::is_same_v< T, Softgoal > )
            {
                if ( b.content.empty() )
                    throw error( errc::ill_formed, "softgoal '" + r.id + "' has empty content" );
            }
            else if constexpr ( std::is_same_v< T, Implication > )
            {
                if ( b.antecedents.empty() )
                    throw error( errc::ill_formed, "implication '" + r.id + "' has no antecedents" );
                if ( b.antecedents.contains( b.consequent ) )
                    throw error( errc::implication_cycle, "implication '" + r.id + "' derives one of its own antecedents" );
            }
            else
            {
                if ( b.antecedents.size() < 2 )
                    throw error( errc::ill_formed, "conflict '" + r.id + "' needs at least two antecedents" );
            }
        },
        r.body );
}

} // namespace detail

inline void RequirementsDatabase::check_requirement_shape( const Requirement& r ) const { detail::check_body_shape( r ); }

inline void RequirementsDatabase::check_references( const Requirement& r ) const
{
    for ( const auto& ref : r.references() )
    {
        const auto* target = find( ref );
        if ( target == nullptr )
            throw error( errc::dangling_reference, "'" + r.id + "' refers to unknown id '" + ref + "'" );
        if ( !target->is_simple() )
            throw error( errc::ill_formed, "'" + r.id + "' refers to relation '" + ref + "'; only simple requirements may be related" );
    }
}

inline void RequirementsDatabase::check_preference( const Preference& p ) const
{
    for ( const auto* side : { &p.left, &p.right } )
    {
        const auto* target = find( *side );
        if ( target == nullptr )
            throw error( errc::dangling_reference, "preference refers to unknown id '" + *side + "'" );
        if ( !target->is_simple() )
            throw error( errc::ill_formed, "preference over relation '" + *side + "' is not allowed" );
    }
}

// An atom may not be its own consequent through any chain of implications.
inline void RequirementsDatabase::check_acyclic() const
{
    std::map< Id, std::vector< Id > > edges;
    for ( const auto& [ id, r ] : _requirements )
        if ( auto* imp = std::get_if< Implication >( &r.body ) )
            for ( const auto& a : imp->antecedents )
                edges[ a ].push_back( imp->consequent );

    enum class mark
    {
        fresh,
        active,
        done
    };
    std::map< Id, mark > marks;
    // iterative DFS to keep deep chains off the call stack
    for ( const auto& [ start, _ ] : edges )
    {
        if ( marks[ start ] != mark::fresh )
            continue;
        std::vector< std::pair< Id, std::size_t > > stack{ { start, 0 } };
        marks[ start ] = mark::active;
        while ( !stack.empty() )
        {
            auto& [ node, next ] = stack.back();
            const auto& out = edges[ node ];
            if ( next < out.size() )
            {
                const Id succ = out[ next++ ];
                auto& m = marks[ succ ];
                if ( m == mark::active )
                    throw error( errc::implication_cycle, "implication chain returns to '" + succ + "'" );
                if ( m == mark::fresh )
                {
                    m = mark::active;
                    stack.emplace_back( succ, 0 );
                }
            }
            else
            {
                marks[ node ] = mark::done;
                stack.pop_back();
            }
        }
    }
}

inline RequirementsDatabase RequirementsDatabase::from_parts( const std::vector< Requirement >& requirements,
                                                              std::vector< Preference > preferences,
                                                              std::map< QuantVar, SatisfactionFn > sat_fns )
{
    RequirementsDatabase db;
    for ( const auto& r : requirements )
    {
        db.check_requirement_shape( r );
        if ( !db._requirements.emplace( r.id, r ).second )
            throw error( errc::duplicate_id, "duplicate requirement id '" + r.id + "'" );
    }
    for ( const auto& [ _, r ] : db._requirements )
        db.check_references( r );
    for ( const auto& p : preferences )
        db.check_preference( p );
    db.check_acyclic();
    std::sort( preferences.begin(), preferences.end() );
    preferences.erase( std::unique( preferences.begin(), preferences.end() ), preferences.end() );
    db._preferences = std::move( preferences );
    db._sat_fns = std::move( sat_fns );
    return db;
}

inline RequirementsDatabase RequirementsDatabase::with_requirement( Requirement r ) const
{
    check_requirement_shape( r );
    if ( contains( r.id ) )
        throw error( errc::duplicate_id, "duplicate requirement id '" + r.id + "'" );
    check_references( r );
    auto copy = *this;
    copy._requirements.emplace( r.id, std::move( r ) );
    copy.check_acyclic();
    return copy;
}

inline RequirementsDatabase RequirementsDatabase::with_preference( Preference p ) const
{
    check_preference( p );
    auto copy = *this;
    auto it = std::lower_bound( copy._preferences.begin(), copy._preferences.end(), p );
    if ( it == copy._preferences.end() || *it != p )
        copy._preferences.insert( it, std::move( p ) );
    return copy;
}

[[nodiscard]] inline RequirementsDatabase add_requirement( const RequirementsDatabase& db, Requirement r )
{
    return db.with_requirement( std::move( r ) );
}

// Select(x, y, pi): members of pi with sort label x and modality y.
template < std::ranges::input_range R >
    requires std::same_as< std::ranges::range_value_t< R >, Requirement >
[[nodiscard]] std::vector< Requirement > select( Sort sort, Modality modality, const R& pi )
{
    std::vector< Requirement > out;
    for ( const auto& r : pi )
        if ( r.sort() == sort && r.modality == modality )
            out.push_back( r );
    return out;
}

// Id-set flavour over a database.
[[nodiscard]] inline IdSet select( Sort sort, Modality modality, const IdSet& pi, const RequirementsDatabase& db )
{
    IdSet out;
    for ( const auto& id : pi )
    {
        const auto& r = db.at( id );
        if ( r.sort() == sort && r.modality == modality )
            out.insert( id );
    }
    return out;
}

[[nodiscard]] inline IdSet select( Sort sort, Modality modality, const RequirementsDatabase& db )
{
    return select( sort, modality, db.ids(), db );
}

[[nodiscard]] inline IdSet mandatory_ids( const RequirementsDatabase& db )
{
    IdSet out;
    for ( const auto& [ id, r ] : db.requirements() )
        if ( r.modality == Modality::mandatory )
            out.insert( id );
    return out;
}

} // namespace roadmapper
