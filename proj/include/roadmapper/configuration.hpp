#pragma once

#include "operationalization.hpp"
#include "transforms.hpp"

#include <memory>
#include <unordered_set>

namespace roadmapper
{

struct Configuration
{
    std::string id;
    IdSet members; // K/T requirements only

    // Labels are presentation; identity is the member set.
    friend bool operator==( const Configuration& a, const Configuration& b ) { return a.members == b.members; }
};

struct PropertyCheck
{
    bool holds = true;
    // Violating ids; for dominance the addable optional ids, for minimality the ids whose
    // removal leaves a set satisfying properties 1-5.
    IdSet witness;
};

struct PropertyReport
{
    PropertyCheck consistency;
    PropertyCheck qual_threshold;
    PropertyCheck quant_threshold;
    PropertyCheck conformity;
    PropertyCheck dominance;
    PropertyCheck minimality;

    [[nodiscard]] bool is_configuration() const noexcept
    {
        return consistency.holds && qual_threshold.holds && quant_threshold.holds && conformity.holds &&
               dominance.holds && minimality.holds;
    }
};

struct EnumerationLimits
{
    // Non-mandatory K/T requirements the search may range over.
    std::size_t max_atoms = 24;
    std::size_t max_results = 100000;
    std::size_t max_candidates = std::size_t{ 1 } << 20;
};

struct EnumerationResult
{
    std::vector< Configuration > configurations;
    bool truncated = false;
    // The database the configurations refer to: the input after the conflict macro.
    RequirementsDatabase database;
};

[[nodiscard]] inline bool canonical_less( const IdSet& a, const IdSet& b )
{
    return std::lexicographical_compare( a.begin(), a.end(), b.begin(), b.end() );
}

// Evaluates the six configuration properties over one database. Owns its index so checks
// on many candidate sets share work.
class ConfigurationChecker
{
    using Bits = detail::Bits;

    std::shared_ptr< const RequirementsDatabase > _db;
    std::unique_ptr< detail::Realizer > _r;
    std::unique_ptr< detail::SupportEnumerator > _en;
    Bits _m;
    Bits _optional;
    Bits _plain;
    std::vector< std::size_t > _qual_targets;
    std::vector< std::size_t > _quant_targets;
    std::map< std::size_t, std::vector< Bits > > _supports;
    std::size_t _cap;
    std::size_t _work = 0;

public:
    explicit ConfigurationChecker( RequirementsDatabase db, std::size_t max_candidates = std::size_t{ 1 } << 20 )
        : _db{ std::make_shared< const RequirementsDatabase >( std::move( db ) ) }, _cap{ max_candidates }
    {
        _r = std::make_unique< detail::Realizer >( *_db );
        _en = std::make_unique< detail::SupportEnumerator >( *_r, OpLimits{ max_candidates } );
        _m = _en->mandatory();
        _optional = Bits( _r->size() );
        _plain = Bits( _r->size() );
        for ( std::size_t i = 0; i < _r->size(); ++i )
        {
            const auto& r = _r->req( i );
            if ( _r->is_kt( i ) )
            {
                if ( r.modality == Modality::optional )
                    _optional.set( i );
                else if ( r.modality == Modality::plain )
                    _plain.set( i );
            }
            else if ( r.modality == Modality::mandatory )
            {
                if ( r.sort() == Sort::q )
                    _quant_targets.push_back( i );
                else
                    _qual_targets.push_back( i );
            }
        }
    }

    [[nodiscard]] const RequirementsDatabase& database() const noexcept { return *_db; }
    [[nodiscard]] const detail::Realizer& realizer() const noexcept { return *_r; }
    [[nodiscard]] detail::SupportEnumerator& enumerator() noexcept { return *_en; }
    [[nodiscard]] const Bits& mandatory() const noexcept { return _m; }
    [[nodiscard]] const Bits& optional() const noexcept { return _optional; }
    [[nodiscard]] const Bits& plain() const noexcept { return _plain; }
    [[nodiscard]] const std::vector< std::size_t >& qual_targets() const noexcept { return _qual_targets; }
    [[nodiscard]] const std::vector< std::size_t >& quant_targets() const noexcept { return _quant_targets; }

    // Minimal realizing supports (full sets, mandatory set included) of a target.
    const std::vector< Bits >& supports( std::size_t target )
    {
        if ( auto it = _supports.find( target ); it != _supports.end() )
            return it->second;
        return _supports.emplace( target, detail::realizing_supports( *_en, *_r, target ) ).first->second;
    }

    [[nodiscard]] bool consistent( const Bits& s )
    {
        charge();
        return _r->consistent( s );
    }

    // Properties 1-4.
    [[nodiscard]] bool in_f( const Bits& s )
    {
        if ( !_m.subset_of( s ) )
            return false;
        charge();
        const auto st = _r->close( s );
        if ( st.bottom )
            return false;
        return targets_derived( st.derived );
    }

    // Properties 1-5. Dominance reduces to single additions: an optional superset in F
    // implies every one-element step towards it is in F.
    [[nodiscard]] bool in_d( const Bits& s )
    {
        if ( !in_f( s ) )
            return false;
        return first_addable( s ) == std::nullopt;
    }

    // All six properties. For s in D, a smaller set in D exists iff some single plain
    // member can be removed (removing an optional member re-admits it).
    [[nodiscard]] bool is_configuration( const Bits& s )
    {
        if ( !in_d( s ) )
            return false;
        bool minimal = true;
        minus( s, _m ).for_each( [ & ]( std::size_t rho ) {
            if ( !minimal || _optional.test( rho ) )
                return;
            Bits smaller = s;
            smaller.reset( rho );
            if ( in_d( smaller ) )
                minimal = false;
        } );
        return minimal;
    }

    [[nodiscard]] PropertyReport check( const IdSet& members )
    {
        for ( const auto& id : members )
            if ( !is_kt( _db->at( id ).sort() ) )
                throw error( errc::invalid_argument, "configuration member '" + id + "' is not a k or t requirement" );
        const Bits s = _r->bits( members );
        PropertyReport rep;

        charge();
        const auto st = _r->close( s );
        rep.consistency.holds = !st.bottom;
        for ( auto c : st.fired )
            rep.consistency.witness.insert( _r->req( c ).id );

        auto threshold = [ & ]( const std::vector< std::size_t >& targets, PropertyCheck& out ) {
            for ( auto t : targets )
            {
                bool met = false;
                if ( !st.bottom )
                    met = st.derived.test( t );
                else
                    for ( const auto& sup : supports( t ) )
                        if ( sup.subset_of( s ) )
                        {
                            met = true;
                            break;
                        }
                if ( !met )
                {
                    out.holds = false;
                    out.witness.insert( _r->req( t ).id );
                }
            }
        };
        threshold( _qual_targets, rep.qual_threshold );
        threshold( _quant_targets, rep.quant_threshold );

        minus( _m, s ).for_each( [ & ]( std::size_t i ) {
            rep.conformity.holds = false;
            rep.conformity.witness.insert( _r->req( i ).id );
        } );

        // Dominance compares S against supersets with both satisfying 1-4; it holds
        // vacuously when S itself does not.
        const bool f = rep.consistency.holds && rep.qual_threshold.holds && rep.quant_threshold.holds && rep.conformity.holds;
        if ( f )
            minus( _optional, s ).for_each( [ & ]( std::size_t a ) {
                Bits bigger = s;
                bigger.set( a );
                if ( consistent( bigger ) )
                {
                    rep.dominance.holds = false;
                    rep.dominance.witness.insert( _r->req( a ).id );
                }
            } );

        if ( f && rep.dominance.holds )
        {
            minus( s, _m ).for_each( [ & ]( std::size_t rho ) {
                if ( !rep.minimality.holds || _optional.test( rho ) )
                    return;
                Bits smaller = s;
                smaller.reset( rho );
                if ( in_d( smaller ) )
                {
                    rep.minimality.holds = false;
                    rep.minimality.witness.insert( _r->req( rho ).id );
                }
            } );
        }
        else if ( auto sub = smaller_in_d( s ) )
        {
            rep.minimality.holds = false;
            rep.minimality.witness = _r->ids( minus( s, *sub ) );
        }
        return rep;
    }

private:
    void charge( std::size_t n = 1 )
    {
        _work += n;
        if ( _work > _cap )
            throw error( errc::resource_limit, "configuration search exceeded " + std::to_string( _cap ) + " checks" );
    }

    [[nodiscard]] bool targets_derived( const Bits& derived ) const
    {
        for ( auto t : _qual_targets )
            if ( !derived.test( t ) )
                return false;
        for ( auto t : _quant_targets )
            if ( !derived.test( t ) )
                return false;
        return true;
    }

    [[nodiscard]] std::optional< std::size_t > first_addable( const Bits& s )
    {
        std::optional< std::size_t > found;
        minus( _optional, s ).for_each( [ & ]( std::size_t a ) {
            if ( found )
                return;
            Bits bigger = s;
            bigger.set( a );
            if ( consistent( bigger ) )
                found = a;
        } );
        return found;
    }

    // Some S' strictly inside s satisfying 1-5, for an arbitrary s. Depth-first over the
    // non-mandatory members, pruning on consistency of the kept part and on the thresholds
    // of the kept-plus-undecided part (both monotone).
    [[nodiscard]] std::optional< Bits > smaller_in_d( const Bits& s )
    {
        if ( !_m.subset_of( s ) )
            return std::nullopt;
        const auto free = minus( s, _m ).indices();
        std::optional< Bits > found;
        std::function< void( std::size_t, Bits&, Bits& ) > rec = [ & ]( std::size_t i, Bits& kept, Bits& open ) {
            if ( found )
                return;
            if ( !consistent( kept ) )
                return;
            charge();
            const auto upper = _r->close( kept | open );
            if ( !targets_derived( upper.derived ) )
                return;
            if ( i == free.size() )
            {
                if ( kept != s && in_d( kept ) )
                    found = kept;
                return;
            }
            const auto a = free[ i ];
            open.reset( a );
            kept.set( a );
            rec( i + 1, kept, open );
            kept.reset( a );
            rec( i + 1, kept, open );
            open.set( a );
        };
        Bits kept = _m;
        Bits open = minus( s, _m );
        rec( 0, kept, open );
        return found;
    }
};

[[nodiscard]] inline PropertyReport check_configuration( const RequirementsDatabase& db, const IdSet& members )
{
    ConfigurationChecker ck( db );
    return ck.check( members );
}

[[nodiscard]] inline PropertyReport check_configuration( const RequirementsDatabase& db, const Configuration& s )
{
    return check_configuration( db, s.members );
}

namespace detail
{

// Plain K/T atoms that can keep an optional atom out of a configuration: both must feed
// the same conflict. A plain member outside every chosen support survives minimality only
// by blocking some optional atom, so these are the only plain extras worth trying.
[[nodiscard]] inline Bits blocker_candidates( const Realizer& r, const Bits& optional, const Bits& plain )
{
    const std::size_t n = r.size();
    std::map< QuantVar, std::size_t > var_node;
    auto node = [ & ]( const QuantVar& v ) {
        auto [ it, fresh ] = var_node.emplace( v, n + var_node.size() );
        return it->second;
    };
    std::vector< std::vector< std::size_t > > back( n ); // predecessors, grown as var nodes appear
    auto edge = [ & ]( std::size_t from, std::size_t to ) {
        if ( back.size() <= std::max( from, to ) )
            back.resize( std::max( from, to ) + 1 );
        back[ to ].push_back( from );
    };

    for ( const auto& imp : r.implications() )
    {
        for ( auto a : imp.ants )
            edge( a, imp.cons );
        edge( imp.req, imp.cons );
    }
    for ( const auto& [ v, srcs ] : r.all_sources() )
        for ( const auto& src : srcs )
        {
            edge( src.req, node( v ) );
            for ( const auto& d : src.deps )
                edge( node( d ), node( v ) );
        }
    for ( const auto& [ v, _ ] : r.database().sat_fns() )
        edge( node( v ), node( mu_var( v ) ) );
    for ( auto q : r.quant_targets() )
    {
        const auto& cond = r.req( q ).quant()->cond;
        for ( const auto& v : condition_vars( cond ) )
            edge( node( v ), q );
        if ( const auto* p = std::get_if< ProbCompare >( &cond ) )
            for ( const auto& d : r.distributions( p->var ) )
                edge( d.req, q );
    }
    back.resize( n + var_node.size() );

    Bits out( n );
    for ( const auto& con : r.conflicts() )
    {
        std::vector< char > seen( back.size(), 0 );
        std::vector< std::size_t > stack{ con.req };
        stack.insert( stack.end(), con.ants.begin(), con.ants.end() );
        Bits rel( n );
        while ( !stack.empty() )
        {
            auto x = stack.back();
            stack.pop_back();
            if ( seen[ x ] )
                continue;
            seen[ x ] = 1;
            if ( x < n )
                rel.set( x );
            for ( auto p : back[ x ] )
                stack.push_back( p );
        }
        if ( rel.intersects( optional ) )
            out |= rel & plain;
    }
    return out;
}

} // namespace detail

// Every configuration of db (after the conflict macro), in canonical order.
[[nodiscard]] inline EnumerationResult enumerate_configurations( const RequirementsDatabase& db,
                                                                 const EnumerationLimits& limits = {} )
{
    using detail::Bits;
    auto macro = apply_conflict_macro( db );
    EnumerationResult result{ {}, false, macro.db };
    ConfigurationChecker ck( std::move( macro.db ), limits.max_candidates );
    const auto& r = ck.realizer();

    const std::size_t free_atoms = ck.optional().count() + ck.plain().count();
    if ( free_atoms > limits.max_atoms )
        throw error( errc::resource_limit, std::to_string( free_atoms ) + " non-mandatory k/t requirements exceed the limit of " +
                                               std::to_string( limits.max_atoms ) );

    // Cores: one realizing support per mandatory target, united.
    std::vector< Bits > cores{ ck.mandatory() };
    std::vector< std::size_t > targets = ck.qual_targets();
    targets.insert( targets.end(), ck.quant_targets().begin(), ck.quant_targets().end() );
    for ( auto t : targets )
    {
        const auto& sups = ck.supports( t );
        std::vector< Bits > next;
        for ( const auto& c : cores )
            for ( const auto& s : sups )
            {
                auto u = c | s;
                if ( ck.enumerator().consistent_with_m( u ) )
                    next.push_back( std::move( u ) );
            }
        std::sort( next.begin(), next.end() );
        next.erase( std::unique( next.begin(), next.end() ), next.end() );
        ck.enumerator().charge( next.size() );
        cores = std::move( next );
        if ( cores.empty() )
            break;
    }
    if ( !ck.consistent( ck.mandatory() ) )
        cores.clear();

    const Bits blockers = detail::blocker_candidates( r, ck.optional(), ck.plain() );
    std::unordered_set< Bits, detail::BitsHash > seen;
    std::vector< Bits > found;

    auto consider = [ & ]( const Bits& s ) {
        if ( !seen.insert( s ).second )
            return;
        if ( ck.is_configuration( s ) )
            found.push_back( s );
    };

    for ( const auto& core : cores )
    {
        const auto extra = minus( blockers, core ).indices();
        std::function< void( std::size_t, Bits& ) > with_blockers = [ & ]( std::size_t i, Bits& cur ) {
            if ( i == extra.size() )
            {
                // Every maximal consistent extension of cur by optional atoms.
                const auto opts = minus( ck.optional(), cur ).indices();
                std::function< void( std::size_t, Bits& ) > extend = [ & ]( std::size_t j, Bits& s ) {
                    if ( j == opts.size() )
                    {
                        for ( auto a : opts )
                            if ( !s.test( a ) )
                            {
                                Bits bigger = s;
                                bigger.set( a );
                                if ( ck.consistent( bigger ) )
                                    return;
                            }
                        consider( s );
                        return;
                    }
                    s.set( opts[ j ] );
                    if ( ck.consistent( s ) )
                        extend( j + 1, s );
                    s.reset( opts[ j ] );
                    extend( j + 1, s );
                };
                Bits s = cur;
                extend( 0, s );
                return;
            }
            cur.set( extra[ i ] );
            if ( ck.consistent( cur ) )
                with_blockers( i + 1, cur );
            cur.reset( extra[ i ] );
            with_blockers( i + 1, cur );
        };
        Bits cur = core;
        with_blockers( 0, cur );
    }

    std::vector< IdSet > sets;
    for ( const auto& s : found )
        sets.push_back( r.ids( s ) );
    std::sort( sets.begin(), sets.end(), canonical_less );
    if ( sets.size() > limits.max_results )
    {
        sets.resize( limits.max_results );
        result.truncated = true;
    }
    for ( std::size_t i = 0; i < sets.size(); ++i )
        result.configurations.push_back( { "S" + std::to_string( i + 1 ), std::move( sets[ i ] ) } );
    return result;
}

} // namespace roadmapper
