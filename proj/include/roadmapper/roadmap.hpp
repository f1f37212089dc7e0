#pragma once

#include "configuration.hpp"

#include <optional>
#include <variant>

namespace roadmapper
{

// Planning-style operator <T, A, D>: applicable in S when T ∪ D ⊆ S and A ∩ S = ∅;
// applying it yields (S \ D) ∪ A.
class AdaptationRequirement
{
    IdSet _trigger;
    IdSet _add;
    IdSet _del;

public:
    AdaptationRequirement( IdSet trigger, IdSet add, IdSet del )
        : _trigger{ std::move( trigger ) }, _add{ std::move( add ) }, _del{ std::move( del ) }
    {
        if ( _trigger.empty() )
            throw error( errc::invalid_argument, "adaptation trigger must not be empty" );
        if ( _add.empty() && _del.empty() )
            throw error( errc::identical_configurations, "adaptation has no effect" );
        for ( const auto& id : _add )
            if ( _del.contains( id ) )
                throw error( errc::invalid_argument, "'" + id + "' is both added and deleted" );
    }

    [[nodiscard]] const IdSet& trigger() const noexcept { return _trigger; }
    [[nodiscard]] const IdSet& add() const noexcept { return _add; }
    [[nodiscard]] const IdSet& del() const noexcept { return _del; }

    [[nodiscard]] bool applicable( const IdSet& s ) const
    {
        auto in_s = [ & ]( const Id& id ) { return s.contains( id ); };
        return std::all_of( _trigger.begin(), _trigger.end(), in_s ) && std::all_of( _del.begin(), _del.end(), in_s ) &&
               std::none_of( _add.begin(), _add.end(), in_s );
    }

    friend bool operator==( const AdaptationRequirement&, const AdaptationRequirement& ) = default;
    friend auto operator<=>( const AdaptationRequirement& a, const AdaptationRequirement& b )
    {
        return std::tie( a._trigger, a._add, a._del ) <=> std::tie( b._trigger, b._add, b._del );
    }
};

class ramification_failure : public error
{
    PropertyReport _report;

public:
    ramification_failure( const std::string& message, PropertyReport report )
        : error( errc::ramification_failure, message ), _report{ std::move( report ) }
    {
    }

    [[nodiscard]] const PropertyReport& report() const noexcept { return _report; }
};

struct Roadmap
{
    std::vector< Configuration > configs;
    std::vector< AdaptationRequirement > adaptations; // one per consecutive pair, in sequence order

    friend bool operator==( const Roadmap&, const Roadmap& ) = default;
};

[[nodiscard]] inline AdaptationRequirement derive_adaptation( const Configuration& from, const Configuration& to,
                                                              const IdSet& trigger )
{
    if ( from.members == to.members )
        throw error( errc::identical_configurations, "source and target configurations are identical" );
    for ( const auto& id : trigger )
        if ( !from.members.contains( id ) )
            throw error( errc::trigger_not_in_source, "trigger '" + id + "' is not in the source configuration" );
    IdSet add, del;
    std::set_difference( to.members.begin(), to.members.end(), from.members.begin(), from.members.end(),
                         std::inserter( add, add.end() ) );
    std::set_difference( from.members.begin(), from.members.end(), to.members.begin(), to.members.end(),
                         std::inserter( del, del.end() ) );
    return AdaptationRequirement( trigger, std::move( add ), std::move( del ) );
}

// Trigger defaults to the deleted set: the members expected to fail are the ones replaced.
[[nodiscard]] inline AdaptationRequirement derive_adaptation( const Configuration& from, const Configuration& to )
{
    IdSet del;
    std::set_difference( from.members.begin(), from.members.end(), to.members.begin(), to.members.end(),
                         std::inserter( del, del.end() ) );
    if ( del.empty() && from.members != to.members )
        throw error( errc::invalid_argument, "target strictly extends the source; an explicit trigger is required" );
    return derive_adaptation( from, to, del );
}

[[nodiscard]] inline Configuration apply_adaptation( ConfigurationChecker& ck, const Configuration& s,
                                                     const AdaptationRequirement& ar )
{
    if ( !ar.applicable( s.members ) )
        throw error( errc::not_applicable, "adaptation is not applicable to '" + s.id + "'" );
    IdSet next;
    std::set_difference( s.members.begin(), s.members.end(), ar.del().begin(), ar.del().end(),
                         std::inserter( next, next.end() ) );
    next.insert( ar.add().begin(), ar.add().end() );
    auto report = ck.check( next );
    if ( !report.is_configuration() )
        throw ramification_failure( "adapting '" + s.id + "' does not yield a configuration", std::move( report ) );
    return { {}, std::move( next ) };
}

[[nodiscard]] inline Configuration apply_adaptation( const RequirementsDatabase& db, const Configuration& s,
                                                     const AdaptationRequirement& ar )
{
    ConfigurationChecker ck( db );
    return apply_adaptation( ck, s, ar );
}

// All sequences of distinct configurations of length 1..max_len, in index order.
[[nodiscard]] inline std::vector< Roadmap > build_roadmaps( const std::vector< Configuration >& configs, std::size_t max_len,
                                                            std::size_t max_roadmaps = std::size_t{ 1 } << 20 )
{
    if ( max_len < 1 )
        throw error( errc::invalid_argument, "roadmap length must be at least 1" );
    std::vector< Roadmap > out;
    std::vector< std::size_t > seq;
    std::vector< char > used( configs.size(), 0 );
    std::function< void() > rec = [ & ]() {
        if ( !seq.empty() )
        {
            if ( out.size() >= max_roadmaps )
                throw error( errc::resource_limit, "more than " + std::to_string( max_roadmaps ) + " roadmaps" );
            Roadmap rm;
            for ( std::size_t k = 0; k < seq.size(); ++k )
            {
                rm.configs.push_back( configs[ seq[ k ] ] );
                if ( k > 0 )
                    rm.adaptations.push_back( derive_adaptation( configs[ seq[ k - 1 ] ], configs[ seq[ k ] ] ) );
            }
            out.push_back( std::move( rm ) );
        }
        if ( seq.size() == max_len )
            return;
        for ( std::size_t i = 0; i < configs.size(); ++i )
        {
            if ( used[ i ] )
                continue;
            used[ i ] = 1;
            seq.push_back( i );
            rec();
            seq.pop_back();
            used[ i ] = 0;
        }
    };
    rec();
    return out;
}

[[nodiscard]] inline std::vector< Roadmap > build_roadmaps( const RequirementsDatabase&, const std::vector< Configuration >& configs,
                                                            std::size_t max_len )
{
    return build_roadmaps( configs, max_len );
}

// ---------------------------------------------------------------------------
// Decision rules

struct R1Max
{
    QuantVar var;
};
struct R2Min
{
    QuantVar var;
};
struct R3MaxPlusPrefs
{
    QuantVar var;
};
struct R4Roadmap
{
    QuantVar var;
    double floor;
    std::size_t max_diff;
};

using ConfigRule = std::variant< R1Max, R2Min, R3MaxPlusPrefs >;

struct RankedConfiguration
{
    Configuration config;
    double value = 0.0;
    std::size_t satisfied_count = 0;
    IdSet satisfied_optional;
    std::vector< Preference > satisfied_preferences;
    bool pareto = true;
};

namespace detail
{

// Largest value of v realized by s.
[[nodiscard]] inline double config_value( const Realizer& r, const IdSet& members, const QuantVar& v, const std::string& label )
{
    const auto st = r.close( r.bits( members ) );
    const auto vals = r.values( st.derived, v );
    if ( vals.empty() )
        throw error( errc::missing_value, "'" + v + "' has no value in configuration '" + label + "'" );
    return *vals.rbegin();
}

} // namespace detail

[[nodiscard]] inline std::vector< RankedConfiguration > rank_configurations( const RequirementsDatabase& db,
                                                                             const std::vector< Configuration >& configs,
                                                                             const ConfigRule& rule )
{
    detail::Realizer r( db );
    const QuantVar& v = std::visit( []( const auto& x ) -> const QuantVar& { return x.var; }, rule );
    const bool with_prefs = std::holds_alternative< R3MaxPlusPrefs >( rule );

    std::vector< RankedConfiguration > out;
    for ( const auto& c : configs )
    {
        RankedConfiguration rc{ c, detail::config_value( r, c.members, v, c.id ), 0, {}, {}, true };
        if ( with_prefs )
        {
            const auto derived = r.ids( r.close( r.bits( c.members ) ).derived );
            for ( const auto& id : derived )
                if ( db.at( id ).modality == Modality::optional )
                    rc.satisfied_optional.insert( id );
            for ( const auto& p : db.preferences() )
                if ( p.kind != PrefKind::indifferent && derived.contains( p.left ) )
                    rc.satisfied_preferences.push_back( p );
            rc.satisfied_count = rc.satisfied_optional.size() + rc.satisfied_preferences.size();
        }
        out.push_back( std::move( rc ) );
    }

    if ( with_prefs )
        for ( auto& a : out )
            for ( const auto& b : out )
            {
                const bool geq = b.value >= a.value && b.satisfied_count >= a.satisfied_count;
                const bool gt = b.value > a.value || b.satisfied_count > a.satisfied_count;
                if ( geq && gt )
                {
                    a.pareto = false;
                    break;
                }
            }

    std::stable_sort( out.begin(), out.end(), [ & ]( const RankedConfiguration& a, const RankedConfiguration& b ) {
        if ( a.value != b.value )
            return std::holds_alternative< R2Min >( rule ) ? a.value < b.value : a.value > b.value;
        if ( with_prefs && a.satisfied_count != b.satisfied_count )
            return a.satisfied_count > b.satisfied_count;
        return canonical_less( a.config.members, b.config.members );
    } );
    return out;
}

struct ScoredRoadmap
{
    Roadmap roadmap;
    double score = 0.0;
    std::vector< double > values;
};

struct FilteredRoadmap
{
    Roadmap roadmap;
    std::string reason; // "floor" or "diff"
    // Offending configuration index (floor) or index of the first member of the offending pair (diff).
    std::size_t witness_index = 0;
    double witness_value = 0.0; // the value below floor, or the symmetric-difference size
};

struct RoadmapRanking
{
    std::vector< ScoredRoadmap > ranked;
    std::vector< FilteredRoadmap > filtered;
};

[[nodiscard]] inline std::size_t symmetric_difference_size( const IdSet& a, const IdSet& b )
{
    std::size_t n = 0;
    for ( const auto& id : a )
        n += b.contains( id ) ? 0 : 1;
    for ( const auto& id : b )
        n += a.contains( id ) ? 0 : 1;
    return n;
}

[[nodiscard]] inline RoadmapRanking rank_roadmaps( const RequirementsDatabase& db, const std::vector< Roadmap >& roadmaps,
                                                   const R4Roadmap& rule )
{
    detail::Realizer r( db );
    std::map< IdSet, double > cache;
    auto value_of = [ & ]( const Configuration& c ) {
        auto it = cache.find( c.members );
        if ( it == cache.end() )
            it = cache.emplace( c.members, detail::config_value( r, c.members, rule.var, c.id ) ).first;
        return it->second;
    };

    RoadmapRanking out;
    for ( const auto& rm : roadmaps )
    {
        ScoredRoadmap sr{ rm, 0.0, {} };
        std::optional< FilteredRoadmap > bad;
        for ( std::size_t i = 0; i < rm.configs.size(); ++i )
        {
            const double x = value_of( rm.configs[ i ] );
            sr.values.push_back( x );
            sr.score += x;
            if ( !bad && x < rule.floor )
                bad = FilteredRoadmap{ rm, "floor", i, x };
        }
        for ( std::size_t i = 0; !bad && i + 1 < rm.configs.size(); ++i )
        {
            const auto d = symmetric_difference_size( rm.configs[ i ].members, rm.configs[ i + 1 ].members );
            if ( d > rule.max_diff )
                bad = FilteredRoadmap{ rm, "diff", i, static_cast< double >( d ) };
        }
        if ( bad )
            out.filtered.push_back( std::move( *bad ) );
        else
            out.ranked.push_back( std::move( sr ) );
    }

    auto seq_less = []( const Roadmap& a, const Roadmap& b ) {
        return std::lexicographical_compare( a.configs.begin(), a.configs.end(), b.configs.begin(), b.configs.end(),
                                             []( const Configuration& x, const Configuration& y ) {
                                                 return canonical_less( x.members, y.members );
                                             } );
    };
    std::stable_sort( out.ranked.begin(), out.ranked.end(), [ & ]( const ScoredRoadmap& a, const ScoredRoadmap& b ) {
        if ( a.score != b.score )
            return a.score > b.score;
        if ( a.roadmap.configs.size() != b.roadmap.configs.size() )
            return a.roadmap.configs.size() < b.roadmap.configs.size();
        return seq_less( a.roadmap, b.roadmap );
    } );
    std::stable_sort( out.filtered.begin(), out.filtered.end(),
                      [ & ]( const FilteredRoadmap& a, const FilteredRoadmap& b ) { return seq_less( a.roadmap, b.roadmap ); } );
    return out;
}

struct SoftgoalProposal
{
    Requirement left_assumption;
    Requirement right_assumption;
    Preference preference;
};

// The configuration-level softgoal comparison: with VAL(s1, v) = {x1} and VAL(s2, v) = {x2},
// prefers k(v = x1) when mu(x1) > mu(x2), proposes indifference on equal satisfaction, and
// nothing when s2 is the more satisfying one (swap the arguments for that direction).
[[nodiscard]] inline std::optional< SoftgoalProposal > pairwise_softgoal_preference( const RequirementsDatabase& db,
                                                                                     const Configuration& s1,
                                                                                     const Configuration& s2,
                                                                                     const QuantVar& v )
{
    const auto* f = db.sat_fn( v );
    if ( f == nullptr )
        throw error( errc::no_satisfaction_fn, "no satisfaction function for '" + v + "'" );
    auto single = [ & ]( const Configuration& c ) {
        const auto vals = val( c.members, v, db );
        if ( vals.size() != 1 )
            throw error( errc::non_singleton_val, "'" + v + "' has " + std::to_string( vals.size() ) + " values in '" + c.id + "'" );
        return *vals.begin();
    };
    const double x1 = single( s1 );
    const double x2 = single( s2 );
    const double m1 = sat_value( *f, x1 );
    const double m2 = sat_value( *f, x2 );

    auto assumption = [ & ]( double x ) {
        const auto cond = detail::assignment_condition( v, x );
        if ( const auto* r = detail::find_quant( db, Sort::k, cond ) )
            return *r;
        return make_quant( Sort::k, detail::macro_id( "k", { v, detail::encode_number( x ) } ), cond );
    };
    if ( approx_equal( m1, m2 ) )
    {
        auto a = assumption( x1 );
        auto b = assumption( x2 );
        Preference p{ PrefKind::indifferent, a.id, b.id };
        return SoftgoalProposal{ std::move( a ), std::move( b ), std::move( p ) };
    }
    if ( m1 < m2 )
        return std::nullopt;
    auto a = assumption( x1 );
    auto b = assumption( x2 );
    Preference p{ PrefKind::strict, a.id, b.id };
    return SoftgoalProposal{ std::move( a ), std::move( b ), std::move( p ) };
}

} // namespace roadmapper
