#pragma once

#include "model.hpp"

#include <map>
#include <vector>

namespace roadmapper
{

// Result of forward chaining over a requirement set.
struct Closure
{
    IdSet derived;
    bool bottom = false;
    // One derivation per derived id: the implications used, first found in id order.
    // Members of the source set map to the empty set.
    std::map< Id, IdSet > support;
    // Conflicts whose antecedents were all derived.
    IdSet fired_conflicts;
};

// Least fixpoint of: members of pi are derived; an implication or conflict in pi whose
// antecedents are all derived yields its consequent (or bottom). Bottom never licenses
// further derivations.
[[nodiscard]] inline Closure closure( const RequirementsDatabase& db, const IdSet& pi )
{
    Closure out;
    std::vector< const Requirement* > implications;
    std::vector< const Requirement* > conflicts;
    for ( const auto& id : pi )
    {
        const auto& r = db.at( id );
        out.derived.insert( id );
        out.support.emplace( id, IdSet{} );
        if ( std::holds_alternative< Implication >( r.body ) )
            implications.push_back( &r );
        else if ( std::holds_alternative< Conflict >( r.body ) )
            conflicts.push_back( &r );
    }

    // pi is an ordered set, so both lists are in id order; each pass derives at least one
    // new atom or stops, bounding the loop by |pi|.
    for ( bool changed = true; changed; )
    {
        changed = false;
        for ( const auto* r : implications )
        {
            const auto& imp = std::get< Implication >( r->body );
            if ( out.derived.contains( imp.consequent ) )
                continue;
            bool ready = true;
            for ( const auto& a : imp.antecedents )
                if ( !out.derived.contains( a ) )
                {
                    ready = false;
                    break;
                }
            if ( !ready )
                continue;
            IdSet used{ r->id };
            for ( const auto& a : imp.antecedents )
            {
                const auto& s = out.support.at( a );
                used.insert( s.begin(), s.end() );
            }
            (void)db.at( imp.consequent ); // resolves or throws
            out.derived.insert( imp.consequent );
            out.support.emplace( imp.consequent, std::move( used ) );
            changed = true;
        }
    }

    for ( const auto* r : conflicts )
    {
        const auto& con = std::get< Conflict >( r->body );
        if ( std::all_of( con.antecedents.begin(), con.antecedents.end(),
                          [ & ]( const Id& a ) { return out.derived.contains( a ); } ) )
        {
            out.bottom = true;
            out.fired_conflicts.insert( r->id );
        }
    }
    return out;
}

[[nodiscard]] inline bool entails( const RequirementsDatabase& db, const IdSet& pi, const Id& phi )
{
    (void)db.at( phi );
    return closure( db, pi ).derived.contains( phi );
}

[[nodiscard]] inline bool is_consistent( const RequirementsDatabase& db, const IdSet& pi )
{
    return !closure( db, pi ).bottom;
}

// Full load-time validation: structure (already enforced by construction) plus
// consistency of the mandatory subset.
inline void validate_database( const RequirementsDatabase& db )
{
    const auto c = closure( db, mandatory_ids( db ) );
    if ( c.bottom )
        throw error( errc::inconsistent_mandatory_set,
                     "mandatory requirements derive false via '" + *c.fired_conflicts.begin() + "'" );
}

} // namespace roadmapper
