#pragma once

#include "model.hpp"
#include "parser.hpp"

#include <sstream>
#include <string>

namespace roadmapper
{

namespace detail
{

[[nodiscard]] inline std::string dot_quote( std::string_view s )
{
    std::string out = "\"";
    for ( char c : s )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        if ( c == '\n' )
        {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

[[nodiscard]] inline std::string_view dot_shape( Sort s )
{
    switch ( s )
    {
    case Sort::g: return "ellipse";
    case Sort::t: return "box";
    case Sort::k: return "note";
    case Sort::q: return "octagon";
    case Sort::s: return "hexagon";
    }
    return "ellipse";
}

[[nodiscard]] inline std::string dot_label( const Requirement& r )
{
    std::string label = std::string( 1, sort_letter( r.sort() ) ) + "(" + r.id + ")";
    if ( r.modality == Modality::mandatory )
        label += "^m";
    else if ( r.modality == Modality::optional )
        label += "^o";
    if ( const auto* q = r.quant() )
        label += "\n" + format_condition( q->cond );
    else if ( const auto* s = std::get_if< Softgoal >( &r.body ) )
        label += "\n" + s->content;
    else if ( r.is_relation() )
    {
        std::string f;
        for ( const auto& a : r.references() )
        {
            if ( auto* imp = std::get_if< Implication >( &r.body ); imp && a == imp->consequent )
                continue;
            f += ( f.empty() ? "" : " & " ) + a;
        }
        if ( auto* imp = std::get_if< Implication >( &r.body ) )
            f += " -> " + imp->consequent;
        else
            f += " -> false";
        label += "\n" + f;
    }
    if ( !r.description.empty() )
        label += "\n" + r.description;
    return label;
}

} // namespace detail

// Graphviz rendering: one node per requirement in id order; relations are plaintext nodes
// inside a cluster, and also induce the edges between the simple requirements they mention.
[[nodiscard]] inline std::string to_dot( const RequirementsDatabase& db )
{
    std::ostringstream os;
    os << "digraph requirements {\n";
    os << "  rankdir=BT;\n";
    os << "  node [fontname=\"Helvetica\"];\n";
    os << "  edge [fontname=\"Helvetica\"];\n";

    auto node = [ & ]( const Requirement& r, const char* indent ) {
        os << indent << detail::dot_quote( r.id ) << " [label=" << detail::dot_quote( detail::dot_label( r ) );
        if ( r.is_relation() )
            os << ", shape=plaintext";
        else
            os << ", shape=" << detail::dot_shape( r.sort() );
        if ( r.modality == Modality::mandatory )
            os << ", penwidth=3";
        else if ( r.modality == Modality::optional )
            os << ", style=dashed";
        os << "];\n";
    };

    for ( const auto& [ id, r ] : db.requirements() )
        if ( r.is_simple() )
            node( r, "  " );
    bool any_relation = false;
    for ( const auto& [ id, r ] : db.requirements() )
        any_relation = any_relation || r.is_relation();
    if ( any_relation )
    {
        os << "  subgraph cluster_relations {\n";
        os << "    label=\"relations\";\n";
        os << "    style=dotted;\n";
        for ( const auto& [ id, r ] : db.requirements() )
            if ( r.is_relation() )
                node( r, "    " );
        os << "  }\n";
    }

    for ( const auto& [ id, r ] : db.requirements() )
    {
        if ( const auto* imp = std::get_if< Implication >( &r.body ) )
            for ( const auto& a : imp->antecedents )
                os << "  " << detail::dot_quote( a ) << " -> " << detail::dot_quote( imp->consequent )
                   << " [label=" << detail::dot_quote( id ) << "];\n";
        else if ( const auto* con = std::get_if< Conflict >( &r.body ) )
        {
            // A chain through the sorted antecedents: n antecedents give n - 1 edges.
            const Id* prev = nullptr;
            for ( const auto& a : con->antecedents )
            {
                if ( prev )
                    os << "  " << detail::dot_quote( *prev ) << " -> " << detail::dot_quote( a )
                       << " [style=dashed, dir=both, arrowhead=dot, arrowtail=dot, label=" << detail::dot_quote( id )
                       << "];\n";
                prev = &a;
            }
        }
    }
    for ( const auto& p : db.preferences() )
        os << "  " << detail::dot_quote( p.left ) << " -> " << detail::dot_quote( p.right )
           << " [style=dashed, label=" << detail::dot_quote( pref_kind_text( p.kind ) ) << "];\n";
    os << "}\n";
    return os.str();
}

} // namespace roadmapper
