#pragma once

#include "inference.hpp"
#include "model.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace roadmapper
{

struct SourceSpan
{
    std::string file;
    int line = 1;
    int column = 1;

    friend bool operator==( const SourceSpan&, const SourceSpan& ) = default;
};

enum class Severity
{
    error,
    warning
};

struct ParseDiagnostic
{
    Severity severity = Severity::error;
    SourceSpan span;
    std::string message;

    [[nodiscard]] std::string to_string() const
    {
        return span.file + ":" + std::to_string( span.line ) + ":" + std::to_string( span.column ) + ": " +
               ( severity == Severity::error ? "error: " : "warning: " ) + message;
    }
};

struct ParseResult
{
    std::optional< RequirementsDatabase > db; // absent iff some diagnostic is an error
    std::vector< ParseDiagnostic > diagnostics;

    [[nodiscard]] bool ok() const noexcept { return db.has_value(); }
};

namespace detail
{

enum class Tok
{
    ident,
    number,
    string,
    punct,
    end
};

struct Token
{
    Tok kind = Tok::end;
    std::string text; // identifier, punctuation, or unescaped string contents
    double value = 0.0;
    int line = 1;
    int column = 1;
};

struct syntax_error
{
    std::string message;
    int line;
    int column;
};

inline bool ident_start( char c ) { return std::isalpha( static_cast< unsigned char >( c ) ) || c == '_'; }
inline bool ident_char( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_'; }
inline bool reserved_char( char c ) { return ident_char( c ) || c == '/' || c == '@'; }

// Seconds per unit suffix.
inline std::optional< double > unit_factor( std::string_view u )
{
    if ( u == "sec" )
        return 1.0;
    if ( u == "min" )
        return 60.0;
    if ( u == "hrs" )
        return 3600.0;
    return std::nullopt;
}

class Lexer
{
    std::string_view _src;
    std::size_t _pos = 0;
    int _line = 1;
    int _col = 1;

    [[nodiscard]] char peek( std::size_t k = 0 ) const { return _pos + k < _src.size() ? _src[ _pos + k ] : '\0'; }

    void advance( std::size_t n = 1 )
    {
        for ( std::size_t i = 0; i < n && _pos < _src.size(); ++i )
        {
            if ( _src[ _pos ] == '\n' )
            {
                ++_line;
                _col = 1;
            }
            else if ( ( static_cast< unsigned char >( _src[ _pos ] ) & 0xC0 ) != 0x80 )
                ++_col;
            ++_pos;
        }
    }

    bool starts_with( std::string_view s ) const { return _src.substr( _pos, s.size() ) == s; }

public:
    explicit Lexer( std::string_view src ) : _src{ src } {}

    // Error recovery: drop input through the next '.'.
    void skip_statement()
    {
        while ( _pos < _src.size() && peek() != '.' )
            advance();
        advance();
    }

    Token next()
    {
        while ( true )
        {
            while ( _pos < _src.size() && std::isspace( static_cast< unsigned char >( peek() ) ) )
                advance();
            if ( starts_with( "//" ) )
            {
                while ( _pos < _src.size() && peek() != '\n' )
                    advance();
                continue;
            }
            break;
        }
        Token t;
        t.line = _line;
        t.column = _col;
        if ( _pos >= _src.size() )
            return t;

        const char c = peek();
        if ( ident_start( c ) || ( c == '@' && reserved_char( peek( 1 ) ) ) )
        {
            const auto start = _pos;
            const bool reserved = c == '@';
            advance();
            while ( _pos < _src.size() && ( reserved ? reserved_char( peek() ) : ident_char( peek() ) ) )
                advance();
            t.kind = Tok::ident;
            t.text = std::string( _src.substr( start, _pos - start ) );
            return t;
        }
        if ( std::isdigit( static_cast< unsigned char >( c ) ) || ( c == '.' && std::isdigit( static_cast< unsigned char >( peek( 1 ) ) ) ) )
            return number( t );
        if ( c == '"' )
        {
            advance();
            std::string s;
            while ( true )
            {
                if ( _pos >= _src.size() || peek() == '\n' )
                    throw syntax_error{ "unterminated string", t.line, t.column };
                char d = peek();
                if ( d == '"' )
                {
                    advance();
                    break;
                }
                if ( d == '\\' )
                {
                    advance();
                    const char e = peek();
                    if ( e == 'n' )
                        s += '\n';
                    else if ( e == 't' )
                        s += '\t';
                    else if ( e == '"' || e == '\\' )
                        s += e;
                    else
                        throw syntax_error{ "unknown escape sequence", _line, _col };
                    advance();
                    continue;
                }
                s += d;
                advance();
            }
            t.kind = Tok::string;
            t.text = std::move( s );
            return t;
        }

        static constexpr std::pair< std::string_view, std::string_view > multi[] = {
            { "->", "->" }, { ">=", ">=" }, { "<=", "<=" }, { "!=", "!=" }, { "~=", "~=" },
            { "\xE2\x89\xA4", "<=" }, { "\xE2\x89\xA5", ">=" }, { "\xE2\x89\xA0", "!=" },
        };
        for ( const auto& [ spelling, canon ] : multi )
            if ( starts_with( spelling ) )
            {
                advance( spelling.size() );
                t.kind = Tok::punct;
                t.text = std::string( canon );
                return t;
            }
        static constexpr std::string_view single = ".:!?&()~,><=+-*/^";
        if ( single.find( c ) != std::string_view::npos )
        {
            advance();
            t.kind = Tok::punct;
            t.text = std::string( 1, c );
            return t;
        }
        throw syntax_error{ std::string( "unexpected character '" ) + c + "'", t.line, t.column };
    }

private:
    Token number( Token t )
    {
        const auto start = _pos;
        while ( std::isdigit( static_cast< unsigned char >( peek() ) ) )
            advance();
        if ( peek() == '.' && std::isdigit( static_cast< unsigned char >( peek( 1 ) ) ) )
        {
            advance();
            while ( std::isdigit( static_cast< unsigned char >( peek() ) ) )
                advance();
        }
        if ( ( peek() == 'e' || peek() == 'E' ) &&
             ( std::isdigit( static_cast< unsigned char >( peek( 1 ) ) ) ||
               ( ( peek( 1 ) == '-' || peek( 1 ) == '+' ) && std::isdigit( static_cast< unsigned char >( peek( 2 ) ) ) ) ) )
        {
            advance( 2 );
            while ( std::isdigit( static_cast< unsigned char >( peek() ) ) )
                advance();
        }
        std::string text( _src.substr( start, _pos - start ) );
        if ( text.front() == '.' )
            text.insert( text.begin(), '0' );
        double v = 0.0;
        auto res = std::from_chars( text.data(), text.data() + text.size(), v );
        if ( res.ec != std::errc{} || res.ptr != text.data() + text.size() )
            throw syntax_error{ "malformed number '" + text + "'", t.line, t.column };
        if ( ident_start( peek() ) )
        {
            const auto ustart = _pos;
            while ( ident_char( peek() ) )
                advance();
            const auto unit = _src.substr( ustart, _pos - ustart );
            const auto f = unit_factor( unit );
            if ( !f )
                throw syntax_error{ "unknown unit '" + std::string( unit ) + "' (expected sec, min or hrs)", t.line, t.column };
            v *= *f;
            t.text = std::string( unit );
        }
        t.kind = Tok::number;
        t.value = v;
        return t;
    }
};

struct Decl
{
    Requirement req;
    SourceSpan span;
};

struct PrefDecl
{
    Preference pref;
    SourceSpan span;
};

class Parser
{
    std::vector< Token > _toks;
    std::size_t _i = 0;
    std::string _file;
    bool _lex_failed = false;

public:
    std::vector< Decl > decls;
    std::vector< PrefDecl > prefs;
    std::vector< std::pair< std::pair< QuantVar, SatisfactionFn >, SourceSpan > > satfns;
    std::vector< ParseDiagnostic > diags;

    Parser( std::string_view text, std::string file ) : _file{ std::move( file ) }
    {
        Lexer lx( text );
        while ( true )
        {
            try
            {
                auto t = lx.next();
                const bool end = t.kind == Tok::end;
                _toks.push_back( std::move( t ) );
                if ( end )
                    break;
            }
            catch ( const syntax_error& e )
            {
                diags.push_back( { Severity::error, { _file, e.line, e.column }, e.message } );
                // Discard the partial declaration already tokenized.
                while ( !_toks.empty() && !( _toks.back().kind == Tok::punct && _toks.back().text == "." ) )
                    _toks.pop_back();
                lx.skip_statement();
                _lex_failed = true;
            }
        }
    }

    void run()
    {
        while ( cur().kind != Tok::end )
        {
            const auto start = _i;
            try
            {
                declaration();
            }
            catch ( const syntax_error& e )
            {
                diags.push_back( { Severity::error, { _file, e.line, e.column }, e.message } );
                // Recover at the end of the current declaration.
                while ( cur().kind != Tok::end && !is_punct( "." ) )
                    ++_i;
                if ( cur().kind != Tok::end )
                    ++_i;
                if ( _i == start )
                    ++_i;
            }
        }
    }

private:
    [[nodiscard]] const Token& cur() const { return _toks[ std::min( _i, _toks.size() - 1 ) ]; }
    [[nodiscard]] const Token& ahead( std::size_t k ) const { return _toks[ std::min( _i + k, _toks.size() - 1 ) ]; }
    [[nodiscard]] bool is_punct( std::string_view p, std::size_t k = 0 ) const
    {
        return ahead( k ).kind == Tok::punct && ahead( k ).text == p;
    }

    [[noreturn]] void fail( const std::string& msg ) const
    {
        const auto& t = cur();
        throw syntax_error{ msg, t.line, t.column };
    }

    [[nodiscard]] std::string describe( const Token& t ) const
    {
        switch ( t.kind )
        {
        case Tok::ident: return "identifier '" + t.text + "'";
        case Tok::number: return "number";
        case Tok::string: return "string";
        case Tok::punct: return "'" + t.text + "'";
        case Tok::end: return "end of input";
        }
        return "token";
    }

    void expect( std::string_view p )
    {
        if ( !is_punct( p ) )
            fail( "expected '" + std::string( p ) + "', found " + describe( cur() ) );
        ++_i;
    }

    bool accept( std::string_view p )
    {
        if ( !is_punct( p ) )
            return false;
        ++_i;
        return true;
    }

    std::string ident( const char* what )
    {
        if ( cur().kind != Tok::ident )
            fail( std::string( "expected " ) + what + ", found " + describe( cur() ) );
        return _toks[ _i++ ].text;
    }

    double number()
    {
        bool neg = accept( "-" );
        if ( cur().kind != Tok::number )
            fail( "expected a number, found " + describe( cur() ) );
        const double v = _toks[ _i++ ].value;
        return neg ? -v : v;
    }

    SourceSpan span_of( const Token& t ) const { return { _file, t.line, t.column }; }

    void declaration()
    {
        const Token head = cur();
        if ( head.kind != Tok::ident )
            fail( "expected a declaration, found " + describe( head ) );
        if ( head.text == "pref" )
            return preference();
        if ( head.text == "satfn" )
            return satfn();
        Sort sort;
        if ( head.text == "k" )
            sort = Sort::k;
        else if ( head.text == "g" )
            sort = Sort::g;
        else if ( head.text == "q" )
            sort = Sort::q;
        else if ( head.text == "s" )
            sort = Sort::s;
        else if ( head.text == "t" )
            sort = Sort::t;
        else
            fail( "unknown declaration keyword '" + head.text + "' (expected k, g, q, s, t, pref or satfn)" );
        ++_i;

        Requirement r;
        r.id = ident( "a requirement id" );
        if ( accept( "!" ) )
            r.modality = Modality::mandatory;
        else if ( accept( "?" ) )
            r.modality = Modality::optional;

        if ( accept( ":" ) )
        {
            if ( is_relation_ahead() )
            {
                if ( sort != Sort::k )
                    fail( "implications and conflicts are domain assumptions and must be declared with 'k'" );
                r.body = relation();
            }
            else if ( is_punct( "~" ) && ahead( 1 ).kind == Tok::string )
            {
                if ( sort != Sort::s )
                    fail( "only softgoals carry '~ \"content\"'" );
                ++_i;
                r.body = Softgoal{ _toks[ _i++ ].text };
            }
            else
            {
                if ( sort == Sort::g || sort == Sort::s )
                    fail( std::string( "a " ) + ( sort == Sort::g ? "goal" : "softgoal" ) + " cannot carry a numeric condition" );
                r.body = SimpleQuant{ sort, condition() };
            }
            if ( cur().kind == Tok::string )
                r.description = _toks[ _i++ ].text;
        }
        else if ( sort == Sort::s )
        {
            if ( cur().kind != Tok::string )
                fail( "softgoal needs content: s id: ~ \"content\"." );
            r.body = Softgoal{ _toks[ _i++ ].text };
            if ( cur().kind == Tok::string )
                r.description = _toks[ _i++ ].text;
        }
        else
        {
            if ( sort == Sort::q )
                fail( "a quality constraint needs a numeric condition: q id: <condition>." );
            r.body = SimpleProp{ sort, r.id };
            if ( cur().kind == Tok::string )
                r.description = _toks[ _i++ ].text;
        }
        expect( "." );
        decls.push_back( { std::move( r ), span_of( head ) } );
    }

    [[nodiscard]] bool is_relation_ahead() const
    {
        return ahead( 0 ).kind == Tok::ident && ( is_punct( "&", 1 ) || is_punct( "->", 1 ) );
    }

    Body relation()
    {
        IdSet ants;
        ants.insert( ident( "an antecedent id" ) );
        while ( accept( "&" ) )
        {
            auto id = ident( "an antecedent id" );
            if ( !ants.insert( id ).second )
                fail( "antecedent '" + id + "' repeated" );
        }
        expect( "->" );
        auto cons = ident( "a consequent id or 'false'" );
        if ( cons == "false" )
            return Conflict{ std::move( ants ) };
        if ( ants.contains( "false" ) )
            fail( "'false' may only appear as a consequent" );
        return Implication{ std::move( ants ), std::move( cons ) };
    }

    static std::optional< CompareOp > compare_op( const Token& t )
    {
        if ( t.kind != Tok::punct )
            return std::nullopt;
        if ( t.text == ">" )
            return CompareOp::gt;
        if ( t.text == "<" )
            return CompareOp::lt;
        if ( t.text == "=" )
            return CompareOp::eq;
        if ( t.text == ">=" )
            return CompareOp::ge;
        if ( t.text == "<=" )
            return CompareOp::le;
        if ( t.text == "!=" )
            return CompareOp::ne;
        return std::nullopt;
    }

    CompareOp comparison()
    {
        auto op = compare_op( cur() );
        if ( !op )
            fail( "expected a comparison (<, <=, =, !=, >=, >), found " + describe( cur() ) );
        ++_i;
        return *op;
    }

    NumCondition condition()
    {
        if ( cur().kind == Tok::ident && cur().text == "P" && is_punct( "(", 1 ) )
        {
            _i += 2;
            ProbCompare p;
            p.var = ident( "a quantitative variable" );
            p.inner = comparison();
            if ( p.inner == CompareOp::eq || p.inner == CompareOp::ne )
                fail( "probability bounds use <, <=, >= or >" );
            p.bound = expr();
            expect( ")" );
            p.outer = comparison();
            if ( p.outer == CompareOp::ne )
                fail( "'!=' is not a probability comparison" );
            p.level = expr();
            return p;
        }
        if ( cur().kind == Tok::ident && is_punct( "~", 1 ) )
        {
            Distributed d{ cur().text, DistributionSpec::normal( 0.0, 1.0 ) };
            _i += 2;
            const auto name = ident( "a distribution name" );
            if ( name != "Normal" )
                fail( "unsupported distribution '" + name + "' (only Normal is built in)" );
            expect( "(" );
            const double mean = number();
            expect( "," );
            const Token vt = cur();
            double variance = number();
            // A variance unit means unit squared; the lexer already applied one factor.
            if ( vt.kind == Tok::number && !vt.text.empty() )
            {
                const double f = *unit_factor( vt.text );
                variance *= f;
            }
            expect( ")" );
            try
            {
                d.dist = DistributionSpec::normal( mean, variance );
            }
            catch ( const error& e )
            {
                fail( e.what() );
            }
            return d;
        }
        Compare c;
        c.lhs = expr();
        c.op = comparison();
        c.rhs = expr();
        return c;
    }

    NumExpr expr()
    {
        auto lhs = term();
        while ( is_punct( "+" ) || is_punct( "-" ) )
        {
            const auto op = cur().text == "+" ? NumExpr::Op::add : NumExpr::Op::sub;
            ++_i;
            lhs = NumExpr::binary( op, std::move( lhs ), term() );
        }
        return lhs;
    }

    NumExpr term()
    {
        auto lhs = power();
        while ( is_punct( "*" ) || is_punct( "/" ) )
        {
            const auto op = cur().text == "*" ? NumExpr::Op::mul : NumExpr::Op::div;
            ++_i;
            const Token at = cur();
            auto rhs = power();
            try
            {
                lhs = NumExpr::binary( op, std::move( lhs ), std::move( rhs ) );
            }
            catch ( const error& e )
            {
                throw syntax_error{ e.what(), at.line, at.column };
            }
        }
        return lhs;
    }

    // Right-associative.
    NumExpr power()
    {
        auto base = primary();
        if ( accept( "^" ) )
            return NumExpr::binary( NumExpr::Op::pow, std::move( base ), power() );
        return base;
    }

    NumExpr primary()
    {
        if ( is_punct( "-" ) || cur().kind == Tok::number )
            return NumExpr::constant( number() );
        if ( cur().kind == Tok::ident )
            return NumExpr::var( _toks[ _i++ ].text );
        if ( accept( "(" ) )
        {
            auto e = expr();
            expect( ")" );
            return e;
        }
        fail( "expected a number, variable or '(', found " + describe( cur() ) );
    }

    void preference()
    {
        const Token head = cur();
        ++_i;
        expect( ":" );
        Preference p;
        p.left = ident( "a requirement id" );
        if ( accept( ">" ) )
            p.kind = PrefKind::strict;
        else if ( accept( ">=" ) )
            p.kind = PrefKind::weak;
        else if ( accept( "~=" ) )
            p.kind = PrefKind::indifferent;
        else
            fail( "expected '>', '>=' or '~=', found " + describe( cur() ) );
        p.right = ident( "a requirement id" );
        expect( "." );
        prefs.push_back( { std::move( p ), span_of( head ) } );
    }

    void satfn()
    {
        const Token head = cur();
        ++_i;
        const auto var = ident( "a quantitative variable" );
        expect( "=" );
        auto f = sat_fn_body();
        expect( "." );
        satfns.push_back( { { var, std::move( f ) }, span_of( head ) } );
    }

public:
    SatisfactionFn sat_fn_body()
    {
        const auto kind = ident( "exp, plateau or pwl" );
        const Token at = cur();
        expect( "(" );
        try
        {
            if ( kind == "exp" )
            {
                const double rate = number();
                expect( ")" );
                return SatisfactionFn::exp_decay( rate );
            }
            if ( kind == "plateau" )
            {
                const double a = number();
                expect( "," );
                const double b = number();
                expect( "," );
                const double l = number();
                expect( ")" );
                return SatisfactionFn::plateau_then_decay( a, b, l );
            }
            if ( kind == "pwl" )
            {
                std::vector< std::pair< double, double > > pts;
                do
                {
                    expect( "(" );
                    const double x = number();
                    expect( "," );
                    const double mu = number();
                    expect( ")" );
                    pts.emplace_back( x, mu );
                } while ( accept( "," ) );
                expect( ")" );
                return SatisfactionFn::piecewise_linear( std::move( pts ) );
            }
        }
        catch ( const error& e )
        {
            throw syntax_error{ e.what(), at.line, at.column };
        }
        throw syntax_error{ "unknown satisfaction function '" + kind + "' (expected exp, plateau or pwl)", at.line, at.column };
    }

    [[nodiscard]] bool at_end() const { return cur().kind == Tok::end; }
    [[nodiscard]] bool lex_failed() const { return _lex_failed; }
};

} // namespace detail

// Parses a `.req` text. Structural and mandatory-consistency errors become diagnostics
// located at the offending declaration.
[[nodiscard]] inline ParseResult parse( std::string_view text, const std::string& file = "<input>" )
{
    ParseResult out;
    detail::Parser p( text, file );
    p.run();
    out.diagnostics = std::move( p.diags );
    auto error_at = [ & ]( const SourceSpan& s, std::string msg ) {
        out.diagnostics.push_back( { Severity::error, s, std::move( msg ) } );
    };

    std::map< Id, const detail::Decl* > by_id;
    for ( const auto& d : p.decls )
    {
        try
        {
            detail::check_body_shape( d.req );
        }
        catch ( const error& e )
        {
            error_at( d.span, e.what() );
        }
        if ( !by_id.emplace( d.req.id, &d ).second )
            error_at( d.span, "DuplicateId: requirement '" + d.req.id + "' is already declared at line " +
                                  std::to_string( by_id[ d.req.id ]->span.line ) );
    }
    for ( const auto& d : p.decls )
        for ( const auto& ref : d.req.references() )
        {
            auto it = by_id.find( ref );
            if ( it == by_id.end() )
                error_at( d.span, "DanglingReference: '" + d.req.id + "' refers to undeclared '" + ref + "'" );
            else if ( !it->second->req.is_simple() )
                error_at( d.span, "IllFormed: '" + d.req.id + "' refers to relation '" + ref + "'" );
            else if ( std::holds_alternative< Conflict >( d.req.body ) && std::holds_alternative< Softgoal >( it->second->req.body ) )
                out.diagnostics.push_back(
                    { Severity::warning, d.span, "softgoal '" + ref + "' participates in conflict '" + d.req.id + "'" } );
        }
    for ( const auto& pd : p.prefs )
        for ( const auto* side : { &pd.pref.left, &pd.pref.right } )
        {
            auto it = by_id.find( *side );
            if ( it == by_id.end() )
                error_at( pd.span, "DanglingReference: preference refers to undeclared '" + *side + "'" );
            else if ( !it->second->req.is_simple() )
                error_at( pd.span, "IllFormed: preference over relation '" + *side + "'" );
        }
    std::map< QuantVar, SatisfactionFn > sat_fns;
    for ( const auto& [ entry, span ] : p.satfns )
        if ( !sat_fns.emplace( entry.first, entry.second ).second )
            error_at( span, "satisfaction function for '" + entry.first + "' declared twice" );

    auto has_error = [ & ] {
        return std::any_of( out.diagnostics.begin(), out.diagnostics.end(),
                            []( const ParseDiagnostic& d ) { return d.severity == Severity::error; } );
    };
    if ( has_error() )
        return out;

    std::vector< Requirement > reqs;
    std::vector< Preference > prefs;
    for ( const auto& d : p.decls )
        reqs.push_back( d.req );
    for ( const auto& pd : p.prefs )
        prefs.push_back( pd.pref );
    auto span_for = [ & ]( const std::string& message ) {
        // Point at the first declaration named in the message, else the first declaration.
        for ( const auto& d : p.decls )
            if ( message.find( "'" + d.req.id + "'" ) != std::string::npos )
                return d.span;
        return p.decls.empty() ? SourceSpan{ file, 1, 1 } : p.decls.front().span;
    };
    try
    {
        auto db = RequirementsDatabase::from_parts( reqs, std::move( prefs ), std::move( sat_fns ) );
        validate_database( db );
        out.db = std::move( db );
    }
    catch ( const error& e )
    {
        error_at( span_for( e.what() ), e.what() );
    }
    return out;
}

// Parses a satisfaction function written as in a satfn declaration body, e.g. "exp(1)".
[[nodiscard]] inline SatisfactionFn parse_sat_fn( std::string_view text )
{
    detail::Parser p( text, "<argument>" );
    if ( !p.diags.empty() )
        throw error( errc::parse_error, p.diags.front().message );
    try
    {
        auto f = p.sat_fn_body();
        if ( !p.at_end() )
            throw error( errc::parse_error, "trailing input after satisfaction function" );
        return f;
    }
    catch ( const detail::syntax_error& e )
    {
        throw error( errc::parse_error, e.message );
    }
}

namespace detail
{

[[nodiscard]] inline std::string quote( const std::string& s )
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
        if ( c == '\t' )
        {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

[[nodiscard]] inline int precedence( NumExpr::Op op )
{
    switch ( op )
    {
    case NumExpr::Op::add:
    case NumExpr::Op::sub: return 1;
    case NumExpr::Op::mul:
    case NumExpr::Op::div: return 2;
    case NumExpr::Op::pow: return 3;
    }
    return 0;
}

[[nodiscard]] inline std::string_view op_text( NumExpr::Op op )
{
    switch ( op )
    {
    case NumExpr::Op::add: return "+";
    case NumExpr::Op::sub: return "-";
    case NumExpr::Op::mul: return "*";
    case NumExpr::Op::div: return "/";
    case NumExpr::Op::pow: return "^";
    }
    return "?";
}

// Prints e, parenthesized when its precedence is below min_prec.
inline void print_expr( std::ostream& os, const NumExpr& e, int min_prec = 0 )
{
    if ( e.is_constant() )
    {
        os << format_number( e.constant_value() );
        return;
    }
    if ( const auto* v = e.var_name() )
    {
        os << *v;
        return;
    }
    const auto& b = std::get< NumExpr::Binary >( e.node() );
    const int p = precedence( b.op );
    const bool paren = p < min_prec;
    if ( paren )
        os << '(';
    const bool right_assoc = b.op == NumExpr::Op::pow;
    print_expr( os, *b.lhs, right_assoc ? p + 1 : p );
    os << ' ' << op_text( b.op ) << ' ';
    print_expr( os, *b.rhs, right_assoc ? p : p + 1 );
    if ( paren )
        os << ')';
}

inline void print_condition( std::ostream& os, const NumCondition& c )
{
    if ( const auto* cmp = std::get_if< Compare >( &c ) )
    {
        print_expr( os, cmp->lhs );
        os << ' ' << compare_op_text( cmp->op ) << ' ';
        print_expr( os, cmp->rhs );
    }
    else if ( const auto* d = std::get_if< Distributed >( &c ) )
    {
        const auto& n = std::get< Normal >( d->dist.kind() );
        os << d->var << " ~ Normal(" << format_number( n.mean ) << ", " << format_number( n.variance ) << ')';
    }
    else
    {
        const auto& p = std::get< ProbCompare >( c );
        os << "P(" << p.var << ' ' << compare_op_text( p.inner ) << ' ';
        print_expr( os, p.bound );
        os << ") " << compare_op_text( p.outer ) << ' ';
        print_expr( os, p.level );
    }
}

inline void print_sat_fn( std::ostream& os, const SatisfactionFn& f )
{
    std::visit(
        [ & ]( const auto& k ) {
            using T = std::decay_t< decltype( k ) >;
            if constexpr ( std::is_same_v< T, ExpDecay > )
                os << "exp(" << format_number( k.rate ) << ')';
            else if constexpr ( std::is_same_v< T, PlateauThenDecay > )
                os << "plateau(" << format_number( k.plateau_end ) << ", " << format_number( k.zero_at ) << ", "
                   << format_number( k.level ) << ')';
            else
            {
                os << "pwl(";
                for ( std::size_t i = 0; i < k.points.size(); ++i )
                    os << ( i ? ", " : "" ) << '(' << format_number( k.points[ i ].first ) << ", "
                       << format_number( k.points[ i ].second ) << ')';
                os << ')';
            }
        },
        f.kind() );
}

} // namespace detail

[[nodiscard]] inline std::string format_condition( const NumCondition& c )
{
    std::ostringstream os;
    detail::print_condition( os, c );
    return os.str();
}

[[nodiscard]] inline std::string format_sat_fn( const SatisfactionFn& f )
{
    std::ostringstream os;
    detail::print_sat_fn( os, f );
    return os.str();
}

// Deterministic text form; parse(serialize(db)) reproduces db.
[[nodiscard]] inline std::string serialize( const RequirementsDatabase& db )
{
    std::ostringstream os;
    os << "// requirements database\n";
    for ( const auto& [ id, r ] : db.requirements() )
    {
        os << sort_letter( r.sort() ) << ' ' << id;
        if ( r.modality == Modality::mandatory )
            os << '!';
        else if ( r.modality == Modality::optional )
            os << '?';
        std::visit(
            [ & ]( const auto& b ) {
                using T = std::decay_t< decltype( b ) >;
                if constexpr ( std::is_same_v< T, SimpleQuant > )
                {
                    os << ": ";
                    detail::print_condition( os, b.cond );
                }
                else if constexpr ( std::is_same_v< T, Softgoal > )
                    os << ": ~ " << detail::quote( b.content );
                else if constexpr ( std::is_same_v< T, Implication > || std::is_same_v< T, Conflict > )
                {
                    os << ": ";
                    bool first = true;
                    for ( const auto& a : b.antecedents )
                    {
                        os << ( first ? "" : " & " ) << a;
                        first = false;
                    }
                    if constexpr ( std::is_same_v< T, Implication > )
                        os << " -> " << b.consequent;
                    else
                        os << " -> false";
                }
            },
            r.body );
        if ( !r.description.empty() )
            os << ' ' << detail::quote( r.description );
        os << ".\n";
    }
    for ( const auto& p : db.preferences() )
        os << "pref: " << p.left << ' ' << pref_kind_text( p.kind ) << ' ' << p.right << ".\n";
    for ( const auto& [ v, f ] : db.sat_fns() )
    {
        os << "satfn " << v << " = ";
        detail::print_sat_fn( os, f );
        os << ".\n";
    }
    return os.str();
}

} // namespace roadmapper
