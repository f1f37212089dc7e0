#include "support/fixtures.hpp"
#include "support/testkit.hpp"

using namespace roadmapper;

namespace
{

std::size_t errors( const ParseResult& r )
{
    return std::count_if( r.diagnostics.begin(), r.diagnostics.end(), []( const auto& d ) { return d.severity == Severity::error; } );
}

} // namespace

TEST( Parser, TaskGoalAndImplication )
{
    const auto db = fixtures::from_text( R"(t u1 "locate caller". g p2 "location known". k imp1: u1 -> p2.)" );
    EXPECT_EQ( db.size(), 3u );
    const auto& imp = std::get< Implication >( db.at( "imp1" ).body );
    EXPECT_EQ( imp.antecedents, IdSet{ "u1" } );
    EXPECT_EQ( imp.consequent, "p2" );
    EXPECT_EQ( db.at( "u1" ).description, "locate caller" );
}

TEST( Parser, EmptyInput )
{
    const auto r = parse( "" );
    ASSERT_TRUE( r.ok() );
    EXPECT_TRUE( r.db->empty() );
    EXPECT_TRUE( r.diagnostics.empty() );
}

TEST( Parser, Conflict )
{
    const auto db = fixtures::from_text( "t u2. t u4. k c1: u2 & u4 -> false." );
    EXPECT_EQ( std::get< Conflict >( db.at( "c1" ).body ).antecedents, ( IdSet{ "u2", "u4" } ) );
}

TEST( Parser, ModalityMarkers )
{
    const auto db = fixtures::from_text( "g a!. g b?. g c." );
    EXPECT_EQ( db.at( "a" ).modality, Modality::mandatory );
    EXPECT_EQ( db.at( "b" ).modality, Modality::optional );
    EXPECT_EQ( db.at( "c" ).modality, Modality::plain );
}

TEST( Parser, UnitsScaleToSeconds )
{
    const auto db = fixtures::from_text( "q c6: t6 <= 3min. k w: t = 6hrs. k s: u = 30sec." );
    EXPECT_EQ( std::get< Compare >( db.at( "c6" ).quant()->cond ).rhs.constant_value(), 180.0 );
    EXPECT_EQ( std::get< Compare >( db.at( "w" ).quant()->cond ).rhs.constant_value(), 21600.0 );
    EXPECT_EQ( std::get< Compare >( db.at( "s" ).quant()->cond ).rhs.constant_value(), 30.0 );
}

TEST( Parser, VarianceUnitIsSquared )
{
    const auto db = fixtures::from_text( "k d: t ~ Normal(1min, 2sec)." );
    const auto& n = std::get< Normal >( std::get< Distributed >( db.at( "d" ).quant()->cond ).dist.kind() );
    EXPECT_EQ( n.mean, 60.0 );
    EXPECT_EQ( n.variance, 2.0 );
    const auto db2 = fixtures::from_text( "k d: t ~ Normal(1, 2min)." );
    EXPECT_EQ( std::get< Normal >( std::get< Distributed >( db2.at( "d" ).quant()->cond ).dist.kind() ).variance, 2.0 * 3600.0 );
}

TEST( Parser, ProbabilityBound )
{
    const auto db = fixtures::from_text( "q c2: P(t2 <= 117.67) >= 0.9." );
    const auto& p = std::get< ProbCompare >( db.at( "c2" ).quant()->cond );
    EXPECT_EQ( p.var, "t2" );
    EXPECT_EQ( p.inner, CompareOp::le );
    EXPECT_EQ( p.bound.constant_value(), 117.67 );
    EXPECT_EQ( p.outer, CompareOp::ge );
}

TEST( Parser, ExpressionPrecedence )
{
    const auto db = fixtures::from_text( "k r: y = 1 + 2 * 3 ^ 2 ^ 1 - 4 / 2." );
    const auto& e = std::get< Compare >( db.at( "r" ).quant()->cond ).rhs;
    EXPECT_EQ( testkit::naive_eval( e, {} ), 1.0 + 2.0 * 9.0 - 2.0 );
}

TEST( Parser, UnicodeOperators )
{
    const auto db = fixtures::from_text( "q a: x ≤ 1. q b: x ≥ 1. q c: x ≠ 1." );
    EXPECT_EQ( std::get< Compare >( db.at( "a" ).quant()->cond ).op, CompareOp::le );
    EXPECT_EQ( std::get< Compare >( db.at( "b" ).quant()->cond ).op, CompareOp::ge );
    EXPECT_EQ( std::get< Compare >( db.at( "c" ).quant()->cond ).op, CompareOp::ne );
}

TEST( Parser, SoftgoalAndSatisfactionFunction )
{
    const auto db = fixtures::from_text( R"(s p17: ~ "arrive quickly". satfn t7 = plateau(900, 1350, 1).)" );
    EXPECT_EQ( std::get< Softgoal >( db.at( "p17" ).body ).content, "arrive quickly" );
    ASSERT_NE( db.sat_fn( "t7" ), nullptr );
    EXPECT_EQ( std::get< PlateauThenDecay >( db.sat_fn( "t7" )->kind() ).plateau_end, 900.0 );
}

TEST( Parser, SatisfactionFunctionForms )
{
    EXPECT_EQ( std::get< ExpDecay >( parse_sat_fn( "exp(1)" ).kind() ).rate, 1.0 );
    EXPECT_EQ( std::get< PiecewiseLinear >( parse_sat_fn( "pwl((0, 0.6))" ).kind() ).points.size(), 1u );
    EXPECT_THROW( (void)parse_sat_fn( "cubic(1)" ), error );
    EXPECT_THROW( (void)parse_sat_fn( "exp(1) extra" ), error );
    for ( const auto* text : { "exp(0.5)", "plateau(6, 9, 1)", "pwl((0, 1), (10, 0))" } )
        EXPECT_EQ( format_sat_fn( parse_sat_fn( text ) ), text );
}

TEST( Parser, DiagnosticsCarrySpans )
{
    const auto r = parse( "g p2.\nk i: u99 -> p2.\n", "m.req" );
    ASSERT_FALSE( r.ok() );
    ASSERT_EQ( errors( r ), 1u );
    const auto& d = r.diagnostics.front();
    EXPECT_EQ( d.span.file, "m.req" );
    EXPECT_EQ( d.span.line, 2u );
    EXPECT_NE( d.to_string().find( "m.req:2:" ), std::string::npos );
    EXPECT_NE( d.message.find( "u99" ), std::string::npos );
}

TEST( Parser, RecoversAtStatementBoundaries )
{
    const auto r = parse( "g a #.\ng b.\nq c: x <= .\nk d: a -> zz.\n" );
    EXPECT_FALSE( r.ok() );
    EXPECT_GE( errors( r ), 3u );
}

TEST( Parser, DuplicateIdReported )
{
    const auto r = parse( "t a. g a." );
    ASSERT_FALSE( r.ok() );
    EXPECT_NE( r.diagnostics.front().message.find( "DuplicateId" ), std::string::npos );
}

TEST( Parser, InconsistentMandatorySetRejected )
{
    const auto r = parse( "t a!. t b!. k c!: a & b -> false." );
    ASSERT_FALSE( r.ok() );
    EXPECT_NE( r.diagnostics.front().message.find( "InconsistentMandatorySet" ), std::string::npos );
}

TEST( Parser, SoftgoalInConflictWarns )
{
    const auto r = parse( R"(s a: ~ "x". t b. k c: a & b -> false.)" );
    ASSERT_TRUE( r.ok() );
    ASSERT_EQ( r.diagnostics.size(), 1u );
    EXPECT_EQ( r.diagnostics.front().severity, Severity::warning );
}

TEST( Serializer, EmptyDatabaseIsHeaderOnly )
{
    const auto text = serialize( {} );
    EXPECT_EQ( text.rfind( "//", 0 ), 0u );
    EXPECT_TRUE( parse( text ).db->empty() );
}

TEST( Serializer, PreferenceSurvivesRoundTrip )
{
    const auto db = fixtures::from_text( "t u10. t u13. pref: u10 > u13." );
    const auto back = fixtures::from_text( serialize( db ) );
    ASSERT_EQ( back.preferences().size(), 1u );
    EXPECT_EQ( back.preferences()[ 0 ], ( Preference{ PrefKind::strict, "u10", "u13" } ) );
}

TEST( Serializer, BundledModelsRoundTrip )
{
    for ( const auto* name : { "las.req", "toy.req" } )
    {
        const auto db = fixtures::model( name );
        EXPECT_EQ( fixtures::from_text( serialize( db ) ), db ) << name;
    }
}

TEST( Serializer, GeneratedModelsRoundTrip )
{
    testkit::ModelGenSpec spec;
    spec.syntax_extras = true;
    spec.max_free_kt = 64;
    spec.seed = 77;
    testkit::Generator gen( spec );
    for ( int i = 0; i < 100; ++i )
    {
        const auto db = gen.next();
        const auto text = serialize( db );
        EXPECT_EQ( fixtures::from_text( text ), db ) << text;
    }
}

TEST( Serializer, MinimalParentheses )
{
    const auto db = fixtures::from_text( "k r: y = (a - b) - (c - d) / (e * f) ^ 2." );
    EXPECT_NE( serialize( db ).find( "y = a - b - (c - d) / (e * f) ^ 2" ), std::string::npos );
}
