#include "support/fixtures.hpp"
#include "support/testkit.hpp"

using namespace roadmapper;

namespace
{

const RequirementsDatabase& timing()
{
    static const auto db = fixtures::from_text( R"(
t a1: t1 = 30sec. t a2: t2 = 60sec. t a3: t3 = 45sec. t a4: t4 = 45sec.
k sum: t6 = t1 + t2 + t3 + t4.
)" );
    return db;
}

} // namespace

TEST( Eval, ExpressionSum )
{
    const auto& e = std::get< Compare >( timing().at( "sum" ).quant()->cond ).rhs;
    EXPECT_EQ( eval_expr( e, { { "t1", 30 }, { "t2", 60 }, { "t3", 45 }, { "t4", 45 } } ), 180.0 );
}

TEST( Eval, ExpressionErrors )
{
    auto code = []( const NumExpr& e, const Assignment& a ) {
        try
        {
            (void)eval_expr( e, a );
        }
        catch ( const error& err )
        {
            return err.code();
        }
        return errc::parse_error;
    };
    EXPECT_EQ( code( NumExpr::var( "x" ) / NumExpr::var( "y" ), { { "x", 1 }, { "y", 0 } } ), errc::division_by_zero );
    EXPECT_THROW( (void)( NumExpr::var( "x" ) / NumExpr::constant( 0 ) ), error );
    EXPECT_EQ( code( NumExpr::var( "x" ), {} ), errc::missing_variable );
    EXPECT_EQ( code( pow( NumExpr::constant( -1 ), NumExpr::constant( 0.5 ) ), {} ), errc::non_finite_result );
}

TEST( Eval, ExpressionMatchesTreeWalkingOracle )
{
    std::mt19937_64 rng( 5 );
    std::uniform_real_distribution< double > u( -5, 5 );
    for ( int i = 0; i < 500; ++i )
    {
        std::function< NumExpr( int ) > gen = [ & ]( int depth ) -> NumExpr {
            if ( depth == 0 || rng() % 3 == 0 )
                return rng() % 2 ? NumExpr::constant( std::round( u( rng ) * 4 ) / 4 ) : NumExpr::var( "x" + std::to_string( rng() % 3 ) );
            auto op = static_cast< NumExpr::Op >( rng() % 4 );
            auto rhs = gen( depth - 1 );
            if ( op == NumExpr::Op::div && rhs.is_constant() && rhs.constant_value() == 0.0 )
                op = NumExpr::Op::add;
            return NumExpr::binary( op, gen( depth - 1 ), std::move( rhs ) );
        };
        const auto e = gen( 4 );
        const Assignment a{ { "x0", u( rng ) }, { "x1", u( rng ) }, { "x2", u( rng ) } };
        const auto expected = testkit::naive_eval( e, a );
        if ( expected )
            EXPECT_DOUBLE_EQ( eval_expr( e, a ), *expected );
        else
            EXPECT_THROW( (void)eval_expr( e, a ), error );
    }
}

TEST( Eval, Conditions )
{
    const ProbEnv env{ { "t2", DistributionSpec::normal( 60, 2025 ) } };
    const ProbCompare at_mean{ "t2", CompareOp::le, NumExpr::constant( 60 ), CompareOp::ge, NumExpr::constant( 0.5 ) };
    EXPECT_TRUE( eval_condition( at_mean, {}, env ) );
    auto bound = [ & ]( double b ) {
        return eval_condition( ProbCompare{ "t2", CompareOp::le, NumExpr::constant( b ), CompareOp::ge, NumExpr::constant( 0.9 ) }, {}, env );
    };
    EXPECT_TRUE( bound( 117.67 ) );
    EXPECT_FALSE( bound( 117.0 ) );
    EXPECT_TRUE( eval_condition( Compare{ NumExpr::var( "t6" ), CompareOp::le, NumExpr::constant( 180 ) }, { { "t6", 180 } }, {} ) );
    EXPECT_THROW( (void)eval_condition( at_mean, {}, {} ), error );
}

TEST( Eval, QuantileOracleAgrees )
{
    EXPECT_NEAR( testkit::quantile_bisect( 60, 2025, 0.9 ), 60 + 1.2815515655 * 45, 1e-4 );
}

TEST( NormalCdf, KnownPoints )
{
    EXPECT_DOUBLE_EQ( normal_cdf( 60, 60, 45 ), 0.5 );
    EXPECT_NEAR( normal_cdf( 105, 60, 45 ), 0.841345, 1e-6 );
    EXPECT_NEAR( normal_cdf( 105, 60, 45 ), testkit::simpson_cdf( 105, 60, 2025 ), 1e-9 );
    EXPECT_LT( normal_cdf( 60 - 20 * 45, 60, 45 ), 1e-12 );
}

TEST( NormalCdf, MonotoneAndBounded )
{
    double prev = 0.0;
    for ( double x = -400; x <= 500; x += 0.5 )
    {
        const double p = normal_cdf( x, 60, 45 );
        EXPECT_GE( p, prev );
        EXPECT_LE( p, 1.0 );
        prev = p;
    }
}

TEST( SatValue, Shapes )
{
    EXPECT_DOUBLE_EQ( sat_value( SatisfactionFn::exp_decay( 1 ), 0 ), 1.0 );
    const auto plateau = SatisfactionFn::plateau_then_decay( 6, 9, 1.0 );
    EXPECT_DOUBLE_EQ( sat_value( plateau, 5 ), 1.0 );
    EXPECT_DOUBLE_EQ( sat_value( plateau, 9 ), 0.0 );
    EXPECT_DOUBLE_EQ( sat_value( plateau, 7.5 ), 0.5 );
    EXPECT_DOUBLE_EQ( sat_value( SatisfactionFn::piecewise_linear( { { 0, 0.6 } } ), 42 ), 0.6 );
}

TEST( SatValue, StaysInUnitIntervalAndMatchesOracle )
{
    std::mt19937_64 rng( 9 );
    std::uniform_real_distribution< double > u( -50, 50 );
    const std::vector< SatisfactionFn > fs{ SatisfactionFn::exp_decay( 0.3 ), SatisfactionFn::plateau_then_decay( 2, 10, 0.7 ),
                                            SatisfactionFn::piecewise_linear( { { -3, 0.1 }, { 0, 1 }, { 4, 0.25 } } ) };
    for ( int i = 0; i < 1000; ++i )
        for ( const auto& f : fs )
        {
            const double x = u( rng );
            double expected = 0.0;
            testkit::naive_sat( f, x, expected );
            const double got = sat_value( f, x );
            EXPECT_GE( got, 0.0 );
            EXPECT_LE( got, 1.0 );
            EXPECT_NEAR( got, expected, 1e-12 );
        }
}

TEST( Val, DirectAssignment )
{
    const auto db = fixtures::from_text( "t a: v = 3." );
    EXPECT_EQ( val( { "a" }, "v", db ), std::set< double >{ 3 } );
}

TEST( Val, TwoAssignments )
{
    const auto db = fixtures::from_text( "t a: v = 3. k b: v = 7." );
    EXPECT_EQ( val( db.ids(), "v", db ), ( std::set< double >{ 3, 7 } ) );
    EXPECT_EQ( val( { "b" }, "v", db ), std::set< double >{ 7 } );
}

TEST( Val, PropagatesThroughRefinement )
{
    EXPECT_EQ( val( timing().ids(), "t6", timing() ), std::set< double >{ 180 } );
    EXPECT_TRUE( val( { "a1", "sum" }, "t6", timing() ).empty() );
}

TEST( Val, RefinementCycleDetected )
{
    const auto db = fixtures::from_text( "k a: x = y + 1. k b: y = x + 1." );
    try
    {
        (void)val( db.ids(), "x", db );
        FAIL();
    }
    catch ( const error& e )
    {
        EXPECT_EQ( e.code(), errc::refinement_cycle );
    }
}

TEST( Val, MatchesNaivePropagation )
{
    testkit::ModelGenSpec spec;
    spec.seed = 31;
    testkit::Generator gen( spec );
    std::mt19937_64 rng( 32 );
    for ( int i = 0; i < 200; ++i )
    {
        const auto db = gen.next();
        IdSet x;
        for ( const auto& id : db.ids() )
            if ( rng() % 3 )
                x.insert( id );
        const auto closed = testkit::naive_closure( db, x );
        const auto vals = testkit::naive_values( db, closed.derived );
        for ( const auto* v : { "x", "y" } )
        {
            std::set< double > expected;
            if ( auto it = vals.find( v ); it != vals.end() )
                expected.insert( it->second.begin(), it->second.end() );
            EXPECT_EQ( val( x, v, db ), expected );
        }
    }
}
