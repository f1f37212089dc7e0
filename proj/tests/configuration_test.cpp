#include "support/fixtures.hpp"
#include "support/testkit.hpp"

using namespace roadmapper;

namespace
{

std::vector< IdSet > members( const EnumerationResult& r )
{
    std::vector< IdSet > out;
    for ( const auto& c : r.configurations )
        out.push_back( c.members );
    std::sort( out.begin(), out.end() );
    return out;
}

} // namespace

TEST( ConMembership, VacuousAndInclusion )
{
    EXPECT_TRUE( con_member( {}, fixtures::from_text( "t a. g b." ) ) );
    const auto db = fixtures::from_text( "t a!." );
    EXPECT_TRUE( con_member( { "a" }, db ) );
    EXPECT_FALSE( con_member( {}, db ) );
    const auto c = fixtures::from_text( "t a. t b. k x: a & b -> false." );
    EXPECT_FALSE( con_member( { "a", "b", "x" }, c ) );
}

TEST( CheckConfiguration, BundledConfigurationsHoldAllSix )
{
    const auto res = enumerate_configurations( fixtures::model( "las.req" ) );
    const auto* s1 = fixtures::containing( res.configurations, { "u21", "u19", "u17", "u5" } );
    ASSERT_NE( s1, nullptr );
    const auto rep = check_configuration( res.database, *s1 );
    EXPECT_TRUE( rep.consistency.holds );
    EXPECT_TRUE( rep.qual_threshold.holds );
    EXPECT_TRUE( rep.quant_threshold.holds );
    EXPECT_TRUE( rep.conformity.holds );
    EXPECT_TRUE( rep.dominance.holds );
    EXPECT_TRUE( rep.minimality.holds );
}

TEST( CheckConfiguration, UnionOfAlternativesIsInconsistent )
{
    const auto res = enumerate_configurations( fixtures::model( "las.req" ) );
    const auto* s1 = fixtures::containing( res.configurations, { "u17" } );
    const auto* s2 = fixtures::containing( res.configurations, { "u16" } );
    ASSERT_TRUE( s1 && s2 );
    IdSet both = s1->members;
    both.insert( s2->members.begin(), s2->members.end() );
    const auto rep = check_configuration( res.database, both );
    EXPECT_FALSE( rep.consistency.holds );
    EXPECT_FALSE( rep.is_configuration() );
}

TEST( CheckConfiguration, RemovingSupportBreaksThreshold )
{
    const auto res = enumerate_configurations( fixtures::model( "las.req" ) );
    auto s = res.configurations.front().members;
    s.erase( "u1" );
    const auto rep = check_configuration( res.database, s );
    EXPECT_FALSE( rep.qual_threshold.holds );
    EXPECT_TRUE( rep.qual_threshold.witness.contains( "q2" ) );
}

TEST( Enumerate, TwoConflictingOperationalizations )
{
    const auto db = fixtures::from_text( "g g1!. t a. t b. k ia!: a -> g1. k ib!: b -> g1. k x!: a & b -> false." );
    const auto res = enumerate_configurations( db );
    EXPECT_EQ( res.configurations.size(), 2u );
    EXPECT_EQ( members( res ), testkit::brute_configurations( res.database ) );
}

TEST( Enumerate, OptionalTaskIsAlwaysIncluded )
{
    const auto db = fixtures::from_text( "g g1!. t a. t b. t c?. k ia!: a -> g1. k ib!: b -> g1. k x!: a & b -> false." );
    const auto res = enumerate_configurations( db );
    ASSERT_EQ( res.configurations.size(), 2u );
    for ( const auto& s : res.configurations )
    {
        EXPECT_TRUE( s.members.contains( "c" ) );
        const auto rep = check_configuration( res.database, s );
        EXPECT_TRUE( rep.dominance.holds );
        EXPECT_TRUE( rep.minimality.holds );
    }
    EXPECT_EQ( members( res ), testkit::brute_configurations( res.database ) );
}

TEST( Enumerate, InconsistentMandatorySetRejectedAtLoad )
{
    EXPECT_FALSE( parse( "t a!. t b!. k x!: a & b -> false. g g!. k i!: a -> g." ).ok() );
}

TEST( Enumerate, CanonicalLabels )
{
    const auto res = enumerate_configurations( fixtures::model( "las.req" ) );
    for ( std::size_t i = 0; i < res.configurations.size(); ++i )
    {
        EXPECT_EQ( res.configurations[ i ].id, "S" + std::to_string( i + 1 ) );
        if ( i > 0 )
            EXPECT_TRUE( canonical_less( res.configurations[ i - 1 ].members, res.configurations[ i ].members ) );
    }
}

TEST( Enumerate, ResourceLimit )
{
    EnumerationLimits limits;
    limits.max_atoms = 3;
    try
    {
        (void)enumerate_configurations( fixtures::model( "las.req" ), limits );
        FAIL();
    }
    catch ( const error& e )
    {
        EXPECT_EQ( e.code(), errc::resource_limit );
    }
}

TEST( Enumerate, Truncation )
{
    EnumerationLimits limits;
    limits.max_results = 5;
    const auto res = enumerate_configurations( fixtures::model( "las.req" ), limits );
    EXPECT_TRUE( res.truncated );
    EXPECT_EQ( res.configurations.size(), 5u );
}

TEST( Enumerate, EveryResultPassesTheChecker )
{
    const auto res = enumerate_configurations( fixtures::model( "las.req" ) );
    ConfigurationChecker ck( res.database );
    for ( const auto& s : res.configurations )
        EXPECT_TRUE( ck.check( s.members ).is_configuration() ) << s.id;
}

TEST( Enumerate, MatchesBruteForceOnRandomDatabases )
{
    testkit::ModelGenSpec spec;
    spec.seed = 51;
    spec.optional_ratio = 0.3;
    testkit::Generator gen( spec );
    for ( int i = 0; i < 100; ++i )
    {
        const auto res = enumerate_configurations( gen.next() );
        EXPECT_EQ( members( res ), testkit::brute_configurations( res.database ) ) << serialize( res.database );
    }
}

TEST( Enumerate, BruteForceOracleRefusesLargeInputs )
{
    testkit::ModelGenSpec spec;
    spec.tasks = 14;
    spec.mandatory_ratio = 0;
    spec.max_free_kt = 64;
    const auto db = testkit::Generator( spec ).next();
    EXPECT_THROW( (void)testkit::brute_configurations( db ), testkit::TooLarge );
}
