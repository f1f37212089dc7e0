#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace roadmapper::detail
{

// Fixed-width dynamic bitset over dense requirement indices.
class Bits
{
    std::vector< std::uint64_t > _words;
    std::size_t _size = 0;

public:
    Bits() = default;
    explicit Bits( std::size_t size ) : _words( ( size + 63 ) / 64, 0 ), _size{ size } {}

    [[nodiscard]] std::size_t size() const noexcept { return _size; }

    void set( std::size_t i ) { _words[ i / 64 ] |= std::uint64_t{ 1 } << ( i % 64 ); }
    void reset( std::size_t i ) { _words[ i / 64 ] &= ~( std::uint64_t{ 1 } << ( i % 64 ) ); }
    [[nodiscard]] bool test( std::size_t i ) const { return ( _words[ i / 64 ] >> ( i % 64 ) ) & 1U; }

    [[nodiscard]] bool any() const
    {
        for ( auto w : _words )
            if ( w != 0 )
                return true;
        return false;
    }

    [[nodiscard]] std::size_t count() const
    {
        std::size_t n = 0;
        for ( auto w : _words )
            n += static_cast< std::size_t >( std::popcount( w ) );
        return n;
    }

    [[nodiscard]] bool subset_of( const Bits& other ) const
    {
        for ( std::size_t i = 0; i < _words.size(); ++i )
            if ( ( _words[ i ] & ~other._words[ i ] ) != 0 )
                return false;
        return true;
    }

    [[nodiscard]] bool intersects( const Bits& other ) const
    {
        for ( std::size_t i = 0; i < _words.size(); ++i )
            if ( ( _words[ i ] & other._words[ i ] ) != 0 )
                return true;
        return false;
    }

    Bits& operator|=( const Bits& other )
    {
        for ( std::size_t i = 0; i < _words.size(); ++i )
            _words[ i ] |= other._words[ i ];
        return *this;
    }

    Bits& operator&=( const Bits& other )
    {
        for ( std::size_t i = 0; i < _words.size(); ++i )
            _words[ i ] &= other._words[ i ];
        return *this;
    }

    // this \ other
    Bits& subtract( const Bits& other )
    {
        for ( std::size_t i = 0; i < _words.size(); ++i )
            _words[ i ] &= ~other._words[ i ];
        return *this;
    }

    friend Bits operator|( Bits lhs, const Bits& rhs ) { return lhs |= rhs; }
    friend Bits operator&( Bits lhs, const Bits& rhs ) { return lhs &= rhs; }
    friend Bits minus( Bits lhs, const Bits& rhs ) { return lhs.subtract( rhs ); }

    template < typename F >
    void for_each( F&& f ) const
    {
        for ( std::size_t w = 0; w < _words.size(); ++w )
        {
            auto word = _words[ w ];
            while ( word != 0 )
            {
                auto bit = static_cast< std::size_t >( std::countr_zero( word ) );
                f( w * 64 + bit );
                word &= word - 1;
            }
        }
    }

    [[nodiscard]] std::vector< std::size_t > indices() const
    {
        std::vector< std::size_t > out;
        for_each( [ & ]( std::size_t i ) { out.push_back( i ); } );
        return out;
    }

    friend bool operator==( const Bits&, const Bits& ) = default;
    friend auto operator<=>( const Bits& a, const Bits& b ) { return a._words <=> b._words; }

    [[nodiscard]] std::size_t hash() const noexcept
    {
        std::size_t h = 1469598103934665603ULL;
        for ( auto w : _words )
            h = ( h ^ std::hash< std::uint64_t >{}( w ) ) * 1099511628211ULL;
        return h;
    }
};

struct BitsHash
{
    std::size_t operator()( const Bits& b ) const noexcept { return b.hash(); }
};

} // namespace roadmapper::detail
