#include "roadmapper/cli.hpp"

#include <iostream>

int main( int argc, char** argv ) { return roadmapper::run_cli( argc, argv, std::cout, std::cerr ); }
