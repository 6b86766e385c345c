// Amalgamated Catch2 translation unit; provides the default test main.
#include <catch2/catch_amalgamated.cpp>
