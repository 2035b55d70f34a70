#include "cylharm/cli.hpp"

int main(int argc, char** argv) { return cylharm::dispatch(argc, argv); }
