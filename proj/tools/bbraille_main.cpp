#include "bharti/cli.hpp"

int main(int argc, char** argv) { return bharti::run_cli(argc, argv); }
