#include "mkg2d/cli.hpp"

int main(int argc, char** argv) { return mkg2d::run_cli(argc, argv); }
