#include "ipld/cli.hpp"

int main(int argc, char** argv) { return ipld::run_cli(argc, argv); }
