#include "twocolor/cli.hpp"

int main(int argc, char** argv) { return twocolor::run_cli(argc, argv); }
