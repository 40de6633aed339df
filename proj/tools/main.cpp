#include "tve/io.hpp"

int main(int argc, char** argv) { return tve::cli_main(argc, argv); }
