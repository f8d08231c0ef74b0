#include "cmtaylor/cli.hpp"

int main(int argc, char** argv) { return cmtaylor::cli::main_impl(argc, argv); }
