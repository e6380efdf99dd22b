#include "socialvec/cli.hpp"

int main(int argc, char** argv) { return socialvec::cli::dispatch(argc, argv); }
