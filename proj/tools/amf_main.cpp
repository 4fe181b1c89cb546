#include "cli/cli_app.hpp"

int main(int argc, char** argv) { return amf::cli::cli_main(argc, argv); }
