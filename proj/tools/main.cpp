#include "app/commands.hpp"

int main(int argc, char** argv) { return scc::app::run_cli(argc, argv); }
