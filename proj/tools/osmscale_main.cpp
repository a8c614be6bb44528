#include "osmscale/cli.hpp"

int main(int argc, char** argv)
{
    return osmscale::cli::main(argc, argv);
}
