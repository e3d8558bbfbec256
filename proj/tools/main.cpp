#include "pcl/cli.hpp"

int main(int argc, char** argv) { return pcl::cli::dispatch(argc, argv); }
