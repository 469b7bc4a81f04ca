// Placeholder main; the CLI is assembled in include/convlab/cli.hpp.
int main() { return 0; }
