#include <cstdio>
int main() { std::puts("acceptance: not wired yet"); return 1; }
