#include <cstdio>
int main() { std::puts("suskit: not wired yet"); return 1; }
