#include <cstdio>
int main() { std::puts("lvbench cli placeholder"); return 0; }
