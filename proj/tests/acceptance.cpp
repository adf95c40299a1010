// SPDX-License-Identifier: Apache-2.0
// placeholder, replaced by the full acceptance suite
int main() { return 0; }
