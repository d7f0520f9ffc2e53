# Tests package for HyperBit CLI
